#pragma once

#include <memory>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "twophase/harmonics.hpp"

namespace twophase {

/// Thrown when the collocation least-squares system is too ill-conditioned to
/// trust (raise n_colloc or lower the solver truncation).
class ResolutionError : public std::runtime_error {
 public:
  explicit ResolutionError(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown when a perturbed annulus stops being an annulus (surfaces touching
/// or inner radius collapsing).
class DegenerateAnnulus : public std::runtime_error {
 public:
  explicit DegenerateAnnulus(const std::string& what) : std::runtime_error(what) {}
};

/// A zonally perturbed annulus: inner boundary rho + sum eta[k] Z_k(theta),
/// outer boundary 1 + sum xi[k] Z_k(theta), with Z_k the amplitude-normalized
/// zonal shapes (Z_k(0) = 1). Coefficients are displacement amplitudes at the
/// pole, so "inner mode-2 amplitude 0.02" literally means eta[2] = 0.02.
struct PerturbedAnnulus {
  int dim = 2;
  double rho = 0.5;
  std::vector<double> eta;  ///< inner coefficients, degree 0..K
  std::vector<double> xi;   ///< outer coefficients, degree 0..K

  int truncation() const { return static_cast<int>(eta.size()) - 1; }

  /// Throws std::invalid_argument (bad parameters) or DegenerateAnnulus
  /// (surfaces crossing on a dense angular scan).
  void validate() const;

  static PerturbedAnnulus trivial(int dim, double rho, int truncation);
};

struct SolverOptions {
  int solver_truncation = -1;  ///< highest harmonic degree in the field ansatz; -1: domain K + 4
  int collocation = -1;        ///< Dirichlet collocation nodes per boundary; -1: 4 (K_solver + 1)
  double max_condition = 1e12; ///< column-pivoted QR condition estimate guard

  int resolve_truncation(int domain_K) const {
    return solver_truncation > 0 ? solver_truncation : domain_K + 4;
  }
  int resolve_collocation(int solver_K) const {
    return collocation > 0 ? collocation : 4 * (solver_K + 1);
  }
};

/// Field value with polar derivatives and the Cartesian gradient/Hessian of
/// an axisymmetric function evaluated at a point of the meridian half-plane
/// (the e1-e2 plane; the full picture follows by rotation).
struct FieldSample {
  double u = 0.0;
  double u_r = 0.0, u_theta = 0.0;
  double u_rr = 0.0, u_rtheta = 0.0, u_thetatheta = 0.0;
  Eigen::VectorXd grad;   ///< dim components
  Eigen::MatrixXd hess;   ///< dim x dim
  /// |Hess|^2 - (trace Hess)^2 / dim, assembled from exact second derivatives.
  double cs_deficit_density = 0.0;
};

/// Solution of the Dirichlet problem
///   Laplace u = N in the perturbed annulus,
///   u = (|x|^2 - T(rho))/(2 sigma_c) on the inner boundary,
///   u = 0 on the outer boundary,
/// by a harmonic zonal expansion around the particular solution |x|^2/2:
///   u = |x|^2/2 + sum_k [a_k r^k + b_k (r/rho)^{2-N-k}] Z_k(theta)
/// (log branch for N = 2, k = 0; the decaying family is scaled by its value
/// at rho to keep the collocation columns O(1)). Coefficients from a
/// column-pivoted QR least-squares fit of both boundary conditions.
class SpectralSolution {
 public:
  int dim() const { return dim_; }
  double sigma_c() const { return sigma_c_; }
  double transmission() const { return T_; }
  double scale_radius() const { return rho_; }
  int truncation() const { return K_; }
  const std::vector<double>& growing_coeffs() const { return a_; }
  const std::vector<double>& decaying_coeffs() const { return b_; }
  /// max Dirichlet mismatch at the collocation nodes
  double bc_residual() const { return bc_residual_; }
  /// diagonal-ratio condition estimate of the collocation matrix
  double condition() const { return condition_; }

  FieldSample eval(double r, double theta) const;

 private:
  friend SpectralSolution solve_dirichlet(const PerturbedAnnulus&, double, const SolverOptions&);
  int dim_ = 2;
  double sigma_c_ = 2.0;
  double T_ = 0.0;
  double rho_ = 0.5;
  int K_ = 0;
  std::vector<double> a_, b_;
  double bc_residual_ = 0.0;
  double condition_ = 0.0;
  std::shared_ptr<const ZonalBasis> basis_;
};

SpectralSolution solve_dirichlet(const PerturbedAnnulus& domain, double sigma_c,
                                 const SolverOptions& opts = {});

/// The two overdetermined flux residuals of a solved annulus:
///   F1 = <x - grad u, nu> on the inner boundary,
///   F2 = <grad u, nu> - 1 on the outer boundary,
/// sampled on a projection quadrature and resolved into amplitude-convention
/// zonal modes c_k = <F, Z_k> / ||Z_k||^2 up to the domain truncation.
struct OverdetResidual {
  std::vector<double> inner_modes;  ///< modes of F1
  std::vector<double> outer_modes;  ///< modes of F2
  double inner_sup = 0.0;
  double outer_sup = 0.0;

  double sup() const { return std::max(inner_sup, outer_sup); }
  double mode_norm() const;
};

OverdetResidual overdet_residual(const SpectralSolution& sol, const PerturbedAnnulus& domain,
                                 int projection_nodes = -1);

}  // namespace twophase
