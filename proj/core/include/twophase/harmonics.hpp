#pragma once

#include <vector>

#include <Eigen/Dense>

namespace twophase {

/// Eigenvalue of the Laplace-Beltrami operator on the unit sphere S^{N-1}
/// for spherical harmonics of degree k: k (k + N - 2). Valid for any N >= 2.
double harmonic_eigenvalue(int k, int dim);

/// Zonal (axisymmetric) spherical harmonics on S^{N-1}, N in {2, 3}, as
/// functions of the polar angle theta in [0, pi] ([0, 2*pi) for N = 2).
///
/// Two normalizations are exposed:
///   - shape():  amplitude-normalized profiles Z_k with Z_k(0) = 1, i.e.
///               cos(k theta) for N = 2 and P_k(cos theta) for N = 3.
///               Surface perturbations are expanded in these, so a coefficient
///               reads directly as the radial displacement at the pole.
///   - eval():   L2(S^{N-1})-normalized harmonics Y_k = n_k Z_k.
///
/// The constants n_k are computed once by quadrature in the constructor and
/// cached; tests compare them against the closed forms 1/sqrt(pi) etc.
/// Derivatives come from differentiated three-term recurrences, not finite
/// differences, so they are usable inside curvature formulas.
class ZonalBasis {
 public:
  /// max_degree: largest degree k that may be requested.
  /// Throws std::invalid_argument unless dim in {2, 3} and max_degree >= 0.
  ZonalBasis(int dim, int max_degree);

  int dim() const { return dim_; }
  int max_degree() const { return max_degree_; }

  // Amplitude-normalized profile Z_k and its theta-derivatives.
  double shape(int k, double theta) const;
  double shape_d1(int k, double theta) const;
  double shape_d2(int k, double theta) const;
  /// Z_k'(theta) / sin(theta), evaluated analytically (finite at the poles).
  /// Needed for the azimuthal curvature/Hessian terms when N = 3.
  double shape_d1_over_sin(int k, double theta) const;
  /// ||Z_k||^2 on S^{N-1} (with the full surface measure, so e.g. 2*pi for
  /// the constant mode when N = 2).
  double shape_norm_sq(int k) const;

  // L2-normalized harmonic Y_k = n_k Z_k and derivatives.
  double eval(int k, double theta) const;
  double eval_d1(int k, double theta) const;
  double eval_d2(int k, double theta) const;
  double eval_d1_over_sin(int k, double theta) const;
  double norm_const(int k) const;

 private:
  void check_degree(int k) const;
  int dim_;
  int max_degree_;
  std::vector<double> norm_;  // n_k, cached
};

/// Quadrature rule for integrals over S^{N-1} of zonal integrands,
/// sum_j w_j f(theta_j) ~ integral of f over the sphere (weights contain the
/// sin^{N-2} factor and the measure of the azimuthal fibre).
///   N = 2: uniform periodic trapezoid on [0, 2*pi); exact for trigonometric
///          polynomials of degree <= n - 1.
///   N = 3: Gauss-Legendre in cos(theta) scaled by 2*pi; exact for
///          polynomials in cos(theta) of degree <= 2n - 1.
struct AngularQuadrature {
  int dim = 2;
  std::vector<double> theta;
  std::vector<double> weight;

  int size() const { return static_cast<int>(theta.size()); }
  double integrate(const std::vector<double>& samples) const;
};

/// Throws std::invalid_argument for n < 2 or dim not in {2, 3}.
AngularQuadrature build_quadrature(int dim, int n);

/// Nodes/weights of the n-point Gauss-Legendre rule on [-1, 1], ascending.
/// Computed by Newton iteration on P_n with Chebyshev initial guesses.
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

/// An axisymmetric closed surface given as a polar graph r(theta) about the
/// origin, sampled at a fixed set of angles together with the first two
/// derivatives of r. dr_over_sin = r'(theta)/sin(theta) is carried separately
/// (analytic for zonal expansions) so pole-adjacent curvature formulas stay
/// finite for N = 3.
struct SurfaceGraph {
  int dim = 2;
  std::vector<double> theta;
  std::vector<double> r;
  std::vector<double> dr;
  std::vector<double> ddr;
  std::vector<double> dr_over_sin;

  int size() const { return static_cast<int>(theta.size()); }
};

/// Builds the polar graph base + sum_k coeffs[k] * Z_k(theta) at the given
/// angles. coeffs are amplitude-convention zonal coefficients; the expansion
/// and its derivatives are evaluated analytically from the basis recurrences.
SurfaceGraph zonal_surface(const ZonalBasis& basis, double base,
                           const std::vector<double>& coeffs,
                           const std::vector<double>& thetas);

/// Pointwise differential geometry of a polar-graph surface. With
/// s = sqrt(r^2 + r'^2), the outward unit normal at x = r(theta) omega(theta)
/// is nu = (r omega - r' omega') / s where omega' = d omega / d theta.
struct SurfaceGeometry {
  std::vector<double> nu_rad;          ///< <nu, omega>  = r / s
  std::vector<double> nu_tan;          ///< <nu, omega'> = -r' / s
  std::vector<double> support;         ///< <x, nu> = r^2 / s
  std::vector<double> area_factor;     ///< dS relative to the unit-sphere weight: r^{N-2} s
  std::vector<double> kappa_meridian;  ///< principal curvature of the meridian curve
  std::vector<double> mean_curvature;  ///< H, normalized so H = 1/R on a sphere of radius R
  std::vector<double> xtau_sq;         ///< |x_tau|^2, tangential part of the position
  std::vector<double> contraction;     ///< <D_tau nu x_tau, x_tau> = kappa_meridian |x_tau|^2
};

SurfaceGeometry surface_geometry(const SurfaceGraph& g);

/// Splits gradient samples into tangential part and normal component:
/// grad f = grad_tau f + f_nu nu. Vectors are rows of the input matrices.
/// Throws std::invalid_argument on shape mismatch or non-unit normals.
void tangential_split(const Eigen::MatrixXd& gradients, const Eigen::MatrixXd& normals,
                      Eigen::MatrixXd& tangential, Eigen::VectorXd& normal_component);

}  // namespace twophase
