#pragma once

#include <array>

namespace twophase {

class ZonalBasis;

/// Radial profiles of degree-k harmonics on an annulus: the growing solution
/// s_k(r) = r^k and the decaying one t_k(r) = r^{2-N-k}, with t_0 = log r in
/// the plane (the only degenerate pairing). Closed forms valid for any N >= 2.
struct RadialModeBasis {
  int dim = 2;
  int k = 0;

  double s(double r) const;
  double ds(double r) const;
  double dds(double r) const;
  double t(double r) const;
  double dt(double r) const;
  double ddt(double r) const;
  bool log_branch() const { return dim == 2 && k == 0; }
};

/// Coefficients of the degree-k shape-derivative field on the annulus
/// rho < |x| < 1. The field for inner/outer boundary perturbations
/// (eta, xi) = (beta Y_k, gamma Y_k) is
///   u'(r, theta) = [(beta A + gamma C) s_k(r) + (beta B + gamma D) t_k(r)] Y_k(theta),
/// harmonic in the annulus, with boundary data
///   u' = ((1 - sigma_c)/sigma_c) R eta   on |x| = R,
///   u' = -xi                             on |x| = 1.
/// A..D solve the resulting 2x2 systems; closed forms below, log branch for
/// N = 2, k = 0.
struct ModeCoefficients {
  int dim = 2;
  int k = 0;
  double sigma_c = 2.0;
  double R = 0.5;
  double A = 0.0, B = 0.0, C = 0.0, D = 0.0;
  RadialModeBasis radial;
};

/// Throws std::invalid_argument for R outside (0,1), sigma_c <= 0, sigma_c = 1
/// (no inclusion contrast, the linearization degenerates), k < 0 or dim < 2.
ModeCoefficients mode_coefficients(int dim, double sigma_c, double R, int k);

/// Evaluator for one directional shape-derivative field.
struct LinearizedField {
  ModeCoefficients coeffs;
  double beta = 0.0;
  double gamma = 0.0;

  /// radial factor f(r) multiplying Y_k
  double radial_part(double r) const;
  double radial_derivative(double r) const;
  /// f'' + (N-1) f'/r - k(k+N-2) f / r^2; vanishes identically (harmonicity).
  double ode_residual(double r) const;
  /// full value f(r) Y_k(theta) with the L2-normalized harmonic
  double value(double r, double theta, const ZonalBasis& basis) const;
};

LinearizedField linearized_field(const ModeCoefficients& coeffs, double beta, double gamma);

/// Frechet derivative of the two overdetermined residuals with respect to a
/// degree-k boundary perturbation pair at the trivial branch, as the 2x2
/// matrix M(R, k) acting on (beta, gamma):
///   row 1: -d_nu u' on the inclusion sphere   (inner flux datum),
///   row 2:  d_nu u' + xi on the unit sphere   (outer flux datum).
struct FrechetMatrix {
  int dim = 2;
  int k = 0;
  double sigma_c = 2.0;
  double R = 0.5;
  double a = 0.0;  ///< inner response to inner perturbation
  double b = 0.0;  ///< inner response to outer perturbation
  double c = 0.0;  ///< outer response to inner perturbation
  double d = 0.0;  ///< outer response to outer perturbation

  double det() const { return a * d - b * c; }
  std::array<double, 2> apply(double beta, double gamma) const {
    return {a * beta + b * gamma, c * beta + d * gamma};
  }
};

FrechetMatrix frechet_matrix(int dim, double sigma_c, double R, int k);

/// det M(R, k) via the entry closed forms.
double det_frechet(int dim, double sigma_c, double R, int k);

/// det M(R, k) via the factored polynomial representation
///   ((sigma_c - 1)/sigma_c) g(R, k) / (R^{N-2+2k} - 1)^2,
/// g quadratic in R^{N-2+2k}; separate closed forms for k = 0, 1. Agrees with
/// det_frechet to roundoff -- the redundancy is the cross-check.
double det_frechet_factored(int dim, double sigma_c, double R, int k);

/// Entrywise d/dR of M(R, k), by closed-form differentiation.
FrechetMatrix frechet_matrix_dR(int dim, double sigma_c, double R, int k);

/// det of the entrywise-dR matrix; closed form
///   ((1 - sigma_c)/sigma_c) (N+2k-2)^2 (N+k-1)(k-1) R^{N+2k-4} / (R^{N-2+2k} - 1)^2,
/// vanishing identically at k = 1.
double det_frechet_dR(int dim, double sigma_c, double R, int k);

/// The radius R*(k) in (0, 1) where det M(., k) vanishes, for k >= 2:
///   R*^{N-2+2k} = 1 - (N + 2k - 2) / (k (N + k - 1)).
/// Independent of sigma_c. The numerator N + 2k - 2 is the one consistent
/// with the determinant polynomial (for N = 2, k = 2 it gives R*^4 = 1/3, the
/// root of 6 x^2 - 8 x + 2). Throws std::invalid_argument for k < 2 (no root
/// in (0, 1) for k = 0, 1: det M never vanishes there).
double critical_radius(int dim, int k);

/// The same radius found by bisection on det M(., k) over [1e-6, 1 - 1e-6]
/// (sign scan at 1000 points, then bisection to 1e-13). sigma_c only scales
/// the determinant, so any admissible value gives the same root; it is a
/// parameter here precisely so tests can verify that.
double critical_radius_bisection(int dim, double sigma_c, int k);

/// Kernel direction (beta, gamma) of M(R*(k), k), unit Euclidean norm, first
/// nonzero component positive. Proportional to (-b, a) by the zero
/// determinant.
std::array<double, 2> kernel_vector(int dim, double sigma_c, int k);

}  // namespace twophase
