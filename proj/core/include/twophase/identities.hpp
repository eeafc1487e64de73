#pragma once

#include <functional>

#include <Eigen/Dense>

#include "twophase/harmonics.hpp"

namespace twophase {

/// |B_1| in R^N and |S^{N-1}|, any N >= 1.
double unit_ball_volume(int dim);
double unit_sphere_area(int dim);

/// The integral identity underlying the rigidity arguments decomposes the
/// Cauchy-Schwarz deficit of a two-phase torsion-type potential u
/// (div(sigma grad u) = N, inclusion D with conductivity sigma_c inside
/// Omega, u = 0 on the outer boundary) as
///
///     integral over Omega \ D of (-u) (|Hess u|^2 - (Delta u)^2 / N)
///        = I + II + III,
///
/// valid when u restricted to D is the off-center quadratic
/// (|x|^2 - lambda^2)/(2 sigma_c) -- coordinates centered at the interior
/// radiality point. I lives on the outer boundary and involves a free
/// translation vector xi; II and III live on the interface.
///
/// The terms are computed by surface quadrature on axisymmetric geometry;
/// for a spherical interface D = B_1(z) the II/III integrals collapse to the
/// closed forms below, which is what the randomized cross-checks pin.

/// Spherical inclusion of radius 1 centered at z = z1 * e1 (axisymmetric
/// placement; general centers reduce to this by rotation).
struct OffsetBallConfig {
  int dim = 2;
  double sigma_c = 2.0;
  double z1 = 0.0;       ///< center offset along the symmetry axis
  double lambda = 1.0;   ///< quadratic level parameter of the inner phase
};

/// Outer-boundary term
///   I = 1/2 * integral over the outer surface of u_nu^2 (u_nu - <x - xi, nu>).
/// The surface is a polar graph about the coordinate origin; shift is the
/// offset of that origin from the radiality center (positions entering the
/// integrand are x - shift * e1), and xi = xi1 * e1.
double term_I(const AngularQuadrature& quad, const SurfaceGraph& outer,
              const SurfaceGeometry& geom, const std::vector<double>& u_nu,
              double shift, double xi1);

/// Interface term II for a spherical interface, by quadrature:
///   (1/sigma_c)(1/sigma_c - 1) * integral over the sphere of
///     <x,nu>(<x,nu>^2 - |x|^2)
///     + (lambda^2 - |x|^2)/2 * [ <D_tau nu x_tau, x_tau>/sigma_c
///                                + (N-1)(1 - H <x,nu>) <x,nu> ].
double term_II_quadrature(const OffsetBallConfig& config, const AngularQuadrature& quad);

/// Closed form of II for D = B_1(z):
///   (1/sigma_c)(1/sigma_c - 1)^2 (N-1) (lambda^2 - |z|^2 - 1)/2 * |B_1| |z|^2.
double term_II_closed(const OffsetBallConfig& config);

/// Interface term III (the only xi-dependent interface piece), by quadrature:
///   integral of N u <xi,nu> + <xi,nu>/2 [ (1 - 1/sigma_c^2)<x,nu>^2
///     + |x|^2/sigma_c^2 ] - (1 - 1/sigma_c)<x,nu>^2 <xi,nu>
///     - <x,nu><xi,x>/sigma_c
/// with u the inner quadratic trace on the sphere.
double term_III_quadrature(const OffsetBallConfig& config, const AngularQuadrature& quad,
                           double xi1);

/// Closed form of III for D = B_1(z): (1/sigma_c - 1) <z, xi> |B_1|.
double term_III_closed(const OffsetBallConfig& config, double xi1);

/// Gradient of III in xi. For the unit ball: (1/sigma_c - 1) z |B_1| (e1
/// component only by axisymmetry; returned as a length-dim vector).
Eigen::VectorXd grad_xi_III_closed(const OffsetBallConfig& config);

/// The same gradient from the general-interface stationarity form
///   (N/sigma_c + 1/sigma_c^2) * bulk moment of D
///   + integral over the interface of
///       (1/sigma_c - 1/2 - 1/(2 sigma_c^2)) <x,nu>^2 nu - <x,nu> x / sigma_c,
/// evaluated by quadrature on the sphere (bulk moment of a ball is exact).
/// Reduces to grad_xi_III_closed; the reduction is a test oracle.
Eigen::VectorXd grad_xi_III_surface(const OffsetBallConfig& config,
                                    const AngularQuadrature& quad);

/// Volume integral of (-u) * density over the axisymmetric shell between the
/// sphere |x| = inner_radius and the polar graph outer, with a Gauss-Legendre
/// rule of radial_order per angular node. density is typically the pointwise
/// Cauchy-Schwarz deficit |Hess u|^2 - (Delta u)^2/N supplied in closed form.
struct DeficitResult {
  double value = 0.0;
  /// |value - same integral at ~half the radial order|; a Richardson-style
  /// under-resolution flag (the caller decides what is acceptable).
  double refinement_delta = 0.0;
  /// min over quadrature nodes of (-u); negative values mean the maximum
  /// principle precondition is violated (reported, not fatal).
  double min_minus_u = 0.0;
};

DeficitResult deficit_integral(const AngularQuadrature& quad, double inner_radius,
                               const SurfaceGraph& outer, int radial_order,
                               const std::function<double(double, double)>& u,
                               const std::function<double(double, double)>& density);

/// Everything verify_identity needs about a translated two-phase potential:
/// geometry in the original (computational) frame plus the shift to the
/// radiality-centered frame in which the identity is stated.
struct TwoPhaseFrame {
  int dim = 2;
  double sigma_c = 2.0;
  double lambda_sq = 0.0;    ///< inner quadratic parameter, shifted frame
  double inner_radius = 1.0; ///< interface sphere |x| = R in the original frame
  double shift = 0.0;        ///< radiality center = shift * e1 (original frame)
  SurfaceGraph outer;        ///< outer boundary, polar graph about the original origin
  AngularQuadrature quad;    ///< angular rule matching outer.theta
  /// field samples in original-frame polar coordinates (r, theta):
  std::function<double(double, double)> u;         ///< value, already level-shifted so u = 0 on the outer boundary
  std::function<double(double, double)> u_r;       ///< radial derivative
  std::function<double(double, double)> u_theta;   ///< angular derivative
  std::function<double(double, double)> cs_density;///< |Hess u|^2 - (Delta u)^2/N
};

struct IdentityReport {
  double deficit = 0.0;
  double term_i = 0.0;
  double term_ii = 0.0;
  double term_iii = 0.0;
  double xi1 = 0.0;
  double residual = 0.0;           ///< |deficit - (I + II + III)|
  double relative_residual = 0.0;  ///< residual / max(|deficit|, |I|, |II|, |III|)
  double interface_trace_gap = 0.0;///< sup over the interface of |u - quadratic|, precondition diagnostic
  double outer_trace_sup = 0.0;    ///< sup |u| on the sampled outer surface
  double min_minus_u = 0.0;
  double refinement_delta = 0.0;
};

/// Evaluates both sides of the identity on the given frame with translation
/// vector xi = xi1 * e1 (shifted-frame coordinates). radial_order controls the
/// deficit rule. Pure computation: thresholds live with the callers.
IdentityReport verify_identity(const TwoPhaseFrame& frame, double xi1, int radial_order);

}  // namespace twophase
