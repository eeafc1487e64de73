#pragma once

#include <utility>

namespace twophase {

/// Parameters of the concentric two-phase torsion configuration: the inclusion
/// B_rho with conductivity sigma_c sits inside the unit ball where the
/// conductivity is 1, and div(sigma grad u) = N with u = 0 on the unit sphere.
struct PhaseConfig {
  int dim = 2;          ///< ambient dimension N >= 2
  double sigma_c = 2.0; ///< inclusion conductivity, > 0
  double rho = 0.5;     ///< inclusion radius, in (0, 1)

  /// sigma_c == 1 collapses the problem to the classical one-phase torsion
  /// function; bifurcation machinery rejects it, the counterexample builder
  /// accepts it as a degenerate reference case.
  bool single_phase() const { return sigma_c == 1.0; }

  /// Throws std::invalid_argument on out-of-range parameters.
  void validate() const;
};

/// Flux-matching constant of the radial solution: the inner phase reads
/// (|x|^2 - T)/(2 sigma_c) with T = (1 - sigma_c) rho^2 + sigma_c, which glues
/// continuously to (|x|^2 - 1)/2 at |x| = rho with matching sigma-weighted
/// normal derivative.
double transmission_constant(const PhaseConfig& config);

/// The explicit radial solution of the concentric configuration.
struct RadialSolution {
  PhaseConfig config;
  double T = 0.0;

  /// u(r); inner branch for r <= rho, outer branch otherwise.
  double value(double r) const;
  /// u'(r)
  double derivative(double r) const;
};

RadialSolution radial_solution(const PhaseConfig& config);

/// Residuals of the boundary/interface conditions on the trivial branch,
/// aggregated per surface: first = inclusion sphere (branch continuity,
/// sigma-weighted flux glue, and the overdetermined flux datum u_nu = <x,nu>),
/// second = outer sphere (Dirichlet zero and u'(1) = 1). Both vanish for a
/// correctly glued solution; the overload taking a RadialSolution exists so
/// the self-test's mutation hook can feed in a perturbed transmission
/// constant and watch the first component light up.
std::pair<double, double> trivial_residual(const RadialSolution& u);
std::pair<double, double> trivial_residual(const PhaseConfig& config);

/// The same configuration rescaled so the inclusion is the unit ball: maps
/// (B_rho, B_1) to (B_1, B_R) with R = 1/rho; the inner quadratic becomes
/// (|y|^2 - lambda^2)/(2 sigma_c) with lambda^2 = sigma_c R^2 + 1 - sigma_c.
/// Exposed because several integral identities are stated in that frame.
struct UnitInnerFrame {
  double outer_radius = 0.0;
  double lambda_sq = 0.0;
};

UnitInnerFrame rescale_to_unit_inner(const PhaseConfig& config);

}  // namespace twophase
