#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "twophase/annulus.hpp"

namespace twophase {

/// Thrown when the pinned-amplitude Newton iteration fails to converge; the
/// best residual reached travels with the exception so callers can distinguish
/// a near-miss from a structural impossibility (e.g. pinning a mode that
/// supports no nontrivial branch).
class NewtonFailure : public std::runtime_error {
 public:
  NewtonFailure(const std::string& what, double best_residual, int iterations)
      : std::runtime_error(what), best_residual(best_residual), iterations(iterations) {}
  double best_residual;
  int iterations;
};

struct NewtonOptions {
  double tol = 1e-9;          ///< sup-norm target for the projected residual modes
  int max_iterations = 20;
  double fd_step = 1e-6;      ///< central finite-difference step for the Jacobian
  double max_condition = 1e12;
};

/// One accepted point of a bifurcation branch: the pinned mode k* has inner
/// amplitude exactly t; everything else (remaining inner modes, all outer
/// modes, the base radius rho) solved for.
struct BranchPoint {
  double t = 0.0;
  PerturbedAnnulus domain;
  double residual_modes = 0.0;  ///< sup of the projected residual modes at acceptance
  double residual_sup = 0.0;    ///< pointwise sup of both flux residuals
  int newton_iterations = 0;
};

/// Solves the overdetermined system with the degree-k* inner amplitude pinned
/// to t, starting from `initial` (whose eta[k_star] is overwritten by t).
/// Unknowns: eta_k (k != k*), xi_0..K, rho. Jacobian by central differences,
/// step by column-pivoted QR with rank truncation (the trivial branch has a
/// structurally null rho-direction at t = 0, which the rank cutoff absorbs).
BranchPoint newton_solve(const PerturbedAnnulus& initial, double sigma_c, int k_star, double t,
                         const NewtonOptions& nopts = {}, const SolverOptions& sopts = {});

/// A traced branch emanating from the critical radius of mode k*.
struct BranchDiagram {
  int dim = 2;
  double sigma_c = 2.0;
  int k_star = 2;
  double critical_rho = 0.0;
  double beta = 0.0, gamma = 0.0;  ///< kernel direction (inner, outer amplitude)
  std::vector<BranchPoint> points; ///< t = 0 first, then the requested steps
  /// Small-amplitude tangent probe: ratio xi[k*]/eta[k*] at t = tangent_t,
  /// to be compared with gamma/beta.
  double tangent_t = 0.0;
  double tangent_ratio = 0.0;
};

/// Traces t = 0 -> t_max in `steps` uniform increments with secant
/// prediction, plus the tangent probe at t = 1e-3 * critical rho. Throws
/// NewtonFailure/ResolutionError/DegenerateAnnulus on the first failed point.
BranchDiagram trace_branch(int dim, double sigma_c, int k_star, double t_max, int steps,
                           const NewtonOptions& nopts = {}, const SolverOptions& sopts = {});

/// Independent certificates for an accepted branch point, computed at higher
/// resolution than the accepting solve:
///   - boundary-data match on the traced inner boundary (Dirichlet trace and
///     the flux datum <x, nu>),
///   - outer flux constancy,
///   - interior maximum principle (u < 0 strictly inside the annulus).
struct BranchCertificates {
  double refined_residual_sup = 0.0;  ///< flux residuals re-solved at higher truncation
  double dirichlet_sup = 0.0;         ///< inner Dirichlet trace mismatch, refined nodes
  double flux_sup = 0.0;              ///< inner flux-datum mismatch, refined nodes
  double max_interior_u = 0.0;        ///< should be < 0
  int interior_samples = 0;
};

BranchCertificates verify_branch_point(const BranchPoint& point, double sigma_c,
                                       const SolverOptions& sopts = {});

/// Probes whether a pinned mode supports a nontrivial solution near radius
/// rho: runs the pinned Newton solve and, if it stalls, re-solves with the
/// pin released (at fixed rho) to exhibit the collapse of the amplitude back
/// toward the trivial branch. Modes 0 and 1 never sustain (their linearization
/// is invertible at every radius); modes k >= 2 sustain at rho = R*(k).
struct ModeSustainResult {
  int k = 0;
  bool sustained = false;
  double pinned_residual = 0.0;     ///< best residual of the pinned attempt
  double collapsed_amplitude = 0.0; ///< |eta_k| after releasing the pin
};

ModeSustainResult probe_mode_sustain(int dim, double sigma_c, int k, double t, double rho,
                                     const NewtonOptions& nopts = {},
                                     const SolverOptions& sopts = {});

}  // namespace twophase
