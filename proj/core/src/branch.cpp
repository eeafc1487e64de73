#include "twophase/branch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "twophase/linearization.hpp"
#include "twophase/radial.hpp"

namespace twophase {

namespace {

/// Default branch truncation above the pinned mode. Empirically the smallest
/// margin for which the pointwise flux residual of the traced branch stays
/// below 1e-8 up to amplitude 0.02 (the spectral tail of the residual decays
/// by roughly one decade per two retained modes at that amplitude).
constexpr int kBranchHeadroom = 10;

/// The square nonlinear system behind both the pinned continuation solve and
/// the released-pin collapse probe. State layouts:
///   pinned:   [eta_k (k != k_star), xi_0..K, rho],  eta_{k_star} = t fixed
///   released: [eta_0..K, xi_0..K],                  rho fixed
struct BranchSystem {
  int dim;
  double sigma_c;
  int K;
  int k_star;       // pinned mode (ignored when released)
  double t;         // pinned amplitude
  bool pin_active;
  double fixed_rho; // used when !pin_active
  SolverOptions sopts;

  int size() const { return 2 * K + 2; }

  PerturbedAnnulus domain(const Eigen::VectorXd& u) const {
    PerturbedAnnulus d;
    d.dim = dim;
    d.eta.assign(K + 1, 0.0);
    d.xi.assign(K + 1, 0.0);
    if (pin_active) {
      int idx = 0;
      for (int k = 0; k <= K; ++k) {
        if (k == k_star) {
          d.eta[k] = t;
        } else {
          d.eta[k] = u[idx++];
        }
      }
      for (int k = 0; k <= K; ++k) d.xi[k] = u[K + k];
      d.rho = u[2 * K + 1];
    } else {
      for (int k = 0; k <= K; ++k) d.eta[k] = u[k];
      for (int k = 0; k <= K; ++k) d.xi[k] = u[K + 1 + k];
      d.rho = fixed_rho;
    }
    return d;
  }

  Eigen::VectorXd residual(const Eigen::VectorXd& u, double* sup_out = nullptr) const {
    const PerturbedAnnulus d = domain(u);
    const SpectralSolution sol = solve_dirichlet(d, sigma_c, sopts);
    const OverdetResidual res = overdet_residual(sol, d);
    Eigen::VectorXd F(size());
    for (int k = 0; k <= K; ++k) {
      F[k] = res.inner_modes[k];
      F[K + 1 + k] = res.outer_modes[k];
    }
    if (sup_out) *sup_out = res.sup();
    return F;
  }
};

struct NewtonOutcome {
  Eigen::VectorXd state;
  double residual_modes;
  double residual_sup;
  int iterations;
};

NewtonOutcome run_newton(const BranchSystem& sys, Eigen::VectorXd u, const NewtonOptions& nopts) {
  double sup = 0.0;
  Eigen::VectorXd F = sys.residual(u, &sup);
  double best = F.cwiseAbs().maxCoeff();
  for (int it = 0; it <= nopts.max_iterations; ++it) {
    const double fnorm = F.cwiseAbs().maxCoeff();
    if (fnorm <= nopts.tol)
      return NewtonOutcome{u, fnorm, sup, it};
    if (it == nopts.max_iterations) break;

    Eigen::MatrixXd J(sys.size(), sys.size());
    const double h = nopts.fd_step;
    for (int j = 0; j < sys.size(); ++j) {
      Eigen::VectorXd up = u, um = u;
      up[j] += h;
      um[j] -= h;
      J.col(j) = (sys.residual(up) - sys.residual(um)) / (2.0 * h);
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(J);
    const auto& diag = qr.matrixR().diagonal();
    const double cond = std::abs(diag[0]) / std::max(std::abs(diag[sys.size() - 1]),
                                                     std::numeric_limits<double>::min());
    // Rank truncation absorbs structurally null directions (the base radius
    // is free along the trivial branch); an unusable Jacobian only counts as
    // singular if the resulting step goes nowhere.
    qr.setThreshold(1e-12);
    const Eigen::VectorXd step = qr.solve(F);

    bool accepted = false;
    for (double damp : {1.0, 0.5, 0.25, 0.1}) {
      const Eigen::VectorXd trial = u - damp * step;
      try {
        double trial_sup = 0.0;
        const Eigen::VectorXd Ft = sys.residual(trial, &trial_sup);
        const double tnorm = Ft.cwiseAbs().maxCoeff();
        if (tnorm < fnorm || tnorm <= nopts.tol) {
          u = trial;
          F = Ft;
          sup = trial_sup;
          best = std::min(best, tnorm);
          accepted = true;
          break;
        }
      } catch (const DegenerateAnnulus&) {
        continue;  // overshoot; damp harder
      } catch (const std::invalid_argument&) {
        // Structural inputs are fixed across iterations, so this can only be
        // a trial step leaving the admissible set (rho outside (0, 1)): same
        // overshoot treatment.
        continue;
      }
    }
    if (!accepted) {
      if (cond > nopts.max_condition)
        throw NewtonFailure("newton_solve: singular Jacobian (condition estimate " +
                                std::to_string(cond) + ") and no productive step",
                            best, it);
      throw NewtonFailure("newton_solve: stalled at residual " + std::to_string(best), best, it);
    }
  }
  throw NewtonFailure("newton_solve: residual " + std::to_string(best) + " after " +
                          std::to_string(nopts.max_iterations) + " iterations",
                      best, nopts.max_iterations);
}

Eigen::VectorXd pack_pinned(const PerturbedAnnulus& d, int k_star) {
  const int K = d.truncation();
  Eigen::VectorXd u(2 * K + 2);
  int idx = 0;
  for (int k = 0; k <= K; ++k)
    if (k != k_star) u[idx++] = d.eta[k];
  for (int k = 0; k <= K; ++k) u[K + k] = d.xi[k];
  u[2 * K + 1] = d.rho;
  return u;
}

}  // namespace

BranchPoint newton_solve(const PerturbedAnnulus& initial, double sigma_c, int k_star, double t,
                         const NewtonOptions& nopts, const SolverOptions& sopts) {
  initial.validate();
  const int K = initial.truncation();
  if (k_star < 0 || k_star > K)
    throw std::invalid_argument("newton_solve: pinned mode outside the truncation range");
  BranchSystem sys{initial.dim, sigma_c, K, k_star, t, true, 0.0, sopts};
  const NewtonOutcome out = run_newton(sys, pack_pinned(initial, k_star), nopts);
  BranchPoint p;
  p.t = t;
  p.domain = sys.domain(out.state);
  p.residual_modes = out.residual_modes;
  p.residual_sup = out.residual_sup;
  p.newton_iterations = out.iterations;
  return p;
}

BranchDiagram trace_branch(int dim, double sigma_c, int k_star, double t_max, int steps,
                           const NewtonOptions& nopts, const SolverOptions& sopts) {
  if (steps < 1) throw std::invalid_argument("trace_branch: steps must be >= 1");
  if (!(t_max > 0.0)) throw std::invalid_argument("trace_branch: t_max must be positive");
  BranchDiagram diagram;
  diagram.dim = dim;
  diagram.sigma_c = sigma_c;
  diagram.k_star = k_star;
  diagram.critical_rho = critical_radius(dim, k_star);
  const auto kernel = kernel_vector(dim, sigma_c, k_star);
  diagram.beta = kernel[0];
  diagram.gamma = kernel[1];
  const double slope = diagram.gamma / diagram.beta;

  const int K = k_star + kBranchHeadroom;
  auto kernel_start = [&](double t) {
    PerturbedAnnulus d = PerturbedAnnulus::trivial(dim, diagram.critical_rho, K);
    d.eta[k_star] = t;
    d.xi[k_star] = t * slope;
    return d;
  };

  // Trivial anchor point (kept in the diagram so CSV output starts at t = 0).
  {
    BranchPoint p0;
    p0.t = 0.0;
    p0.domain = PerturbedAnnulus::trivial(dim, diagram.critical_rho, K);
    const SpectralSolution sol = solve_dirichlet(p0.domain, sigma_c, sopts);
    const OverdetResidual res = overdet_residual(sol, p0.domain);
    double m = 0.0;
    for (int k = 0; k <= K; ++k)
      m = std::max({m, std::abs(res.inner_modes[k]), std::abs(res.outer_modes[k])});
    p0.residual_modes = m;
    p0.residual_sup = res.sup();
    diagram.points.push_back(std::move(p0));
  }

  // Tangent probe near the bifurcation point.
  {
    const double tp = 1e-3 * diagram.critical_rho;
    const BranchPoint probe = newton_solve(kernel_start(tp), sigma_c, k_star, tp, nopts, sopts);
    diagram.tangent_t = tp;
    diagram.tangent_ratio = probe.domain.xi[k_star] / probe.domain.eta[k_star];
  }

  for (int j = 1; j <= steps; ++j) {
    const double t = t_max * j / steps;
    PerturbedAnnulus start = kernel_start(t);
    const size_t n = diagram.points.size();
    if (n >= 3) {
      // secant prediction from the last two accepted nontrivial points
      const PerturbedAnnulus& a = diagram.points[n - 2].domain;
      const PerturbedAnnulus& b = diagram.points[n - 1].domain;
      const double ta = diagram.points[n - 2].t, tb = diagram.points[n - 1].t;
      const double w = (t - tb) / (tb - ta);
      for (int k = 0; k <= K; ++k) {
        start.eta[k] = b.eta[k] + w * (b.eta[k] - a.eta[k]);
        start.xi[k] = b.xi[k] + w * (b.xi[k] - a.xi[k]);
      }
      start.rho = b.rho + w * (b.rho - a.rho);
    } else if (n == 2) {
      const PerturbedAnnulus& b = diagram.points[1].domain;
      const double scale = t / diagram.points[1].t;
      for (int k = 0; k <= K; ++k) {
        start.eta[k] = b.eta[k] * scale;
        start.xi[k] = b.xi[k] * scale;
      }
      start.rho = b.rho;
    }
    diagram.points.push_back(newton_solve(start, sigma_c, k_star, t, nopts, sopts));
  }
  return diagram;
}

BranchCertificates verify_branch_point(const BranchPoint& point, double sigma_c,
                                       const SolverOptions& sopts) {
  const PerturbedAnnulus& d = point.domain;
  const int K = d.truncation();

  BranchCertificates cert;
  {
    // Residual stability under refinement: same domain, richer field ansatz.
    SolverOptions refined = sopts;
    refined.solver_truncation = sopts.resolve_truncation(K) + 4;
    refined.collocation = (3 * sopts.resolve_collocation(refined.solver_truncation)) / 2;
    const SpectralSolution sol = solve_dirichlet(d, sigma_c, refined);
    const OverdetResidual res = overdet_residual(sol, d);
    cert.refined_residual_sup = res.sup();
  }

  const SpectralSolution sol = solve_dirichlet(d, sigma_c, sopts);
  const int n_fine = 4 * std::max(2 * sol.truncation() + 6, 48) / 2;
  ZonalBasis basis(d.dim, K);
  AngularQuadrature quad = build_quadrature(d.dim, n_fine);
  const SurfaceGraph inner = zonal_surface(basis, d.rho, d.eta, quad.theta);
  const SurfaceGraph outer = zonal_surface(basis, 1.0, d.xi, quad.theta);
  const SurfaceGeometry gin = surface_geometry(inner);

  for (int j = 0; j < quad.size(); ++j) {
    const double r = inner.r[j], th = inner.theta[j];
    const FieldSample fs = sol.eval(r, th);
    const double dirichlet = std::abs(fs.u - (r * r - sol.transmission()) /
                                                 (2.0 * sigma_c));
    const double u_nu = fs.u_r * gin.nu_rad[j] + (fs.u_theta / r) * gin.nu_tan[j];
    const double flux = std::abs(gin.support[j] - u_nu);
    cert.dirichlet_sup = std::max(cert.dirichlet_sup, dirichlet);
    cert.flux_sup = std::max(cert.flux_sup, flux);
  }

  // Interior maximum principle on a shell-filling grid strictly between the
  // boundaries.
  cert.max_interior_u = -std::numeric_limits<double>::infinity();
  const int radial_samples = 25;
  for (int j = 0; j < quad.size(); j += std::max(1, quad.size() / 40)) {
    for (int i = 0; i < radial_samples; ++i) {
      const double frac = (i + 0.5) / radial_samples;
      const double r = inner.r[j] + frac * (outer.r[j] - inner.r[j]);
      const FieldSample fs = sol.eval(r, inner.theta[j]);
      cert.max_interior_u = std::max(cert.max_interior_u, fs.u);
      ++cert.interior_samples;
    }
  }
  return cert;
}

ModeSustainResult probe_mode_sustain(int dim, double sigma_c, int k, double t, double rho,
                                     const NewtonOptions& nopts, const SolverOptions& sopts) {
  const int K = std::max(k, 2) + kBranchHeadroom;
  ModeSustainResult result;
  result.k = k;
  PerturbedAnnulus start = PerturbedAnnulus::trivial(dim, rho, K);
  start.eta[k] = t;
  try {
    const BranchPoint p = newton_solve(start, sigma_c, k, t, nopts, sopts);
    result.sustained = true;
    result.pinned_residual = p.residual_modes;
    result.collapsed_amplitude = std::abs(p.domain.eta[k]);
    return result;
  } catch (const NewtonFailure& failure) {
    result.sustained = false;
    result.pinned_residual = failure.best_residual;
  } catch (const DegenerateAnnulus&) {
    result.sustained = false;
    result.pinned_residual = std::numeric_limits<double>::quiet_NaN();
  } catch (const ResolutionError&) {
    // Chasing the unsatisfiable pin can drag rho far enough toward 0 that the
    // collocation system degenerates before the step is rejected; equally a
    // "no solution down this road" signature.
    result.sustained = false;
    result.pinned_residual = std::numeric_limits<double>::quiet_NaN();
  }
  // Release the pin at fixed rho and let Newton fall back to whatever actually
  // solves the system there; for k in {0, 1} that is the trivial branch.
  BranchSystem released{dim, sigma_c, K, k, t, false, rho, sopts};
  Eigen::VectorXd u = Eigen::VectorXd::Zero(released.size());
  u[k] = t;
  NewtonOptions relaxed = nopts;
  relaxed.max_iterations = std::max(nopts.max_iterations, 30);
  const NewtonOutcome out = run_newton(released, u, relaxed);
  const PerturbedAnnulus final_domain = released.domain(out.state);
  result.collapsed_amplitude = std::abs(final_domain.eta[k]);
  return result;
}

}  // namespace twophase
