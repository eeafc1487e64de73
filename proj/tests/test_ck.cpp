#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "twophase/ck.hpp"
#include "twophase/identities.hpp"

using namespace twophase;

namespace {

constexpr double kPi = std::numbers::pi;

/// u as a function of Cartesian coordinates in the meridian frame
/// (e1, e_perp[, azimuthal]); theta is the angle from the e1 axis.
double value_cart(const CKSolution& sol, double x1, double x2, double x3 = 0.0) {
  const double r = std::sqrt(x1 * x1 + x2 * x2 + x3 * x3);
  const double theta = std::atan2(std::hypot(x2, x3), x1);
  return sol.value(r, theta);
}

}  // namespace

TEST_CASE("canonical plane configuration has simple rational coefficients") {
  const CKSolution sol = exterior_cauchy_solution(2, 2.0, 1.0, 0.1);
  CHECK(std::abs(sol.a0 - (-0.2475)) <= 1e-15);
  CHECK(std::abs(sol.a1 - (-0.075)) <= 1e-15);
  CHECK(std::abs(sol.b1 - 0.025) <= 1e-15);
}

TEST_CASE("Cauchy data reproduced on the interface sphere") {
  struct Probe {
    int dim;
    double sigma_c, R, eps;
  };
  for (const Probe& p : std::vector<Probe>{
           {2, 2.0, 1.0, 0.1}, {3, 0.5, 1.2, 0.15}, {2, 1.0, 1.0, 0.3}, {3, 5.0, 0.7, 0.2}}) {
    const CKSolution sol = exterior_cauchy_solution(p.dim, p.sigma_c, p.R, p.eps);
    for (int i = 0; i <= 40; ++i) {
      const double th = kPi * i / 40;
      const double c = std::cos(th);
      // trace of the off-center paraboloid and its radial derivative
      const double f = (p.R * p.R - 2 * p.eps * p.R * c + p.eps * p.eps) / (2 * p.sigma_c);
      const double g = p.R - p.eps * c;
      CHECK(std::abs(sol.value(p.R, th) - f) <= 1e-13);
      CHECK(std::abs(sol.radial_derivative(p.R, th) - g) <= 1e-13);
      CHECK(std::abs(sol.interior_value(p.R, th) - f) <= 1e-15);
    }
  }
}

TEST_CASE("Hessian: exact trace, finite-difference entries, deficit algebra") {
  struct Probe {
    int dim;
    double sigma_c, R, eps, r, theta;
  };
  for (const Probe& p : std::vector<Probe>{{2, 2.0, 1.0, 0.1, 1.4, 0.8},
                                           {3, 0.5, 1.2, 0.15, 1.7, 1.1}}) {
    const CKSolution sol = exterior_cauchy_solution(p.dim, p.sigma_c, p.R, p.eps);
    const Eigen::MatrixXd H = sol.hessian(p.r, p.theta);
    REQUIRE(H.rows() == p.dim);
    REQUIRE(H.cols() == p.dim);
    CHECK(std::abs(H.trace() - p.dim) <= 1e-12);

    // cross-check every entry against central differences of the value
    const double x1 = p.r * std::cos(p.theta), x2 = p.r * std::sin(p.theta);
    const double h = 1e-4;
    auto at = [&](double d1, double d2, double d3) {
      return value_cart(sol, x1 + d1, x2 + d2, d3);
    };
    for (int i = 0; i < p.dim; ++i) {
      for (int j = 0; j < p.dim; ++j) {
        double fd;
        if (i == j) {
          double dp[3] = {0, 0, 0};
          dp[i] = h;
          fd = (at(dp[0], dp[1], dp[2]) - 2 * at(0, 0, 0) + at(-dp[0], -dp[1], -dp[2])) / (h * h);
        } else {
          double di[3] = {0, 0, 0}, dj[3] = {0, 0, 0};
          di[i] = h;
          dj[j] = h;
          fd = (at(di[0] + dj[0], di[1] + dj[1], di[2] + dj[2]) -
                at(di[0] - dj[0], di[1] - dj[1], di[2] - dj[2]) -
                at(dj[0] - di[0], dj[1] - di[1], dj[2] - di[2]) +
                at(-di[0] - dj[0], -di[1] - dj[1], -di[2] - dj[2])) /
               (4 * h * h);
        }
        CHECK(std::abs(H(i, j) - fd) <= 5e-6);
      }
    }

    // deficit density is the squared Frobenius norm of the deviatoric part
    const Eigen::MatrixXd dev =
        H - (H.trace() / p.dim) * Eigen::MatrixXd::Identity(p.dim, p.dim);
    CHECK(std::abs(sol.deficit_density(p.r, p.theta) - dev.squaredNorm()) <= 1e-13);
  }

  // trace stays exact next to the axis (pole-safe angular terms)
  const CKSolution sol3 = exterior_cauchy_solution(3, 2.0, 1.0, 0.1);
  for (double th : {1e-3, kPi - 1e-3}) {
    CHECK(std::abs(sol3.hessian(1.5, th).trace() - 3.0) <= 1e-10);
  }

  // concentric limit: Hessian is the identity, deficit vanishes
  const CKSolution flat = exterior_cauchy_solution(2, 2.0, 1.0, 0.0);
  CHECK(std::abs(flat.deficit_density(1.3, 0.7)) <= 1e-14);
}

TEST_CASE("admissibility reports carry exact extremes for the canonical data") {
  const CKSolution sol = exterior_cauchy_solution(2, 2.0, 1.0, 0.1);
  const GapReport gap = check_gap(sol, 2.0);
  CHECK(gap.ok);
  // u(1, theta) = 0.2525 - 0.05 cos, u(2, theta) = 1.7525 - 0.1375 cos
  CHECK(std::abs(gap.max_inner - 0.3025) <= 1e-12);
  CHECK(std::abs(gap.min_outer - 1.615) <= 1e-12);
  const MonotonicityReport mono = check_monotonicity(sol, 2.0);
  CHECK(mono.ok);
  CHECK(mono.threshold == 0.5);
  // u_r = r + (a1 - b1 / r^2) cos attains its minimum 0.9 at r = 1, theta = 0
  CHECK(std::abs(mono.min_radial_derivative - 0.9) <= 1e-12);
}

TEST_CASE("level radii against closed values") {
  const CKSolution sol = exterior_cauchy_solution(2, 2.0, 1.0, 0.1);
  // on the symmetry-orthogonal ray the mode-1 term drops out: r^2/2 + a0 = 1
  CHECK(std::abs(level_radius(sol, 1.0, kPi / 2, 2.0) - std::sqrt(2.495)) <= 1e-12);
  for (double th : {0.0, 1.1, kPi}) {
    const double r = level_radius(sol, 1.0, th, 2.0);
    CHECK(std::abs(sol.value(r, th) - 1.0) <= 1e-12);
  }
  CHECK(std::abs(level_radius(sol, 1.0, 0.0, 2.0) - 1.646706512766) <= 1e-9);
  CHECK(std::abs(level_radius(sol, 1.0, kPi, 2.0) - 1.516725714289) <= 1e-9);
  CHECK_THROWS_AS(level_radius(sol, 5.0, 0.3, 2.0), std::domain_error);
}

TEST_CASE("dyadic offset selection") {
  CHECK(select_epsilon(2, 2.0, 1.0, 2.0) == 0.25);
}

TEST_CASE("counterexample certificates and the divergence-theorem closure") {
  CKConfig cfg;
  cfg.dim = 2;
  cfg.sigma_c = 2.0;
  cfg.inclusion_radius = 1.0;
  cfg.outer_bracket = 2.0;
  cfg.epsilon = 0.1;
  cfg.gamma = 1.0;
  const Counterexample cx = build_counterexample(cfg, 128);
  CHECK(cx.gamma == 1.0);
  CHECK(cx.solution.epsilon == 0.1);
  CHECK(cx.level_sup_error <= 1e-12);
  CHECK(cx.cauchy_value_gap <= 1e-13);
  CHECK(cx.cauchy_flux_gap <= 1e-13);
  CHECK(cx.radiality_std <= 1e-13);
  CHECK(cx.monotonicity.ok);
  CHECK(cx.gap.ok);
  CHECK(cx.flux_std > 0.012);
  CHECK(cx.flux_std < 0.017);
  CHECK(cx.asphericity_origin > 0.05);
  CHECK(cx.asphericity_center > 0.01);

  // implicit-function derivative of the boundary graph: r' = -u_theta / u_r
  REQUIRE(cx.boundary.size() == cx.quad.size());
  for (int j = 0; j < cx.boundary.size(); j += 17) {
    const double r = cx.boundary.r[j], th = cx.boundary.theta[j];
    const double expected =
        -cx.solution.theta_derivative(r, th) / cx.solution.radial_derivative(r, th);
    CHECK(std::abs(cx.boundary.dr[j] - expected) <= 1e-10);
  }

  // integral of u_nu over the boundary must equal dim * volume (Delta u = dim)
  double length = 0.0, volume = 0.0;
  const SurfaceGeometry geom = surface_geometry(cx.boundary);
  for (int j = 0; j < cx.quad.size(); ++j) {
    length += cx.quad.weight[j] * geom.area_factor[j];
    volume += cx.quad.weight[j] * std::pow(cx.boundary.r[j], cfg.dim) / cfg.dim;
  }
  CHECK(std::abs(cx.flux_mean * length - cfg.dim * volume) <= 1e-9);
}

TEST_CASE("counterexample in three dimensions") {
  CKConfig cfg;
  cfg.dim = 3;
  cfg.sigma_c = 2.0;
  cfg.inclusion_radius = 1.0;
  cfg.outer_bracket = 2.0;
  cfg.epsilon = 0.1;
  const Counterexample cx = build_counterexample(cfg, 96);
  CHECK(cx.monotonicity.ok);
  CHECK(cx.gap.ok);
  CHECK(cx.level_sup_error <= 1e-12);
  CHECK(cx.cauchy_value_gap <= 1e-13);
  CHECK(cx.cauchy_flux_gap <= 1e-13);
  CHECK(cx.radiality_std <= 1e-13);
  CHECK(cx.flux_std > 1e-4);
  double area = 0.0, volume = 0.0;
  const SurfaceGeometry geom = surface_geometry(cx.boundary);
  for (int j = 0; j < cx.quad.size(); ++j) {
    area += cx.quad.weight[j] * geom.area_factor[j];
    volume += cx.quad.weight[j] * std::pow(cx.boundary.r[j], 3) / 3.0;
  }
  CHECK(std::abs(cx.flux_mean * area - 3 * volume) <= 1e-9 * volume);
}

TEST_CASE("zero offset degenerates to a concentric annulus") {
  CKConfig cfg;
  cfg.dim = 2;
  cfg.sigma_c = 2.0;
  cfg.inclusion_radius = 1.0;
  cfg.outer_bracket = 2.0;
  cfg.epsilon = 0.0;
  const Counterexample cx = build_counterexample(cfg, 64);
  CHECK(cx.gamma == 1.0);  // gap midpoint of [0.25, 1.75]
  for (double r : cx.boundary.r) CHECK(std::abs(r - std::sqrt(2.5)) <= 1e-12);
  CHECK(cx.flux_std <= 1e-12);
  CHECK(cx.asphericity_origin <= 1e-12);
  CHECK(cx.asphericity_center <= 1e-12);
}

TEST_CASE("automatic offset selection feeds the builder") {
  CKConfig cfg;
  cfg.dim = 2;
  cfg.sigma_c = 2.0;
  cfg.inclusion_radius = 1.0;
  cfg.outer_bracket = 2.0;
  const Counterexample cx = build_counterexample(cfg, 64);
  CHECK(cx.solution.epsilon == 0.25);
  CHECK(cx.level_sup_error <= 1e-12);
}

TEST_CASE("input validation") {
  CHECK_THROWS_AS(exterior_cauchy_solution(1, 2.0, 1.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(exterior_cauchy_solution(2, 0.0, 1.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(exterior_cauchy_solution(2, 2.0, -1.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(exterior_cauchy_solution(2, 2.0, 1.0, -0.1), std::invalid_argument);

  CKConfig cfg;
  cfg.dim = 4;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.dim = 2;
  cfg.outer_bracket = 0.9;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.outer_bracket = 2.0;
  cfg.epsilon = 1.0;  // offset must stay inside the inclusion
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);

  cfg.epsilon = 0.6;  // structurally fine, fails the admissibility checks
  CHECK_THROWS_AS(build_counterexample(cfg, 64), std::invalid_argument);
  cfg.epsilon = 0.1;
  cfg.gamma = 0.2;  // below the inner maximum
  CHECK_THROWS_AS(build_counterexample(cfg, 64), std::invalid_argument);
  cfg.gamma = 1.7;  // above the outer minimum
  CHECK_THROWS_AS(build_counterexample(cfg, 64), std::invalid_argument);
  cfg.gamma = 1.0;
  CHECK_THROWS_AS(build_counterexample(cfg, 4), std::invalid_argument);

  const CKSolution sol = exterior_cauchy_solution(2, 2.0, 1.0, 0.1);
  CHECK_THROWS_AS(translate_to_identity_frame(sol, 1.0, 2.0, 64, 32), std::invalid_argument);
}

TEST_CASE("identity frame: metadata, knot-limited boundary accuracy, residual") {
  const CKSolution sol = exterior_cauchy_solution(2, 2.0, 1.0, 0.1);
  const TwoPhaseFrame frame = translate_to_identity_frame(sol, 1.0, 2.0, 64, 512);
  CHECK(frame.dim == 2);
  CHECK(frame.sigma_c == 2.0);
  CHECK(frame.inner_radius == 1.0);
  CHECK(frame.shift == 0.1);
  CHECK(frame.lambda_sq == 4.0);  // 2 sigma_c gamma
  REQUIRE(frame.outer.size() == 512);

  // boundary carried through the degree-7 knot interpolant: O(h^8) in the
  // knot spacing, so halving the knot count inflates the error ~2^8
  auto boundary_error = [&](int knots) {
    const TwoPhaseFrame f = translate_to_identity_frame(sol, 1.0, 2.0, knots, 512);
    double worst = 0.0;
    for (int j = 0; j < f.outer.size(); ++j) {
      const double exact = level_radius(sol, 1.0, f.outer.theta[j], 2.0);
      worst = std::max(worst, std::abs(f.outer.r[j] - exact));
    }
    return worst;
  };
  const double e16 = boundary_error(16), e32 = boundary_error(32), e64 = boundary_error(64);
  CHECK(e64 <= 1e-6);
  CHECK(e32 > 0.0);
  CHECK(e16 >= 30 * e32);

  // the interpolated boundary still sits on the level set to interpolant order
  for (int j = 0; j < frame.outer.size(); j += 31) {
    CHECK(std::abs(frame.u(frame.outer.r[j], frame.outer.theta[j])) <= 1e-5);
  }

  const IdentityReport rep = verify_identity(frame, 0.0, 32);
  CHECK(rep.relative_residual <= 1e-6);
  CHECK(rep.interface_trace_gap <= 1e-10);
  CHECK(rep.min_minus_u >= -1e-12);
}
