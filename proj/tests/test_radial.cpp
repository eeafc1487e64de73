#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "twophase/radial.hpp"

using namespace twophase;

TEST_CASE("transmission constant glues value and sigma-weighted flux") {
  for (int dim : {2, 3, 4}) {
    for (double sc : {0.2, 0.5, 2.0, 7.0}) {
      for (double rho : {0.15, 0.5, 0.85}) {
        const PhaseConfig cfg{dim, sc, rho};
        CHECK(std::abs(transmission_constant(cfg) - ((1 - sc) * rho * rho + sc)) <= 1e-15);
        const RadialSolution u = radial_solution(cfg);
        // continuity across the interface
        CHECK(std::abs(u.value(rho - 1e-14) - u.value(rho + 1e-14)) <= 1e-12);
        // sigma u' continuous: inner slope rho/sigma_c, outer slope rho
        CHECK(std::abs(sc * u.derivative(rho - 1e-14) - u.derivative(rho + 1e-14)) <= 1e-12);
        // outer boundary data
        CHECK(std::abs(u.value(1.0)) <= 1e-15);
        CHECK(std::abs(u.derivative(1.0) - 1.0) <= 1e-15);
        // overdetermined inner flux seen from outside: u'(rho+) = rho
        CHECK(std::abs(u.derivative(rho + 1e-14) - rho) <= 1e-12);
      }
    }
  }
}

TEST_CASE("radial solution solves the weighted torsion equation branchwise") {
  const PhaseConfig cfg{3, 2.5, 0.6};
  const RadialSolution u = radial_solution(cfg);
  const double h = 1e-5;
  for (double r : {0.2, 0.45, 0.7, 0.9}) {
    const double sigma = r < cfg.rho ? cfg.sigma_c : 1.0;
    const double upp = (u.value(r + h) - 2 * u.value(r) + u.value(r - h)) / (h * h);
    const double lap = upp + (cfg.dim - 1) * u.derivative(r) / r;
    CHECK(std::abs(sigma * lap - cfg.dim) <= 1e-5);
    // analytic derivative agrees with finite differences
    const double fd = (u.value(r + h) - u.value(r - h)) / (2 * h);
    CHECK(std::abs(u.derivative(r) - fd) <= 1e-9);
  }
}

TEST_CASE("interior negativity on a fine grid") {
  for (int dim : {2, 3}) {
    for (double sc : {0.3, 4.0}) {
      const RadialSolution u = radial_solution(PhaseConfig{dim, sc, 0.5});
      for (int i = 0; i < 1000; ++i) {
        const double r = i / 1000.0;
        CHECK(u.value(r) < 0.0);
      }
    }
  }
}

TEST_CASE("trivial residual vanishes and lights up under a mutated constant") {
  const PhaseConfig cfg{2, 3.0, 0.4};
  const auto [inner, outer] = trivial_residual(cfg);
  CHECK(inner <= 1e-15);
  CHECK(outer <= 1e-15);

  RadialSolution u = radial_solution(cfg);
  u.T += 1e-3;
  const auto [inner_bad, outer_bad] = trivial_residual(u);
  CHECK(inner_bad > 1e-5);  // branch continuity broken at the interface
  CHECK(outer_bad <= 1e-15);
}

TEST_CASE("unit-inner rescaling") {
  const PhaseConfig cfg{3, 2.0, 0.25};
  const UnitInnerFrame frame = rescale_to_unit_inner(cfg);
  const double R = 1.0 / cfg.rho;
  CHECK(std::abs(frame.outer_radius - R) <= 1e-15);
  CHECK(std::abs(frame.lambda_sq - (cfg.sigma_c * R * R + 1 - cfg.sigma_c)) <= 1e-12);
  // consistent with directly rescaling the transmission constant
  CHECK(std::abs(frame.lambda_sq -
                 transmission_constant(cfg) / (cfg.rho * cfg.rho)) <= 1e-12);
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(PhaseConfig({2, 2.0, 0.0}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(PhaseConfig({2, 2.0, 1.0}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(PhaseConfig({2, -1.0, 0.5}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(PhaseConfig({1, 2.0, 0.5}).validate(), std::invalid_argument);
  CHECK_NOTHROW(PhaseConfig({4, 0.5, 0.5}).validate());
  CHECK(PhaseConfig({2, 1.0, 0.5}).single_phase());
}
