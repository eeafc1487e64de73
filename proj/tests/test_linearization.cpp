#include <array>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "doctest.h"
#include "twophase/annulus.hpp"
#include "twophase/linearization.hpp"

using namespace twophase;

namespace {

/// Independent oracle for the mode coefficients: solve the two 2x2 boundary
/// systems numerically instead of using the closed forms.
///   [s(R) t(R); s(1) t(1)] (A,B)^T = (((1-sc)/sc) R, 0)^T
///   [s(R) t(R); s(1) t(1)] (C,D)^T = (0, -1)^T
std::array<double, 4> oracle_coefficients(int dim, double sigma_c, double R, int k) {
  const RadialModeBasis basis{dim, k};
  Eigen::Matrix2d M;
  M << basis.s(R), basis.t(R), basis.s(1.0), basis.t(1.0);
  const Eigen::Vector2d ab = M.fullPivLu().solve(
      Eigen::Vector2d((1.0 - sigma_c) / sigma_c * R, 0.0));
  const Eigen::Vector2d cd = M.fullPivLu().solve(Eigen::Vector2d(0.0, -1.0));
  return {ab[0], ab[1], cd[0], cd[1]};
}

}  // namespace

TEST_CASE("radial mode profiles and derivatives") {
  for (int dim : {2, 3, 4}) {
    for (int k : {0, 1, 2, 5}) {
      const RadialModeBasis b{dim, k};
      const double h = 1e-6;
      // relative tolerance: the decaying family's derivatives grow like
      // k^p r^{2-N-k-p}, and the central-difference error scales with them
      auto close = [](double got, double fd) {
        return std::abs(got - fd) <= 1e-6 * std::max(1.0, std::abs(got));
      };
      for (double r : {0.3, 0.6, 0.95}) {
        CHECK(close(b.ds(r), (b.s(r + h) - b.s(r - h)) / (2 * h)));
        CHECK(close(b.dt(r), (b.t(r + h) - b.t(r - h)) / (2 * h)));
        CHECK(close(b.dds(r), (b.ds(r + h) - b.ds(r - h)) / (2 * h)));
        CHECK(close(b.ddt(r), (b.dt(r + h) - b.dt(r - h)) / (2 * h)));
      }
      CHECK(b.log_branch() == (dim == 2 && k == 0));
      if (b.log_branch()) {
        CHECK(b.s(0.5) == 1.0);
        CHECK(std::abs(b.t(0.5) - std::log(0.5)) <= 1e-15);
      }
    }
  }
}

TEST_CASE("mode coefficients solve the boundary systems (numerical oracle)") {
  for (int dim : {2, 3, 4}) {
    for (double sc : {0.3, 2.0, 7.0}) {
      for (double R : {0.15, 0.5, 0.85}) {
        for (int k = 0; k <= 10; ++k) {
          const ModeCoefficients mc = mode_coefficients(dim, sc, R, k);
          const auto [A, B, C, D] = oracle_coefficients(dim, sc, R, k);
          const double scale = std::max({std::abs(A), std::abs(B), std::abs(C), std::abs(D), 1.0});
          CHECK(std::abs(mc.A - A) <= 1e-11 * scale);
          CHECK(std::abs(mc.B - B) <= 1e-11 * scale);
          CHECK(std::abs(mc.C - C) <= 1e-11 * scale);
          CHECK(std::abs(mc.D - D) <= 1e-11 * scale);
        }
      }
    }
  }
  CHECK_THROWS_AS(mode_coefficients(2, 1.0, 0.5, 2), std::invalid_argument);
  CHECK_THROWS_AS(mode_coefficients(2, 2.0, 1.2, 2), std::invalid_argument);
  CHECK_THROWS_AS(mode_coefficients(2, 2.0, 0.5, -1), std::invalid_argument);
}

TEST_CASE("directional fields are harmonic and satisfy their boundary data") {
  const int dim = 3;
  const double sc = 0.5, R = 0.45;
  for (int k : {0, 1, 3}) {
    const ModeCoefficients mc = mode_coefficients(dim, sc, R, k);
    const LinearizedField eta_dir = linearized_field(mc, 1.0, 0.0);
    const LinearizedField xi_dir = linearized_field(mc, 0.0, 1.0);
    CHECK(std::abs(eta_dir.radial_part(R) - (1.0 - sc) / sc * R) <= 1e-12);
    CHECK(std::abs(eta_dir.radial_part(1.0)) <= 1e-12);
    CHECK(std::abs(xi_dir.radial_part(R)) <= 1e-12);
    CHECK(std::abs(xi_dir.radial_part(1.0) + 1.0) <= 1e-12);
    for (double r : {0.5, 0.7, 0.9})
      CHECK(std::abs(eta_dir.ode_residual(r)) <= 1e-10);
  }
}

TEST_CASE("determinant closed form agrees with its factored representation") {
  for (int dim : {2, 3, 4}) {
    for (double sc : {0.3, 2.0, 7.0}) {
      for (int k = 0; k <= 8; ++k) {
        for (int i = 1; i <= 40; ++i) {
          const double R = i / 41.0;
          const double d1 = det_frechet(dim, sc, R, k);
          const double d2 = det_frechet_factored(dim, sc, R, k);
          CHECK(std::abs(d1 - d2) <= 1e-12 * std::max(std::abs(d1), 1.0));
          const FrechetMatrix M = frechet_matrix(dim, sc, R, k);
          CHECK(std::abs(M.det() - d1) <= 1e-12 * std::max(std::abs(d1), 1.0));
        }
      }
    }
  }
}

TEST_CASE("entrywise radius derivative against finite differences") {
  const double h = 1e-6;
  for (int dim : {2, 3}) {
    for (int k : {0, 1, 2, 4}) {
      const double sc = 1.7, R = 0.55;
      const FrechetMatrix dm = frechet_matrix_dR(dim, sc, R, k);
      const FrechetMatrix mp = frechet_matrix(dim, sc, R + h, k);
      const FrechetMatrix mm = frechet_matrix(dim, sc, R - h, k);
      CHECK(std::abs(dm.a - (mp.a - mm.a) / (2 * h)) <= 1e-6 * std::max(std::abs(dm.a), 1.0));
      CHECK(std::abs(dm.b - (mp.b - mm.b) / (2 * h)) <= 1e-6 * std::max(std::abs(dm.b), 1.0));
      CHECK(std::abs(dm.c - (mp.c - mm.c) / (2 * h)) <= 1e-6 * std::max(std::abs(dm.c), 1.0));
      CHECK(std::abs(dm.d - (mp.d - mm.d) / (2 * h)) <= 1e-6 * std::max(std::abs(dm.d), 1.0));
      const double closed = det_frechet_dR(dim, sc, R, k);
      if (k == 1) {
        CHECK(closed == 0.0);
      } else {
        CHECK(std::abs(dm.det() - closed) <= 1e-10 * std::max(std::abs(closed), 1.0));
      }
    }
  }
}

TEST_CASE("discrete shape-derivative oracle for the plane k = 0 entries") {
  // The k = 0 column of the linearization is the delicate one in the plane
  // (log profile); verify the matrix action against centered differences of
  // the discretized overdetermined residuals on an exact annulus solver run.
  const int dim = 2, k = 0, K = 6;
  const double sc = 2.0, rho = 0.6, t = 1e-5;
  const FrechetMatrix M = frechet_matrix(dim, sc, rho, k);
  const double scale = std::max({std::abs(M.a), std::abs(M.b), std::abs(M.c), std::abs(M.d)});
  for (int direction = 0; direction < 2; ++direction) {
    auto modes = [&](double amp) {
      PerturbedAnnulus d = PerturbedAnnulus::trivial(dim, rho, K);
      (direction == 0 ? d.eta : d.xi)[k] = amp;
      const OverdetResidual r = overdet_residual(solve_dirichlet(d, sc), d);
      return std::array<double, 2>{r.inner_modes[k], r.outer_modes[k]};
    };
    const auto plus = modes(t), minus = modes(-t);
    const double fd_inner = (plus[0] - minus[0]) / (2 * t);
    const double fd_outer = (plus[1] - minus[1]) / (2 * t);
    CHECK(std::abs(fd_inner - (direction == 0 ? M.a : M.b)) <= 1e-5 * scale);
    CHECK(std::abs(fd_outer - (direction == 0 ? M.c : M.d)) <= 1e-5 * scale);
  }
}

TEST_CASE("critical radii: closed form, bisection, frozen spots") {
  CHECK(std::abs(critical_radius(2, 2) - std::pow(1.0 / 3.0, 0.25)) <= 1e-14);
  CHECK(std::abs(critical_radius(3, 2) - std::pow(3.0 / 8.0, 0.2)) <= 1e-14);
  CHECK(std::abs(critical_radius(2, 3) - std::pow(0.5, 1.0 / 6.0)) <= 1e-14);
  CHECK_THROWS_AS(critical_radius(2, 1), std::invalid_argument);
  CHECK_THROWS_AS(critical_radius(2, 0), std::invalid_argument);
  for (int dim : {2, 3, 4}) {
    for (int k : {2, 4, 7}) {
      const double closed = critical_radius(dim, k);
      CHECK(closed > 0.0);
      CHECK(closed < 1.0);
      CHECK(std::abs(closed - critical_radius_bisection(dim, 2.0, k)) <= 1e-10);
      // the determinant really changes sign there
      CHECK(det_frechet(dim, 2.0, closed - 1e-4, k) * det_frechet(dim, 2.0, closed + 1e-4, k) <
            0.0);
    }
  }
}

TEST_CASE("kernel vector spans the null space at the critical radius") {
  for (int dim : {2, 3}) {
    for (double sc : {0.5, 2.0}) {
      for (int k : {2, 3, 5}) {
        const double R = critical_radius(dim, k);
        const auto v = kernel_vector(dim, sc, k);
        CHECK(std::abs(std::hypot(v[0], v[1]) - 1.0) <= 1e-13);
        CHECK(v[0] > 0.0);
        const FrechetMatrix M = frechet_matrix(dim, sc, R, k);
        const auto image = M.apply(v[0], v[1]);
        const double scale = std::max({std::abs(M.a), std::abs(M.b), std::abs(M.c), std::abs(M.d)});
        CHECK(std::abs(image[0]) <= 1e-12 * scale);
        CHECK(std::abs(image[1]) <= 1e-12 * scale);
      }
    }
  }
  // frozen slope of the branch tangent at the standard configuration
  const auto v = kernel_vector(2, 2.0, 2);
  CHECK(std::abs(v[1] / v[0] - 0.43869133765) <= 1e-9);
}
