#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "twophase/identities.hpp"
#include "twophase/radial.hpp"

using namespace twophase;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("unit ball volumes and sphere areas") {
  CHECK(std::abs(unit_ball_volume(2) - kPi) <= 1e-15);
  CHECK(std::abs(unit_ball_volume(3) - 4 * kPi / 3) <= 1e-15);
  CHECK(std::abs(unit_ball_volume(4) - kPi * kPi / 2) <= 1e-15);
  CHECK(std::abs(unit_sphere_area(2) - 2 * kPi) <= 1e-15);
  CHECK(std::abs(unit_sphere_area(3) - 4 * kPi) <= 1e-14);
  CHECK(std::abs(unit_sphere_area(4) - 2 * kPi * kPi) <= 1e-14);
  // consistency: |S^{N-1}| = N |B_1|
  for (int dim : {2, 3, 4, 5})
    CHECK(std::abs(unit_sphere_area(dim) - dim * unit_ball_volume(dim)) <= 1e-13);
}

TEST_CASE("interface terms: closed forms vs quadrature at fixed configurations") {
  for (int dim : {2, 3}) {
    const AngularQuadrature quad = build_quadrature(dim, 48);
    for (double sc : {0.4, 2.0, 5.0}) {
      for (double z1 : {-0.4, 0.0, 0.35}) {
        OffsetBallConfig ball;
        ball.dim = dim;
        ball.sigma_c = sc;
        ball.z1 = z1;
        ball.lambda = 1.6;
        const double ii_c = term_II_closed(ball);
        const double ii_q = term_II_quadrature(ball, quad);
        CHECK(std::abs(ii_c - ii_q) <= 1e-11 * std::max(std::abs(ii_c), 1.0));
        for (double xi1 : {0.0, 0.8, -1.1}) {
          const double iii_c = term_III_closed(ball, xi1);
          const double iii_q = term_III_quadrature(ball, quad, xi1);
          CHECK(std::abs(iii_c - iii_q) <= 1e-11 * std::max(std::abs(iii_c), 1.0));
        }
        if (z1 == 0.0) {
          CHECK(std::abs(ii_c) <= 1e-15);
          CHECK(std::abs(term_III_closed(ball, 0.7)) <= 1e-15);
        }
      }
    }
  }
}

TEST_CASE("xi-gradient of the interface term") {
  OffsetBallConfig ball;
  ball.dim = 3;
  ball.sigma_c = 0.5;
  ball.z1 = 0.3;
  ball.lambda = 1.4;
  const Eigen::VectorXd g = grad_xi_III_closed(ball);
  REQUIRE(g.size() == 3);
  // (1/sigma_c - 1) z |B_1| along e1, zero transverse
  CHECK(std::abs(g[0] - (1.0 / ball.sigma_c - 1.0) * ball.z1 * unit_ball_volume(3)) <= 1e-14);
  CHECK(g[1] == 0.0);
  CHECK(g[2] == 0.0);
  const AngularQuadrature quad = build_quadrature(3, 48);
  const Eigen::VectorXd gs = grad_xi_III_surface(ball, quad);
  CHECK((g - gs).cwiseAbs().maxCoeff() <= 1e-12);

  ball.z1 = 0.0;
  CHECK(grad_xi_III_closed(ball).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("outer-boundary term against a dense Simpson oracle (N = 2)") {
  // Outer curve r = 1 + 0.1 cos(2 theta), u_nu sampled as a smooth profile,
  // origin shifted by 0.07. Oracle: same integrand, independent composite
  // Simpson rule at high resolution on the parametrized curve.
  const int n = 64;
  const AngularQuadrature quad = build_quadrature(2, n);
  const ZonalBasis basis(2, 2);
  const std::vector<double> coeffs{0.0, 0.0, 0.1};
  const SurfaceGraph outer = zonal_surface(basis, 1.0, coeffs, quad.theta);
  const SurfaceGeometry geom = surface_geometry(outer);
  const double shift = 0.07, xi1 = -0.4;
  std::vector<double> u_nu(quad.size());
  for (int j = 0; j < quad.size(); ++j) u_nu[j] = 1.0 + 0.05 * std::cos(quad.theta[j]);
  const double got = term_I(quad, outer, geom, u_nu, shift, xi1);

  auto integrand = [&](double th) {
    const double r = 1.0 + 0.1 * std::cos(2 * th);
    const double dr = -0.2 * std::sin(2 * th);
    const double s = std::hypot(r, dr);
    const double nu_rad = r / s, nu_tan = -dr / s;
    const double e1_nu = nu_rad * std::cos(th) - nu_tan * std::sin(th);
    const double un = 1.0 + 0.05 * std::cos(th);
    const double support = r * r / s - (shift + xi1) * e1_nu;
    return 0.5 * un * un * (un - support) * s;  // s = arclength factor
  };
  const int m = 20000;  // composite Simpson on [0, 2 pi]
  double oracle = integrand(0.0) + integrand(2 * kPi);
  for (int i = 1; i < m; ++i) oracle += integrand(2 * kPi * i / m) * (i % 2 ? 4.0 : 2.0);
  oracle *= (2 * kPi / m) / 3.0;
  CHECK(std::abs(got - oracle) <= 1e-10);
}

TEST_CASE("shell integral of a known density (exact antiderivative oracle)") {
  // Annulus 0.5 < r < 1 in the plane, u = (r^2 - 1)/2, density = 1:
  //   integral of -u = -2 pi int_{1/2}^{1} (r^2-1)/2 r dr = 9 pi / 64.
  const AngularQuadrature quad = build_quadrature(2, 32);
  const ZonalBasis basis(2, 0);
  const SurfaceGraph outer = zonal_surface(basis, 1.0, {0.0}, quad.theta);
  auto u = [](double r, double) { return (r * r - 1.0) / 2.0; };
  auto one = [](double, double) { return 1.0; };
  const DeficitResult res = deficit_integral(quad, 0.5, outer, 16, u, one);
  const double exact = 9 * kPi / 64;
  CHECK(std::abs(res.value - exact) <= 1e-12);
  CHECK(res.refinement_delta <= 1e-12);
  CHECK(res.min_minus_u >= 0.0);
}

TEST_CASE("identity closes exactly on the concentric radial configuration") {
  const PhaseConfig cfg{2, 2.0, 0.5};
  const RadialSolution radial = radial_solution(cfg);
  TwoPhaseFrame frame;
  frame.dim = 2;
  frame.sigma_c = 2.0;
  frame.lambda_sq = radial.T;  // inner quadratic (|x|^2 - T)/(2 sigma_c)
  frame.inner_radius = 0.5;
  frame.shift = 0.0;
  const int n = 64;
  frame.quad = build_quadrature(2, n);
  const ZonalBasis basis(2, 0);
  frame.outer = zonal_surface(basis, 1.0, {0.0}, frame.quad.theta);
  frame.u = [radial](double r, double) { return radial.value(r); };
  frame.u_r = [radial](double r, double) { return radial.derivative(r); };
  frame.u_theta = [](double, double) { return 0.0; };
  // u = (r^2-1)/2 outside: Hessian is the identity, deficit density zero.
  frame.cs_density = [](double, double) { return 0.0; };
  for (double xi1 : {0.0, 0.6}) {
    const IdentityReport rep = verify_identity(frame, xi1, 16);
    CHECK(std::abs(rep.deficit) <= 1e-14);
    CHECK(std::abs(rep.term_i) <= 1e-13);
    CHECK(std::abs(rep.term_ii) <= 1e-13);
    CHECK(std::abs(rep.term_iii) <= 1e-13);
    CHECK(rep.residual <= 1e-12);
    CHECK(rep.interface_trace_gap <= 1e-13);
    CHECK(rep.outer_trace_sup <= 1e-13);
    CHECK(rep.min_minus_u >= -1e-15);
  }
}
