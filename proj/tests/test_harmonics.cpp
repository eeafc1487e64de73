#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"
#include "twophase/harmonics.hpp"

using namespace twophase;

namespace {
constexpr double kPi = std::numbers::pi;

double fd1(const std::function<double(double)>& f, double x, double h = 1e-5) {
  return (f(x + h) - f(x - h)) / (2 * h);
}
double fd2(const std::function<double(double)>& f, double x, double h = 1e-4) {
  return (f(x + h) - 2 * f(x) + f(x - h)) / (h * h);
}
}  // namespace

TEST_CASE("Laplace-Beltrami eigenvalues k(k+N-2)") {
  CHECK(harmonic_eigenvalue(0, 2) == 0.0);
  CHECK(harmonic_eigenvalue(3, 2) == 9.0);
  CHECK(harmonic_eigenvalue(2, 3) == 6.0);
  CHECK(harmonic_eigenvalue(5, 4) == 35.0);
  CHECK_THROWS_AS(harmonic_eigenvalue(-1, 2), std::invalid_argument);
  CHECK_THROWS_AS(harmonic_eigenvalue(0, 1), std::invalid_argument);
}

TEST_CASE("Gauss-Legendre nodes and weights, n = 5 reference values") {
  std::vector<double> x, w;
  gauss_legendre(5, x, w);
  REQUIRE(x.size() == 5);
  // Abramowitz & Stegun table 25.4.
  const double xs[5] = {-0.90617984593866399, -0.53846931010568309, 0.0,
                        0.53846931010568309, 0.90617984593866399};
  const double ws[5] = {0.23692688505618909, 0.47862867049936647, 0.56888888888888889,
                        0.47862867049936647, 0.23692688505618909};
  for (int i = 0; i < 5; ++i) {
    CHECK(std::abs(x[i] - xs[i]) <= 1e-14);
    CHECK(std::abs(w[i] - ws[i]) <= 1e-14);
  }
  double sum = 0.0, mom8 = 0.0;
  for (int i = 0; i < 5; ++i) {
    sum += w[i];
    mom8 += w[i] * std::pow(x[i], 8);
  }
  CHECK(std::abs(sum - 2.0) <= 1e-14);
  CHECK(std::abs(mom8 - 2.0 / 9.0) <= 1e-14);  // degree 8 <= 2n-1
}

TEST_CASE("surface quadrature integrates total area and trig moments") {
  {
    const AngularQuadrature q = build_quadrature(2, 16);
    double area = 0.0, c2 = 0.0, cc = 0.0;
    for (int j = 0; j < q.size(); ++j) {
      area += q.weight[j];
      c2 += q.weight[j] * std::cos(3 * q.theta[j]) * std::cos(3 * q.theta[j]);
      cc += q.weight[j] * std::cos(2 * q.theta[j]) * std::cos(5 * q.theta[j]);
    }
    CHECK(std::abs(area - 2 * kPi) <= 1e-14);
    CHECK(std::abs(c2 - kPi) <= 1e-13);
    CHECK(std::abs(cc) <= 1e-13);
  }
  {
    const AngularQuadrature q = build_quadrature(3, 12);
    double area = 0.0, p2 = 0.0;
    for (int j = 0; j < q.size(); ++j) {
      const double x = std::cos(q.theta[j]);
      area += q.weight[j];
      p2 += q.weight[j] * 0.25 * (3 * x * x - 1) * (3 * x * x - 1);
    }
    CHECK(std::abs(area - 4 * kPi) <= 1e-13);
    CHECK(std::abs(p2 - 4 * kPi / 5.0) <= 1e-13);  // 2*pi * 2/(2k+1), k = 2
  }
  CHECK_THROWS_AS(build_quadrature(4, 8), std::invalid_argument);
  CHECK_THROWS_AS(build_quadrature(2, 1), std::invalid_argument);
}

TEST_CASE("integrate() matches the manual weighted sum") {
  const AngularQuadrature q = build_quadrature(3, 9);
  std::vector<double> samples(q.size());
  double manual = 0.0;
  for (int j = 0; j < q.size(); ++j) {
    samples[j] = std::sin(q.theta[j]) + 0.3;
    manual += q.weight[j] * samples[j];
  }
  CHECK(std::abs(q.integrate(samples) - manual) <= 1e-15);
}

TEST_CASE("zonal shapes: amplitude normalization and norms") {
  for (int dim : {2, 3}) {
    const ZonalBasis basis(dim, 8);
    for (int k = 0; k <= 8; ++k) {
      CHECK(basis.shape(k, 0.0) == doctest::Approx(1.0).epsilon(1e-14));
      const double expected_norm =
          dim == 2 ? (k == 0 ? 2 * kPi : kPi) : 4 * kPi / (2 * k + 1);
      CHECK(std::abs(basis.shape_norm_sq(k) - expected_norm) <= 1e-12 * expected_norm);
      CHECK(std::abs(basis.norm_const(k) - 1.0 / std::sqrt(expected_norm)) <= 1e-13);
      // eval is the L2-normalized multiple of shape
      CHECK(std::abs(basis.eval(k, 1.1) - basis.norm_const(k) * basis.shape(k, 1.1)) <= 1e-15);
    }
  }
}

TEST_CASE("zonal shape derivatives against finite differences") {
  for (int dim : {2, 3}) {
    const ZonalBasis basis(dim, 6);
    for (int k = 0; k <= 6; ++k) {
      for (double th : {0.3, 1.2, 2.0, 2.9}) {
        auto f = [&](double x) { return basis.shape(k, x); };
        CHECK(std::abs(basis.shape_d1(k, th) - fd1(f, th)) <= 1e-8);
        CHECK(std::abs(basis.shape_d2(k, th) - fd2(f, th)) <= 2e-6);
        const double s = std::sin(th);
        CHECK(std::abs(basis.shape_d1_over_sin(k, th) - basis.shape_d1(k, th) / s) <= 1e-12);
      }
    }
  }
}

TEST_CASE("shape_d1_over_sin is finite at the pole with the analytic limit") {
  const ZonalBasis plane(2, 5), space(3, 5);
  for (int k = 0; k <= 5; ++k) {
    // N = 2: (cos k theta)'/sin -> -k^2; N = 3: -P_k'(1) = -k(k+1)/2.
    CHECK(std::abs(plane.shape_d1_over_sin(k, 0.0) + k * k) <= 1e-12);
    CHECK(std::abs(space.shape_d1_over_sin(k, 0.0) + 0.5 * k * (k + 1)) <= 1e-12);
  }
}

TEST_CASE("zonal_surface assembles base + sum of shapes with derivatives") {
  const ZonalBasis basis(3, 4);
  const std::vector<double> coeffs{0.02, 0.0, -0.05, 0.01, 0.0};
  const std::vector<double> thetas{0.1, 0.7, 1.9, 3.0};
  const SurfaceGraph g = zonal_surface(basis, 1.5, coeffs, thetas);
  REQUIRE(g.size() == 4);
  for (int j = 0; j < g.size(); ++j) {
    double r = 1.5, dr = 0.0, ddr = 0.0;
    for (int k = 0; k <= 4; ++k) {
      r += coeffs[k] * basis.shape(k, thetas[j]);
      dr += coeffs[k] * basis.shape_d1(k, thetas[j]);
      ddr += coeffs[k] * basis.shape_d2(k, thetas[j]);
    }
    CHECK(std::abs(g.r[j] - r) <= 1e-15);
    CHECK(std::abs(g.dr[j] - dr) <= 1e-15);
    CHECK(std::abs(g.ddr[j] - ddr) <= 1e-15);
  }
}

TEST_CASE("surface geometry of a round sphere") {
  for (int dim : {2, 3}) {
    const double R = 0.8;
    const ZonalBasis basis(dim, 2);
    const AngularQuadrature q = build_quadrature(dim, 10);
    const SurfaceGraph g = zonal_surface(basis, R, {0.0, 0.0, 0.0}, q.theta);
    const SurfaceGeometry geom = surface_geometry(g);
    for (int j = 0; j < g.size(); ++j) {
      CHECK(std::abs(geom.nu_rad[j] - 1.0) <= 1e-14);
      CHECK(std::abs(geom.nu_tan[j]) <= 1e-14);
      CHECK(std::abs(geom.support[j] - R) <= 1e-14);
      CHECK(std::abs(geom.area_factor[j] - std::pow(R, dim - 1)) <= 1e-14);
      CHECK(std::abs(geom.mean_curvature[j] - 1.0 / R) <= 1e-13);
      CHECK(std::abs(geom.xtau_sq[j]) <= 1e-14);
      CHECK(std::abs(geom.contraction[j]) <= 1e-14);
    }
    // Total area: |S^{N-1}| R^{N-1}.
    double area = 0.0;
    for (int j = 0; j < q.size(); ++j) area += q.weight[j] * geom.area_factor[j];
    const double exact = dim == 2 ? 2 * kPi * R : 4 * kPi * R * R;
    CHECK(std::abs(area - exact) <= 1e-12);
  }
}

TEST_CASE("meridian curvature matches the turning rate of the tangent") {
  // Independent oracle: kappa = d(phi)/ds along the parametrized meridian,
  // phi the tangent angle, evaluated by finite differences.
  const ZonalBasis basis(2, 3);
  const std::vector<double> coeffs{0.0, 0.0, 0.1, -0.04};
  auto radius = [&](double th) {
    double r = 1.0;
    for (int k = 0; k <= 3; ++k) r += coeffs[k] * basis.shape(k, th);
    return r;
  };
  auto phi = [&](double th) {
    const double h = 1e-6;
    const double xp = (radius(th + h) * std::cos(th + h) - radius(th - h) * std::cos(th - h));
    const double yp = (radius(th + h) * std::sin(th + h) - radius(th - h) * std::sin(th - h));
    return std::atan2(yp, xp);
  };
  const std::vector<double> thetas{0.4, 1.0, 1.6, 2.3};
  const SurfaceGraph g = zonal_surface(basis, 1.0, coeffs, thetas);
  const SurfaceGeometry geom = surface_geometry(g);
  for (size_t j = 0; j < thetas.size(); ++j) {
    const double th = thetas[j];
    const double h = 1e-5;
    const double dphi = phi(th + h) - phi(th - h);
    const double ds = 2 * h * std::hypot(g.r[j], g.dr[j]);
    CHECK(std::abs(geom.kappa_meridian[j] - dphi / ds) <= 1e-5);
  }
}

TEST_CASE("azimuthal curvature of an axisymmetric surface (N = 3)") {
  // For a surface of revolution the second principal curvature is
  // cos(angle between nu and the axis-normal direction) / distance to axis;
  // for a polar graph this reduces to (r - cos(theta) r'/sin(theta)) / (r s).
  // Check mean curvature against that reduction on a perturbed sphere.
  const ZonalBasis basis(3, 2);
  const std::vector<double> coeffs{0.0, 0.0, 0.08};
  const std::vector<double> thetas{0.5, 1.1, 2.2};
  const SurfaceGraph g = zonal_surface(basis, 1.0, coeffs, thetas);
  const SurfaceGeometry geom = surface_geometry(g);
  for (size_t j = 0; j < thetas.size(); ++j) {
    const double s = std::hypot(g.r[j], g.dr[j]);
    const double kap2 = (g.r[j] - std::cos(g.theta[j]) * g.dr_over_sin[j]) / (g.r[j] * s);
    CHECK(std::abs(geom.mean_curvature[j] - 0.5 * (geom.kappa_meridian[j] + kap2)) <= 1e-13);
    CHECK(std::abs(geom.contraction[j] -
                   geom.kappa_meridian[j] * geom.xtau_sq[j]) <= 1e-13);
  }
}

TEST_CASE("tangential_split reconstructs the gradient and rejects bad input") {
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  const int n = 7, dim = 3;
  Eigen::MatrixXd grads(n, dim), normals(n, dim), tang;
  Eigen::VectorXd comp;
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd nu(dim);
    for (int d = 0; d < dim; ++d) {
      grads(i, d) = unif(rng);
      nu[d] = unif(rng);
    }
    normals.row(i) = nu.normalized();
  }
  tangential_split(grads, normals, tang, comp);
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd rebuilt = tang.row(i).transpose() + comp[i] * normals.row(i).transpose();
    CHECK((rebuilt - grads.row(i).transpose()).norm() <= 1e-14);
    CHECK(std::abs(tang.row(i).dot(normals.row(i))) <= 1e-14);
  }
  normals(0, 0) *= 2.0;  // not unit any more
  CHECK_THROWS_AS(tangential_split(grads, normals, tang, comp), std::invalid_argument);
}
