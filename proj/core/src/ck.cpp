#include "twophase/ck.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace twophase {

namespace {

constexpr double kPi = std::numbers::pi;

/// Radial profile of the mode-1 harmonic part, g(r) = a1 r + b1 r^{1-N},
/// and its first two derivatives.
double mode1(const CKSolution& s, double r) {
  return s.a1 * r + s.b1 * std::pow(r, 1 - s.dim);
}
double mode1_d1(const CKSolution& s, double r) {
  return s.a1 + (1 - s.dim) * s.b1 * std::pow(r, -s.dim);
}
double mode1_d2(const CKSolution& s, double r) {
  return static_cast<double>(s.dim) * (s.dim - 1) * s.b1 * std::pow(r, -s.dim - 1);
}

void require_positive_radius(double r) {
  if (!(r > 0.0)) throw std::invalid_argument("CK solution: radius must be positive");
}

}  // namespace

void CKConfig::validate() const {
  if (dim < 2 || dim > 3)
    throw std::invalid_argument("CKConfig: quadrature-backed construction supports dim 2 and 3");
  if (!(sigma_c > 0.0)) throw std::invalid_argument("CKConfig: sigma_c must be positive");
  if (!(inclusion_radius > 0.0))
    throw std::invalid_argument("CKConfig: inclusion radius must be positive");
  if (!(resolved_bracket() > inclusion_radius))
    throw std::invalid_argument("CKConfig: outer bracket must exceed the inclusion radius");
  if (epsilon && (!(*epsilon >= 0.0) || *epsilon >= inclusion_radius))
    throw std::invalid_argument(
        "CKConfig: explicit offset must lie in [0, inclusion_radius)");
}

double CKSolution::value(double r, double theta) const {
  require_positive_radius(r);
  return 0.5 * r * r + a0 + mode1(*this, r) * std::cos(theta);
}

double CKSolution::radial_derivative(double r, double theta) const {
  require_positive_radius(r);
  return r + mode1_d1(*this, r) * std::cos(theta);
}

double CKSolution::theta_derivative(double r, double theta) const {
  require_positive_radius(r);
  return -mode1(*this, r) * std::sin(theta);
}

double CKSolution::radial_second(double r, double theta) const {
  require_positive_radius(r);
  return 1.0 + mode1_d2(*this, r) * std::cos(theta);
}

double CKSolution::mixed_second(double r, double theta) const {
  require_positive_radius(r);
  return -mode1_d1(*this, r) * std::sin(theta);
}

double CKSolution::theta_second(double r, double theta) const {
  require_positive_radius(r);
  return -mode1(*this, r) * std::cos(theta);
}

Eigen::MatrixXd CKSolution::hessian(double r, double theta) const {
  require_positive_radius(r);
  Eigen::MatrixXd H = Eigen::MatrixXd::Identity(dim, dim);
  if (b1 == 0.0) return H;
  // u = |x|^2/2 + a0 + a1 x1 + b1 x1 r^{-N}; only the last term bends the
  // Hessian away from the identity. Hess(x1 r^{-N}) is traceless.
  Eigen::VectorXd x = Eigen::VectorXd::Zero(dim);
  x[0] = r * std::cos(theta);
  x[1] = r * std::sin(theta);
  Eigen::VectorXd e1 = Eigen::VectorXd::Zero(dim);
  e1[0] = 1.0;
  const double n = dim;
  const Eigen::MatrixXd K =
      -n * std::pow(r, -dim - 2) *
          (e1 * x.transpose() + x * e1.transpose() +
           x[0] * Eigen::MatrixXd::Identity(dim, dim)) +
      n * (n + 2.0) * x[0] * std::pow(r, -dim - 4) * x * x.transpose();
  H += b1 * K;
  return H;
}

double CKSolution::deficit_density(double r, double theta) const {
  const Eigen::MatrixXd H = hessian(r, theta);
  const double tr = H.trace();
  return H.squaredNorm() - tr * tr / dim;
}

double CKSolution::interior_value(double r, double theta) const {
  return (r * r - 2.0 * epsilon * r * std::cos(theta) + epsilon * epsilon) /
         (2.0 * sigma_c);
}

CKSolution exterior_cauchy_solution(int dim, double sigma_c, double inclusion_radius,
                                    double epsilon) {
  if (dim < 2) throw std::invalid_argument("exterior_cauchy_solution: dim must be >= 2");
  if (!(sigma_c > 0.0))
    throw std::invalid_argument("exterior_cauchy_solution: sigma_c must be positive");
  if (!(inclusion_radius > 0.0))
    throw std::invalid_argument("exterior_cauchy_solution: radius must be positive");
  if (!(epsilon >= 0.0))
    throw std::invalid_argument("exterior_cauchy_solution: offset must be nonnegative");
  CKSolution s;
  s.dim = dim;
  s.sigma_c = sigma_c;
  s.inclusion_radius = inclusion_radius;
  s.epsilon = epsilon;
  const double R = inclusion_radius;
  const double contrast = 1.0 - 1.0 / sigma_c;
  // Mode 0: match the value only; the normal derivative of r^2/2 already
  // equals the mode-0 Neumann datum, so the singular coefficient vanishes.
  s.a0 = (R * R + epsilon * epsilon) / (2.0 * sigma_c) - 0.5 * R * R;
  // Mode 1: the 2x2 system { a1 R + b1 R^{1-N} = -eps R / sigma_c,
  //                          a1 + (1-N) b1 R^{-N} = -eps }.
  s.b1 = epsilon * std::pow(R, dim) * contrast / dim;
  s.a1 = -epsilon + (dim - 1.0) / dim * epsilon * contrast;
  return s;
}

MonotonicityReport check_monotonicity(const CKSolution& sol, double outer_bracket,
                                      int radial_grid, int angular_grid) {
  if (!(outer_bracket > sol.inclusion_radius))
    throw std::invalid_argument("check_monotonicity: bracket must exceed the inclusion");
  if (radial_grid < 2 || angular_grid < 2)
    throw std::invalid_argument("check_monotonicity: grids need at least 2 points");
  MonotonicityReport rep;
  rep.threshold = 0.5 * sol.inclusion_radius;
  double mn = std::numeric_limits<double>::infinity();
  for (int i = 0; i < radial_grid; ++i) {
    const double r = sol.inclusion_radius +
                     (outer_bracket - sol.inclusion_radius) * i / (radial_grid - 1);
    for (int j = 0; j < angular_grid; ++j) {
      const double theta = kPi * j / (angular_grid - 1);
      mn = std::min(mn, sol.radial_derivative(r, theta));
    }
  }
  rep.min_radial_derivative = mn;
  rep.ok = mn > rep.threshold;
  return rep;
}

GapReport check_gap(const CKSolution& sol, double outer_bracket, int angular_grid) {
  if (!(outer_bracket > sol.inclusion_radius))
    throw std::invalid_argument("check_gap: bracket must exceed the inclusion");
  if (angular_grid < 2) throw std::invalid_argument("check_gap: grid needs at least 2 points");
  GapReport rep;
  rep.max_inner = -std::numeric_limits<double>::infinity();
  rep.min_outer = std::numeric_limits<double>::infinity();
  for (int j = 0; j < angular_grid; ++j) {
    const double theta = kPi * j / (angular_grid - 1);
    rep.max_inner = std::max(rep.max_inner, sol.value(sol.inclusion_radius, theta));
    rep.min_outer = std::min(rep.min_outer, sol.value(outer_bracket, theta));
  }
  rep.ok = rep.max_inner < rep.min_outer;
  return rep;
}

double select_epsilon(int dim, double sigma_c, double inclusion_radius,
                      double outer_bracket) {
  const double floor_eps = inclusion_radius * std::pow(2.0, -20) * 0.999;
  for (double eps = 0.5 * inclusion_radius; eps > floor_eps; eps *= 0.5) {
    const CKSolution sol = exterior_cauchy_solution(dim, sigma_c, inclusion_radius, eps);
    if (check_monotonicity(sol, outer_bracket).ok && check_gap(sol, outer_bracket).ok)
      return eps;
  }
  throw std::runtime_error(
      "select_epsilon: no admissible offset above 2^-20 R; the frame is degenerate");
}

double level_radius(const CKSolution& sol, double gamma, double theta,
                    double outer_bracket) {
  double lo = sol.inclusion_radius, hi = outer_bracket;
  const double flo = sol.value(lo, theta) - gamma;
  const double fhi = sol.value(hi, theta) - gamma;
  if (!(flo < 0.0) || !(fhi > 0.0))
    throw std::domain_error("level_radius: level value is not bracketed along this ray");
  for (int it = 0; it < 50; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (sol.value(mid, theta) - gamma < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  double r = 0.5 * (lo + hi);
  for (int it = 0; it < 8; ++it) {
    const double f = sol.value(r, theta) - gamma;
    if (std::abs(f) <= 1e-15 * std::max(1.0, std::abs(gamma))) break;
    r -= f / sol.radial_derivative(r, theta);
  }
  return r;
}

double radiality_spread(const CKSolution& sol, double radius, int samples) {
  if (!(radius > 0.0)) throw std::invalid_argument("radiality_spread: radius must be positive");
  if (samples < 2) throw std::invalid_argument("radiality_spread: need at least 2 samples");
  std::vector<double> mags(samples);
  double mean = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double phi = 2.0 * kPi * i / samples;
    // Assemble the point in absolute coordinates, then apply the interior
    // gradient formula grad = (x - eps e1)/sigma_c; the subtraction is done
    // in floating point on purpose so genuine rounding noise is measured.
    const double x1 = sol.epsilon + radius * std::cos(phi);
    const double gx = (x1 - sol.epsilon) / sol.sigma_c;
    const double gy = radius * std::sin(phi) / sol.sigma_c;
    mags[i] = std::hypot(gx, gy);
    mean += mags[i];
  }
  mean /= samples;
  double var = 0.0;
  for (double m : mags) var += (m - mean) * (m - mean);
  return std::sqrt(var / samples);
}

Counterexample build_counterexample(const CKConfig& config, int angular_order) {
  config.validate();
  if (angular_order < 8)
    throw std::invalid_argument("build_counterexample: angular_order must be >= 8");
  const double R = config.inclusion_radius;
  const double R2 = config.resolved_bracket();

  Counterexample cx;
  const double eps = config.epsilon
                         ? *config.epsilon
                         : select_epsilon(config.dim, config.sigma_c, R, R2);
  cx.solution = exterior_cauchy_solution(config.dim, config.sigma_c, R, eps);
  cx.outer_bracket = R2;
  cx.monotonicity = check_monotonicity(cx.solution, R2);
  cx.gap = check_gap(cx.solution, R2);
  if (!cx.monotonicity.ok || !cx.gap.ok)
    throw std::invalid_argument("build_counterexample: offset " + std::to_string(eps) +
                                " fails the admissibility checks");
  cx.gamma = config.gamma ? *config.gamma
                          : 0.5 * (cx.gap.max_inner + cx.gap.min_outer);
  if (!(cx.gamma > cx.gap.max_inner && cx.gamma < cx.gap.min_outer))
    throw std::invalid_argument("build_counterexample: level value " +
                                std::to_string(cx.gamma) +
                                " lies outside the admissible gap");

  cx.quad = build_quadrature(config.dim, angular_order);
  const int n = cx.quad.size();
  cx.boundary.dim = config.dim;
  cx.boundary.theta = cx.quad.theta;
  cx.boundary.r.resize(n);
  cx.boundary.dr.resize(n);
  cx.boundary.ddr.resize(n);
  cx.boundary.dr_over_sin.resize(n);
  const CKSolution& sol = cx.solution;
  for (int j = 0; j < n; ++j) {
    const double th = cx.quad.theta[j];
    const double r = level_radius(sol, cx.gamma, th, R2);
    cx.boundary.r[j] = r;
    // Implicit differentiation of u(r(theta), theta) = gamma.
    const double ur = sol.radial_derivative(r, th);
    const double ut = sol.theta_derivative(r, th);
    const double dr = -ut / ur;
    cx.boundary.dr[j] = dr;
    // r'(theta)/sin(theta) = g(r)/u_r analytically (u_theta = -g sin theta).
    cx.boundary.dr_over_sin[j] = mode1(sol, r) / ur;
    cx.boundary.ddr[j] = -(sol.radial_second(r, th) * dr * dr +
                           2.0 * sol.mixed_second(r, th) * dr +
                           sol.theta_second(r, th)) /
                         ur;
    cx.level_sup_error =
        std::max(cx.level_sup_error, std::abs(sol.value(r, th) - cx.gamma));
  }

  const SurfaceGeometry geom = surface_geometry(cx.boundary);
  double wsum = 0.0, flux_acc = 0.0, r_acc = 0.0, d_acc = 0.0;
  std::vector<double> flux(n), dist(n);
  for (int j = 0; j < n; ++j) {
    const double r = cx.boundary.r[j], th = cx.boundary.theta[j];
    flux[j] = sol.radial_derivative(r, th) * geom.nu_rad[j] +
              (sol.theta_derivative(r, th) / r) * geom.nu_tan[j];
    dist[j] = std::hypot(r * std::cos(th) - eps, r * std::sin(th));
    const double w = cx.quad.weight[j] * geom.area_factor[j];
    wsum += w;
    flux_acc += w * flux[j];
    r_acc += w * r;
    d_acc += w * dist[j];
  }
  cx.flux_mean = flux_acc / wsum;
  const double r_mean = r_acc / wsum, d_mean = d_acc / wsum;
  double flux_var = 0.0;
  for (int j = 0; j < n; ++j) {
    const double w = cx.quad.weight[j] * geom.area_factor[j];
    flux_var += w * (flux[j] - cx.flux_mean) * (flux[j] - cx.flux_mean);
    cx.asphericity_origin =
        std::max(cx.asphericity_origin, std::abs(cx.boundary.r[j] - r_mean));
    cx.asphericity_center =
        std::max(cx.asphericity_center, std::abs(dist[j] - d_mean));
  }
  cx.flux_std = std::sqrt(flux_var / wsum);

  // Radiality probes strictly inside the inclusion.
  for (double frac : {0.2, 0.5, 0.8})
    cx.radiality_std =
        std::max(cx.radiality_std, radiality_spread(sol, frac * (R - eps)));

  // Transmission certificate: the glued function (interior paraboloid inside,
  // exterior solution outside) must match in value and in sigma-weighted flux
  // across |x| = R. Both gaps are closed-form zeros; report the rounding.
  const int cgrid = 1024;
  for (int j = 0; j < cgrid; ++j) {
    const double th = 2.0 * kPi * j / cgrid;
    cx.cauchy_value_gap =
        std::max(cx.cauchy_value_gap,
                 std::abs(sol.value(R, th) - sol.interior_value(R, th)));
    // sigma_c * d/dr interior = (R - eps cos theta) = the Neumann datum.
    cx.cauchy_flux_gap =
        std::max(cx.cauchy_flux_gap, std::abs(sol.radial_derivative(R, th) -
                                              (R - eps * std::cos(th))));
  }
  return cx;
}

namespace {

/// Values on a uniform angular grid, interpolated by a sliding degree-7
/// Lagrange (Newton-form) polynomial. Periodic continuation for full-circle
/// grids, even reflection across theta = 0 and theta = pi otherwise.
class UniformKnotInterpolant {
 public:
  UniformKnotInterpolant(std::vector<double> values, double spacing, bool periodic)
      : vals_(std::move(values)), h_(spacing), periodic_(periodic) {
    if (static_cast<int>(vals_.size()) < 8)
      throw std::invalid_argument("knot interpolant: need at least 8 knots");
  }

  void eval(double theta, double& p, double& dp, double& ddp) const {
    const int cell = static_cast<int>(std::floor(theta / h_));
    constexpr int kOrder = 8;
    double x[kOrder], c[kOrder];
    for (int i = 0; i < kOrder; ++i) {
      const int idx = cell - 3 + i;
      x[i] = idx * h_;
      c[i] = value_at(idx);
    }
    for (int l = 1; l < kOrder; ++l)
      for (int i = kOrder - 1; i >= l; --i) c[i] = (c[i] - c[i - 1]) / (x[i] - x[i - l]);
    p = c[kOrder - 1];
    dp = 0.0;
    ddp = 0.0;
    for (int i = kOrder - 2; i >= 0; --i) {
      const double d = theta - x[i];
      ddp = ddp * d + 2.0 * dp;
      dp = dp * d + p;
      p = p * d + c[i];
    }
  }

 private:
  double value_at(int idx) const {
    if (periodic_) {
      const int m = static_cast<int>(vals_.size());
      return vals_[((idx % m) + m) % m];
    }
    const int m = static_cast<int>(vals_.size()) - 1;  // knots 0..m cover [0, pi]
    int k = ((idx % (2 * m)) + 2 * m) % (2 * m);
    if (k > m) k = 2 * m - k;
    return vals_[k];
  }

  std::vector<double> vals_;
  double h_;
  bool periodic_;
};

}  // namespace

TwoPhaseFrame translate_to_identity_frame(const CKSolution& sol, double gamma,
                                          double outer_bracket, int angular_order,
                                          int quadrature_order) {
  if (angular_order < 8)
    throw std::invalid_argument("translate_to_identity_frame: angular_order must be >= 8");
  if (quadrature_order < angular_order)
    throw std::invalid_argument(
        "translate_to_identity_frame: quadrature_order must be >= angular_order");

  const bool periodic = (sol.dim == 2);
  const int m = angular_order;
  const double h = (periodic ? 2.0 * kPi : kPi) / m;
  std::vector<double> knots(periodic ? m : m + 1);
  for (int i = 0; i < static_cast<int>(knots.size()); ++i)
    knots[i] = level_radius(sol, gamma, i * h, outer_bracket);
  const UniformKnotInterpolant interp(std::move(knots), h, periodic);

  TwoPhaseFrame frame;
  frame.dim = sol.dim;
  frame.sigma_c = sol.sigma_c;
  frame.lambda_sq = 2.0 * sol.sigma_c * gamma;
  frame.inner_radius = sol.inclusion_radius;
  frame.shift = sol.epsilon;
  frame.quad = build_quadrature(sol.dim, quadrature_order);
  const int n = frame.quad.size();
  frame.outer.dim = sol.dim;
  frame.outer.theta = frame.quad.theta;
  frame.outer.r.resize(n);
  frame.outer.dr.resize(n);
  frame.outer.ddr.resize(n);
  frame.outer.dr_over_sin.resize(n);
  for (int j = 0; j < n; ++j) {
    const double th = frame.quad.theta[j];
    double p, dp, ddp;
    interp.eval(th, p, dp, ddp);
    frame.outer.r[j] = p;
    frame.outer.dr[j] = dp;
    frame.outer.ddr[j] = ddp;
    const double s = std::sin(th);
    frame.outer.dr_over_sin[j] = (std::abs(s) > 1e-12) ? dp / s : 0.0;
  }

  frame.u = [sol, gamma](double r, double th) { return sol.value(r, th) - gamma; };
  frame.u_r = [sol](double r, double th) { return sol.radial_derivative(r, th); };
  frame.u_theta = [sol](double r, double th) { return sol.theta_derivative(r, th); };
  frame.cs_density = [sol](double r, double th) { return sol.deficit_density(r, th); };
  return frame;
}

}  // namespace twophase
