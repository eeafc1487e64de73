#include "twophase/identities.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace twophase {

namespace {
constexpr double kPi = std::numbers::pi;
}

double unit_ball_volume(int dim) {
  if (dim < 1) throw std::invalid_argument("unit_ball_volume: dim must be >= 1");
  return std::pow(kPi, dim / 2.0) / std::tgamma(dim / 2.0 + 1.0);
}

double unit_sphere_area(int dim) { return dim * unit_ball_volume(dim); }

double term_I(const AngularQuadrature& quad, const SurfaceGraph& outer,
              const SurfaceGeometry& geom, const std::vector<double>& u_nu,
              double shift, double xi1) {
  if (outer.size() != quad.size() || static_cast<int>(u_nu.size()) != quad.size())
    throw std::invalid_argument("term_I: node count mismatch");
  double acc = 0.0;
  for (int j = 0; j < quad.size(); ++j) {
    // <e1, nu> at a point of the meridian plane: nu = nu_rad omega + nu_tan omega',
    // omega.e1 = cos(theta), omega'.e1 = -sin(theta).
    const double e1_nu =
        geom.nu_rad[j] * std::cos(outer.theta[j]) - geom.nu_tan[j] * std::sin(outer.theta[j]);
    const double support_shifted = geom.support[j] - (shift + xi1) * e1_nu;
    const double un = u_nu[j];
    acc += quad.weight[j] * geom.area_factor[j] * un * un * (un - support_shifted);
  }
  return 0.5 * acc;
}

namespace {

/// Pointwise data on the sphere |y - z| = 1 parametrized by y = z + omega(theta):
/// nu = omega, <y,nu> = 1 + z1 cos(theta), |y|^2 = 1 + 2 z1 cos(theta) + z1^2,
/// <D_tau nu y_tau, y_tau> = |y|^2 - <y,nu>^2 (curvature 1), H = 1.
struct SpherePoint {
  double y_nu, y_sq, contraction, e1_nu, y1;
};

SpherePoint sphere_point(const OffsetBallConfig& config, double theta) {
  const double c = std::cos(theta);
  SpherePoint p;
  p.y_nu = 1.0 + config.z1 * c;
  p.y_sq = 1.0 + 2.0 * config.z1 * c + config.z1 * config.z1;
  p.contraction = p.y_sq - p.y_nu * p.y_nu;
  p.e1_nu = c;
  p.y1 = config.z1 + c;
  return p;
}

void check_offset_ball(const OffsetBallConfig& config) {
  if (config.dim < 2) throw std::invalid_argument("offset ball: dim must be >= 2");
  if (!(config.sigma_c > 0.0))
    throw std::invalid_argument("offset ball: sigma_c must be positive");
}

}  // namespace

double term_II_quadrature(const OffsetBallConfig& config, const AngularQuadrature& quad) {
  check_offset_ball(config);
  if (quad.dim != config.dim) throw std::invalid_argument("term_II_quadrature: dim mismatch");
  const double sig = config.sigma_c;
  const double lam2 = config.lambda * config.lambda;
  double acc = 0.0;
  for (int j = 0; j < quad.size(); ++j) {
    const SpherePoint p = sphere_point(config, quad.theta[j]);
    const double integrand =
        p.y_nu * (p.y_nu * p.y_nu - p.y_sq) +
        0.5 * (lam2 - p.y_sq) *
            (p.contraction / sig + (config.dim - 1) * (1.0 - p.y_nu) * p.y_nu);
    acc += quad.weight[j] * integrand;  // unit sphere: area factor 1
  }
  return (1.0 / sig) * (1.0 / sig - 1.0) * acc;
}

double term_II_closed(const OffsetBallConfig& config) {
  check_offset_ball(config);
  const double sig = config.sigma_c;
  const double lam2 = config.lambda * config.lambda;
  const double zsq = config.z1 * config.z1;
  const double f = 1.0 / sig - 1.0;
  return (1.0 / sig) * f * f * (config.dim - 1) * 0.5 * (lam2 - zsq - 1.0) *
         unit_ball_volume(config.dim) * zsq;
}

double term_III_quadrature(const OffsetBallConfig& config, const AngularQuadrature& quad,
                           double xi1) {
  check_offset_ball(config);
  if (quad.dim != config.dim) throw std::invalid_argument("term_III_quadrature: dim mismatch");
  const double sig = config.sigma_c;
  const double lam2 = config.lambda * config.lambda;
  double acc = 0.0;
  for (int j = 0; j < quad.size(); ++j) {
    const SpherePoint p = sphere_point(config, quad.theta[j]);
    const double u = (p.y_sq - lam2) / (2.0 * sig);  // inner quadratic trace
    const double xi_nu = xi1 * p.e1_nu;
    const double xi_y = xi1 * p.y1;
    const double integrand =
        config.dim * u * xi_nu +
        0.5 * xi_nu * ((1.0 - 1.0 / (sig * sig)) * p.y_nu * p.y_nu + p.y_sq / (sig * sig)) -
        (1.0 - 1.0 / sig) * p.y_nu * p.y_nu * xi_nu - p.y_nu * xi_y / sig;
    acc += quad.weight[j] * integrand;
  }
  return acc;
}

double term_III_closed(const OffsetBallConfig& config, double xi1) {
  check_offset_ball(config);
  return (1.0 / config.sigma_c - 1.0) * config.z1 * xi1 * unit_ball_volume(config.dim);
}

Eigen::VectorXd grad_xi_III_closed(const OffsetBallConfig& config) {
  check_offset_ball(config);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(config.dim);
  g[0] = (1.0 / config.sigma_c - 1.0) * config.z1 * unit_ball_volume(config.dim);
  return g;
}

Eigen::VectorXd grad_xi_III_surface(const OffsetBallConfig& config,
                                    const AngularQuadrature& quad) {
  check_offset_ball(config);
  if (quad.dim != config.dim) throw std::invalid_argument("grad_xi_III_surface: dim mismatch");
  const double sig = config.sigma_c;
  // Bulk moment of the unit ball about z: integral of y over B_1(z) = z |B_1|.
  double e1 = (config.dim / sig + 1.0 / (sig * sig)) * config.z1 * unit_ball_volume(config.dim);
  const double coeff = 1.0 / sig - 0.5 - 0.5 / (sig * sig);
  for (int j = 0; j < quad.size(); ++j) {
    const SpherePoint p = sphere_point(config, quad.theta[j]);
    // e1 components: nu.e1 = cos(theta), y.e1 = y1.
    e1 += quad.weight[j] * (coeff * p.y_nu * p.y_nu * p.e1_nu - p.y_nu * p.y1 / sig);
  }
  Eigen::VectorXd g = Eigen::VectorXd::Zero(config.dim);
  g[0] = e1;
  return g;
}

DeficitResult deficit_integral(const AngularQuadrature& quad, double inner_radius,
                               const SurfaceGraph& outer, int radial_order,
                               const std::function<double(double, double)>& u,
                               const std::function<double(double, double)>& density) {
  if (outer.size() != quad.size())
    throw std::invalid_argument("deficit_integral: node count mismatch");
  if (radial_order < 2) throw std::invalid_argument("deficit_integral: radial_order must be >= 2");
  if (!(inner_radius > 0.0))
    throw std::invalid_argument("deficit_integral: inner radius must be positive");

  const auto integrate = [&](int order) {
    std::vector<double> gx, gw;
    gauss_legendre(order, gx, gw);
    double acc = 0.0;
    double min_mu = std::numeric_limits<double>::infinity();
    for (int j = 0; j < quad.size(); ++j) {
      const double lo = inner_radius, hi = outer.r[j];
      if (hi <= lo)
        throw std::invalid_argument("deficit_integral: outer surface inside the interface");
      const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
      double radial = 0.0;
      for (int i = 0; i < order; ++i) {
        const double r = mid + half * gx[i];
        const double mu = -u(r, outer.theta[j]);
        if (mu < min_mu) min_mu = mu;
        radial += gw[i] * mu * density(r, outer.theta[j]) *
                  std::pow(r, quad.dim - 1);
      }
      acc += quad.weight[j] * half * radial;
    }
    return std::pair<double, double>(acc, min_mu);
  };

  const auto [value, min_mu] = integrate(radial_order);
  const auto [coarse, coarse_mu] = integrate(std::max(2, radial_order / 2));
  (void)coarse_mu;
  DeficitResult res;
  res.value = value;
  res.refinement_delta = std::abs(value - coarse);
  res.min_minus_u = min_mu;
  return res;
}

IdentityReport verify_identity(const TwoPhaseFrame& frame, double xi1, int radial_order) {
  if (frame.outer.size() != frame.quad.size())
    throw std::invalid_argument("verify_identity: outer surface and quadrature disagree");
  if (!(frame.sigma_c > 0.0))
    throw std::invalid_argument("verify_identity: sigma_c must be positive");

  IdentityReport rep;
  rep.xi1 = xi1;

  // Outer term: u_nu sampled from the supplied gradient, normals from the
  // surface graph (no level-set assumption; any domain-representation error
  // shows up as identity residual, which is the point).
  const SurfaceGeometry geom = surface_geometry(frame.outer);
  std::vector<double> u_nu(frame.quad.size());
  double outer_sup = 0.0;
  for (int j = 0; j < frame.quad.size(); ++j) {
    const double r = frame.outer.r[j], th = frame.outer.theta[j];
    u_nu[j] = frame.u_r(r, th) * geom.nu_rad[j] + (frame.u_theta(r, th) / r) * geom.nu_tan[j];
    outer_sup = std::max(outer_sup, std::abs(frame.u(r, th)));
  }
  rep.outer_trace_sup = outer_sup;
  rep.term_i = term_I(frame.quad, frame.outer, geom, u_nu, frame.shift, xi1);

  // Interface terms on the sphere |x| = R about the original origin, which is
  // B_R(-shift e1) in the shifted frame. The closed-sphere quadrature types
  // assume unit radius; generalize by scaling: substitute y = z + R omega.
  // For the radius-R sphere the II/III integrands are evaluated directly.
  const double sig = frame.sigma_c;
  const double R = frame.inner_radius;
  const double z1 = -frame.shift;
  const double lam2 = frame.lambda_sq;
  double acc2 = 0.0, acc3 = 0.0, trace_gap = 0.0;
  for (int j = 0; j < frame.quad.size(); ++j) {
    const double th = frame.quad.theta[j];
    const double c = std::cos(th);
    const double y_nu = R + z1 * c;
    const double y_sq = R * R + 2.0 * R * z1 * c + z1 * z1;
    const double contraction = (y_sq - y_nu * y_nu) / R;
    const double H = 1.0 / R;
    const double area = std::pow(R, frame.quad.dim - 1);
    const double w = frame.quad.weight[j] * area;
    const double i2 =
        y_nu * (y_nu * y_nu - y_sq) +
        0.5 * (lam2 - y_sq) *
            (contraction / sig + (frame.dim - 1) * (1.0 - H * y_nu) * y_nu);
    acc2 += w * i2;
    const double u_trace = frame.u(R, th);
    trace_gap = std::max(trace_gap, std::abs(u_trace - (y_sq - lam2) / (2.0 * sig)));
    const double xi_nu = xi1 * c;
    const double xi_y = xi1 * (z1 + R * c);
    const double i3 =
        frame.dim * u_trace * xi_nu +
        0.5 * xi_nu * ((1.0 - 1.0 / (sig * sig)) * y_nu * y_nu + y_sq / (sig * sig)) -
        (1.0 - 1.0 / sig) * y_nu * y_nu * xi_nu - y_nu * xi_y / sig;
    acc3 += w * i3;
  }
  rep.term_ii = (1.0 / sig) * (1.0 / sig - 1.0) * acc2;
  rep.term_iii = acc3;
  rep.interface_trace_gap = trace_gap;

  const DeficitResult dfc =
      deficit_integral(frame.quad, R, frame.outer, radial_order, frame.u, frame.cs_density);
  rep.deficit = dfc.value;
  rep.refinement_delta = dfc.refinement_delta;
  rep.min_minus_u = dfc.min_minus_u;

  rep.residual = std::abs(rep.deficit - (rep.term_i + rep.term_ii + rep.term_iii));
  const double scale = std::max({std::abs(rep.deficit), std::abs(rep.term_i),
                                 std::abs(rep.term_ii), std::abs(rep.term_iii), 1e-30});
  rep.relative_residual = rep.residual / scale;
  return rep;
}

}  // namespace twophase
