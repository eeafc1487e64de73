#include "twophase/harmonics.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace twophase {

namespace {

constexpr double kPi = std::numbers::pi;

/// Legendre P_k(x) with first and second derivatives, by the standard
/// three-term recurrence (k+1) P_{k+1} = (2k+1) x P_k - k P_{k-1} and its
/// differentiated forms. Stable for the modest degrees used here and free of
/// the (1-x^2)^{-1} poles that the classical derivative identities carry.
struct LegendreEval {
  double p, dp, ddp;
};

LegendreEval legendre(int k, double x) {
  if (k == 0) return {1.0, 0.0, 0.0};
  double pm = 1.0, dpm = 0.0, ddpm = 0.0;  // P_{j-1}
  double p = x, dp = 1.0, ddp = 0.0;       // P_j
  for (int j = 1; j < k; ++j) {
    const double a = (2.0 * j + 1.0) / (j + 1.0);
    const double b = static_cast<double>(j) / (j + 1.0);
    const double pn = a * x * p - b * pm;
    const double dpn = a * (p + x * dp) - b * dpm;
    const double ddpn = a * (2.0 * dp + x * ddp) - b * ddpm;
    pm = p; dpm = dp; ddpm = ddp;
    p = pn; dp = dpn; ddp = ddpn;
  }
  return {p, dp, ddp};
}

}  // namespace

double harmonic_eigenvalue(int k, int dim) {
  if (k < 0) throw std::invalid_argument("harmonic_eigenvalue: negative degree");
  if (dim < 2) throw std::invalid_argument("harmonic_eigenvalue: dim must be >= 2");
  return static_cast<double>(k) * (k + dim - 2);
}

ZonalBasis::ZonalBasis(int dim, int max_degree) : dim_(dim), max_degree_(max_degree) {
  if (dim != 2 && dim != 3)
    throw std::invalid_argument("ZonalBasis: dim must be 2 or 3, got " + std::to_string(dim));
  if (max_degree < 0) throw std::invalid_argument("ZonalBasis: negative max_degree");

  // Normalization constants by quadrature (closed forms exist; the quadrature
  // route keeps the constants consistent with the integration rules used
  // everywhere else, and tests pin it against the closed forms).
  AngularQuadrature quad = build_quadrature(dim, 2 * (max_degree + 2));
  norm_.resize(max_degree + 1);
  for (int k = 0; k <= max_degree; ++k) {
    double q = 0.0;
    for (int j = 0; j < quad.size(); ++j) {
      const double z = shape(k, quad.theta[j]);
      q += quad.weight[j] * z * z;
    }
    norm_[k] = 1.0 / std::sqrt(q);
  }
}

void ZonalBasis::check_degree(int k) const {
  if (k < 0 || k > max_degree_)
    throw std::invalid_argument("ZonalBasis: degree " + std::to_string(k) +
                                " outside [0, " + std::to_string(max_degree_) + "]");
}

double ZonalBasis::shape(int k, double theta) const {
  check_degree(k);
  if (dim_ == 2) return std::cos(k * theta);
  return legendre(k, std::cos(theta)).p;
}

double ZonalBasis::shape_d1(int k, double theta) const {
  check_degree(k);
  if (dim_ == 2) return -k * std::sin(k * theta);
  return -std::sin(theta) * legendre(k, std::cos(theta)).dp;
}

double ZonalBasis::shape_d2(int k, double theta) const {
  check_degree(k);
  if (dim_ == 2) return -static_cast<double>(k) * k * std::cos(k * theta);
  const double c = std::cos(theta), s = std::sin(theta);
  const LegendreEval e = legendre(k, c);
  // d^2/dtheta^2 P_k(cos theta) = sin^2 P_k'' - cos P_k'
  return s * s * e.ddp - c * e.dp;
}

double ZonalBasis::shape_d1_over_sin(int k, double theta) const {
  check_degree(k);
  if (dim_ == 2) {
    // Rarely needed for N = 2, but defined: -k sin(k theta)/sin(theta),
    // finite at theta = 0, pi (Chebyshev U_{k-1} up to sign conventions).
    const double s = std::sin(theta);
    if (std::abs(s) > 1e-8) return -k * std::sin(k * theta) / s;
    // l'Hopital at the poles
    return -static_cast<double>(k) * k * std::cos(k * theta) / std::cos(theta);
  }
  return -legendre(k, std::cos(theta)).dp;
}

double ZonalBasis::shape_norm_sq(int k) const {
  check_degree(k);
  return 1.0 / (norm_[k] * norm_[k]);
}

double ZonalBasis::eval(int k, double theta) const { return norm_[k] * shape(k, theta); }
double ZonalBasis::eval_d1(int k, double theta) const { return norm_[k] * shape_d1(k, theta); }
double ZonalBasis::eval_d2(int k, double theta) const { return norm_[k] * shape_d2(k, theta); }
double ZonalBasis::eval_d1_over_sin(int k, double theta) const {
  return norm_[k] * shape_d1_over_sin(k, theta);
}
double ZonalBasis::norm_const(int k) const {
  check_degree(k);
  return norm_[k];
}

double AngularQuadrature::integrate(const std::vector<double>& samples) const {
  if (samples.size() != weight.size())
    throw std::invalid_argument("AngularQuadrature::integrate: sample count mismatch");
  double acc = 0.0;
  for (size_t j = 0; j < samples.size(); ++j) acc += weight[j] * samples[j];
  return acc;
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  // Roots of P_n by Newton iteration from Chebyshev-like initial guesses.
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      // evaluate P_n and P_n' at x
      double pm = 1.0, p = x;
      for (int j = 1; j < n; ++j) {
        const double pn = ((2.0 * j + 1.0) * x * p - j * pm) / (j + 1.0);
        pm = p;
        p = pn;
      }
      dp = n * (x * p - pm) / (x * x - 1.0);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes[i] = -x;
    nodes[n - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    weights[i] = w;
    weights[n - 1 - i] = w;
  }
}

AngularQuadrature build_quadrature(int dim, int n) {
  if (dim != 2 && dim != 3) throw std::invalid_argument("build_quadrature: dim must be 2 or 3");
  if (n < 2) throw std::invalid_argument("build_quadrature: need at least 2 nodes");
  AngularQuadrature q;
  q.dim = dim;
  q.theta.resize(n);
  q.weight.resize(n);
  if (dim == 2) {
    for (int j = 0; j < n; ++j) {
      q.theta[j] = 2.0 * kPi * j / n;
      q.weight[j] = 2.0 * kPi / n;
    }
  } else {
    std::vector<double> x, w;
    gauss_legendre(n, x, w);
    // ascending in x = cos(theta) means descending in theta; store ascending
    // theta so surface tables read naturally from pole to pole.
    for (int j = 0; j < n; ++j) {
      q.theta[j] = std::acos(x[n - 1 - j]);
      q.weight[j] = 2.0 * kPi * w[n - 1 - j];
    }
  }
  return q;
}

SurfaceGraph zonal_surface(const ZonalBasis& basis, double base,
                           const std::vector<double>& coeffs,
                           const std::vector<double>& thetas) {
  if (static_cast<int>(coeffs.size()) > basis.max_degree() + 1)
    throw std::invalid_argument("zonal_surface: more coefficients than basis degrees");
  SurfaceGraph g;
  g.dim = basis.dim();
  g.theta = thetas;
  const int n = g.size();
  g.r.assign(n, base);
  g.dr.assign(n, 0.0);
  g.ddr.assign(n, 0.0);
  g.dr_over_sin.assign(n, 0.0);
  for (int j = 0; j < n; ++j) {
    for (size_t k = 0; k < coeffs.size(); ++k) {
      const double c = coeffs[k];
      if (c == 0.0) continue;
      const int kk = static_cast<int>(k);
      g.r[j] += c * basis.shape(kk, thetas[j]);
      g.dr[j] += c * basis.shape_d1(kk, thetas[j]);
      g.ddr[j] += c * basis.shape_d2(kk, thetas[j]);
      g.dr_over_sin[j] += c * basis.shape_d1_over_sin(kk, thetas[j]);
    }
  }
  return g;
}

SurfaceGeometry surface_geometry(const SurfaceGraph& g) {
  const int n = g.size();
  SurfaceGeometry geo;
  geo.nu_rad.resize(n);
  geo.nu_tan.resize(n);
  geo.support.resize(n);
  geo.area_factor.resize(n);
  geo.kappa_meridian.resize(n);
  geo.mean_curvature.resize(n);
  geo.xtau_sq.resize(n);
  geo.contraction.resize(n);
  for (int j = 0; j < n; ++j) {
    const double r = g.r[j], dr = g.dr[j], ddr = g.ddr[j];
    if (r <= 0.0) throw std::invalid_argument("surface_geometry: non-positive radius");
    const double s2 = r * r + dr * dr;
    const double s = std::sqrt(s2);
    geo.nu_rad[j] = r / s;
    geo.nu_tan[j] = -dr / s;
    geo.support[j] = r * r / s;
    geo.area_factor[j] = (g.dim == 2 ? s : r * s);
    // Meridian curvature of the plane curve theta -> r(theta) omega(theta).
    const double k1 = (r * r + 2.0 * dr * dr - r * ddr) / (s2 * s);
    geo.kappa_meridian[j] = k1;
    if (g.dim == 2) {
      geo.mean_curvature[j] = k1;
    } else {
      // Rotational principal curvature (r - r' cot theta)/(r s), written with
      // r'/sin(theta) so the pole limit r''... matches the meridian value.
      const double k2 = (r - std::cos(g.theta[j]) * g.dr_over_sin[j]) / (r * s);
      geo.mean_curvature[j] = 0.5 * (k1 + k2);
    }
    geo.xtau_sq[j] = r * r * dr * dr / s2;
    geo.contraction[j] = k1 * geo.xtau_sq[j];
  }
  return geo;
}

void tangential_split(const Eigen::MatrixXd& gradients, const Eigen::MatrixXd& normals,
                      Eigen::MatrixXd& tangential, Eigen::VectorXd& normal_component) {
  if (gradients.rows() != normals.rows() || gradients.cols() != normals.cols())
    throw std::invalid_argument("tangential_split: shape mismatch");
  const Eigen::Index n = gradients.rows();
  tangential.resizeLike(gradients);
  normal_component.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double nrm = normals.row(i).norm();
    if (std::abs(nrm - 1.0) > 1e-10)
      throw std::invalid_argument("tangential_split: normals must be unit vectors");
    const double fn = gradients.row(i).dot(normals.row(i));
    normal_component[i] = fn;
    tangential.row(i) = gradients.row(i) - fn * normals.row(i);
  }
}

}  // namespace twophase
