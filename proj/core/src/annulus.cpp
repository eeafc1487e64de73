#include "twophase/annulus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "twophase/radial.hpp"

namespace twophase {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kMinGap = 1e-3;  // smallest tolerated inner radius / surface separation

/// Scaled radial profiles of the solver ansatz. The decaying family is
/// normalized to 1 at the base inner radius so its collocation column stays
/// O(1) for high degrees (raw r^{2-N-k} reaches rho^{-k-...}, which wrecks
/// the QR conditioning long before machine precision does).
struct SolverRadial {
  int dim, k;
  double rho;

  bool log_branch() const { return dim == 2 && k == 0; }
  double s(double r) const { return std::pow(r, k); }
  double ds(double r) const { return k == 0 ? 0.0 : k * std::pow(r, k - 1); }
  double dds(double r) const {
    return k < 2 ? 0.0 : static_cast<double>(k) * (k - 1) * std::pow(r, k - 2);
  }
  double t(double r) const {
    if (log_branch()) return std::log(r) / std::log(rho);
    return std::pow(r / rho, 2 - dim - k);
  }
  double dt(double r) const {
    if (log_branch()) return 1.0 / (r * std::log(rho));
    return (2.0 - dim - k) * t(r) / r;
  }
  double ddt(double r) const {
    if (log_branch()) return -1.0 / (r * r * std::log(rho));
    const double e = 2.0 - dim - k;
    return e * (e - 1.0) * t(r) / (r * r);
  }
};

std::vector<double> radius_samples(const ZonalBasis& basis, double base,
                                   const std::vector<double>& coeffs,
                                   const std::vector<double>& thetas) {
  std::vector<double> r(thetas.size(), base);
  for (size_t j = 0; j < thetas.size(); ++j)
    for (size_t k = 0; k < coeffs.size(); ++k)
      if (coeffs[k] != 0.0) r[j] += coeffs[k] * basis.shape(static_cast<int>(k), thetas[j]);
  return r;
}

/// Collocation angles on [0, pi]: midpoint-uniform for N = 2 (the zonal
/// problem is even in theta, so the half period carries everything),
/// Gauss-Legendre in cos(theta) for N = 3.
std::vector<double> collocation_angles(int dim, int n) {
  std::vector<double> th(n);
  if (dim == 2) {
    for (int j = 0; j < n; ++j) th[j] = kPi * (j + 0.5) / n;
  } else {
    std::vector<double> x, w;
    gauss_legendre(n, x, w);
    for (int j = 0; j < n; ++j) th[j] = std::acos(x[n - 1 - j]);
  }
  return th;
}

}  // namespace

void PerturbedAnnulus::validate() const {
  if (dim != 2 && dim != 3)
    throw std::invalid_argument("PerturbedAnnulus: dim must be 2 or 3 for the zonal solver");
  if (!(rho > 0.0 && rho < 1.0))
    throw std::invalid_argument("PerturbedAnnulus: rho must lie in (0, 1)");
  if (eta.size() != xi.size())
    throw std::invalid_argument("PerturbedAnnulus: eta/xi truncation mismatch");
  if (eta.empty()) throw std::invalid_argument("PerturbedAnnulus: empty coefficient vectors");
  ZonalBasis basis(dim, truncation());
  const int scan = 720;
  for (int j = 0; j <= scan; ++j) {
    const double th = kPi * j / scan;
    double rin = rho, rout = 1.0;
    for (size_t k = 0; k < eta.size(); ++k) {
      rin += eta[k] * basis.shape(static_cast<int>(k), th);
      rout += xi[k] * basis.shape(static_cast<int>(k), th);
    }
    if (rin < kMinGap)
      throw DegenerateAnnulus("PerturbedAnnulus: inner boundary collapsed toward the origin");
    if (rout - rin < kMinGap)
      throw DegenerateAnnulus("PerturbedAnnulus: boundaries within " + std::to_string(kMinGap) +
                              " of touching");
  }
}

PerturbedAnnulus PerturbedAnnulus::trivial(int dim, double rho, int truncation) {
  PerturbedAnnulus d;
  d.dim = dim;
  d.rho = rho;
  d.eta.assign(truncation + 1, 0.0);
  d.xi.assign(truncation + 1, 0.0);
  return d;
}

SpectralSolution solve_dirichlet(const PerturbedAnnulus& domain, double sigma_c,
                                 const SolverOptions& opts) {
  domain.validate();
  PhaseConfig cfg{domain.dim, sigma_c, domain.rho};
  const double T = transmission_constant(cfg);

  const int K = opts.resolve_truncation(domain.truncation());
  const int nc = opts.resolve_collocation(K);
  if (nc < K + 1)
    throw std::invalid_argument("solve_dirichlet: fewer collocation nodes than unknown modes");

  auto basis = std::make_shared<ZonalBasis>(domain.dim, K);
  const std::vector<double> th = collocation_angles(domain.dim, nc);
  const std::vector<double> r_in = radius_samples(*basis, domain.rho, domain.eta, th);
  const std::vector<double> r_out = radius_samples(*basis, 1.0, domain.xi, th);

  const int ncols = 2 * (K + 1);
  Eigen::MatrixXd A(2 * nc, ncols);
  Eigen::VectorXd rhs(2 * nc);
  for (int j = 0; j < nc; ++j) {
    const double ri = r_in[j], ro = r_out[j];
    rhs[j] = (ri * ri - T) / (2.0 * sigma_c) - ri * ri / 2.0;
    rhs[nc + j] = -ro * ro / 2.0;
    for (int k = 0; k <= K; ++k) {
      const SolverRadial rad{domain.dim, k, domain.rho};
      const double zk = basis->shape(k, th[j]);
      A(j, 2 * k) = rad.s(ri) * zk;
      A(j, 2 * k + 1) = rad.t(ri) * zk;
      A(nc + j, 2 * k) = rad.s(ro) * zk;
      A(nc + j, 2 * k + 1) = rad.t(ro) * zk;
    }
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
  const auto& Rdiag = qr.matrixR().diagonal();
  const double d0 = std::abs(Rdiag[0]);
  const double dn = std::abs(Rdiag[ncols - 1]);
  const double condition = (dn > 0.0) ? d0 / dn : std::numeric_limits<double>::infinity();
  if (!(condition < opts.max_condition))
    throw ResolutionError(
        "solve_dirichlet: collocation matrix condition estimate " + std::to_string(condition) +
        " exceeds " + std::to_string(opts.max_condition) +
        "; increase collocation nodes or reduce the solver truncation");
  const Eigen::VectorXd coef = qr.solve(rhs);

  SpectralSolution sol;
  sol.dim_ = domain.dim;
  sol.sigma_c_ = sigma_c;
  sol.T_ = T;
  sol.rho_ = domain.rho;
  sol.K_ = K;
  sol.a_.resize(K + 1);
  sol.b_.resize(K + 1);
  for (int k = 0; k <= K; ++k) {
    sol.a_[k] = coef[2 * k];
    sol.b_[k] = coef[2 * k + 1];
  }
  sol.bc_residual_ = (A * coef - rhs).cwiseAbs().maxCoeff();
  sol.condition_ = condition;
  sol.basis_ = std::move(basis);
  return sol;
}

FieldSample SpectralSolution::eval(double r, double theta) const {
  if (!(r > 0.0)) throw std::invalid_argument("SpectralSolution::eval: r must be positive");
  FieldSample f;
  f.u = r * r / 2.0;
  f.u_r = r;
  f.u_rr = 1.0;
  double u_th = 0.0, u_rth = 0.0, u_thth = 0.0, u_th_over_sin = 0.0;
  for (int k = 0; k <= K_; ++k) {
    const double a = a_[k], b = b_[k];
    if (a == 0.0 && b == 0.0) continue;
    const SolverRadial rad{dim_, k, rho_};
    const double fr = a * rad.s(r) + b * rad.t(r);
    const double dfr = a * rad.ds(r) + b * rad.dt(r);
    const double ddfr = a * rad.dds(r) + b * rad.ddt(r);
    f.u += fr * basis_->shape(k, theta);
    f.u_r += dfr * basis_->shape(k, theta);
    f.u_rr += ddfr * basis_->shape(k, theta);
    u_th += fr * basis_->shape_d1(k, theta);
    u_rth += dfr * basis_->shape_d1(k, theta);
    u_thth += fr * basis_->shape_d2(k, theta);
    u_th_over_sin += fr * basis_->shape_d1_over_sin(k, theta);
  }
  f.u_theta = u_th;
  f.u_rtheta = u_rth;
  f.u_thetatheta = u_thth;

  // Hessian in the orthonormal polar frame (e_r, e_theta[, e_phi]) at a point
  // of the meridian plane, then rotated to Cartesian axes. The azimuthal
  // entry uses u_theta/sin(theta) in analytic form so poles are exact.
  const double c = std::cos(theta), s = std::sin(theta);
  const double h_rr = f.u_rr;
  const double h_rt = u_rth / r - u_th / (r * r);
  const double h_tt = u_thth / (r * r) + f.u_r / r;
  f.grad = Eigen::VectorXd::Zero(dim_);
  f.hess = Eigen::MatrixXd::Zero(dim_, dim_);
  // frame vectors in the e1-e2 plane
  Eigen::VectorXd er = Eigen::VectorXd::Zero(dim_), et = Eigen::VectorXd::Zero(dim_);
  er[0] = c; er[1] = s;
  et[0] = -s; et[1] = c;
  f.grad = f.u_r * er + (u_th / r) * et;
  f.hess = h_rr * er * er.transpose() + h_rt * (er * et.transpose() + et * er.transpose()) +
           h_tt * et * et.transpose();
  double frob2 = h_rr * h_rr + 2.0 * h_rt * h_rt + h_tt * h_tt;
  double trace = h_rr + h_tt;
  if (dim_ == 3) {
    const double h_pp = f.u_r / r + c * u_th_over_sin / (r * r);
    f.hess(2, 2) = h_pp;
    frob2 += h_pp * h_pp;
    trace += h_pp;
  }
  f.cs_deficit_density = frob2 - trace * trace / dim_;
  return f;
}

double OverdetResidual::mode_norm() const {
  double acc = 0.0;
  for (double v : inner_modes) acc += v * v;
  for (double v : outer_modes) acc += v * v;
  return std::sqrt(acc);
}

OverdetResidual overdet_residual(const SpectralSolution& sol, const PerturbedAnnulus& domain,
                                 int projection_nodes) {
  const int K = domain.truncation();
  const int n = projection_nodes > 0 ? projection_nodes
                                     : std::max(2 * sol.truncation() + 6, 48);
  ZonalBasis basis(domain.dim, K);
  AngularQuadrature quad = build_quadrature(domain.dim, n);
  const SurfaceGraph inner = zonal_surface(basis, domain.rho, domain.eta, quad.theta);
  const SurfaceGraph outer = zonal_surface(basis, 1.0, domain.xi, quad.theta);
  const SurfaceGeometry gin = surface_geometry(inner);
  const SurfaceGeometry gout = surface_geometry(outer);

  OverdetResidual res;
  std::vector<double> f1(quad.size()), f2(quad.size());
  for (int j = 0; j < quad.size(); ++j) {
    {
      const FieldSample fs = sol.eval(inner.r[j], inner.theta[j]);
      const double u_nu = fs.u_r * gin.nu_rad[j] + (fs.u_theta / inner.r[j]) * gin.nu_tan[j];
      f1[j] = gin.support[j] - u_nu;  // <x, nu> - <grad u, nu>
      res.inner_sup = std::max(res.inner_sup, std::abs(f1[j]));
    }
    {
      const FieldSample fs = sol.eval(outer.r[j], outer.theta[j]);
      const double u_nu = fs.u_r * gout.nu_rad[j] + (fs.u_theta / outer.r[j]) * gout.nu_tan[j];
      f2[j] = u_nu - 1.0;
      res.outer_sup = std::max(res.outer_sup, std::abs(f2[j]));
    }
  }
  res.inner_modes.resize(K + 1);
  res.outer_modes.resize(K + 1);
  for (int k = 0; k <= K; ++k) {
    double p1 = 0.0, p2 = 0.0;
    for (int j = 0; j < quad.size(); ++j) {
      const double z = basis.shape(k, quad.theta[j]);
      p1 += quad.weight[j] * f1[j] * z;
      p2 += quad.weight[j] * f2[j] * z;
    }
    const double nrm = basis.shape_norm_sq(k);
    res.inner_modes[k] = p1 / nrm;
    res.outer_modes[k] = p2 / nrm;
  }
  return res;
}

}  // namespace twophase
