#include "twophase/linearization.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "twophase/harmonics.hpp"

namespace twophase {

namespace {

void check_bifurcation_params(int dim, double sigma_c, double R, int k) {
  if (dim < 2) throw std::invalid_argument("linearization: dim must be >= 2");
  if (k < 0) throw std::invalid_argument("linearization: negative mode index");
  if (!(R > 0.0 && R < 1.0))
    throw std::invalid_argument("linearization: R must lie in (0, 1), got " + std::to_string(R));
  if (!(sigma_c > 0.0) || !std::isfinite(sigma_c))
    throw std::invalid_argument("linearization: sigma_c must be positive and finite");
  if (sigma_c == 1.0)
    throw std::invalid_argument(
        "linearization: sigma_c = 1 has no inclusion contrast; the shape "
        "derivative degenerates and no bifurcation analysis applies");
}

}  // namespace

double RadialModeBasis::s(double r) const { return std::pow(r, k); }
double RadialModeBasis::ds(double r) const { return k == 0 ? 0.0 : k * std::pow(r, k - 1); }
double RadialModeBasis::dds(double r) const {
  if (k < 2) return 0.0;
  return static_cast<double>(k) * (k - 1) * std::pow(r, k - 2);
}

double RadialModeBasis::t(double r) const {
  if (log_branch()) return std::log(r);
  return std::pow(r, 2 - dim - k);
}
double RadialModeBasis::dt(double r) const {
  if (log_branch()) return 1.0 / r;
  const double e = 2 - dim - k;
  return e * std::pow(r, e - 1);
}
double RadialModeBasis::ddt(double r) const {
  if (log_branch()) return -1.0 / (r * r);
  const double e = 2 - dim - k;
  return e * (e - 1.0) * std::pow(r, e - 2);
}

ModeCoefficients mode_coefficients(int dim, double sigma_c, double R, int k) {
  check_bifurcation_params(dim, sigma_c, R, k);
  ModeCoefficients mc;
  mc.dim = dim;
  mc.k = k;
  mc.sigma_c = sigma_c;
  mc.R = R;
  mc.radial = RadialModeBasis{dim, k};
  const double contrast = (1.0 - sigma_c) / sigma_c;
  if (mc.radial.log_branch()) {
    const double L = std::log(R);
    mc.A = 0.0;
    mc.B = contrast * R / L;
    mc.C = -1.0;
    mc.D = 1.0 / L;
  } else {
    // denominators R^{N-2+2k} - 1 < 0 on (0,1)
    const double P = std::pow(R, dim - 2 + 2 * k);
    const double denom = P - 1.0;
    mc.A = contrast * std::pow(R, dim - 1 + k) / denom;
    mc.B = -mc.A;
    mc.C = 1.0 / denom;
    mc.D = -P / denom;
  }
  return mc;
}

double LinearizedField::radial_part(double r) const {
  const double ac = beta * coeffs.A + gamma * coeffs.C;
  const double bd = beta * coeffs.B + gamma * coeffs.D;
  return ac * coeffs.radial.s(r) + bd * coeffs.radial.t(r);
}

double LinearizedField::radial_derivative(double r) const {
  const double ac = beta * coeffs.A + gamma * coeffs.C;
  const double bd = beta * coeffs.B + gamma * coeffs.D;
  return ac * coeffs.radial.ds(r) + bd * coeffs.radial.dt(r);
}

double LinearizedField::ode_residual(double r) const {
  const double ac = beta * coeffs.A + gamma * coeffs.C;
  const double bd = beta * coeffs.B + gamma * coeffs.D;
  const double f = radial_part(r);
  const double df = radial_derivative(r);
  const double ddf = ac * coeffs.radial.dds(r) + bd * coeffs.radial.ddt(r);
  const double lam = harmonic_eigenvalue(coeffs.k, coeffs.dim);
  return ddf + (coeffs.dim - 1) * df / r - lam * f / (r * r);
}

double LinearizedField::value(double r, double theta, const ZonalBasis& basis) const {
  return radial_part(r) * basis.eval(coeffs.k, theta);
}

LinearizedField linearized_field(const ModeCoefficients& coeffs, double beta, double gamma) {
  return LinearizedField{coeffs, beta, gamma};
}

FrechetMatrix frechet_matrix(int dim, double sigma_c, double R, int k) {
  check_bifurcation_params(dim, sigma_c, R, k);
  FrechetMatrix m;
  m.dim = dim;
  m.k = k;
  m.sigma_c = sigma_c;
  m.R = R;
  const double q = (sigma_c - 1.0) / sigma_c;
  if (dim == 2 && k == 0) {
    // Log branch. The first row is -d/dr of the field at R, the second is
    // d/dr at 1 plus the identity term from the outer datum. Derived from the
    // mode coefficients above (B0 = -q R / log R carries a factor R that must
    // survive into the outer response).
    const double L = std::log(R);
    m.a = q / L;
    m.b = -1.0 / (R * L);
    m.c = -q * R / L;
    m.d = 1.0 + 1.0 / L;
  } else {
    const double P = std::pow(R, dim - 2 + 2 * k);
    const double denom = P - 1.0;
    m.a = q * (k * P + (k + dim - 2)) / denom;
    m.b = (2.0 - dim - 2.0 * k) * std::pow(R, k - 1) / denom;
    m.c = q * (2.0 - dim - 2.0 * k) * std::pow(R, dim - 1 + k) / denom;
    m.d = ((k + dim - 1) * P + (k - 1.0)) / denom;
  }
  return m;
}

double det_frechet(int dim, double sigma_c, double R, int k) {
  return frechet_matrix(dim, sigma_c, R, k).det();
}

double det_frechet_factored(int dim, double sigma_c, double R, int k) {
  check_bifurcation_params(dim, sigma_c, R, k);
  const double q = (sigma_c - 1.0) / sigma_c;
  if (k == 0) {
    if (dim == 2) return q / std::log(R);
    const double Pm = std::pow(R, 2 - dim);  // R^{2-N}
    return q * (dim - 2.0) * Pm / (1.0 - Pm);
  }
  if (k == 1) {
    const double P = std::pow(R, dim);
    return q * dim * P / (P - 1.0);
  }
  const double P = std::pow(R, dim - 2 + 2 * k);
  const double denom = P - 1.0;
  const double kk = static_cast<double>(k);
  const double c2 = kk * dim + kk * kk - kk;
  const double c1 = -2.0 * kk * dim - 2.0 * kk * kk + dim + 4.0 * kk - 2.0;
  const double c0 = kk * dim + kk * kk - dim - 3.0 * kk + 2.0;
  const double g = (c2 * P + c1) * P + c0;
  return q * g / (denom * denom);
}

FrechetMatrix frechet_matrix_dR(int dim, double sigma_c, double R, int k) {
  check_bifurcation_params(dim, sigma_c, R, k);
  FrechetMatrix m;
  m.dim = dim;
  m.k = k;
  m.sigma_c = sigma_c;
  m.R = R;
  const double q = (sigma_c - 1.0) / sigma_c;
  if (dim == 2 && k == 0) {
    const double L = std::log(R);
    m.a = -q / (R * L * L);
    m.b = (1.0 + L) / (R * R * L * L);
    m.c = -q * (L - 1.0) / (L * L);
    m.d = -1.0 / (R * L * L);
    return m;
  }
  const double mm = dim - 2.0 + 2.0 * k;  // also equals N + 2k - 2
  const double P = std::pow(R, dim - 2 + 2 * k);
  const double denom = P - 1.0;
  const double d2 = denom * denom;
  m.a = -q * mm * mm * std::pow(R, mm - 1.0) / d2;
  m.b = -mm * std::pow(R, k - 2.0) * ((k - 1.0) * denom - mm * P) / d2;
  m.c = -q * mm * std::pow(R, dim - 2.0 + k) * ((dim - 1.0 + k) * denom - mm * P) / d2;
  m.d = -mm * mm * std::pow(R, mm - 1.0) / d2;
  return m;
}

double det_frechet_dR(int dim, double sigma_c, double R, int k) {
  check_bifurcation_params(dim, sigma_c, R, k);
  if (dim == 2 && k == 0) return frechet_matrix_dR(dim, sigma_c, R, k).det();
  const double mm = dim - 2.0 + 2.0 * k;
  const double P = std::pow(R, dim - 2 + 2 * k);
  const double denom = P - 1.0;
  return ((1.0 - sigma_c) / sigma_c) * mm * mm * (dim + k - 1.0) * (k - 1.0) *
         std::pow(R, dim + 2.0 * k - 4.0) / (denom * denom);
}

double critical_radius(int dim, int k) {
  if (dim < 2) throw std::invalid_argument("critical_radius: dim must be >= 2");
  if (k < 2)
    throw std::invalid_argument(
        "critical_radius: det M(., k) has no root in (0, 1) for k < 2");
  const double mm = dim - 2.0 + 2.0 * k;
  const double root_pow = 1.0 - mm / (k * (dim + k - 1.0));
  return std::pow(root_pow, 1.0 / mm);
}

double critical_radius_bisection(int dim, double sigma_c, int k) {
  check_bifurcation_params(dim, sigma_c, 0.5, k);
  if (k < 2)
    throw std::invalid_argument(
        "critical_radius_bisection: det M(., k) has no root in (0, 1) for k < 2");
  const double lo_end = 1e-6, hi_end = 1.0 - 1e-6;
  const int scan = 1000;
  double lo = 0.0, hi = 0.0;
  double flo = 0.0;
  bool bracketed = false;
  double prev_r = lo_end;
  double prev_f = det_frechet(dim, sigma_c, prev_r, k);
  for (int i = 1; i <= scan; ++i) {
    const double r = lo_end + (hi_end - lo_end) * i / scan;
    const double f = det_frechet(dim, sigma_c, r, k);
    if (prev_f == 0.0) return prev_r;
    if ((prev_f < 0.0) != (f < 0.0)) {
      lo = prev_r;
      hi = r;
      flo = prev_f;
      bracketed = true;
      break;
    }
    prev_r = r;
    prev_f = f;
  }
  if (!bracketed)
    throw std::runtime_error("critical_radius_bisection: no sign change found in (0, 1)");
  while (hi - lo > 1e-13) {
    const double mid = 0.5 * (lo + hi);
    const double fm = det_frechet(dim, sigma_c, mid, k);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

std::array<double, 2> kernel_vector(int dim, double sigma_c, int k) {
  const double Rs = critical_radius(dim, k);
  const FrechetMatrix m = frechet_matrix(dim, sigma_c, Rs, k);
  // At the critical radius the rows are parallel; (-b, a) annihilates row 1
  // and hence (numerically near-) annihilates row 2.
  double v0 = -m.b, v1 = m.a;
  const double nrm = std::hypot(v0, v1);
  if (nrm == 0.0) throw std::runtime_error("kernel_vector: degenerate matrix");
  v0 /= nrm;
  v1 /= nrm;
  const double lead = (v0 != 0.0) ? v0 : v1;
  if (lead < 0.0) {
    v0 = -v0;
    v1 = -v1;
  }
  return {v0, v1};
}

}  // namespace twophase
