#include "twophase/radial.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace twophase {

void PhaseConfig::validate() const {
  if (dim < 2) throw std::invalid_argument("PhaseConfig: dim must be >= 2");
  if (!(sigma_c > 0.0) || !std::isfinite(sigma_c))
    throw std::invalid_argument("PhaseConfig: sigma_c must be positive and finite");
  if (!(rho > 0.0 && rho < 1.0))
    throw std::invalid_argument("PhaseConfig: rho must lie in (0, 1), got " + std::to_string(rho));
}

double transmission_constant(const PhaseConfig& config) {
  config.validate();
  return (1.0 - config.sigma_c) * config.rho * config.rho + config.sigma_c;
}

double RadialSolution::value(double r) const {
  if (r < 0.0) throw std::invalid_argument("RadialSolution::value: negative radius");
  if (r <= config.rho) return (r * r - T) / (2.0 * config.sigma_c);
  return (r * r - 1.0) / 2.0;
}

double RadialSolution::derivative(double r) const {
  if (r < 0.0) throw std::invalid_argument("RadialSolution::derivative: negative radius");
  if (r <= config.rho) return r / config.sigma_c;
  return r;
}

RadialSolution radial_solution(const PhaseConfig& config) {
  return RadialSolution{config, transmission_constant(config)};
}

std::pair<double, double> trivial_residual(const RadialSolution& u) {
  const double rho = u.config.rho;
  const double sigma = u.config.sigma_c;
  // Inclusion sphere: continuity of the two branches (this is where a wrong
  // transmission constant shows up), sigma-weighted flux glue, and the
  // overdetermined flux datum u_nu = <x, nu> of the annular reformulation.
  const double inner_at_rho = (rho * rho - u.T) / (2.0 * sigma);
  const double outer_at_rho = (rho * rho - 1.0) / 2.0;
  const double outer_flux_at_rho = rho;  // u'(rho+) from the outer branch
  const double r1 = std::abs(inner_at_rho - outer_at_rho) +
                    std::abs(sigma * u.derivative(rho) - outer_flux_at_rho) +
                    std::abs(outer_flux_at_rho - rho);
  // Outer sphere: Dirichlet zero plus the constant-flux overdetermination.
  const double r2 = std::abs(u.value(1.0)) + std::abs(u.derivative(1.0) - 1.0);
  return {r1, r2};
}

std::pair<double, double> trivial_residual(const PhaseConfig& config) {
  return trivial_residual(radial_solution(config));
}

UnitInnerFrame rescale_to_unit_inner(const PhaseConfig& config) {
  config.validate();
  const double R = 1.0 / config.rho;
  return UnitInnerFrame{R, config.sigma_c * R * R + 1.0 - config.sigma_c};
}

}  // namespace twophase
