#pragma once

#include <cmath>

#include "ecoroute/errors.hpp"
#include "ecoroute/graph.hpp"
#include "ecoroute/stats.hpp"

namespace ecoroute {

struct PhysicsConstants {
  double gravity = 9.81;     // m/s^2
  double air_density = 1.2;  // kg/m^3
};

/// Vehicle constants of the longitudinal energy model. Defaults describe a
/// medium-duty electric truck (curb weight plus half payload).
struct VehicleParams {
  double mass_kg = 14750.0;
  double rolling_resistance = 0.0064;
  double drag_coefficient = 0.7;
  double frontal_area_m2 = 8.0;
  double eta_traction = 0.88;  // battery -> wheel, in (0, 1]
  double eta_regen = 1.2;      // divides recovered wheel energy, >= 1

  void validate() const {
    const bool ok = mass_kg > 0.0 && rolling_resistance > 0.0 && drag_coefficient > 0.0 &&
                    frontal_area_m2 > 0.0 && eta_traction > 0.0 && eta_traction <= 1.0 &&
                    eta_regen >= 1.0 && std::isfinite(mass_kg) && std::isfinite(eta_regen);
    if (!ok) {
      throw InvalidInput("vehicle parameters out of range");
    }
  }
};

/// Energy at the wheel for one edge at constant speed, in Wh (signed).
/// Grade, rolling and aerodynamic work; no acceleration term.
inline double wheel_energy_wh(const EdgeAttrs& attrs, const VehicleParams& veh, double speed_mps,
                              const PhysicsConstants& physics = {}) {
  if (!(speed_mps > 0.0) || !std::isfinite(speed_mps)) {
    throw InvalidInput("wheel_energy_wh: speed must be positive");
  }
  if (!(attrs.length_m > 0.0)) {
    throw InvalidInput("wheel_energy_wh: length must be positive");
  }
  const double d = attrs.length_m;
  const double mg = veh.mass_kg * physics.gravity;
  const double grade_j = mg * d * std::sin(attrs.grade_rad);
  const double rolling_j = mg * veh.rolling_resistance * d * std::cos(attrs.grade_rad);
  const double drag_j =
      0.5 * veh.drag_coefficient * veh.frontal_area_m2 * physics.air_density * d * speed_mps * speed_mps;
  return (grade_j + rolling_j + drag_j) / 3600.0;
}

/// Battery energy for one edge in Wh. Traction draws wheel/eta_traction;
/// regeneration recovers wheel/eta_regen (a negative value).
inline double deterministic_energy_wh(const EdgeAttrs& attrs, const VehicleParams& veh,
                                      double speed_mps, const PhysicsConstants& physics = {}) {
  const double wheel = wheel_energy_wh(attrs, veh, speed_mps, physics);
  return wheel >= 0.0 ? wheel / veh.eta_traction : wheel / veh.eta_regen;
}

/// E[max(0, Y)] for Y ~ N(mu, sigma^2).
inline double rectified_normal_mean(double mu, double sigma) {
  if (!(sigma > 0.0)) {
    throw InvalidInput("rectified_normal_mean: sigma must be positive");
  }
  const double z = -mu / sigma;
  const double value = mu * stats::normal_sf(z) + sigma * stats::normal_pdf(z);
  return value > 0.0 ? value : 0.0;
}

struct LogNormalMoments {
  double mean = 1.0;
  double variance = 0.0;
  double mode = 1.0;
};

/// Moments of exp(X) for X ~ N(log_mean, log_var).
inline LogNormalMoments lognormal_moments(double log_mean, double log_var) {
  if (!(log_var >= 0.0)) {
    throw InvalidInput("lognormal_moments: variance must be non-negative");
  }
  return {std::exp(log_mean + 0.5 * log_var),
          std::expm1(log_var) * std::exp(2.0 * log_mean + log_var),
          std::exp(log_mean - log_var)};
}

}  // namespace ecoroute
