#include <cmath>
#include <numbers>

#include "catch_amalgamated.hpp"
#include "ecoroute/energy.hpp"
#include "ecoroute/errors.hpp"
#include "ecoroute/rng.hpp"
#include "oracles.hpp"

using namespace ecoroute;
using Catch::Approx;

namespace {

EdgeAttrs flat_km() { return EdgeAttrs{1000.0, 0.0, 15.0, 0.0}; }

}  // namespace

TEST_CASE("flat kilometre at 15 m/s costs the hand-evaluated energy") {
  // rolling 14750 * 9.81 * 0.0064 * 1000 = 926064 J
  // drag    0.5 * 0.7 * 8 * 1.2 * 1000 * 225 = 756000 J
  const double expected = (926064.0 + 756000.0) / 3600.0 / 0.88;
  const VehicleParams veh;
  CHECK(deterministic_energy_wh(flat_km(), veh, 15.0) == Approx(expected).epsilon(1e-14));
  CHECK(expected == Approx(530.9545454545).epsilon(1e-12));
}

TEST_CASE("zero grade has no gravity term") {
  const VehicleParams veh;
  EdgeAttrs a = flat_km();
  const double mg = veh.mass_kg * 9.81;
  const double rolling = mg * veh.rolling_resistance * a.length_m / 3600.0;
  const double drag = 0.5 * veh.drag_coefficient * veh.frontal_area_m2 * 1.2 * a.length_m * 15.0 * 15.0 / 3600.0;
  CHECK(wheel_energy_wh(a, veh, 15.0) == Approx(rolling + drag).epsilon(1e-14));
}

TEST_CASE("steep downhill regenerates through eta_regen") {
  const VehicleParams veh;
  const EdgeAttrs a{100.0, -0.1, 5.0, 0.0};
  const double wheel = wheel_energy_wh(a, veh, 5.0);
  REQUIRE(wheel < 0.0);
  CHECK(deterministic_energy_wh(a, veh, 5.0) == Approx(wheel / 1.2).epsilon(1e-14));
}

TEST_CASE("opposite grades cancel the gravity term") {
  const VehicleParams veh;
  for (const double theta : {0.01, 0.05, 0.1, 0.2}) {
    const EdgeAttrs up{700.0, theta, 12.0, 0.0};
    const EdgeAttrs down{700.0, -theta, 12.0, 0.0};
    const double mg = veh.mass_kg * 9.81;
    const double rolling = mg * veh.rolling_resistance * 700.0 * std::cos(theta) / 3600.0;
    const double drag = 0.5 * veh.drag_coefficient * veh.frontal_area_m2 * 1.2 * 700.0 * 144.0 / 3600.0;
    CHECK(wheel_energy_wh(up, veh, 12.0) + wheel_energy_wh(down, veh, 12.0) ==
          Approx(2.0 * (rolling + drag)).epsilon(1e-12));
  }
}

TEST_CASE("energy model rejects bad inputs") {
  const VehicleParams veh;
  CHECK_THROWS_AS(wheel_energy_wh(flat_km(), veh, 0.0), InvalidInput);
  VehicleParams bad;
  bad.eta_traction = 1.5;
  CHECK_THROWS_AS(bad.validate(), InvalidInput);
  bad = VehicleParams{};
  bad.eta_regen = 0.5;
  CHECK_THROWS_AS(bad.validate(), InvalidInput);
  CHECK_NOTHROW(veh.validate());
}

TEST_CASE("rectified mean reference points") {
  CHECK(rectified_normal_mean(0.0, 1.0) == Approx(1.0 / std::sqrt(2.0 * std::numbers::pi)).epsilon(1e-15));
  CHECK(std::abs(rectified_normal_mean(100.0, 0.01) - 100.0) < 1e-9);
  CHECK(std::abs(rectified_normal_mean(-100.0, 0.01)) < 1e-9);
  CHECK(rectified_normal_mean(-100.0, 0.01) >= 0.0);
  CHECK_THROWS_AS(rectified_normal_mean(1.0, 0.0), InvalidInput);
}

TEST_CASE("rectified mean matches quadrature") {
  for (double mu : {-7.0, -1.5, 0.0, 0.3, 4.0, 25.0}) {
    for (double sigma : {0.2, 1.0, 3.0, 15.0}) {
      const double q = oracle::rectified_mean_quadrature(mu, sigma);
      CHECK(rectified_normal_mean(mu, sigma) == Approx(q).margin(1e-10).epsilon(1e-10));
    }
  }
}

TEST_CASE("lognormal moments") {
  const auto p = lognormal_moments(0.0, 0.0);
  CHECK(p.mean == 1.0);
  CHECK(p.variance == 0.0);
  CHECK(p.mode == 1.0);
  CHECK(lognormal_moments(2.0, 0.5).mode == Approx(std::exp(1.5)).epsilon(1e-15));
  CHECK_THROWS_AS(lognormal_moments(0.0, -1.0), InvalidInput);

  Rng rng(5);
  constexpr int n = 1000000;
  double s = 0.0;
  double s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double y = std::exp(rng.normal());
    s += y;
    s2 += y * y;
  }
  const double mean = s / n;
  const double se = std::sqrt((s2 / n - mean * mean) / n);
  const auto m = lognormal_moments(0.0, 1.0);
  CHECK(m.mean == Approx(std::exp(0.5)).epsilon(1e-15));
  CHECK(std::abs(mean - m.mean) < 4.5 * se);
  CHECK(m.variance == Approx((std::exp(1.0) - 1.0) * std::exp(1.0)).epsilon(1e-14));
}

TEST_CASE("lognormal mode is the density argmax") {
  const double m = 2.0;
  const double v = 0.5;
  auto density = [&](double y) {
    const double z = std::log(y) - m;
    return std::exp(-0.5 * z * z / v) / y;
  };
  // golden-section search
  double lo = 0.1;
  double hi = 30.0;
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int i = 0; i < 200; ++i) {
    const double a = hi - g * (hi - lo);
    const double b = lo + g * (hi - lo);
    (density(a) > density(b) ? hi : lo) = density(a) > density(b) ? b : a;
  }
  CHECK(lognormal_moments(m, v).mode == Approx(0.5 * (lo + hi)).epsilon(1e-7));
}
