#pragma once

#include <cmath>
#include <limits>
#include <numbers>

#include "ecoroute/errors.hpp"

namespace ecoroute::stats {

inline constexpr double kInvSqrt2Pi = 0.398942280401432677939946059934381868;
inline constexpr double kSqrt2 = std::numbers::sqrt2;
inline constexpr double kSqrt2Pi = 2.506628274631000502415765284811045253;

/// Standard normal density.
inline double normal_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

/// Standard normal CDF through erfc, which keeps full relative precision in
/// the lower tail (Phi(-8) ~ 6e-16 is resolved, not rounded to zero).
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

/// Upper tail 1 - Phi(x), accurate for large positive x.
inline double normal_sf(double x) { return 0.5 * std::erfc(x / kSqrt2); }

namespace detail {

// Rational approximation for the lower half (p <= 0.5), relative error about
// 1.15e-9, then polished below.
inline double quantile_seed_lower(double p) {
  constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                          1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
  constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                          6.680131188771972e+01,  -1.328068155288572e+01};
  constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                          -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
  constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                          3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace detail

/// Inverse of the standard normal CDF on the open interval (0, 1).
///
/// Works on the lower half only and mirrors the upper half (1 - p is exact
/// for p >= 0.5), so both tails keep relative precision. The rational seed is
/// refined with Halley steps against erfc until the correction is below
/// round-off; the result satisfies |Phi(x) - p| <= a few ulp of p.
inline double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw InvalidInput("normal_quantile: probability must lie in (0, 1)");
  }
  if (p > 0.5) {
    return -normal_quantile(1.0 - p);
  }
  if (p == 0.5) {
    return 0.0;
  }
  double x = detail::quantile_seed_lower(p);
  for (int i = 0; i < 3; ++i) {
    const double e = normal_cdf(x) - p;
    const double u = e * kSqrt2Pi * std::exp(0.5 * x * x);
    const double step = u / (1.0 + 0.5 * x * u);
    x -= step;
    if (std::abs(step) <= 1e-16 * std::abs(x)) {
      break;
    }
  }
  return x;
}

}  // namespace ecoroute::stats
