#pragma once

#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "ecoroute/energy.hpp"
#include "ecoroute/errors.hpp"
#include "ecoroute/rng.hpp"
#include "ecoroute/stats.hpp"

namespace ecoroute {

enum class BeliefModel { gaussian, log_gaussian };

inline std::string_view to_string(BeliefModel m) {
  return m == BeliefModel::gaussian ? "gaussian" : "log_gaussian";
}

inline BeliefModel parse_belief_model(std::string_view s) {
  if (s == "gaussian") return BeliefModel::gaussian;
  if (s == "log_gaussian") return BeliefModel::log_gaussian;
  throw InvalidInput("unknown belief model '" + std::string(s) + "'");
}

/// Normal posterior over an edge's mean consumption mu(e), with known
/// observation noise. variance == 0 is a point mass and absorbs nothing.
struct GaussianEdgeBelief {
  static constexpr BeliefModel model = BeliefModel::gaussian;

  double mean = 0.0;            // Wh
  double variance = 1.0;        // Wh^2
  double noise_variance = 1.0;  // Wh^2, likelihood variance

  bool operator==(const GaussianEdgeBelief&) const = default;
};

/// Log-normal posterior over mu(e): ln mu(e) ~ N(log_mean, log_variance).
/// Observations follow LogNormal(ln mu(e) - s/2, s) with s = noise_log_variance,
/// so that E[y] = mu(e).
struct LogGaussianEdgeBelief {
  static constexpr BeliefModel model = BeliefModel::log_gaussian;

  double log_mean = 0.0;
  double log_variance = 1.0;
  double noise_log_variance = 1.0;

  bool operator==(const LogGaussianEdgeBelief&) const = default;
};

/// Edge id -> belief. Owned by one writer; readers take it by const reference.
template <class Belief>
using BeliefStore = std::vector<Belief>;

// ---- priors ---------------------------------------------------------------

/// Prior mu_0 = epsilon, sigma_0 = theta_coeff * epsilon.
inline GaussianEdgeBelief gaussian_prior(double epsilon_wh, double theta_coeff,
                                         double noise_variance) {
  if (!(epsilon_wh > 0.0) || !std::isfinite(epsilon_wh)) {
    throw InvalidInput("gaussian_prior: prior mean must be positive");
  }
  if (!(theta_coeff > 0.0) || !(noise_variance > 0.0)) {
    throw InvalidInput("gaussian_prior: theta and noise variance must be positive");
  }
  const double sd = theta_coeff * epsilon_wh;
  return {epsilon_wh, sd * sd, noise_variance};
}

/// Log-normal prior whose implied mean and variance of mu(e) equal mu0, var0.
inline LogGaussianEdgeBelief loggaussian_prior(double mu0, double var0, double noise_log_variance) {
  if (!(mu0 > 0.0) || !(var0 > 0.0) || !std::isfinite(mu0) || !std::isfinite(var0)) {
    throw InvalidInput("loggaussian_prior: mean and variance must be positive");
  }
  if (!(noise_log_variance > 0.0)) {
    throw InvalidInput("loggaussian_prior: noise variance must be positive");
  }
  const double log_var = std::log1p(var0 / (mu0 * mu0));
  return {std::log(mu0) - 0.5 * log_var, log_var, noise_log_variance};
}

/// Log-space noise variance giving a log-normal likelihood with mean mu0 the
/// same variance as a Gaussian likelihood with variance noise_variance.
inline double loggaussian_noise_variance(double noise_variance, double mu0) {
  if (!(noise_variance > 0.0) || !(mu0 > 0.0)) {
    throw InvalidInput("loggaussian_noise_variance: arguments must be positive");
  }
  return std::log1p(noise_variance / (mu0 * mu0));
}

// ---- updates --------------------------------------------------------------

/// Conjugate normal-normal update with one consumption observation (Wh,
/// signed; negative values are regeneration and are accepted).
inline GaussianEdgeBelief gaussian_update(const GaussianEdgeBelief& b, double observed_wh) {
  if (b.variance == 0.0) {
    return b;
  }
  const double precision = 1.0 / b.variance + 1.0 / b.noise_variance;
  const double var = 1.0 / precision;
  const double mean = var * (b.mean / b.variance + observed_wh / b.noise_variance);
  return {mean, var, b.noise_variance};
}

/// Conjugate update in log space. Under the likelihood above,
/// ln y + s/2 is a Gaussian observation of ln mu(e) with variance s.
inline LogGaussianEdgeBelief loggaussian_update(const LogGaussianEdgeBelief& b, double observed_wh) {
  if (!(observed_wh > 0.0)) {
    throw NonPositiveObservation("log-Gaussian belief cannot absorb consumption " +
                                 std::to_string(observed_wh) + " Wh");
  }
  if (b.log_variance == 0.0) {
    return b;
  }
  const double s = b.noise_log_variance;
  const double pseudo = std::log(observed_wh) + 0.5 * s;
  const double var = 1.0 / (1.0 / b.log_variance + 1.0 / s);
  const double mean = var * (b.log_mean / b.log_variance + pseudo / s);
  return {mean, var, s};
}

inline GaussianEdgeBelief update(const GaussianEdgeBelief& b, double observed_wh) {
  return gaussian_update(b, observed_wh);
}
inline LogGaussianEdgeBelief update(const LogGaussianEdgeBelief& b, double observed_wh) {
  return loggaussian_update(b, observed_wh);
}

// ---- posterior queries ----------------------------------------------------

/// One posterior draw of mu(e).
inline double sample_mean(const GaussianEdgeBelief& b, Rng& rng) {
  return b.mean + std::sqrt(b.variance) * rng.normal();
}
inline double sample_mean(const LogGaussianEdgeBelief& b, Rng& rng) {
  return std::exp(b.log_mean + std::sqrt(b.log_variance) * rng.normal());
}

/// Value q with P(mu(e) <= q) = alpha under the posterior.
inline double posterior_quantile(const GaussianEdgeBelief& b, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw InvalidInput("posterior_quantile: alpha must lie in (0, 1)");
  }
  return b.mean + std::sqrt(b.variance) * stats::normal_quantile(alpha);
}
inline double posterior_quantile(const LogGaussianEdgeBelief& b, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw InvalidInput("posterior_quantile: alpha must lie in (0, 1)");
  }
  return std::exp(b.log_mean + std::sqrt(b.log_variance) * stats::normal_quantile(alpha));
}

/// Non-negative expected consumption used as a greedy edge weight.
/// Gaussian: mean of N^R(mean, noise_variance). Log-Gaussian: posterior mean
/// of mu(e), which is E[y] under the likelihood.
inline double predictive_mean(const GaussianEdgeBelief& b) {
  return rectified_normal_mean(b.mean, std::sqrt(b.noise_variance));
}
inline double predictive_mean(const LogGaussianEdgeBelief& b) {
  return std::exp(b.log_mean + 0.5 * b.log_variance);
}

inline void validate(const GaussianEdgeBelief& b) {
  if (!std::isfinite(b.mean) || !(b.variance >= 0.0) || !std::isfinite(b.variance) ||
      !(b.noise_variance > 0.0) || !std::isfinite(b.noise_variance)) {
    throw InvalidInput("invalid Gaussian belief parameters");
  }
}
inline void validate(const LogGaussianEdgeBelief& b) {
  if (!std::isfinite(b.log_mean) || !(b.log_variance >= 0.0) || !std::isfinite(b.log_variance) ||
      !(b.noise_log_variance > 0.0) || !std::isfinite(b.noise_log_variance) ||
      !std::isfinite(predictive_mean(b))) {
    throw InvalidInput("invalid log-Gaussian belief parameters");
  }
}

/// Both prior stores for one network; an agent reads the one matching its model.
struct PriorStore {
  BeliefStore<GaussianEdgeBelief> gaussian;
  BeliefStore<LogGaussianEdgeBelief> log_gaussian;

  template <class Belief>
  const BeliefStore<Belief>& get() const {
    if constexpr (Belief::model == BeliefModel::gaussian) {
      return gaussian;
    } else {
      return log_gaussian;
    }
  }

  bool operator==(const PriorStore&) const = default;
};

/// Mean-parameter prior pair (mu0, var0, gaussian noise variance) expanded
/// into both belief models.
inline void append_prior(PriorStore& store, double mu0, double var0, double noise_variance) {
  store.gaussian.push_back({mu0, var0, noise_variance});
  store.log_gaussian.push_back(
      loggaussian_prior(mu0, var0, loggaussian_noise_variance(noise_variance, mu0)));
}

}  // namespace ecoroute
