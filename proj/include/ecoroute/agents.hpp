#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include "ecoroute/belief.hpp"
#include "ecoroute/energy.hpp"
#include "ecoroute/graph.hpp"
#include "ecoroute/rng.hpp"

namespace ecoroute {

enum class Strategy { greedy, thompson, bayes_ucb };

struct AgentSpec {
  Strategy strategy = Strategy::thompson;
  BeliefModel model = BeliefModel::gaussian;

  bool operator==(const AgentSpec&) const = default;
};

/// Labels: N-GR, LN-GR, N-TS, LN-TS, N-BUCB, LN-BUCB.
inline std::string agent_label(const AgentSpec& spec) {
  std::string label = spec.model == BeliefModel::gaussian ? "N-" : "LN-";
  switch (spec.strategy) {
    case Strategy::greedy: return label + "GR";
    case Strategy::thompson: return label + "TS";
    case Strategy::bayes_ucb: return label + "BUCB";
  }
  return label;
}

inline AgentSpec parse_agent_label(std::string_view label) {
  AgentSpec spec;
  std::string_view rest;
  if (label.starts_with("LN-")) {
    spec.model = BeliefModel::log_gaussian;
    rest = label.substr(3);
  } else if (label.starts_with("N-")) {
    spec.model = BeliefModel::gaussian;
    rest = label.substr(2);
  } else {
    throw InvalidInput("unknown agent label '" + std::string(label) + "'");
  }
  if (rest == "GR") {
    spec.strategy = Strategy::greedy;
  } else if (rest == "TS") {
    spec.strategy = Strategy::thompson;
  } else if (rest == "BUCB") {
    spec.strategy = Strategy::bayes_ucb;
  } else {
    throw InvalidInput("unknown agent label '" + std::string(label) + "'");
  }
  return spec;
}

inline constexpr std::string_view kAllAgentLabels[] = {"N-GR", "LN-GR", "N-TS",
                                                       "LN-TS", "N-BUCB", "LN-BUCB"};

/// Lower-quantile level used by BayesUCB at session t (sessions start at 1).
inline double bayes_ucb_level(std::size_t t) {
  if (t < 1) {
    throw InvalidSession("BayesUCB sessions are numbered from 1");
  }
  return 1.0 / static_cast<double>(t + 1);
}

/// Exploit: current expected consumption per edge.
template <class Belief>
WeightVector greedy_weights(std::span<const Belief> beliefs, std::size_t /*t*/) {
  WeightVector w(beliefs.size());
  for (std::size_t e = 0; e < beliefs.size(); ++e) {
    w[e] = predictive_mean(beliefs[e]);
  }
  return w;
}

/// Thompson Sampling: one posterior draw per edge. Gaussian draws go through
/// the rectified likelihood mean so the weight stays non-negative; log-normal
/// draws are already positive.
template <class Belief>
WeightVector ts_weights(std::span<const Belief> beliefs, Rng& rng) {
  WeightVector w(beliefs.size());
  for (std::size_t e = 0; e < beliefs.size(); ++e) {
    const double draw = sample_mean(beliefs[e], rng);
    if constexpr (Belief::model == BeliefModel::gaussian) {
      w[e] = rectified_normal_mean(draw, std::sqrt(beliefs[e].noise_variance));
    } else {
      w[e] = draw;
    }
  }
  return w;
}

/// BayesUCB for costs: optimistic lower posterior quantile at level 1/(t+1).
template <class Belief>
WeightVector bayes_ucb_weights(std::span<const Belief> beliefs, std::size_t t) {
  const double alpha = bayes_ucb_level(t);
  WeightVector w(beliefs.size());
  for (std::size_t e = 0; e < beliefs.size(); ++e) {
    const double q = posterior_quantile(beliefs[e], alpha);
    w[e] = q > 0.0 ? q : 0.0;
  }
  return w;
}

template <class Belief>
WeightVector edge_weights(Strategy strategy, std::span<const Belief> beliefs, std::size_t t,
                          Rng& rng) {
  switch (strategy) {
    case Strategy::greedy: return greedy_weights(beliefs, t);
    case Strategy::thompson: return ts_weights(beliefs, rng);
    case Strategy::bayes_ucb: return bayes_ucb_weights(beliefs, t);
  }
  throw InvalidInput("unknown strategy");
}

}  // namespace ecoroute
