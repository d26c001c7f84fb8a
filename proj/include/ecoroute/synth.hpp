#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "ecoroute/belief.hpp"
#include "ecoroute/errors.hpp"
#include "ecoroute/graph.hpp"
#include "ecoroute/rng.hpp"
#include "ecoroute/sim.hpp"

namespace ecoroute {

/// Parameters of an adversarial chain-plus-shortcuts DAG.
struct SyntheticSpec {
  std::size_t vertices = 30;
  std::size_t edges = 200;
  std::uint64_t seed = 0;
  double chain_mean = 10.0;              // Wh per chain edge
  double chain_var = 4.0;                // Wh^2, also used for shortcuts
  double shortcut_mean_per_skip = 11.0;  // Wh per spanned chain step
  double prior_var = 8.0;                // Wh^2
};

struct SyntheticInstance {
  Scenario scenario;
  std::vector<double> true_mean_wh;
  std::vector<double> true_std_wh;
};

inline void validate(const SyntheticSpec& spec) {
  const std::size_t n = spec.vertices;
  const std::size_t q = spec.edges;
  if (n < 2) {
    throw SpecViolation("synthetic network needs at least 2 vertices");
  }
  if (q < n - 1 || q > n * (n - 1) / 2) {
    throw SpecViolation("synthetic edge count " + std::to_string(q) + " outside [" +
                        std::to_string(n - 1) + ", " + std::to_string(n * (n - 1) / 2) + "]");
  }
  if (!(spec.chain_mean > 0.0) || !(spec.chain_var > 0.0) || !(spec.shortcut_mean_per_skip > 0.0) ||
      !(spec.prior_var > 0.0)) {
    throw SpecViolation("synthetic reward parameters must be positive");
  }
}

namespace detail {

// Encodes (i, j) with i < j < n.
inline std::uint64_t pair_key(std::size_t i, std::size_t j, std::size_t n) { return i * n + j; }

// Distinct shortcut pairs (i, j), j >= i + 2, drawn uniformly without replacement.
inline std::vector<std::pair<std::size_t, std::size_t>> sample_shortcuts(std::size_t n,
                                                                         std::size_t count,
                                                                         Rng& rng) {
  const std::size_t pool_size = n * (n - 1) / 2 - (n - 1);
  if (count > pool_size) {
    throw SpecViolation("shortcut pool exhausted");
  }
  std::vector<std::pair<std::size_t, std::size_t>> picked;
  picked.reserve(count);
  constexpr std::size_t kShufflePoolLimit = 1u << 20;
  if (pool_size <= kShufflePoolLimit) {
    std::vector<std::pair<std::size_t, std::size_t>> pool;
    pool.reserve(pool_size);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 2; j < n; ++j) pool.emplace_back(i, j);
    }
    // Partial Fisher-Yates: the first `count` slots are a uniform sample.
    for (std::size_t k = 0; k < count; ++k) {
      const std::size_t r = k + rng.uniform_index(pool_size - k);
      std::swap(pool[k], pool[r]);
      picked.push_back(pool[k]);
    }
    return picked;
  }
  std::unordered_set<std::uint64_t> taken;
  while (picked.size() < count) {
    const std::size_t i = rng.uniform_index(n);
    const std::size_t j = rng.uniform_index(n);
    if (j < i + 2) continue;
    if (taken.insert(pair_key(i, j, n)).second) picked.emplace_back(i, j);
  }
  return picked;
}

}  // namespace detail

/// Builds the chain v0 -> v1 -> ... -> v(n-1) plus q - (n - 1) random forward
/// shortcuts. Chain edges cost chain_mean on average; a shortcut spanning k
/// steps costs shortcut_mean_per_skip * k, so the chain is the unique
/// optimum. Every edge gets prior mean shortcut_mean_per_skip * span, which
/// makes all source -> target paths look equally expensive a priori.
///
/// Edge ids follow (from, to) order. Source is v0, target v(n-1).
inline SyntheticInstance generate_instance(const SyntheticSpec& spec) {
  validate(spec);
  const std::size_t n = spec.vertices;
  Rng rng(derive_seed(spec.seed, Stream::synth));
  auto pairs = detail::sample_shortcuts(n, spec.edges - (n - 1), rng);
  for (std::size_t i = 0; i + 1 < n; ++i) pairs.emplace_back(i, i + 1);
  std::sort(pairs.begin(), pairs.end());

  std::vector<Edge> edges;
  edges.reserve(pairs.size());
  std::vector<double> mean(pairs.size());
  std::vector<double> sd(pairs.size());
  PriorStore priors;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto [i, j] = pairs[k];
    const auto span = static_cast<double>(j - i);
    Edge e;
    e.id = static_cast<EdgeId>(k);
    e.from = static_cast<VertexId>(i);
    e.to = static_cast<VertexId>(j);
    e.attrs = EdgeAttrs{span, 0.0, 1.0, 0.0};
    edges.push_back(e);
    mean[k] = j == i + 1 ? spec.chain_mean : spec.shortcut_mean_per_skip * span;
    sd[k] = std::sqrt(spec.chain_var);
    append_prior(priors, spec.shortcut_mean_per_skip * span, spec.prior_var, spec.chain_var);
  }

  RoadNetwork net(n, std::move(edges));
  const auto source = static_cast<VertexId>(0);
  const auto target = static_cast<VertexId>(n - 1);
  GroundTruth truth = GroundTruth::direct(net, mean, sd, source, target);
  return SyntheticInstance{Scenario{std::move(net), std::move(truth), std::move(priors)},
                           std::move(mean), std::move(sd)};
}

}  // namespace ecoroute
