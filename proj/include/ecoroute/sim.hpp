#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ecoroute/agents.hpp"
#include "ecoroute/belief.hpp"
#include "ecoroute/energy.hpp"
#include "ecoroute/graph.hpp"
#include "ecoroute/rng.hpp"

namespace ecoroute {

enum class TruthMode { direct, consumption_noise, speed_noise };

inline std::string_view to_string(TruthMode m) {
  switch (m) {
    case TruthMode::direct: return "direct";
    case TruthMode::consumption_noise: return "consumption_noise";
    case TruthMode::speed_noise: return "speed_noise";
  }
  return "?";
}

inline TruthMode parse_truth_mode(std::string_view s) {
  if (s == "direct") return TruthMode::direct;
  if (s == "consumption_noise") return TruthMode::consumption_noise;
  if (s == "speed_noise") return TruthMode::speed_noise;
  throw InvalidInput("unknown ground-truth mode '" + std::string(s) + "'");
}

/// Lowest speed a sampled traversal may take, m/s.
inline constexpr double kMinSampledSpeedMps = 1.0;

/// Simulator-side reward distributions, hidden from the agents.
///
/// Expected costs seen by the optimal-path oracle and by regret accounting
/// are clamped at zero (the solver only takes non-negative weights); both
/// sides of the regret difference use the same clamped scale.
class GroundTruth {
 public:
  /// Per-edge Normal(mean, std^2) consumption.
  static GroundTruth direct(const RoadNetwork& net, std::vector<double> mean_wh,
                            std::vector<double> std_wh, VertexId source, VertexId target) {
    if (mean_wh.size() != net.edge_count() || std_wh.size() != net.edge_count()) {
      throw InvalidInput("ground truth needs one mean and std per edge");
    }
    for (std::size_t e = 0; e < mean_wh.size(); ++e) {
      if (!std::isfinite(mean_wh[e]) || !std::isfinite(std_wh[e]) || std_wh[e] < 0.0) {
        throw InvalidInput("ground truth of edge " + std::to_string(e) + " is invalid");
      }
    }
    GroundTruth gt(TruthMode::direct, net);
    gt.noise_std_ = std::move(std_wh);
    gt.expected_ = std::move(mean_wh);
    gt.mc_standard_error_.assign(gt.expected_.size(), 0.0);
    gt.finish(net, source, target);
    return gt;
  }

  /// eps(e) from the energy model at each edge's mean speed, observed with
  /// Normal noise of standard deviation phi * |eps(e)|.
  static GroundTruth consumption_noise(const RoadNetwork& net, const VehicleParams& veh,
                                       double phi, VertexId source, VertexId target,
                                       const PhysicsConstants& physics = {}) {
    veh.validate();
    if (!(phi >= 0.0)) {
      throw InvalidInput("phi must be non-negative");
    }
    GroundTruth gt(TruthMode::consumption_noise, net);
    for (const Edge& e : net.edges()) {
      const double eps = deterministic_energy_wh(e.attrs, veh, e.attrs.speed_mean_mps, physics);
      gt.expected_.push_back(eps);
      gt.noise_std_.push_back(phi * std::abs(eps));
    }
    gt.mc_standard_error_.assign(gt.expected_.size(), 0.0);
    gt.finish(net, source, target);
    return gt;
  }

  /// Each traversal draws a speed from Normal(speed_mean, speed_std^2)
  /// truncated below at kMinSampledSpeedMps and evaluates the energy model
  /// at it. True means are fixed-seed Monte Carlo estimates.
  static GroundTruth speed_noise(const RoadNetwork& net, const VehicleParams& veh,
                                 VertexId source, VertexId target, std::size_t mc_draws,
                                 std::uint64_t mc_seed, const PhysicsConstants& physics = {}) {
    veh.validate();
    if (mc_draws < 2) {
      throw InvalidInput("speed_noise needs at least two Monte Carlo draws");
    }
    GroundTruth gt(TruthMode::speed_noise, net);
    gt.vehicle_ = veh;
    gt.physics_ = physics;
    for (const Edge& e : net.edges()) {
      Rng rng(derive_seed(mc_seed, Stream::truth_mc, {e.id}));
      double mean = 0.0;
      double m2 = 0.0;
      for (std::size_t i = 0; i < mc_draws; ++i) {
        const double y = gt.draw_speed_energy(e.id, rng);
        const double delta = y - mean;
        mean += delta / static_cast<double>(i + 1);
        m2 += delta * (y - mean);
      }
      const double var = m2 / static_cast<double>(mc_draws - 1);
      gt.expected_.push_back(mean);
      gt.mc_standard_error_.push_back(std::sqrt(var / static_cast<double>(mc_draws)));
    }
    gt.noise_std_.assign(gt.expected_.size(), 0.0);
    gt.finish(net, source, target);
    return gt;
  }

  TruthMode mode() const { return mode_; }
  VertexId source() const { return source_; }
  VertexId target() const { return target_; }
  std::size_t edge_count() const { return expected_.size(); }

  /// True expected consumption of an edge (signed).
  double expected_consumption(EdgeId e) const { return expected_.at(e); }
  /// Observation noise std for direct and consumption_noise modes.
  double noise_std(EdgeId e) const { return noise_std_.at(e); }
  double mc_standard_error(EdgeId e) const { return mc_standard_error_.at(e); }
  double max_mc_standard_error() const {
    double m = 0.0;
    for (const double se : mc_standard_error_) m = se > m ? se : m;
    return m;
  }

  /// Clamped expected costs, the optimizer-facing weight vector.
  const WeightVector& expected_costs() const { return clamped_; }
  const Path& optimal_path() const { return optimal_path_; }
  double optimal_cost() const { return optimal_cost_; }

  /// One independent consumption draw per edge of the path, in Wh.
  std::vector<double> sample_rewards(std::span<const EdgeId> path, Rng& rng) const {
    std::vector<double> y;
    y.reserve(path.size());
    for (const EdgeId e : path) {
      if (mode_ == TruthMode::speed_noise) {
        y.push_back(draw_speed_energy(e, rng));
      } else {
        y.push_back(expected_.at(e) + noise_std_[e] * rng.normal());
      }
    }
    return y;
  }

  double true_expected_cost(std::span<const EdgeId> path) const { return path_cost(path, clamped_); }

  /// Expected cost of the path minus the optimum, never negative.
  double instant_regret(std::span<const EdgeId> path) const {
    const double gap = true_expected_cost(path) - optimal_cost_;
    return gap > 0.0 ? gap : 0.0;
  }

 private:
  GroundTruth(TruthMode mode, const RoadNetwork& net) : mode_(mode) {
    attrs_.reserve(net.edge_count());
    for (const Edge& e : net.edges()) attrs_.push_back(e.attrs);
  }

  void finish(const RoadNetwork& net, VertexId source, VertexId target) {
    source_ = source;
    target_ = target;
    clamped_.resize(expected_.size());
    for (std::size_t e = 0; e < expected_.size(); ++e) {
      if (!std::isfinite(expected_[e])) {
        throw InvalidInput("expected consumption of edge " + std::to_string(e) + " is not finite");
      }
      clamped_[e] = expected_[e] > 0.0 ? expected_[e] : 0.0;
    }
    optimal_path_ = shortest_path(net, clamped_, source, target);
    optimal_cost_ = path_cost(optimal_path_, clamped_);
  }

  double draw_speed_energy(EdgeId e, Rng& rng) const {
    const EdgeAttrs& a = attrs_.at(e);
    double speed = a.speed_mean_mps > kMinSampledSpeedMps ? a.speed_mean_mps : kMinSampledSpeedMps;
    if (a.speed_std_mps > 0.0) {
      // Inversion restricted to the admissible upper tail x >= lower.
      const double lower = (kMinSampledSpeedMps - a.speed_mean_mps) / a.speed_std_mps;
      const double tail = stats::normal_sf(lower);
      const double x = -stats::normal_quantile(rng.uniform() * tail);
      speed = a.speed_mean_mps + a.speed_std_mps * x;
      if (speed < kMinSampledSpeedMps) speed = kMinSampledSpeedMps;
    }
    return deterministic_energy_wh(a, vehicle_, speed, physics_);
  }

  TruthMode mode_;
  std::vector<EdgeAttrs> attrs_;
  VehicleParams vehicle_;
  PhysicsConstants physics_;
  std::vector<double> expected_;
  std::vector<double> noise_std_;
  std::vector<double> mc_standard_error_;
  WeightVector clamped_;
  VertexId source_ = 0;
  VertexId target_ = 0;
  Path optimal_path_;
  double optimal_cost_ = 0.0;
};

/// One agent's session: chosen path, feedback and regret.
struct SessionRecord {
  std::size_t session = 0;  // 1-based
  std::size_t agent_id = 0;
  Path path;
  std::vector<double> observed_wh;  // signed, one per path edge
  double observed_cost_wh = 0.0;
  double true_expected_cost_wh = 0.0;
  double instant_regret_wh = 0.0;

  bool operator==(const SessionRecord&) const = default;
};

using Trace = std::vector<SessionRecord>;

/// Everything one run needs besides the agent: the network, hidden truth and
/// the agents' prior.
struct Scenario {
  RoadNetwork network;
  GroundTruth truth;
  PriorStore priors;
};

struct RunOptions {
  std::size_t horizon = 1;
  std::size_t num_agents = 1;
  std::uint64_t seed = 0;
  double positivity_floor_wh = 1e-3;  // applied to log-Gaussian observations only
};

inline Rng agent_rng(std::uint64_t seed, std::size_t agent_id, std::size_t session) {
  return Rng(derive_seed(seed, Stream::agent, {agent_id, session}));
}

inline Rng environment_rng(std::uint64_t seed, std::size_t agent_id, std::size_t session) {
  return Rng(derive_seed(seed, Stream::environment, {agent_id, session}));
}

/// Prefix sums of instant regret.
inline std::vector<double> cumulative_regret(std::span<const SessionRecord> records) {
  std::vector<double> out;
  out.reserve(records.size());
  double total = 0.0;
  for (const SessionRecord& r : records) {
    total += r.instant_regret_wh;
    out.push_back(total);
  }
  return out;
}

namespace detail {

inline void validate_run(const Scenario& sc, const RunOptions& opt, BeliefModel model) {
  if (opt.horizon < 1) throw InvalidInput("horizon must be at least 1");
  if (opt.num_agents < 1) throw InvalidInput("agent count must be at least 1");
  if (sc.truth.source() == sc.truth.target()) throw InvalidInput("source equals target");
  if (sc.truth.edge_count() != sc.network.edge_count()) {
    throw InvalidInput("ground truth does not match the network");
  }
  const std::size_t covered = model == BeliefModel::gaussian ? sc.priors.gaussian.size()
                                                             : sc.priors.log_gaussian.size();
  if (covered != sc.network.edge_count()) {
    throw InvalidInput("prior store has no " + std::string(to_string(model)) +
                       " belief for every edge");
  }
}

template <class Belief>
double admissible_observation(double y, const RunOptions& opt) {
  if constexpr (Belief::model == BeliefModel::log_gaussian) {
    return y > opt.positivity_floor_wh ? y : opt.positivity_floor_wh;
  } else {
    return y;
  }
}

template <class Belief>
SessionRecord play_session(const Scenario& sc, std::span<const Belief> beliefs, Strategy strategy,
                           const RunOptions& opt, std::size_t agent_id, std::size_t t) {
  Rng rng = agent_rng(opt.seed, agent_id, t);
  const WeightVector w = edge_weights(strategy, beliefs, t, rng);
  SessionRecord rec;
  rec.session = t;
  rec.agent_id = agent_id;
  rec.path = shortest_path(sc.network, w, sc.truth.source(), sc.truth.target());
  Rng env = environment_rng(opt.seed, agent_id, t);
  rec.observed_wh = sc.truth.sample_rewards(rec.path, env);
  for (const double y : rec.observed_wh) rec.observed_cost_wh += y;
  rec.true_expected_cost_wh = sc.truth.true_expected_cost(rec.path);
  rec.instant_regret_wh = sc.truth.instant_regret(rec.path);
  return rec;
}

template <class Belief>
Trace run_single(const Scenario& sc, Strategy strategy, const RunOptions& opt) {
  BeliefStore<Belief> beliefs = sc.priors.get<Belief>();
  Trace trace;
  trace.reserve(opt.horizon);
  for (std::size_t t = 1; t <= opt.horizon; ++t) {
    SessionRecord rec = play_session<Belief>(sc, beliefs, strategy, opt, 0, t);
    for (std::size_t i = 0; i < rec.path.size(); ++i) {
      Belief& b = beliefs[rec.path[i]];
      b = update(b, admissible_observation<Belief>(rec.observed_wh[i], opt));
    }
    trace.push_back(std::move(rec));
  }
  return trace;
}

template <class Belief>
std::vector<Trace> run_fleet(const Scenario& sc, Strategy strategy, const RunOptions& opt,
                             BeliefStore<Belief>* final_beliefs) {
  BeliefStore<Belief> beliefs = sc.priors.get<Belief>();
  std::vector<Trace> traces(opt.num_agents);
  for (auto& tr : traces) tr.reserve(opt.horizon);
  std::vector<SessionRecord> round(opt.num_agents);
  for (std::size_t t = 1; t <= opt.horizon; ++t) {
    // Every agent plans against the same snapshot of the shared store.
    const std::span<const Belief> snapshot(beliefs);
    for (std::size_t k = 0; k < opt.num_agents; ++k) {
      round[k] = play_session<Belief>(sc, snapshot, strategy, opt, k, t);
    }
    // Barrier: the fleet's observations are merged in agent-id order.
    for (std::size_t k = 0; k < opt.num_agents; ++k) {
      const SessionRecord& rec = round[k];
      for (std::size_t i = 0; i < rec.path.size(); ++i) {
        Belief& b = beliefs[rec.path[i]];
        b = update(b, admissible_observation<Belief>(rec.observed_wh[i], opt));
      }
      traces[k].push_back(std::move(round[k]));
    }
  }
  if (final_beliefs != nullptr) *final_beliefs = std::move(beliefs);
  return traces;
}

}  // namespace detail

/// Single-agent online loop: weights -> shortest path -> observe the path's
/// edges -> conjugate update of those edges only.
inline Trace run_single_agent(const Scenario& sc, const AgentSpec& agent, const RunOptions& opt) {
  detail::validate_run(sc, opt, agent.model);
  if (opt.num_agents != 1) throw InvalidInput("single-agent run needs exactly one agent");
  if (agent.model == BeliefModel::gaussian) {
    return detail::run_single<GaussianEdgeBelief>(sc, agent.strategy, opt);
  }
  return detail::run_single<LogGaussianEdgeBelief>(sc, agent.strategy, opt);
}

/// Synchronous fleet of opt.num_agents identical agents sharing one belief
/// store. Returns one trace per agent, indexed by agent id.
inline std::vector<Trace> run_multi_agent(const Scenario& sc, const AgentSpec& agent,
                                          const RunOptions& opt) {
  detail::validate_run(sc, opt, agent.model);
  if (agent.model == BeliefModel::gaussian) {
    return detail::run_fleet<GaussianEdgeBelief>(sc, agent.strategy, opt, nullptr);
  }
  return detail::run_fleet<LogGaussianEdgeBelief>(sc, agent.strategy, opt, nullptr);
}

/// Fleet run that also hands back the final shared belief store.
template <class Belief>
std::vector<Trace> run_multi_agent_with_beliefs(const Scenario& sc, Strategy strategy,
                                                const RunOptions& opt,
                                                BeliefStore<Belief>& final_beliefs) {
  detail::validate_run(sc, opt, Belief::model);
  return detail::run_fleet<Belief>(sc, strategy, opt, &final_beliefs);
}

}  // namespace ecoroute
