#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <memory>
#include <numeric>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "ecoroute/agents.hpp"
#include "ecoroute/belief.hpp"
#include "ecoroute/config.hpp"
#include "ecoroute/energy.hpp"
#include "ecoroute/io.hpp"
#include "ecoroute/sim.hpp"
#include "ecoroute/synth.hpp"

namespace ecoroute {

/// Runs f(0) .. f(n - 1) on up to `jobs` threads. If any call throws, the
/// exception of the lowest failing index is rethrown after all threads join.
template <class F>
void parallel_for(std::size_t n, std::size_t jobs, F&& f) {
  jobs = std::max<std::size_t>(1, std::min(jobs, n));
  if (jobs == 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(n);
  std::vector<std::thread> workers;
  workers.reserve(jobs);
  for (std::size_t w = 0; w < jobs; ++w) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          f(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : workers) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

/// Energy-model prior for every edge: eps(e) at the prior speed, clamped
/// below at min_prior_wh, with sigma_0 = theta * mu_0 and likelihood std
/// phi * mu_0 (log-space variance matched to the same variance).
inline PriorStore energy_model_prior(const RoadNetwork& net, const ScenarioConfig& cfg) {
  PriorStore store;
  for (const Edge& e : net.edges()) {
    const double speed = cfg.prior_speed_mps.value_or(e.attrs.speed_mean_mps);
    const double eps = deterministic_energy_wh(e.attrs, cfg.vehicle, speed, cfg.physics);
    const double mu0 = std::max(eps, cfg.min_prior_wh);
    const double noise_var = (cfg.phi * mu0) * (cfg.phi * mu0);
    const GaussianEdgeBelief g = gaussian_prior(mu0, cfg.theta, noise_var);
    store.gaussian.push_back(g);
    store.log_gaussian.push_back(
        loggaussian_prior(mu0, g.variance, loggaussian_noise_variance(noise_var, mu0)));
  }
  return store;
}

/// Seed of the idx-th independent run of a scenario.
inline std::uint64_t run_seed(const ScenarioConfig& cfg, std::size_t idx) {
  return derive_seed(cfg.seed, Stream::run, {idx});
}

/// Builds the per-run Scenario. File-backed networks are loaded once and
/// shared by every seed; synthetic networks are regenerated per run seed
/// unless the config pins the instance seed.
class ScenarioFactory {
 public:
  explicit ScenarioFactory(ScenarioConfig cfg) : cfg_(std::move(cfg)) {
    validate(cfg_);
    if (!cfg_.synthetic) shared_ = std::make_shared<const Scenario>(load_file_scenario());
  }

  std::shared_ptr<const Scenario> make(std::uint64_t seed) const {
    if (shared_) return shared_;
    SyntheticSpec spec = *cfg_.synthetic;
    if (!cfg_.synthetic_seed_fixed) spec.seed = derive_seed(seed, Stream::synth);
    SyntheticInstance inst = generate_instance(spec);
    if (!cfg_.source && !cfg_.target) {
      return std::make_shared<const Scenario>(std::move(inst.scenario));
    }
    const VertexId s = cfg_.source.value_or(inst.scenario.truth.source());
    const VertexId t = cfg_.target.value_or(inst.scenario.truth.target());
    GroundTruth truth =
        GroundTruth::direct(inst.scenario.network, inst.true_mean_wh, inst.true_std_wh, s, t);
    return std::make_shared<const Scenario>(Scenario{std::move(inst.scenario.network),
                                                     std::move(truth),
                                                     std::move(inst.scenario.priors)});
  }

  const ScenarioConfig& config() const { return cfg_; }

 private:
  Scenario load_file_scenario() const {
    io::NetworkFile file = io::read_network(cfg_.network_file);
    if (!cfg_.source || !cfg_.target) {
      throw InvalidInput("file-backed scenarios need explicit source and target vertices");
    }
    const VertexId s = *cfg_.source;
    const VertexId t = *cfg_.target;
    const TruthMode mode = cfg_.truth_mode.value_or(file.true_mean_wh ? TruthMode::direct
                                                                      : TruthMode::speed_noise);
    std::optional<GroundTruth> truth;
    switch (mode) {
      case TruthMode::direct:
        if (!file.true_mean_wh) {
          throw InvalidInput("direct ground truth needs true_mean_wh/true_std_wh in the network file");
        }
        truth = GroundTruth::direct(file.network, *file.true_mean_wh, *file.true_std_wh, s, t);
        break;
      case TruthMode::consumption_noise:
        truth = GroundTruth::consumption_noise(file.network, cfg_.vehicle, cfg_.phi, s, t,
                                               cfg_.physics);
        break;
      case TruthMode::speed_noise:
        truth = GroundTruth::speed_noise(file.network, cfg_.vehicle, s, t, cfg_.mc_draws,
                                         derive_seed(cfg_.seed, Stream::truth_mc), cfg_.physics);
        break;
    }
    PriorStore priors = cfg_.prior_file.empty()
                            ? energy_model_prior(file.network, cfg_)
                            : io::read_belief_csv(cfg_.prior_file, file.network.edge_count());
    return Scenario{std::move(file.network), std::move(*truth), std::move(priors)};
  }

  ScenarioConfig cfg_;
  std::shared_ptr<const Scenario> shared_;
};

/// One (agent label, seed) run: a fleet of num_agents traces.
struct AgentRun {
  std::string label;
  std::size_t seed_index = 0;
  std::uint64_t seed = 0;
  std::vector<Trace> traces;
  double optimal_cost_wh = 0.0;
  double max_mc_standard_error_wh = 0.0;

  std::string run_id() const { return label + "-s" + std::to_string(seed_index); }

  /// Final cumulative regret averaged over the fleet.
  double final_regret() const {
    double total = 0.0;
    for (const Trace& tr : traces) {
      const auto c = cumulative_regret(tr);
      total += c.empty() ? 0.0 : c.back();
    }
    return traces.empty() ? 0.0 : total / static_cast<double>(traces.size());
  }
};

struct ScenarioOutcome {
  std::string name;
  std::size_t num_agents = 1;
  std::vector<AgentRun> runs;  // agent-major, seed-minor
  std::vector<io::SummaryRow> summary;
};

inline double sample_std(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  double ss = 0.0;
  for (const double x : xs) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

/// Runs every configured agent over cfg.seeds seeds. Output is identical
/// for any jobs value.
inline ScenarioOutcome run_scenario(const ScenarioConfig& cfg, std::size_t jobs = 1) {
  const ScenarioFactory factory(cfg);
  std::vector<std::shared_ptr<const Scenario>> scenarios(cfg.seeds);
  parallel_for(cfg.seeds, jobs, [&](std::size_t i) { scenarios[i] = factory.make(run_seed(cfg, i)); });

  ScenarioOutcome out;
  out.name = cfg.name;
  out.num_agents = cfg.num_agents;
  out.runs.resize(cfg.agents.size() * cfg.seeds);
  parallel_for(out.runs.size(), jobs, [&](std::size_t task) {
    const AgentSpec& agent = cfg.agents[task / cfg.seeds];
    const std::size_t idx = task % cfg.seeds;
    const Scenario& sc = *scenarios[idx];
    AgentRun& run = out.runs[task];
    run.label = agent_label(agent);
    run.seed_index = idx;
    run.seed = run_seed(cfg, idx);
    run.optimal_cost_wh = sc.truth.optimal_cost();
    run.max_mc_standard_error_wh = sc.truth.max_mc_standard_error();
    const RunOptions opt{cfg.horizon, cfg.num_agents, run.seed, cfg.positivity_floor_wh};
    if (cfg.num_agents == 1) {
      run.traces.push_back(run_single_agent(sc, agent, opt));
    } else {
      run.traces = run_multi_agent(sc, agent, opt);
    }
  });

  for (std::size_t a = 0; a < cfg.agents.size(); ++a) {
    std::vector<double> finals;
    for (std::size_t i = 0; i < cfg.seeds; ++i) finals.push_back(out.runs[a * cfg.seeds + i].final_regret());
    const double mean = std::accumulate(finals.begin(), finals.end(), 0.0) / static_cast<double>(finals.size());
    out.summary.push_back(
        {cfg.name, agent_label(cfg.agents[a]), cfg.num_agents, cfg.seeds, mean, sample_std(finals)});
  }
  return out;
}

inline std::string trace_csv(const ScenarioOutcome& outcome) {
  std::string out = io::trace_header_line();
  for (const AgentRun& run : outcome.runs) {
    for (const Trace& tr : run.traces) io::append_trace_rows(out, run.run_id(), tr);
  }
  return out;
}

inline io::json run_metadata(const ScenarioOutcome& outcome) {
  io::json runs = io::json::array();
  for (const AgentRun& run : outcome.runs) {
    runs.push_back({{"run_id", run.run_id()},
                    {"seed", run.seed},
                    {"optimal_cost_wh", run.optimal_cost_wh},
                    {"max_mc_standard_error_wh", run.max_mc_standard_error_wh},
                    {"final_cumulative_regret_wh", run.final_regret()}});
  }
  return {{"scenario", outcome.name}, {"num_agents", outcome.num_agents}, {"runs", std::move(runs)}};
}

/// trace.csv, summary.csv and run_meta.json under out_dir.
inline void write_scenario_outputs(const ScenarioOutcome& outcome, const std::filesystem::path& out_dir) {
  io::write_file_atomic(out_dir / "trace.csv", trace_csv(outcome));
  io::write_file_atomic(out_dir / "summary.csv", io::summary_csv(outcome.summary));
  io::write_file_atomic(out_dir / "run_meta.json", run_metadata(outcome).dump(2) + "\n");
}

// ---- sweeps -----------------------------------------------------------------

struct SweepPoint {
  std::string axis_value;
  std::vector<double> final_regret;  // one per seed, fleet-averaged
  bool ok = false;
  bool resumed = false;
  std::string error;
};

struct SweepOutcome {
  SweepAxis axis = SweepAxis::edges;
  std::vector<SweepPoint> points;
  bool failed = false;
};

inline ScenarioConfig sweep_point_config(const SweepSpec& spec, const std::string& value) {
  ScenarioConfig cfg = spec.base;
  cfg.seeds = spec.seeds;
  switch (spec.axis) {
    case SweepAxis::vertices: cfg.synthetic->vertices = std::stoull(value); break;
    case SweepAxis::edges: cfg.synthetic->edges = std::stoull(value); break;
    case SweepAxis::agents: cfg.num_agents = std::stoull(value); break;
    case SweepAxis::agent_type: cfg.agents = {parse_agent_label(value)}; break;
  }
  cfg.name = spec.base.name + "-" + to_string(spec.axis) + "-" + value;
  return cfg;
}

inline const std::vector<std::string> kSweepPointHeader = {"axis", "axis_value", "seed",
                                                           "final_cumulative_regret_wh", "status"};

inline std::string sweep_points_header_line() {
  return "axis,axis_value,seed,final_cumulative_regret_wh,status\n";
}

inline std::string sweep_point_rows(SweepAxis axis, const SweepPoint& p) {
  std::string out;
  const std::string prefix = to_string(axis) + "," + p.axis_value + ",";
  if (!p.ok) return prefix + ",,failed\n";
  for (std::size_t i = 0; i < p.final_regret.size(); ++i) {
    out += prefix + std::to_string(i) + "," + io::format_double(p.final_regret[i]) + ",ok\n";
  }
  return out;
}

inline std::filesystem::path sweep_point_file(const std::filesystem::path& out_dir, SweepAxis axis,
                                              const std::string& value) {
  return out_dir / "points" / (to_string(axis) + "_" + value + ".csv");
}

inline std::optional<SweepPoint> load_completed_point(const std::filesystem::path& file,
                                                      const std::string& value, std::size_t seeds) {
  if (!std::filesystem::exists(file)) return std::nullopt;
  try {
    auto in = io::open_input(file);
    const io::CsvTable t = io::parse_csv(in, file.string());
    io::expect_header(t, kSweepPointHeader, file.string());
    if (t.rows.size() != seeds) return std::nullopt;
    SweepPoint p;
    p.axis_value = value;
    for (std::size_t i = 0; i < seeds; ++i) {
      const auto& row = t.rows[i];
      if (row[1] != value || row[4] != "ok" || io::parse_uint(row[2], "seed") != i) return std::nullopt;
      p.final_regret.push_back(io::parse_double(row[3], "final_cumulative_regret_wh"));
    }
    p.ok = true;
    p.resumed = true;
    return p;
  } catch (const Error&) {
    return std::nullopt;
  }
}

/// sweep_points.csv (one row per axis value and seed) and sweep_summary.csv
/// (mean/std per axis value). Failed points are kept with status "failed".
inline void write_sweep_outputs(const SweepOutcome& outcome, const std::filesystem::path& out_dir) {
  std::string points = sweep_points_header_line();
  std::string summary = "axis,axis_value,seeds,mean_final_regret_wh,std_final_regret_wh,status\n";
  for (const SweepPoint& p : outcome.points) {
    points += sweep_point_rows(outcome.axis, p);
    summary += to_string(outcome.axis) + "," + p.axis_value + ",";
    if (p.ok) {
      const double mean = std::accumulate(p.final_regret.begin(), p.final_regret.end(), 0.0) /
                          static_cast<double>(p.final_regret.size());
      summary += std::to_string(p.final_regret.size()) + "," + io::format_double(mean) + "," +
                 io::format_double(sample_std(p.final_regret)) + ",ok\n";
    } else {
      summary += "0,,,failed\n";
    }
  }
  io::write_file_atomic(out_dir / "sweep_points.csv", points);
  io::write_file_atomic(out_dir / "sweep_summary.csv", summary);
}

/// Runs the sweep point by point. Each completed point is persisted under
/// out_dir/points; with resume, those files are reused instead of rerun.
/// Stops at the first failing point.
inline SweepOutcome run_sweep(const SweepSpec& spec, const std::filesystem::path& out_dir,
                              std::size_t jobs = 1, bool resume = false) {
  SweepOutcome outcome;
  outcome.axis = spec.axis;
  for (const std::string& value : spec.values) {
    const auto file = sweep_point_file(out_dir, spec.axis, value);
    if (resume) {
      if (auto done = load_completed_point(file, value, spec.seeds)) {
        outcome.points.push_back(std::move(*done));
        continue;
      }
    }
    SweepPoint point;
    point.axis_value = value;
    try {
      const ScenarioOutcome res = run_scenario(sweep_point_config(spec, value), jobs);
      for (const AgentRun& run : res.runs) point.final_regret.push_back(run.final_regret());
      point.ok = true;
      io::write_file_atomic(file, sweep_points_header_line() + sweep_point_rows(spec.axis, point));
    } catch (const std::exception& ex) {
      point.ok = false;
      point.error = ex.what();
      outcome.failed = true;
    }
    outcome.points.push_back(std::move(point));
    if (outcome.failed) break;
  }
  write_sweep_outputs(outcome, out_dir);
  return outcome;
}

// ---- reports ----------------------------------------------------------------

/// Concatenated summary rows, sorted by mean final regret (ascending).
inline std::vector<io::SummaryRow> collect_report_rows(const std::vector<std::filesystem::path>& files) {
  if (files.empty()) throw InvalidInput("report needs at least one summary file");
  std::vector<io::SummaryRow> rows;
  for (const auto& f : files) {
    auto part = io::read_summary_csv(f);
    rows.insert(rows.end(), part.begin(), part.end());
  }
  std::stable_sort(rows.begin(), rows.end(), [](const io::SummaryRow& a, const io::SummaryRow& b) {
    return a.mean_final_regret_wh < b.mean_final_regret_wh;
  });
  return rows;
}

inline std::string report_table(const std::vector<io::SummaryRow>& rows) {
  std::size_t scenario_w = 8;
  std::size_t agent_w = 5;
  for (const auto& r : rows) {
    scenario_w = std::max(scenario_w, r.scenario.size());
    agent_w = std::max(agent_w, r.agent.size());
  }
  auto line = [&](const std::string& rank, const std::string& scenario, const std::string& agent,
                  const std::string& k, const std::string& seeds, const std::string& mean,
                  const std::string& sd) {
    char buf[512];
    std::snprintf(buf, sizeof(buf), "%-4s  %-*s  %-*s  %3s  %5s  %16s  %16s\n", rank.c_str(),
                  static_cast<int>(scenario_w), scenario.c_str(), static_cast<int>(agent_w),
                  agent.c_str(), k.c_str(), seeds.c_str(), mean.c_str(), sd.c_str());
    return std::string(buf);
  };
  std::string out = line("rank", "scenario", "agent", "K", "seeds", "mean regret (Wh)", "std (Wh)");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    char mean[64];
    char sd[64];
    std::snprintf(mean, sizeof(mean), "%.1f", r.mean_final_regret_wh);
    std::snprintf(sd, sizeof(sd), "%.1f", r.std_final_regret_wh);
    out += line(std::to_string(i + 1), r.scenario, r.agent, std::to_string(r.num_agents),
                std::to_string(r.seeds), mean, sd);
  }
  return out;
}

inline std::string report_csv(const std::vector<io::SummaryRow>& rows) {
  std::string out = "rank,scenario,agent,num_agents,seeds,mean_final_regret_wh,std_final_regret_wh\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    out += std::to_string(i + 1) + "," + r.scenario + "," + r.agent + "," + std::to_string(r.num_agents) +
           "," + std::to_string(r.seeds) + "," + io::format_double(r.mean_final_regret_wh) + "," +
           io::format_double(r.std_final_regret_wh) + "\n";
  }
  return out;
}

}  // namespace ecoroute
