// ecoroute: command-line driver for the routing simulator.
//
//   ecoroute synth  --vertices 30 --edges 200 --seed 7 --out-dir inst
//   ecoroute run    --config configs/synthetic_n30.json --jobs 4
//   ecoroute sweep  --config configs/sweep_edges.json --resume
//   ecoroute report out/a/summary.csv out/b/summary.csv

#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <iostream>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ecoroute/ecoroute.hpp"

namespace fs = std::filesystem;
using namespace ecoroute;

namespace {

std::string default_out_dir() {
  const char* env = std::getenv("ECOROUTE_OUT_DIR");
  return env != nullptr && *env != '\0' ? std::string(env) : std::string("out");
}

int cmd_synth(const std::optional<fs::path>& config, std::size_t vertices, std::size_t edges,
              std::optional<std::uint64_t> seed, const fs::path& out_dir) {
  SyntheticSpec spec;
  if (config) {
    const ScenarioConfig cfg = load_scenario_config(*config);
    if (!cfg.synthetic) throw InvalidInput("synth --config needs a synthetic network section");
    spec = *cfg.synthetic;
    if (!cfg.synthetic_seed_fixed) spec.seed = cfg.seed;
  } else {
    spec.vertices = vertices;
    spec.edges = edges;
  }
  if (seed) spec.seed = *seed;
  const SyntheticInstance inst = generate_instance(spec);
  const Scenario& sc = inst.scenario;

  fs::create_directories(out_dir);
  io::write_file_atomic(out_dir / "network.json",
                        io::network_to_json(sc.network, &inst.true_mean_wh, &inst.true_std_wh).dump(2) +
                            "\n");
  io::write_file_atomic(out_dir / "prior.csv", io::belief_csv(sc.priors));
  const io::json scenario = {{"name", "synthetic"},
                             {"network", {{"file", "network.json"}}},
                             {"prior_file", "prior.csv"},
                             {"source", sc.truth.source()},
                             {"target", sc.truth.target()},
                             {"ground_truth", {{"mode", "direct"}}},
                             {"agents", {"N-TS"}},
                             {"horizon", 2000}};
  io::write_file_atomic(out_dir / "scenario.json", scenario.dump(2) + "\n");

  std::printf("wrote %zu vertices, %zu edges to %s\n", sc.network.vertex_count(), sc.network.edge_count(),
              out_dir.string().c_str());
  std::printf("optimal cost %.3f Wh over %zu edges\n", sc.truth.optimal_cost(), sc.truth.optimal_path().size());
  return 0;
}

int cmd_run(const fs::path& config, std::optional<std::uint64_t> seed, std::size_t jobs,
            const fs::path& out_dir) {
  ScenarioConfig cfg = load_scenario_config(config);
  if (seed) cfg.seed = *seed;
  const ScenarioOutcome outcome = run_scenario(cfg, jobs);
  fs::create_directories(out_dir);
  write_scenario_outputs(outcome, out_dir);
  for (const io::SummaryRow& row : outcome.summary) {
    std::printf("%-8s final cumulative regret %.3f Wh (std %.3f, %zu seeds, K=%zu)\n", row.agent.c_str(),
                row.mean_final_regret_wh, row.std_final_regret_wh, row.seeds, row.num_agents);
  }
  return 0;
}

int cmd_sweep(const fs::path& config, std::optional<std::uint64_t> seed, std::size_t jobs,
              const fs::path& out_dir, bool resume) {
  SweepSpec spec = load_sweep_spec(config);
  if (seed) spec.base.seed = *seed;
  fs::create_directories(out_dir);
  const SweepOutcome outcome = run_sweep(spec, out_dir, jobs, resume);
  for (const SweepPoint& p : outcome.points) {
    if (!p.ok) {
      std::fprintf(stderr, "ecoroute: sweep point %s=%s failed: %s\n", to_string(outcome.axis).c_str(),
                   p.axis_value.c_str(), p.error.c_str());
      continue;
    }
    const double mean = std::accumulate(p.final_regret.begin(), p.final_regret.end(), 0.0) /
                        static_cast<double>(p.final_regret.size());
    std::printf("%s=%-8s mean final regret %.3f Wh%s\n", to_string(outcome.axis).c_str(),
                p.axis_value.c_str(), mean, p.resumed ? " (resumed)" : "");
  }
  return outcome.failed ? 1 : 0;
}

int cmd_report(const std::vector<fs::path>& files, const fs::path& out_dir) {
  const auto rows = collect_report_rows(files);
  std::fputs(report_table(rows).c_str(), stdout);
  fs::create_directories(out_dir);
  io::write_file_atomic(out_dir / "report.csv", report_csv(rows));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian online learning of energy-efficient routes"};
  app.require_subcommand(1);

  std::string out_dir = default_out_dir();
  std::optional<std::uint64_t> seed;
  std::size_t jobs = 1;
  std::string config;

  auto* synth = app.add_subcommand("synth", "Generate a synthetic chain-plus-shortcuts instance");
  std::size_t vertices = 30;
  std::size_t edges = 200;
  std::string synth_config;
  synth->add_option("--vertices", vertices, "Vertex count n")->check(CLI::PositiveNumber);
  synth->add_option("--edges", edges, "Edge count q")->check(CLI::PositiveNumber);
  synth->add_option("--config", synth_config, "Take the synthetic section of a scenario file")
      ->check(CLI::ExistingFile);
  synth->add_option("--seed", seed, "Instance seed");
  synth->add_option("--out-dir", out_dir, "Output directory (default $ECOROUTE_OUT_DIR or out)");

  auto* run = app.add_subcommand("run", "Run one scenario over its seeds");
  run->add_option("--config", config, "Scenario file")->required()->check(CLI::ExistingFile);
  run->add_option("--seed", seed, "Override the master seed");
  run->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  run->add_option("--out-dir", out_dir, "Output directory (default $ECOROUTE_OUT_DIR or out)");

  auto* sweep = app.add_subcommand("sweep", "Run a parameter sweep");
  bool resume = false;
  sweep->add_option("--config", config, "Sweep file")->required()->check(CLI::ExistingFile);
  sweep->add_option("--seed", seed, "Override the base master seed");
  sweep->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  sweep->add_option("--out-dir", out_dir, "Output directory (default $ECOROUTE_OUT_DIR or out)");
  sweep->add_flag("--resume", resume, "Reuse points already completed in --out-dir");

  auto* report = app.add_subcommand("report", "Rank agents across summary files");
  std::vector<std::string> files;
  report->add_option("files", files, "summary.csv files")->required()->check(CLI::ExistingFile);
  report->add_option("--out-dir", out_dir, "Where report.csv goes (default $ECOROUTE_OUT_DIR or out)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*synth) {
      std::optional<fs::path> cfg_path;
      if (!synth_config.empty()) cfg_path = synth_config;
      return cmd_synth(cfg_path, vertices, edges, seed, out_dir);
    }
    if (*run) return cmd_run(config, seed, jobs, out_dir);
    if (*sweep) return cmd_sweep(config, seed, jobs, out_dir, resume);
    if (*report) return cmd_report({files.begin(), files.end()}, out_dir);
  } catch (const std::exception& ex) {
    std::fprintf(stderr, "ecoroute: error: %s\n", ex.what());
    return 2;
  }
  return 0;
}
