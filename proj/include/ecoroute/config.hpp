#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <type_traits>
#include <string>
#include <vector>

#include "json.hpp"

#include "ecoroute/agents.hpp"
#include "ecoroute/energy.hpp"
#include "ecoroute/errors.hpp"
#include "ecoroute/io.hpp"
#include "ecoroute/sim.hpp"
#include "ecoroute/synth.hpp"

namespace ecoroute {

/// A scenario document: where the network comes from, the hidden truth,
/// which agents to run and for how long.
///
/// Example:
///   {"name": "synthetic", "network": {"synthetic": {"vertices": 30, "edges": 200}},
///    "agents": ["N-TS", "N-GR"], "horizon": 2000, "seeds": 5}
struct ScenarioConfig {
  std::string name = "scenario";

  // Exactly one of synthetic / network_file is set.
  std::optional<SyntheticSpec> synthetic;
  bool synthetic_seed_fixed = false;  // otherwise each run seed draws a new instance
  std::filesystem::path network_file;
  std::filesystem::path prior_file;

  std::optional<VertexId> source;
  std::optional<VertexId> target;
  std::optional<TruthMode> truth_mode;
  std::size_t mc_draws = 100000;

  std::vector<AgentSpec> agents;
  std::size_t num_agents = 1;
  std::size_t horizon = 400;
  std::uint64_t seed = 1;
  std::size_t seeds = 1;

  double phi = 0.1;    // likelihood std as a fraction of eps(e)
  double theta = 0.25;  // prior std as a fraction of mu_0(e)
  double positivity_floor_wh = 1e-3;
  double min_prior_wh = 1.0;
  std::optional<double> prior_speed_mps;  // uniform prior speed; default: each edge's mean speed

  VehicleParams vehicle;
  PhysicsConstants physics;
};

enum class SweepAxis { vertices, edges, agents, agent_type };

inline std::string to_string(SweepAxis a) {
  switch (a) {
    case SweepAxis::vertices: return "vertices";
    case SweepAxis::edges: return "edges";
    case SweepAxis::agents: return "agents";
    case SweepAxis::agent_type: return "agent_type";
  }
  return "?";
}

struct SweepSpec {
  ScenarioConfig base;
  SweepAxis axis = SweepAxis::edges;
  std::vector<std::string> values;
  std::size_t seeds = 1;
};

namespace detail {

using io::json;

inline void reject_unknown(const json& obj, std::initializer_list<std::string_view> allowed,
                           std::string_view where) {
  if (!obj.is_object()) throw FormatError(std::string(where) + ": expected an object");
  io::detail::reject_unknown_keys(obj, allowed, where);
}

template <class T>
T get_or(const json& obj, const char* key, T fallback, std::string_view where) {
  const auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  try {
    if constexpr (std::is_unsigned_v<T>) {
      if (!it->is_number_integer() ||
          (!it->is_number_unsigned() && it->template get<std::int64_t>() < 0)) {
        throw FormatError("not a non-negative integer");
      }
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!it->is_number()) throw FormatError("not a number");
    }
    return it->get<T>();
  } catch (const std::exception& ex) {
    throw FormatError(std::string(where) + ": bad value for '" + key + "': " + ex.what());
  }
}

inline bool valid_name(const std::string& s) {
  if (s.empty()) return false;
  for (const char c : s) {
    if (c == ',' || c == '"' || c == '\n' || c == '\r' || c == '/' || c == '\\') return false;
  }
  return true;
}

inline SyntheticSpec parse_synthetic(const json& obj, bool& seed_fixed) {
  reject_unknown(obj,
                 {"vertices", "edges", "seed", "chain_mean", "chain_var", "shortcut_mean_per_skip",
                  "prior_var"},
                 "network.synthetic");
  SyntheticSpec s;
  s.vertices = get_or<std::size_t>(obj, "vertices", s.vertices, "network.synthetic");
  s.edges = get_or<std::size_t>(obj, "edges", s.edges, "network.synthetic");
  seed_fixed = obj.contains("seed");
  s.seed = get_or<std::uint64_t>(obj, "seed", 0, "network.synthetic");
  s.chain_mean = get_or<double>(obj, "chain_mean", s.chain_mean, "network.synthetic");
  s.chain_var = get_or<double>(obj, "chain_var", s.chain_var, "network.synthetic");
  s.shortcut_mean_per_skip =
      get_or<double>(obj, "shortcut_mean_per_skip", s.shortcut_mean_per_skip, "network.synthetic");
  s.prior_var = get_or<double>(obj, "prior_var", s.prior_var, "network.synthetic");
  return s;
}

}  // namespace detail

/// Checks cross-field constraints; throws SpecViolation for synthetic
/// parameters and InvalidInput for everything else.
inline void validate(const ScenarioConfig& cfg) {
  if (!detail::valid_name(cfg.name)) throw InvalidInput("scenario name is empty or has reserved characters");
  if (cfg.synthetic.has_value() == !cfg.network_file.empty()) {
    throw InvalidInput("exactly one of network.synthetic and network.file is required");
  }
  if (cfg.synthetic) {
    validate(*cfg.synthetic);
    if (cfg.truth_mode && *cfg.truth_mode != TruthMode::direct) {
      throw InvalidInput("synthetic networks only support the direct ground-truth mode");
    }
    if (!cfg.prior_file.empty()) throw InvalidInput("synthetic networks carry their own prior");
  }
  if (cfg.agents.empty()) throw InvalidInput("at least one agent is required");
  if (cfg.horizon < 1) throw InvalidInput("horizon must be at least 1");
  if (cfg.num_agents < 1) throw InvalidInput("num_agents must be at least 1");
  if (cfg.seeds < 1) throw InvalidInput("seeds must be at least 1");
  if (cfg.source && cfg.target && *cfg.source == *cfg.target) {
    throw InvalidInput("source and target must differ");
  }
  if (!(cfg.phi > 0.0) || !(cfg.theta > 0.0) || !(cfg.positivity_floor_wh > 0.0) ||
      !(cfg.min_prior_wh > 0.0)) {
    throw InvalidInput("phi, theta, positivity_floor_wh and min_prior_wh must be positive");
  }
  if (cfg.prior_speed_mps && !(*cfg.prior_speed_mps > 0.0)) {
    throw InvalidInput("prior_speed_mps must be positive");
  }
  if (cfg.mc_draws < 2) throw InvalidInput("ground_truth.mc_draws must be at least 2");
  cfg.vehicle.validate();
}

/// Relative file paths resolve against base_dir.
inline ScenarioConfig parse_scenario_config(const io::json& doc,
                                            const std::filesystem::path& base_dir = {}) {
  using detail::get_or;
  detail::reject_unknown(doc,
                         {"name", "network", "prior_file", "source", "target", "ground_truth",
                          "agents", "num_agents", "horizon", "seed", "seeds", "phi", "theta",
                          "positivity_floor_wh", "min_prior_wh", "prior_speed_mps", "vehicle",
                          "physics"},
                         "scenario");
  ScenarioConfig cfg;
  cfg.name = get_or<std::string>(doc, "name", cfg.name, "scenario");

  const auto net = doc.find("network");
  if (net == doc.end()) throw FormatError("scenario: missing 'network'");
  detail::reject_unknown(*net, {"synthetic", "file"}, "network");
  if (net->contains("synthetic")) {
    cfg.synthetic = detail::parse_synthetic(net->at("synthetic"), cfg.synthetic_seed_fixed);
  }
  if (net->contains("file")) {
    cfg.network_file = base_dir / get_or<std::string>(*net, "file", "", "network");
  }
  if (doc.contains("prior_file")) {
    cfg.prior_file = base_dir / get_or<std::string>(doc, "prior_file", "", "scenario");
  }
  if (doc.contains("source")) cfg.source = get_or<VertexId>(doc, "source", 0, "scenario");
  if (doc.contains("target")) cfg.target = get_or<VertexId>(doc, "target", 0, "scenario");

  if (const auto gt = doc.find("ground_truth"); gt != doc.end()) {
    detail::reject_unknown(*gt, {"mode", "mc_draws"}, "ground_truth");
    if (gt->contains("mode")) {
      cfg.truth_mode = parse_truth_mode(get_or<std::string>(*gt, "mode", "", "ground_truth"));
    }
    cfg.mc_draws = get_or<std::size_t>(*gt, "mc_draws", cfg.mc_draws, "ground_truth");
  }

  if (const auto agents = doc.find("agents"); agents != doc.end()) {
    if (!agents->is_array()) throw FormatError("scenario: 'agents' must be an array of labels");
    for (const auto& label : *agents) {
      if (!label.is_string()) throw FormatError("scenario: agent labels must be strings");
      cfg.agents.push_back(parse_agent_label(label.get<std::string>()));
    }
  }
  cfg.num_agents = get_or<std::size_t>(doc, "num_agents", cfg.num_agents, "scenario");
  cfg.horizon = get_or<std::size_t>(doc, "horizon", cfg.horizon, "scenario");
  cfg.seed = get_or<std::uint64_t>(doc, "seed", cfg.seed, "scenario");
  cfg.seeds = get_or<std::size_t>(doc, "seeds", cfg.seeds, "scenario");
  cfg.phi = get_or<double>(doc, "phi", cfg.phi, "scenario");
  cfg.theta = get_or<double>(doc, "theta", cfg.theta, "scenario");
  cfg.positivity_floor_wh = get_or<double>(doc, "positivity_floor_wh", cfg.positivity_floor_wh, "scenario");
  cfg.min_prior_wh = get_or<double>(doc, "min_prior_wh", cfg.min_prior_wh, "scenario");
  if (doc.contains("prior_speed_mps")) {
    cfg.prior_speed_mps = get_or<double>(doc, "prior_speed_mps", 0.0, "scenario");
  }

  if (const auto v = doc.find("vehicle"); v != doc.end()) {
    detail::reject_unknown(*v,
                           {"mass_kg", "rolling_resistance", "drag_coefficient", "frontal_area_m2",
                            "eta_traction", "eta_regen"},
                           "vehicle");
    VehicleParams& p = cfg.vehicle;
    p.mass_kg = get_or<double>(*v, "mass_kg", p.mass_kg, "vehicle");
    p.rolling_resistance = get_or<double>(*v, "rolling_resistance", p.rolling_resistance, "vehicle");
    p.drag_coefficient = get_or<double>(*v, "drag_coefficient", p.drag_coefficient, "vehicle");
    p.frontal_area_m2 = get_or<double>(*v, "frontal_area_m2", p.frontal_area_m2, "vehicle");
    p.eta_traction = get_or<double>(*v, "eta_traction", p.eta_traction, "vehicle");
    p.eta_regen = get_or<double>(*v, "eta_regen", p.eta_regen, "vehicle");
  }
  if (const auto ph = doc.find("physics"); ph != doc.end()) {
    detail::reject_unknown(*ph, {"gravity", "air_density"}, "physics");
    cfg.physics.gravity = get_or<double>(*ph, "gravity", cfg.physics.gravity, "physics");
    cfg.physics.air_density = get_or<double>(*ph, "air_density", cfg.physics.air_density, "physics");
  }
  validate(cfg);
  return cfg;
}

inline io::json read_json_file(const std::filesystem::path& path) {
  auto in = io::open_input(path);
  try {
    return io::json::parse(in);
  } catch (const io::json::exception& ex) {
    throw FormatError(path.string() + ": " + ex.what());
  }
}

inline ScenarioConfig load_scenario_config(const std::filesystem::path& path) {
  return parse_scenario_config(read_json_file(path), path.parent_path());
}

/// Sweep document: {"base": <scenario object or path>, "axis": "edges",
/// "values": [60, 100], "seeds": 2}.
inline SweepSpec parse_sweep_spec(const io::json& doc, const std::filesystem::path& base_dir = {}) {
  detail::reject_unknown(doc, {"base", "axis", "values", "seeds"}, "sweep");
  SweepSpec spec;
  const auto base = doc.find("base");
  if (base == doc.end()) throw FormatError("sweep: missing 'base'");
  if (base->is_string()) {
    spec.base = load_scenario_config(base_dir / base->get<std::string>());
  } else {
    spec.base = parse_scenario_config(*base, base_dir);
  }

  const std::string axis = detail::get_or<std::string>(doc, "axis", "", "sweep");
  if (axis == "vertices") {
    spec.axis = SweepAxis::vertices;
  } else if (axis == "edges") {
    spec.axis = SweepAxis::edges;
  } else if (axis == "agents") {
    spec.axis = SweepAxis::agents;
  } else if (axis == "agent_type") {
    spec.axis = SweepAxis::agent_type;
  } else {
    throw FormatError("sweep: axis must be one of vertices, edges, agents, agent_type");
  }

  const auto values = doc.find("values");
  if (values == doc.end() || !values->is_array() || values->empty()) {
    throw FormatError("sweep: 'values' must be a non-empty array");
  }
  for (const auto& v : *values) {
    if (spec.axis == SweepAxis::agent_type) {
      if (!v.is_string()) throw FormatError("sweep: agent_type values must be labels");
      parse_agent_label(v.get<std::string>());
      spec.values.push_back(v.get<std::string>());
    } else {
      if (!v.is_number_integer() || v.get<std::int64_t>() <= 0) {
        throw FormatError("sweep: values must be positive integers");
      }
      spec.values.push_back(std::to_string(v.get<std::uint64_t>()));
    }
  }
  spec.seeds = detail::get_or<std::size_t>(doc, "seeds", spec.base.seeds, "sweep");
  if (spec.seeds < 1) throw FormatError("sweep: seeds must be at least 1");

  const bool axis_needs_synthetic = spec.axis == SweepAxis::vertices || spec.axis == SweepAxis::edges;
  if (axis_needs_synthetic && !spec.base.synthetic) {
    throw InvalidInput("sweep: vertices/edges axes need a synthetic base network");
  }
  if (spec.axis != SweepAxis::agent_type && spec.base.agents.size() != 1) {
    throw InvalidInput("sweep: base scenario must name exactly one agent for this axis");
  }
  return spec;
}

inline SweepSpec load_sweep_spec(const std::filesystem::path& path) {
  return parse_sweep_spec(read_json_file(path), path.parent_path());
}

}  // namespace ecoroute
