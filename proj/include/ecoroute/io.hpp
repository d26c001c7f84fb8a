#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "json.hpp"

#include "ecoroute/belief.hpp"
#include "ecoroute/errors.hpp"
#include "ecoroute/graph.hpp"
#include "ecoroute/sim.hpp"

namespace ecoroute::io {

using json = nlohmann::json;

// ---- text helpers -----------------------------------------------------------

/// Shortest decimal text that parses back to the same double.
inline std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view s, std::string_view what) {
  double x = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), x);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw FormatError("cannot parse " + std::string(what) + " from '" + std::string(s) + "'");
  }
  return x;
}

inline std::uint64_t parse_uint(std::string_view s, std::string_view what) {
  std::uint64_t x = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), x);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw FormatError("cannot parse " + std::string(what) + " from '" + std::string(s) + "'");
  }
  return x;
}

inline std::vector<std::string> split_csv_line(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::vector<std::string> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    fields.emplace_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

/// Header plus rows of a comma-separated file without quoting.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

inline CsvTable parse_csv(std::istream& in, std::string_view source) {
  CsvTable table;
  std::string line;
  if (!std::getline(in, line) || line.empty()) {
    throw FormatError(std::string(source) + ": empty file");
  }
  table.header = split_csv_line(line);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    auto fields = split_csv_line(line);
    if (fields.size() != table.header.size()) {
      throw FormatError(std::string(source) + ":" + std::to_string(line_no) + ": expected " +
                        std::to_string(table.header.size()) + " fields, got " +
                        std::to_string(fields.size()));
    }
    table.rows.push_back(std::move(fields));
  }
  return table;
}

inline void expect_header(const CsvTable& t, const std::vector<std::string>& expected,
                          std::string_view source) {
  if (t.header != expected) {
    std::string want;
    for (const auto& h : expected) want += (want.empty() ? "" : ",") + h;
    throw FormatError(std::string(source) + ": schema mismatch, expected header '" + want + "'");
  }
}

inline std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open '" + path.string() + "'");
  return in;
}

/// Write via a sibling temporary and rename, so readers never see partial files.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot write '" + tmp.string() + "'");
    out << contents;
    if (!out.flush()) throw FormatError("write failed for '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

// ---- network files ----------------------------------------------------------

/// A parsed network document. The optional ground-truth columns are either
/// present on every edge or on none.
struct NetworkFile {
  RoadNetwork network;
  std::optional<std::vector<double>> true_mean_wh;
  std::optional<std::vector<double>> true_std_wh;
};

namespace detail {

inline void reject_unknown_keys(const json& obj, std::initializer_list<std::string_view> allowed,
                                std::string_view where) {
  for (const auto& [key, _] : obj.items()) {
    bool known = false;
    for (const auto a : allowed) known = known || key == a;
    if (!known) throw FormatError(std::string(where) + ": unknown field '" + key + "'");
  }
}

inline double number_field(const json& obj, const char* key, std::string_view where) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw FormatError(std::string(where) + ": missing field '" + key + "'");
  if (!it->is_number()) throw FormatError(std::string(where) + ": field '" + key + "' is not a number");
  return it->get<double>();
}

inline std::uint64_t index_field(const json& obj, const char* key, std::string_view where) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw FormatError(std::string(where) + ": missing field '" + key + "'");
  if (!it->is_number_integer() || (!it->is_number_unsigned() && it->get<std::int64_t>() < 0)) {
    throw FormatError(std::string(where) + ": field '" + key + "' is not a non-negative integer");
  }
  return it->get<std::uint64_t>();
}

}  // namespace detail

inline NetworkFile parse_network(const json& doc) {
  if (!doc.is_object()) throw FormatError("network: document must be an object");
  detail::reject_unknown_keys(doc, {"vertices", "edges"}, "network");
  const std::uint64_t vertices = detail::index_field(doc, "vertices", "network");
  const auto edges_it = doc.find("edges");
  if (edges_it == doc.end() || !edges_it->is_array()) {
    throw FormatError("network: 'edges' must be an array");
  }

  std::vector<Edge> edges;
  std::vector<double> mean(edges_it->size());
  std::vector<double> sd(edges_it->size());
  std::size_t with_mean = 0;
  std::size_t with_std = 0;
  for (const json& rec : *edges_it) {
    const std::string where = "network edge #" + std::to_string(edges.size());
    if (!rec.is_object()) throw FormatError(where + ": not an object");
    detail::reject_unknown_keys(rec,
                                {"id", "from", "to", "length_m", "grade_rad", "speed_mean_mps",
                                 "speed_std_mps", "true_mean_wh", "true_std_wh"},
                                where);
    Edge e;
    e.id = static_cast<EdgeId>(detail::index_field(rec, "id", where));
    e.from = static_cast<VertexId>(detail::index_field(rec, "from", where));
    e.to = static_cast<VertexId>(detail::index_field(rec, "to", where));
    e.attrs.length_m = detail::number_field(rec, "length_m", where);
    e.attrs.grade_rad = detail::number_field(rec, "grade_rad", where);
    e.attrs.speed_mean_mps = detail::number_field(rec, "speed_mean_mps", where);
    e.attrs.speed_std_mps = detail::number_field(rec, "speed_std_mps", where);
    if (e.id < mean.size()) {
      if (rec.contains("true_mean_wh")) {
        mean[e.id] = detail::number_field(rec, "true_mean_wh", where);
        ++with_mean;
      }
      if (rec.contains("true_std_wh")) {
        sd[e.id] = detail::number_field(rec, "true_std_wh", where);
        ++with_std;
      }
    }
    edges.push_back(e);
  }

  NetworkFile file{RoadNetwork(vertices, std::move(edges)), std::nullopt, std::nullopt};
  const std::size_t m = file.network.edge_count();
  if ((with_mean != 0 && with_mean != m) || (with_std != 0 && with_std != m) ||
      (with_mean == 0) != (with_std == 0)) {
    throw FormatError("network: true_mean_wh and true_std_wh must be given on every edge or none");
  }
  if (with_mean == m && m > 0) {
    file.true_mean_wh = std::move(mean);
    file.true_std_wh = std::move(sd);
  }
  return file;
}

inline NetworkFile read_network(const std::filesystem::path& path) {
  auto in = open_input(path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& ex) {
    throw FormatError(path.string() + ": " + ex.what());
  }
  return parse_network(doc);
}

inline json network_to_json(const RoadNetwork& net, const std::vector<double>* true_mean_wh = nullptr,
                            const std::vector<double>* true_std_wh = nullptr) {
  json edges = json::array();
  for (const Edge& e : net.edges()) {
    json rec = {{"id", e.id},
                {"from", e.from},
                {"to", e.to},
                {"length_m", e.attrs.length_m},
                {"grade_rad", e.attrs.grade_rad},
                {"speed_mean_mps", e.attrs.speed_mean_mps},
                {"speed_std_mps", e.attrs.speed_std_mps}};
    if (true_mean_wh != nullptr && true_std_wh != nullptr) {
      rec["true_mean_wh"] = true_mean_wh->at(e.id);
      rec["true_std_wh"] = true_std_wh->at(e.id);
    }
    edges.push_back(std::move(rec));
  }
  return json{{"vertices", net.vertex_count()}, {"edges", std::move(edges)}};
}

// ---- belief snapshots -------------------------------------------------------

inline const std::vector<std::string> kBeliefHeader = {"edge_id", "model", "param1", "param2",
                                                       "noise_param"};

inline void append_belief_rows(std::string& out, const BeliefStore<GaussianEdgeBelief>& store) {
  for (std::size_t e = 0; e < store.size(); ++e) {
    out += std::to_string(e) + ",gaussian," + format_double(store[e].mean) + "," +
           format_double(store[e].variance) + "," + format_double(store[e].noise_variance) + "\n";
  }
}

inline void append_belief_rows(std::string& out, const BeliefStore<LogGaussianEdgeBelief>& store) {
  for (std::size_t e = 0; e < store.size(); ++e) {
    out += std::to_string(e) + ",log_gaussian," + format_double(store[e].log_mean) + "," +
           format_double(store[e].log_variance) + "," + format_double(store[e].noise_log_variance) +
           "\n";
  }
}

inline std::string belief_header_line() { return "edge_id,model,param1,param2,noise_param\n"; }

template <class Belief>
std::string belief_csv(const BeliefStore<Belief>& store) {
  std::string out = belief_header_line();
  append_belief_rows(out, store);
  return out;
}

inline std::string belief_csv(const PriorStore& store) {
  std::string out = belief_header_line();
  append_belief_rows(out, store.gaussian);
  append_belief_rows(out, store.log_gaussian);
  return out;
}

/// Reads a snapshot. Each model present must cover edges [0, edge_count)
/// exactly once; an absent model leaves its store empty.
inline PriorStore parse_belief_csv(std::istream& in, std::size_t edge_count, std::string_view source) {
  const CsvTable t = parse_csv(in, source);
  expect_header(t, kBeliefHeader, source);
  std::vector<std::optional<GaussianEdgeBelief>> g(edge_count);
  std::vector<std::optional<LogGaussianEdgeBelief>> lg(edge_count);
  std::size_t g_count = 0;
  std::size_t lg_count = 0;
  for (const auto& row : t.rows) {
    const std::uint64_t e = parse_uint(row[0], "edge_id");
    if (e >= edge_count) throw FormatError(std::string(source) + ": edge id out of range");
    const double p1 = parse_double(row[2], "param1");
    const double p2 = parse_double(row[3], "param2");
    const double noise = parse_double(row[4], "noise_param");
    const BeliefModel model = parse_belief_model(row[1]);
    if (model == BeliefModel::gaussian) {
      if (g[e]) throw FormatError(std::string(source) + ": duplicate gaussian row for an edge");
      g[e] = GaussianEdgeBelief{p1, p2, noise};
      validate(*g[e]);
      ++g_count;
    } else {
      if (lg[e]) throw FormatError(std::string(source) + ": duplicate log_gaussian row for an edge");
      lg[e] = LogGaussianEdgeBelief{p1, p2, noise};
      validate(*lg[e]);
      ++lg_count;
    }
  }
  if ((g_count != 0 && g_count != edge_count) || (lg_count != 0 && lg_count != edge_count)) {
    throw FormatError(std::string(source) + ": belief rows do not cover every edge");
  }
  PriorStore store;
  if (g_count == edge_count && edge_count > 0) {
    for (const auto& b : g) store.gaussian.push_back(*b);
  }
  if (lg_count == edge_count && edge_count > 0) {
    for (const auto& b : lg) store.log_gaussian.push_back(*b);
  }
  return store;
}

inline PriorStore read_belief_csv(const std::filesystem::path& path, std::size_t edge_count) {
  auto in = open_input(path);
  return parse_belief_csv(in, edge_count, path.string());
}

// ---- traces -----------------------------------------------------------------

inline const std::vector<std::string> kTraceHeader = {
    "run_id",           "agent_id",        "session",           "path_edge_count",
    "observed_cost_wh", "true_expected_cost_wh", "instant_regret_wh", "cumulative_regret_wh"};

inline std::string trace_header_line() {
  return "run_id,agent_id,session,path_edge_count,observed_cost_wh,true_expected_cost_wh,"
         "instant_regret_wh,cumulative_regret_wh\n";
}

/// Appends one agent's trace; cumulative regret is the running sum of the
/// instant regrets exactly as printed.
inline void append_trace_rows(std::string& out, std::string_view run_id, const Trace& trace) {
  const std::vector<double> cumulative = cumulative_regret(trace);
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const SessionRecord& r = trace[i];
    out += std::string(run_id) + "," + std::to_string(r.agent_id) + "," + std::to_string(r.session) +
           "," + std::to_string(r.path.size()) + "," + format_double(r.observed_cost_wh) + "," +
           format_double(r.true_expected_cost_wh) + "," + format_double(r.instant_regret_wh) + "," +
           format_double(cumulative[i]) + "\n";
  }
}

struct TraceRow {
  std::string run_id;
  std::size_t agent_id = 0;
  std::size_t session = 0;
  std::size_t path_edge_count = 0;
  double observed_cost_wh = 0.0;
  double true_expected_cost_wh = 0.0;
  double instant_regret_wh = 0.0;
  double cumulative_regret_wh = 0.0;
};

inline std::vector<TraceRow> parse_trace_csv(std::istream& in, std::string_view source) {
  const CsvTable t = parse_csv(in, source);
  expect_header(t, kTraceHeader, source);
  std::vector<TraceRow> rows;
  rows.reserve(t.rows.size());
  for (const auto& f : t.rows) {
    rows.push_back({f[0], parse_uint(f[1], "agent_id"), parse_uint(f[2], "session"),
                    parse_uint(f[3], "path_edge_count"), parse_double(f[4], "observed_cost_wh"),
                    parse_double(f[5], "true_expected_cost_wh"), parse_double(f[6], "instant_regret_wh"),
                    parse_double(f[7], "cumulative_regret_wh")});
  }
  return rows;
}

// ---- summaries --------------------------------------------------------------

inline const std::vector<std::string> kSummaryHeader = {
    "scenario", "agent", "num_agents", "seeds", "mean_final_regret_wh", "std_final_regret_wh"};

struct SummaryRow {
  std::string scenario;
  std::string agent;
  std::size_t num_agents = 1;
  std::size_t seeds = 1;
  double mean_final_regret_wh = 0.0;
  double std_final_regret_wh = 0.0;

  bool operator==(const SummaryRow&) const = default;
};

inline std::string summary_csv(const std::vector<SummaryRow>& rows) {
  std::string out = "scenario,agent,num_agents,seeds,mean_final_regret_wh,std_final_regret_wh\n";
  for (const SummaryRow& r : rows) {
    out += r.scenario + "," + r.agent + "," + std::to_string(r.num_agents) + "," +
           std::to_string(r.seeds) + "," + format_double(r.mean_final_regret_wh) + "," +
           format_double(r.std_final_regret_wh) + "\n";
  }
  return out;
}

inline std::vector<SummaryRow> parse_summary_csv(std::istream& in, std::string_view source) {
  const CsvTable t = parse_csv(in, source);
  expect_header(t, kSummaryHeader, source);
  if (t.rows.empty()) throw FormatError(std::string(source) + ": summary has no rows");
  std::vector<SummaryRow> rows;
  for (const auto& f : t.rows) {
    rows.push_back({f[0], f[1], parse_uint(f[2], "num_agents"), parse_uint(f[3], "seeds"),
                    parse_double(f[4], "mean_final_regret_wh"),
                    parse_double(f[5], "std_final_regret_wh")});
  }
  return rows;
}

inline std::vector<SummaryRow> read_summary_csv(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_summary_csv(in, path.string());
}

}  // namespace ecoroute::io
