#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <queue>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ecoroute/errors.hpp"

namespace ecoroute {

using VertexId = std::uint32_t;
using EdgeId = std::uint32_t;

/// Ordered edge-id sequence from source to target.
using Path = std::vector<EdgeId>;

/// Per-edge weight in watt-hours, indexed by edge id.
using WeightVector = std::vector<double>;

/// Physical attributes of a road segment.
struct EdgeAttrs {
  double length_m = 1.0;
  double grade_rad = 0.0;  // inclination, negative downhill
  double speed_mean_mps = 1.0;
  double speed_std_mps = 0.0;

  bool operator==(const EdgeAttrs&) const = default;
};

struct Edge {
  EdgeId id = 0;
  VertexId from = 0;
  VertexId to = 0;
  EdgeAttrs attrs;

  bool operator==(const Edge&) const = default;
};

/// Static directed road network. Vertices are dense ids [0, vertex_count);
/// edge ids are dense [0, edge_count) and index every per-edge vector in the
/// library. Immutable after construction.
class RoadNetwork {
 public:
  RoadNetwork() = default;

  /// Edges may arrive in any order; they are stored by id. Throws
  /// InvalidInput on self-loops, dangling endpoints, duplicate or non-dense
  /// ids, and attributes out of range.
  RoadNetwork(std::size_t vertex_count, std::vector<Edge> edges)
      : vertex_count_(vertex_count),
        edges_(edges.size()),
        out_(vertex_count),
        in_(vertex_count) {
    std::vector<bool> seen(edges.size(), false);
    for (Edge& e : edges) {
      if (e.id >= edges.size() || seen[e.id]) {
        throw InvalidInput("edge ids must be unique and dense in [0, edge_count), offending id " +
                           std::to_string(e.id));
      }
      seen[e.id] = true;
      if (e.from >= vertex_count || e.to >= vertex_count) {
        throw InvalidInput("edge " + std::to_string(e.id) + " references a missing vertex");
      }
      if (e.from == e.to) {
        throw InvalidInput("edge " + std::to_string(e.id) + " is a self-loop");
      }
      validate_attrs(e);
      edges_[e.id] = std::move(e);
    }
    for (const Edge& e : edges_) {
      out_[e.from].push_back(e.id);
      in_[e.to].push_back(e.id);
    }
  }

  std::size_t vertex_count() const { return vertex_count_; }
  std::size_t edge_count() const { return edges_.size(); }

  const Edge& edge(EdgeId id) const { return edges_.at(id); }
  std::span<const Edge> edges() const { return edges_; }

  /// Outgoing edge ids of v in ascending id order.
  std::span<const EdgeId> out_edges(VertexId v) const { return out_.at(v); }
  /// Incoming edge ids of v in ascending id order.
  std::span<const EdgeId> in_edges(VertexId v) const { return in_.at(v); }

  bool operator==(const RoadNetwork& other) const {
    return vertex_count_ == other.vertex_count_ && edges_ == other.edges_;
  }

 private:
  static void validate_attrs(const Edge& e) {
    const EdgeAttrs& a = e.attrs;
    const bool ok = std::isfinite(a.length_m) && a.length_m > 0.0 && std::isfinite(a.grade_rad) &&
                    std::isfinite(a.speed_mean_mps) && a.speed_mean_mps > 0.0 &&
                    std::isfinite(a.speed_std_mps) && a.speed_std_mps >= 0.0;
    if (!ok) {
      throw InvalidInput("edge " + std::to_string(e.id) + " has invalid attributes");
    }
  }

  std::size_t vertex_count_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::vector<EdgeId>> out_;
  std::vector<std::vector<EdgeId>> in_;
};

/// Sum of edge weights along a path.
inline double path_cost(std::span<const EdgeId> path, std::span<const double> w) {
  double total = 0.0;
  for (const EdgeId e : path) {
    if (e >= w.size()) {
      throw InvalidInput("path_cost: edge id " + std::to_string(e) + " has no weight");
    }
    total += w[e];
  }
  return total;
}

namespace detail {

inline void check_endpoints(const RoadNetwork& net, VertexId source, VertexId target) {
  if (source >= net.vertex_count() || target >= net.vertex_count()) {
    throw InvalidInput("source or target vertex does not exist");
  }
}

// Vertices from which target is reachable.
inline std::vector<bool> reaches_target(const RoadNetwork& net, VertexId target) {
  std::vector<bool> mark(net.vertex_count(), false);
  std::vector<VertexId> stack{target};
  mark[target] = true;
  while (!stack.empty()) {
    const VertexId v = stack.back();
    stack.pop_back();
    for (const EdgeId e : net.in_edges(v)) {
      const VertexId u = net.edge(e).from;
      if (!mark[u]) {
        mark[u] = true;
        stack.push_back(u);
      }
    }
  }
  return mark;
}

}  // namespace detail

/// Minimum-weight source -> target path by Dijkstra.
///
/// The search runs backwards from the target, so dist[v] is the exact
/// floating-point cost-to-go of v. The path is then read forwards by always
/// taking the smallest-id edge e = (u, v) with w(e) + dist[v] == dist[u].
/// Every such tight edge lies on some minimum-cost path, so this yields the
/// lexicographically smallest edge-id sequence among minimum-cost paths.
/// With zero-weight cycles the forward walk may stall on an already visited
/// vertex; it then falls back to the Dijkstra tree path, which is still
/// minimal and deterministic.
inline Path shortest_path(const RoadNetwork& net, std::span<const double> w, VertexId source,
                          VertexId target) {
  detail::check_endpoints(net, source, target);
  if (w.size() != net.edge_count()) {
    throw InvalidWeight("weight vector size does not match edge count");
  }
  for (std::size_t e = 0; e < w.size(); ++e) {
    if (!std::isfinite(w[e]) || w[e] < 0.0) {
      throw InvalidWeight("weight of edge " + std::to_string(e) + " is negative or not finite");
    }
  }
  if (source == target) {
    return {};
  }

  constexpr double kInf = std::numeric_limits<double>::infinity();
  constexpr EdgeId kNone = std::numeric_limits<EdgeId>::max();
  std::vector<double> dist(net.vertex_count(), kInf);
  std::vector<EdgeId> next_edge(net.vertex_count(), kNone);
  std::vector<bool> settled(net.vertex_count(), false);

  using Item = std::pair<double, VertexId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  dist[target] = 0.0;
  heap.emplace(0.0, target);
  while (!heap.empty()) {
    const auto [d, v] = heap.top();
    heap.pop();
    if (settled[v]) {
      continue;
    }
    settled[v] = true;
    for (const EdgeId e : net.in_edges(v)) {
      const VertexId u = net.edge(e).from;
      const double candidate = w[e] + d;
      if (!settled[u] && (candidate < dist[u] || (candidate == dist[u] && e < next_edge[u]))) {
        dist[u] = candidate;
        next_edge[u] = e;
        heap.emplace(candidate, u);
      }
    }
  }
  if (!settled[source]) {
    throw NoPath("no path from vertex " + std::to_string(source) + " to vertex " +
                 std::to_string(target));
  }

  Path path;
  std::vector<bool> visited(net.vertex_count(), false);
  VertexId v = source;
  visited[v] = true;
  while (v != target) {
    EdgeId chosen = kNone;
    for (const EdgeId e : net.out_edges(v)) {
      const VertexId head = net.edge(e).to;
      if (settled[head] && !visited[head] && w[e] + dist[head] == dist[v]) {
        chosen = e;
        break;
      }
    }
    if (chosen == kNone) {
      path.clear();
      for (VertexId u = source; u != target; u = net.edge(next_edge[u]).to) {
        path.push_back(next_edge[u]);
      }
      return path;
    }
    path.push_back(chosen);
    v = net.edge(chosen).to;
    visited[v] = true;
  }
  return path;
}

/// All simple source -> target paths in lexicographic edge-id order.
/// Throws PathExplosion once more than max_paths paths are found.
inline std::vector<Path> enumerate_paths(const RoadNetwork& net, VertexId source, VertexId target,
                                         std::size_t max_paths) {
  detail::check_endpoints(net, source, target);
  std::vector<Path> paths;
  if (source == target) {
    paths.emplace_back();
    return paths;
  }
  const std::vector<bool> useful = detail::reaches_target(net, target);
  if (!useful[source]) {
    return paths;
  }

  std::vector<bool> on_path(net.vertex_count(), false);
  Path current;
  // Iterative DFS; each frame is (vertex, index of the next out edge to try).
  std::vector<std::pair<VertexId, std::size_t>> frames{{source, 0}};
  on_path[source] = true;
  while (!frames.empty()) {
    auto& [v, next] = frames.back();
    const auto out = net.out_edges(v);
    if (next == out.size()) {
      on_path[v] = false;
      frames.pop_back();
      if (!current.empty()) {
        current.pop_back();
      }
      continue;
    }
    const EdgeId e = out[next++];
    const VertexId head = net.edge(e).to;
    if (on_path[head] || !useful[head]) {
      continue;
    }
    current.push_back(e);
    if (head == target) {
      if (paths.size() == max_paths) {
        throw PathExplosion("more than " + std::to_string(max_paths) + " paths");
      }
      paths.push_back(current);
      current.pop_back();
      continue;
    }
    on_path[head] = true;
    frames.emplace_back(head, 0);
  }
  return paths;
}

/// Vertex sequence visited by a path starting at source.
inline std::vector<VertexId> path_vertices(const RoadNetwork& net, std::span<const EdgeId> path,
                                           VertexId source) {
  std::vector<VertexId> vertices{source};
  for (const EdgeId e : path) {
    vertices.push_back(net.edge(e).to);
  }
  return vertices;
}

}  // namespace ecoroute
