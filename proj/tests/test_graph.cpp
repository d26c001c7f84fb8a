#include <algorithm>
#include <cstddef>
#include <limits>
#include <vector>

#include "catch_amalgamated.hpp"
#include "ecoroute/errors.hpp"
#include "ecoroute/graph.hpp"
#include "ecoroute/rng.hpp"

using namespace ecoroute;

namespace {

Edge edge(EdgeId id, VertexId from, VertexId to) { return Edge{id, from, to, EdgeAttrs{}}; }

RoadNetwork chain3() { return RoadNetwork(3, {edge(0, 0, 1), edge(1, 1, 2)}); }

// Random DAG on n vertices with up to max_edges forward edges (i < j).
RoadNetwork random_dag(Rng& rng, std::size_t n, std::size_t max_edges) {
  std::vector<std::pair<VertexId, VertexId>> pairs;
  for (VertexId i = 0; i < n; ++i) {
    for (VertexId j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  }
  for (std::size_t k = pairs.size(); k > 1; --k) std::swap(pairs[k - 1], pairs[rng.uniform_index(k)]);
  pairs.resize(std::min(pairs.size(), 1 + rng.uniform_index(max_edges)));
  std::vector<Edge> edges;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    edges.push_back(edge(static_cast<EdgeId>(k), pairs[k].first, pairs[k].second));
  }
  return RoadNetwork(n, std::move(edges));
}

}  // namespace

TEST_CASE("chain query returns the unique path") {
  const RoadNetwork net = chain3();
  const std::vector<double> w{1.0, 2.0};
  const Path p = shortest_path(net, w, 0, 2);
  CHECK(p == Path{0, 1});
  CHECK(path_cost(p, w) == 3.0);
  CHECK(path_vertices(net, p, 0) == std::vector<VertexId>{0, 1, 2});
}

TEST_CASE("cheaper shortcut beats the chain") {
  const RoadNetwork net(4, {edge(0, 0, 1), edge(1, 1, 2), edge(2, 2, 3), edge(3, 0, 3)});
  const std::vector<double> w{1.0, 1.0, 1.0, 2.5};
  const Path p = shortest_path(net, w, 0, 3);
  CHECK(p == Path{3});
  CHECK(path_cost(p, w) == 2.5);
  CHECK(enumerate_paths(net, 0, 3, 10).size() == 2);
}

TEST_CASE("unreachable target raises NoPath") {
  const RoadNetwork net(3, {edge(0, 0, 1)});
  const std::vector<double> w{1.0};
  CHECK_THROWS_AS(shortest_path(net, w, 0, 2), NoPath);
  CHECK(enumerate_paths(net, 0, 2, 10).empty());
}

TEST_CASE("invalid weights are rejected") {
  const RoadNetwork net = chain3();
  CHECK_THROWS_AS(shortest_path(net, std::vector<double>{1.0, -1.0}, 0, 2), InvalidWeight);
  CHECK_THROWS_AS(shortest_path(net, std::vector<double>{1.0, std::numeric_limits<double>::infinity()}, 0, 2),
                  InvalidWeight);
  CHECK_THROWS_AS(shortest_path(net, std::vector<double>{1.0}, 0, 2), InvalidWeight);
  CHECK(shortest_path(net, std::vector<double>{1.0, 0.0}, 0, 2) == Path{0, 1});
}

TEST_CASE("network construction is validated") {
  CHECK_THROWS_AS(RoadNetwork(2, {edge(0, 0, 0)}), InvalidInput);
  CHECK_THROWS_AS(RoadNetwork(2, {edge(0, 0, 5)}), InvalidInput);
  CHECK_THROWS_AS(RoadNetwork(3, {edge(1, 0, 1)}), InvalidInput);
  Edge bad = edge(0, 0, 1);
  bad.attrs.length_m = 0.0;
  CHECK_THROWS_AS(RoadNetwork(2, {bad}), InvalidInput);
  bad = edge(0, 0, 1);
  bad.attrs.speed_std_mps = -1.0;
  CHECK_THROWS_AS(RoadNetwork(2, {bad}), InvalidInput);
}

TEST_CASE("adjacency lists are sorted by edge id") {
  const RoadNetwork net(3, {edge(0, 0, 2), edge(1, 0, 1), edge(2, 1, 2), edge(3, 0, 2)});
  const auto out = net.out_edges(0);
  CHECK(std::vector<EdgeId>(out.begin(), out.end()) == std::vector<EdgeId>{0, 1, 3});
  const auto in = net.in_edges(2);
  CHECK(std::vector<EdgeId>(in.begin(), in.end()) == std::vector<EdgeId>{0, 2, 3});
}

TEST_CASE("path_cost sums weights") {
  const std::vector<double> w{1.0, 2.0, 3.0, 530.96};
  CHECK(path_cost(Path{}, w) == 0.0);
  CHECK(path_cost(Path{0, 1, 2}, w) == 6.0);
  CHECK(path_cost(Path{3}, w) == 530.96);
  CHECK_THROWS_AS(path_cost(Path{9}, w), InvalidInput);
}

TEST_CASE("complete DAGs have 2^(n-2) end-to-end paths") {
  // a path picks any subset of the n - 2 interior vertices
  for (VertexId n = 2; n <= 9; ++n) {
    std::vector<Edge> edges;
    EdgeId id = 0;
    for (VertexId i = 0; i < n; ++i) {
      for (VertexId j = i + 1; j < n; ++j) edges.push_back(edge(id++, i, j));
    }
    const RoadNetwork net(n, std::move(edges));
    const std::size_t expected = std::size_t{1} << (n - 2);
    const auto paths = enumerate_paths(net, 0, n - 1, 1000);
    CHECK(paths.size() == expected);
    CHECK(std::is_sorted(paths.begin(), paths.end()));
    CHECK_THROWS_AS(enumerate_paths(net, 0, n - 1, expected - 1), PathExplosion);
  }
}

TEST_CASE("enumeration handles cycles") {
  const RoadNetwork net(3, {edge(0, 0, 1), edge(1, 1, 0), edge(2, 1, 2), edge(3, 0, 2)});
  CHECK(enumerate_paths(net, 0, 2, 10) == std::vector<Path>{{0, 2}, {3}});
}

TEST_CASE("equal-cost ties resolve to the lexicographically smallest path") {
  // 0 -> 2 -> 3 (edges 0, 3) and 0 -> 1 -> 3 (edges 1, 2) both cost 2.
  const RoadNetwork net(4, {edge(0, 0, 2), edge(1, 0, 1), edge(2, 1, 3), edge(3, 2, 3)});
  const std::vector<double> w{1.0, 1.0, 1.0, 1.0};
  CHECK(shortest_path(net, w, 0, 3) == Path{0, 3});
}

TEST_CASE("Dijkstra matches exhaustive enumeration on random DAGs") {
  Rng rng(2024);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 2 + rng.uniform_index(9);
    const RoadNetwork net = random_dag(rng, n, 25);
    std::vector<double> w(net.edge_count());
    const bool integer = trial % 2 == 0;
    for (double& x : w) x = integer ? static_cast<double>(rng.uniform_index(5)) : 10.0 * rng.uniform();
    const auto paths = enumerate_paths(net, 0, static_cast<VertexId>(n - 1), 100000);
    if (paths.empty()) {
      CHECK_THROWS_AS(shortest_path(net, w, 0, static_cast<VertexId>(n - 1)), NoPath);
      continue;
    }
    double best = std::numeric_limits<double>::infinity();
    const Path* best_path = nullptr;
    for (const Path& p : paths) {
      const double c = path_cost(p, w);
      if (c < best) {
        best = c;
        best_path = &p;
      }
    }
    const Path got = shortest_path(net, w, 0, static_cast<VertexId>(n - 1));
    CHECK(path_cost(got, w) == best);
    if (integer) CHECK(got == *best_path);  // exact ties: first minimum in lexicographic order
  }
}
