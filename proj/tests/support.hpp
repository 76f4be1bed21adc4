#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "lense/graph.hpp"
#include "lense/rng.hpp"

namespace lense::test {

inline Graph make_graph(std::size_t n, std::vector<std::pair<Vertex, Vertex>> pairs, bool directed = false,
                        std::vector<double> weights = {}) {
  std::vector<OriginalId> ids(n);
  for (std::size_t i = 0; i < n; ++i) ids[i] = static_cast<OriginalId>(i);
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    edges.push_back({pairs[i].first, pairs[i].second, weights.empty() ? 1.0 : weights[i]});
  }
  return Graph::from_edges(directed, !weights.empty(), std::move(ids), edges);
}

inline Graph path_graph(std::size_t n) {
  std::vector<std::pair<Vertex, Vertex>> e;
  for (Vertex v = 0; v + 1 < n; ++v) e.emplace_back(v, v + 1);
  return make_graph(n, e);
}

inline Graph star_graph(std::size_t leaves) {
  std::vector<std::pair<Vertex, Vertex>> e;
  for (Vertex v = 1; v <= leaves; ++v) e.emplace_back(0, v);
  return make_graph(leaves + 1, e);
}

inline Graph triangle() { return make_graph(3, {{0, 1}, {1, 2}, {0, 2}}); }

inline Graph complete_bipartite(std::size_t a, std::size_t b) {
  std::vector<std::pair<Vertex, Vertex>> e;
  for (Vertex u = 0; u < a; ++u) {
    for (Vertex v = 0; v < b; ++v) e.emplace_back(u, static_cast<Vertex>(a + v));
  }
  return make_graph(a + b, e);
}

inline Graph petersen() {
  std::vector<std::pair<Vertex, Vertex>> e;
  for (Vertex i = 0; i < 5; ++i) {
    e.emplace_back(i, (i + 1) % 5);
    e.emplace_back(i, i + 5);
    e.emplace_back(i + 5, (i + 2) % 5 + 5);
  }
  return make_graph(10, e);
}

/// Erdos-Renyi style graph with every vertex touched by at least one edge.
inline Graph random_graph(std::size_t n, double p, Rng& rng, bool directed = false) {
  std::vector<std::pair<Vertex, Vertex>> e;
  for (Vertex u = 0; u < n; ++u) {
    for (Vertex v = directed ? 0 : u + 1; v < n; ++v) {
      if (u != v && uniform01(rng) < p) e.emplace_back(u, v);
    }
  }
  std::vector<bool> touched(n, false);
  for (auto [u, v] : e) touched[u] = touched[v] = true;
  for (Vertex v = 0; v < n; ++v) {
    if (!touched[v]) e.emplace_back(v, static_cast<Vertex>((v + 1) % n));
  }
  return make_graph(n, e, directed);
}

}  // namespace lense::test
