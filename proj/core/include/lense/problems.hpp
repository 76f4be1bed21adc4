#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "lense/graph.hpp"
#include "lense/problem.hpp"
#include "lense/rng.hpp"

namespace lense {

/// Sorted, duplicate-free set of vertices.
using VertexSet = std::vector<Vertex>;

VertexSet make_vertex_set(std::span<const Vertex> vertices);

/// Problem plus the knobs its objective needs. `n_sim` and `seed` only matter
/// for IM, where the objective is a Monte Carlo estimate.
struct ProblemSpec {
  Problem kind = Problem::MVC;
  std::size_t n_sim = 1000;
  Seed seed = 0;
  std::size_t jobs = 1;
};

/// Fraction of edges with at least one endpoint in X. Throws DomainError on a
/// graph without edges.
double mvc_coverage(const Graph& g, std::span<const Vertex> x);

/// Edges with exactly one endpoint in X; direction is ignored.
std::size_t bmc_cut_value(const Graph& g, std::span<const Vertex> x);

/// Mean number of activated vertices over `n_sim` independent cascades of the
/// independent cascade model, edge weight = activation probability.
/// Cascade i draws from its own stream derived from (seed, i).
double ic_spread_estimate(const Graph& g, std::span<const Vertex> x, std::size_t n_sim, Seed seed,
                          std::size_t jobs = 1);

/// Exact expected spread by enumerating every live-edge realization of the
/// edges with probability strictly between 0 and 1. Throws SizeError when
/// the graph has more than 20 edges.
double ic_spread_exact(const Graph& g, std::span<const Vertex> x);

/// Live-edge coin of edge `e` in realization `stream`. A fixed function of
/// (stream, e): forward cascades and reverse-reachable sets drawn from the same
/// stream see the same realization, and spread is monotone in the seed set
/// for every stream.
inline bool edge_live(std::uint64_t stream, std::uint32_t e, double p) {
  if (p >= 1.0) return true;
  if (p <= 0.0) return false;
  const std::uint64_t h = mix64(stream ^ (0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(e) + 1)));
  return static_cast<double>(h >> 11) * 0x1.0p-53 < p;
}

/// Throws ValidationError unless every edge weight lies in [0,1].
void validate_probabilities(const Graph& g);

/// Weighted-cascade probabilities p(u,v) = 1/indegree(v).
Graph weighted_cascade(const Graph& g);

/// f(X) for the given problem, always evaluated on `g`.
double objective(const ProblemSpec& problem, const Graph& g, std::span<const Vertex> x);

}  // namespace lense
