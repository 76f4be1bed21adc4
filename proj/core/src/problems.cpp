#include "lense/problems.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "lense/errors.hpp"
#include "lense/parallel.hpp"

namespace lense {

namespace {

std::vector<char> membership(const Graph& g, std::span<const Vertex> x) {
  std::vector<char> in(g.num_vertices(), 0);
  for (Vertex v : x) {
    if (!g.contains(v)) throw LookupError("vertex " + std::to_string(v) + " not in graph");
    in[v] = 1;
  }
  return in;
}

std::size_t cascade(const Graph& g, std::span<const Vertex> x, std::uint64_t stream, std::vector<char>& active,
                    std::vector<Vertex>& frontier) {
  std::fill(active.begin(), active.end(), 0);
  frontier.clear();
  for (Vertex v : x) {
    if (!active[v]) {
      active[v] = 1;
      frontier.push_back(v);
    }
  }
  for (std::size_t head = 0; head < frontier.size(); ++head) {
    const Vertex u = frontier[head];
    for (const Arc& a : g.out_arcs(u)) {
      if (active[a.to]) continue;
      if (edge_live(stream, a.edge, g.edge(a.edge).weight)) {
        active[a.to] = 1;
        frontier.push_back(a.to);
      }
    }
  }
  return frontier.size();
}

}  // namespace

VertexSet make_vertex_set(std::span<const Vertex> vertices) {
  VertexSet s(vertices.begin(), vertices.end());
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

double mvc_coverage(const Graph& g, std::span<const Vertex> x) {
  if (g.num_edges() == 0) throw DomainError("coverage is undefined on a graph without edges");
  const auto in = membership(g, x);
  std::size_t covered = 0;
  for (const Edge& e : g.edges()) covered += (in[e.src] || in[e.dst]) ? 1 : 0;
  return static_cast<double>(covered) / static_cast<double>(g.num_edges());
}

std::size_t bmc_cut_value(const Graph& g, std::span<const Vertex> x) {
  const auto in = membership(g, x);
  std::size_t cut = 0;
  for (const Edge& e : g.edges()) cut += (in[e.src] != in[e.dst]) ? 1 : 0;
  return cut;
}

void validate_probabilities(const Graph& g) {
  for (const Edge& e : g.edges()) {
    if (!(e.weight >= 0.0 && e.weight <= 1.0)) {
      throw ValidationError("activation probability outside [0,1] on edge " + std::to_string(g.original_id(e.src)) +
                            "->" + std::to_string(g.original_id(e.dst)));
    }
  }
}

double ic_spread_estimate(const Graph& g, std::span<const Vertex> x, std::size_t n_sim, Seed seed, std::size_t jobs) {
  if (n_sim == 0) throw ValidationError("n_sim must be at least 1");
  validate_probabilities(g);
  membership(g, x);
  std::vector<std::size_t> counts(n_sim);
  const std::size_t workers = std::max<std::size_t>(1, std::min(jobs, n_sim));
  const std::size_t block = (n_sim + workers - 1) / workers;
  parallel_for(workers, workers, [&](std::size_t w) {
    std::vector<char> active(g.num_vertices());
    std::vector<Vertex> frontier;
    for (std::size_t i = w * block; i < std::min(n_sim, (w + 1) * block); ++i) {
      counts[i] = cascade(g, x, derive_seed(seed, i), active, frontier);
    }
  });
  double total = 0.0;
  for (std::size_t c : counts) total += static_cast<double>(c);
  return total / static_cast<double>(n_sim);
}

double ic_spread_exact(const Graph& g, std::span<const Vertex> x) {
  if (g.num_edges() > 20) throw SizeError("exact spread enumeration is limited to 20 edges");
  validate_probabilities(g);
  const auto seeds = membership(g, x);
  std::vector<std::uint32_t> uncertain;
  for (std::uint32_t e = 0; e < g.num_edges(); ++e) {
    const double p = g.edge(e).weight;
    if (p > 0.0 && p < 1.0) uncertain.push_back(e);
  }
  std::vector<char> live(g.num_edges());
  std::vector<char> active(g.num_vertices());
  std::vector<Vertex> frontier;
  double expectation = 0.0;
  const std::uint64_t realizations = std::uint64_t{1} << uncertain.size();
  for (std::uint64_t mask = 0; mask < realizations; ++mask) {
    double prob = 1.0;
    for (std::uint32_t e = 0; e < g.num_edges(); ++e) live[e] = g.edge(e).weight >= 1.0;
    for (std::size_t k = 0; k < uncertain.size(); ++k) {
      const double p = g.edge(uncertain[k]).weight;
      const bool on = (mask >> k) & 1U;
      live[uncertain[k]] = on;
      prob *= on ? p : 1.0 - p;
    }
    std::fill(active.begin(), active.end(), 0);
    frontier.clear();
    for (Vertex v = 0; v < g.num_vertices(); ++v) {
      if (seeds[v]) {
        active[v] = 1;
        frontier.push_back(v);
      }
    }
    for (std::size_t head = 0; head < frontier.size(); ++head) {
      for (const Arc& a : g.out_arcs(frontier[head])) {
        if (live[a.edge] && !active[a.to]) {
          active[a.to] = 1;
          frontier.push_back(a.to);
        }
      }
    }
    expectation += prob * static_cast<double>(frontier.size());
  }
  return expectation;
}

Graph weighted_cascade(const Graph& g) {
  std::vector<double> w(g.num_edges());
  for (std::uint32_t e = 0; e < g.num_edges(); ++e) {
    const Vertex target = g.edge(e).dst;
    const std::size_t indeg = g.directed() ? g.in_degree(target) : g.degree(target);
    w[e] = 1.0 / static_cast<double>(indeg);
  }
  return g.with_weights(w);
}

double objective(const ProblemSpec& problem, const Graph& g, std::span<const Vertex> x) {
  switch (problem.kind) {
    case Problem::MVC: return mvc_coverage(g, x);
    case Problem::BMC: return static_cast<double>(bmc_cut_value(g, x));
    case Problem::IM: return ic_spread_estimate(g, x, problem.n_sim, problem.seed, problem.jobs);
  }
  throw InternalError("unknown problem kind");
}

}  // namespace lense
