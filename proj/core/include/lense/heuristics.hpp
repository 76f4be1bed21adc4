#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lense/graph.hpp"
#include "lense/problems.hpp"

namespace lense {

/// A budget-b solution. `picks` keeps the order in which a constructive solver
/// added the vertices (the pruning baseline needs prefixes of it).
struct Solution {
  Problem problem = Problem::MVC;
  std::vector<Vertex> picks;
  double score = 0.0;
  std::string solver;
  Seed seed = 0;

  std::size_t budget() const noexcept { return picks.size(); }
  VertexSet set() const { return make_vertex_set(picks); }
};

/// Greedy max coverage: each round adds the vertex covering the most uncovered
/// edges, ties to the lowest id. Throws BudgetError when b > |V|.
Solution greedy_mvc(const Graph& g, std::size_t b);

/// Greedy budgeted max cut. Always spends the full budget, even when the best
/// marginal change is negative.
Solution greedy_bmc(const Graph& g, std::size_t b);

/// Reverse-reachable-set greedy for influence maximization with a fixed
/// number of RR sets. Score is the covered fraction times |V|.
Solution ris_im(const Graph& g, std::size_t b, std::size_t n_rr, Seed seed, std::size_t jobs = 1);

/// Greedy MVC that picks uniformly among the three best marginal gains.
Solution probabilistic_greedy_mvc(const Graph& g, std::size_t b, Seed seed);

/// Greedy BMC sampling each pick with probability proportional to
/// exp(marginal gain).
Solution softmax_greedy_bmc(const Graph& g, std::size_t b, Seed seed);

/// Exact argmax over all size-b subsets, lexicographically smallest on ties.
/// IM scores use ic_spread_exact. Throws SizeError beyond C(|V|,b) = 1e6.
Solution brute_force(Problem problem, const Graph& g, std::size_t b);

/// Eq.-style quality ratio sub / full; may exceed 1. Throws DomainError for
/// full_score <= 0.
double solution_ratio(double sub_score, double full_score);

struct SolverOptions {
  std::size_t n_rr = 10000;
  Seed seed = 0;
  std::size_t jobs = 1;
};

/// Reference solver H for a problem: greedy_mvc, greedy_bmc or ris_im.
Solution solve(Problem problem, const Graph& g, std::size_t b, const SolverOptions& opts = {});

/// Stochastic counterpart used to fit the rank-interpolation baseline.
Solution stochastic_solve(Problem problem, const Graph& g, std::size_t b, Seed seed, const SolverOptions& opts = {});

/// {problem, budget, vertices (original ids), score, solver, seed}
nlohmann::ordered_json solution_to_json(const Solution& s, const Graph& g);

}  // namespace lense
