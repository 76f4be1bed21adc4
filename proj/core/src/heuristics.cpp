#include "lense/heuristics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lense/errors.hpp"
#include "lense/parallel.hpp"

namespace lense {

namespace {

void check_budget(const Graph& g, std::size_t b) {
  if (b > g.num_vertices()) {
    throw BudgetError("budget " + std::to_string(b) + " exceeds vertex count " + std::to_string(g.num_vertices()));
  }
}

// Incident edges of v regardless of direction.
template <class Fn>
void for_each_incident(const Graph& g, Vertex v, Fn&& fn) {
  for (const Arc& a : g.out_arcs(v)) fn(a);
  if (g.directed()) {
    for (const Arc& a : g.in_arcs(v)) fn(a);
  }
}

// Marginal gains for coverage (mode MVC) or cut (mode BMC), updated as
// vertices are picked. `choose` sees the current gains and pick flags.
enum class GainMode { Coverage, Cut };

template <class Choose>
std::vector<Vertex> gain_greedy(const Graph& g, std::size_t b, GainMode mode, Choose&& choose) {
  check_budget(g, b);
  const std::size_t n = g.num_vertices();
  std::vector<long long> gain(n, 0);
  for (Vertex v = 0; v < n; ++v) {
    for_each_incident(g, v, [&](const Arc&) { ++gain[v]; });
  }
  std::vector<char> picked(n, 0);
  std::vector<char> covered(g.num_edges(), 0);
  std::vector<Vertex> picks;
  picks.reserve(b);
  for (std::size_t round = 0; round < b; ++round) {
    const Vertex w = choose(gain, picked);
    picked[w] = 1;
    picks.push_back(w);
    for_each_incident(g, w, [&](const Arc& a) {
      if (mode == GainMode::Coverage) {
        if (!covered[a.edge]) {
          covered[a.edge] = 1;
          --gain[a.to];
        }
      } else if (!picked[a.to]) {
        gain[a.to] -= 2;
      }
    });
  }
  return picks;
}

Vertex argmax_gain(const std::vector<long long>& gain, const std::vector<char>& picked) {
  Vertex best = 0;
  bool found = false;
  for (Vertex v = 0; v < gain.size(); ++v) {
    if (picked[v]) continue;
    if (!found || gain[v] > gain[best]) {
      best = v;
      found = true;
    }
  }
  return best;
}

std::vector<Vertex> top_candidates(const std::vector<long long>& gain, const std::vector<char>& picked,
                                   std::size_t k) {
  std::vector<Vertex> order;
  for (Vertex v = 0; v < gain.size(); ++v) {
    if (!picked[v]) order.push_back(v);
  }
  const std::size_t keep = std::min(k, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep), order.end(),
                    [&](Vertex a, Vertex c) { return gain[a] != gain[c] ? gain[a] > gain[c] : a < c; });
  order.resize(keep);
  return order;
}

std::uint64_t binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  long double r = 1.0L;
  for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<long double>(n - k + i) / static_cast<long double>(i);
  return static_cast<std::uint64_t>(std::llround(r));
}

}  // namespace

Solution greedy_mvc(const Graph& g, std::size_t b) {
  Solution s;
  s.problem = Problem::MVC;
  s.solver = "greedy_mvc";
  s.picks = gain_greedy(g, b, GainMode::Coverage, argmax_gain);
  s.score = g.num_edges() ? mvc_coverage(g, s.picks) : 0.0;
  return s;
}

Solution greedy_bmc(const Graph& g, std::size_t b) {
  Solution s;
  s.problem = Problem::BMC;
  s.solver = "greedy_bmc";
  s.picks = gain_greedy(g, b, GainMode::Cut, argmax_gain);
  s.score = static_cast<double>(bmc_cut_value(g, s.picks));
  return s;
}

Solution probabilistic_greedy_mvc(const Graph& g, std::size_t b, Seed seed) {
  Rng rng = make_rng(seed, 0x3c);
  Solution s;
  s.problem = Problem::MVC;
  s.solver = "probabilistic_greedy_mvc";
  s.seed = seed;
  s.picks = gain_greedy(g, b, GainMode::Coverage, [&](const auto& gain, const auto& picked) {
    const auto top = top_candidates(gain, picked, 3);
    return top[uniform_index(rng, top.size())];
  });
  s.score = g.num_edges() ? mvc_coverage(g, s.picks) : 0.0;
  return s;
}

Solution softmax_greedy_bmc(const Graph& g, std::size_t b, Seed seed) {
  Rng rng = make_rng(seed, 0x5f);
  Solution s;
  s.problem = Problem::BMC;
  s.solver = "softmax_greedy_bmc";
  s.seed = seed;
  std::vector<double> weight;
  s.picks = gain_greedy(g, b, GainMode::Cut, [&](const auto& gain, const auto& picked) {
    const Vertex best = argmax_gain(gain, picked);
    weight.assign(gain.size(), 0.0);
    double total = 0.0;
    for (Vertex v = 0; v < gain.size(); ++v) {
      if (picked[v]) continue;
      weight[v] = std::exp(static_cast<double>(gain[v] - gain[best]));
      total += weight[v];
    }
    double r = uniform01(rng) * total;
    for (Vertex v = 0; v < gain.size(); ++v) {
      if (picked[v]) continue;
      r -= weight[v];
      if (r < 0.0) return v;
    }
    return best;
  });
  s.score = static_cast<double>(bmc_cut_value(g, s.picks));
  return s;
}

Solution ris_im(const Graph& g, std::size_t b, std::size_t n_rr, Seed seed, std::size_t jobs) {
  check_budget(g, b);
  if (n_rr == 0) throw ValidationError("n_rr must be at least 1");
  validate_probabilities(g);
  const std::size_t n = g.num_vertices();

  // Reverse BFS from a uniform root over live edges; edge coins are fixed per
  // (set index, edge), matching ic_spread_estimate's realizations.
  std::vector<std::vector<Vertex>> rr(n_rr);
  const std::size_t workers = std::max<std::size_t>(1, std::min(jobs, n_rr));
  const std::size_t block = (n_rr + workers - 1) / workers;
  parallel_for(workers, workers, [&](std::size_t w) {
    std::vector<char> seen(n, 0);
    for (std::size_t i = w * block; i < std::min(n_rr, (w + 1) * block); ++i) {
      const std::uint64_t stream = derive_seed(seed, i);
      Rng rng(stream);
      const auto root = static_cast<Vertex>(uniform_index(rng, n));
      auto& set = rr[i];
      set.push_back(root);
      seen[root] = 1;
      for (std::size_t head = 0; head < set.size(); ++head) {
        for (const Arc& a : g.in_arcs(set[head])) {
          if (seen[a.to]) continue;
          if (edge_live(stream, a.edge, g.edge(a.edge).weight)) {
            seen[a.to] = 1;
            set.push_back(a.to);
          }
        }
      }
      for (Vertex v : set) seen[v] = 0;
    }
  });

  std::vector<std::vector<std::uint32_t>> member_of(n);
  for (std::uint32_t i = 0; i < n_rr; ++i) {
    for (Vertex v : rr[i]) member_of[v].push_back(i);
  }
  std::vector<long long> count(n);
  for (Vertex v = 0; v < n; ++v) count[v] = static_cast<long long>(member_of[v].size());
  std::vector<char> picked(n, 0), covered(n_rr, 0);
  std::size_t covered_total = 0;

  Solution s;
  s.problem = Problem::IM;
  s.solver = "ris_im";
  s.seed = seed;
  for (std::size_t round = 0; round < b; ++round) {
    const Vertex w = argmax_gain(count, picked);
    picked[w] = 1;
    s.picks.push_back(w);
    for (std::uint32_t i : member_of[w]) {
      if (covered[i]) continue;
      covered[i] = 1;
      ++covered_total;
      for (Vertex v : rr[i]) --count[v];
    }
  }
  s.score = static_cast<double>(covered_total) / static_cast<double>(n_rr) * static_cast<double>(n);
  return s;
}

Solution brute_force(Problem problem, const Graph& g, std::size_t b) {
  check_budget(g, b);
  const std::size_t n = g.num_vertices();
  if (binomial(n, b) > 1'000'000) throw SizeError("brute force limited to 1e6 subsets");
  if (problem == Problem::IM && g.num_edges() > 20) throw SizeError("brute force IM needs |E| <= 20");

  auto score = [&](std::span<const Vertex> x) -> double {
    switch (problem) {
      case Problem::MVC: return mvc_coverage(g, x);
      case Problem::BMC: return static_cast<double>(bmc_cut_value(g, x));
      case Problem::IM: return ic_spread_exact(g, x);
    }
    return 0.0;
  };

  std::vector<Vertex> comb(b);
  std::iota(comb.begin(), comb.end(), Vertex{0});
  Solution best;
  best.problem = problem;
  best.solver = "brute_force";
  best.picks = comb;
  best.score = score(comb);
  while (true) {
    // next combination in lexicographic order
    std::size_t i = b;
    while (i > 0 && comb[i - 1] == n - b + i - 1) --i;
    if (i == 0) break;
    ++comb[i - 1];
    for (std::size_t j = i; j < b; ++j) comb[j] = comb[j - 1] + 1;
    const double value = score(comb);
    if (value > best.score + 1e-12 * std::max(1.0, std::abs(best.score))) {
      best.score = value;
      best.picks = comb;
    }
  }
  return best;
}

double solution_ratio(double sub_score, double full_score) {
  if (!(full_score > 0.0)) throw DomainError("ratio needs a positive full-graph score");
  return sub_score / full_score;
}

Solution solve(Problem problem, const Graph& g, std::size_t b, const SolverOptions& opts) {
  switch (problem) {
    case Problem::MVC: return greedy_mvc(g, b);
    case Problem::BMC: return greedy_bmc(g, b);
    case Problem::IM: return ris_im(g, b, opts.n_rr, opts.seed, opts.jobs);
  }
  throw InternalError("unknown problem kind");
}

Solution stochastic_solve(Problem problem, const Graph& g, std::size_t b, Seed seed, const SolverOptions& opts) {
  switch (problem) {
    case Problem::MVC: return probabilistic_greedy_mvc(g, b, seed);
    case Problem::BMC: return softmax_greedy_bmc(g, b, seed);
    case Problem::IM: return ris_im(g, b, opts.n_rr, seed, opts.jobs);
  }
  throw InternalError("unknown problem kind");
}

nlohmann::ordered_json solution_to_json(const Solution& s, const Graph& g) {
  nlohmann::ordered_json j;
  j["problem"] = std::string(to_string(s.problem));
  j["budget"] = s.budget();
  auto& ids = j["vertices"] = nlohmann::ordered_json::array();
  for (Vertex v : s.picks) ids.push_back(g.original_id(v));
  j["score"] = s.score;
  j["solver"] = s.solver;
  j["seed"] = s.seed;
  return j;
}

}  // namespace lense
