#include <cmath>

#include "doctest.h"
#include "lense/errors.hpp"
#include "lense/heuristics.hpp"
#include "support.hpp"

using namespace lense;
using lense::test::make_graph;

TEST_SUITE("heuristics") {
  TEST_CASE("greedy coverage examples") {
    const Solution star = greedy_mvc(lense::test::star_graph(4), 1);
    CHECK(star.picks == std::vector<Vertex>{0});
    CHECK(star.score == 1.0);
    const Solution path = greedy_mvc(lense::test::path_graph(4), 1);
    CHECK(path.picks == std::vector<Vertex>{1});
    CHECK(path.score == doctest::Approx(2.0 / 3.0));
    const Graph pet = lense::test::petersen();
    CHECK(greedy_mvc(pet, 10).score == 1.0);
    CHECK_THROWS_AS(greedy_mvc(pet, 11), BudgetError);
  }

  TEST_CASE("greedy cut examples") {
    const Solution k33 = greedy_bmc(lense::test::complete_bipartite(3, 3), 3);
    CHECK(k33.score == 9.0);
    CHECK((k33.set() == VertexSet{0, 1, 2} || k33.set() == VertexSet{3, 4, 5}));
    CHECK(greedy_bmc(make_graph(2, {{0, 1}}), 1).score == 1.0);
    const Solution tri = greedy_bmc(lense::test::triangle(), 1);
    CHECK(tri.picks == std::vector<Vertex>{0});
    CHECK(tri.score == 2.0);
    // forced to spend the whole budget even when the cut shrinks
    CHECK(greedy_bmc(lense::test::triangle(), 3).score == 0.0);
  }

  TEST_CASE("reverse reachable greedy") {
    const Graph chain = make_graph(3, {{0, 1}, {1, 2}}, true, {1.0, 1.0});
    CHECK(ris_im(chain, 1, 500, 3).picks == std::vector<Vertex>{0});

    const Graph stars = make_graph(8, {{0, 1}, {0, 2}, {0, 3}, {4, 5}, {4, 6}, {4, 7}}, true,
                                   {1, 1, 1, 1, 1, 1});
    CHECK(ris_im(stars, 2, 2000, 5).set() == VertexSet{0, 4});

    // isolated roots: the modal root wins
    const Graph edgeless = make_graph(3, {{0, 1}}, true, {0.0});
    const Solution s = ris_im(edgeless, 1, 1000, 2);
    CHECK(s.picks.size() == 1);
    CHECK(s.score > 0.0);

    Rng rng = make_rng(12);
    const Graph g = weighted_cascade(lense::test::random_graph(25, 0.2, rng, true));
    CHECK(ris_im(g, 3, 800, 9, 1).picks == ris_im(g, 3, 800, 9, 4).picks);
  }

  TEST_CASE("a vertex reaching everything is always chosen") {
    for (Seed s = 0; s < 5; ++s) {
      const Graph g = make_graph(6, {{2, 0}, {2, 1}, {0, 3}, {1, 4}, {4, 5}}, true, {1, 1, 1, 1, 1});
      const VertexSet picks = ris_im(g, 2, 500, s).set();
      CHECK(std::binary_search(picks.begin(), picks.end(), Vertex{2}));
    }
  }

  TEST_CASE("brute force examples") {
    const Solution p = brute_force(Problem::MVC, lense::test::path_graph(3), 1);
    CHECK(p.picks == std::vector<Vertex>{1});
    CHECK(p.score == 1.0);
    const Solution t = brute_force(Problem::BMC, lense::test::triangle(), 1);
    CHECK(t.picks == std::vector<Vertex>{0});
    CHECK(t.score == 2.0);
    const Graph chain = make_graph(3, {{0, 1}, {1, 2}}, true, {0.5, 0.5});
    const Solution c = brute_force(Problem::IM, chain, 1);
    CHECK(c.picks == std::vector<Vertex>{0});
    CHECK(c.score == doctest::Approx(1.75));
    CHECK_THROWS_AS(brute_force(Problem::MVC, barabasi_albert(100, 2, 1), 6), SizeError);
  }

  TEST_CASE("greedy coverage keeps the 1-1/e guarantee") {
    Rng rng = make_rng(31);
    const double bound = 1.0 - std::exp(-1.0);
    int violations = 0;
    for (int trial = 0; trial < 60; ++trial) {
      const auto n = 4 + uniform_index(rng, 9);
      const Graph g = lense::test::random_graph(n, 0.15 + 0.5 * uniform01(rng), rng);
      const std::size_t b = 1 + uniform_index(rng, 3);
      if (greedy_mvc(g, b).score < bound * brute_force(Problem::MVC, g, b).score - 1e-12) ++violations;
    }
    CHECK(violations == 0);
  }

  TEST_CASE("solvers return exactly b vertices deterministically") {
    Rng rng = make_rng(44);
    const Graph g = lense::test::random_graph(30, 0.1, rng);
    const Graph wc = weighted_cascade(lense::test::random_graph(30, 0.1, rng, true));
    for (std::size_t b : {1, 5, 12}) {
      CHECK(greedy_mvc(g, b).picks.size() == b);
      CHECK(greedy_bmc(g, b).picks.size() == b);
      CHECK(ris_im(wc, b, 300, 1).picks.size() == b);
      CHECK(probabilistic_greedy_mvc(g, b, 3).picks.size() == b);
      CHECK(softmax_greedy_bmc(g, b, 3).picks.size() == b);
      CHECK(stochastic_solve(Problem::IM, wc, b, 3, SolverOptions{200, 0, 1}).picks.size() == b);
      CHECK(greedy_mvc(g, b).picks == greedy_mvc(g, b).picks);
      CHECK(greedy_bmc(g, b).picks == greedy_bmc(g, b).picks);
      CHECK(softmax_greedy_bmc(g, b, 3).picks == softmax_greedy_bmc(g, b, 3).picks);
    }
  }

  TEST_CASE("stochastic coverage greedy varies with the seed") {
    const Graph g = barabasi_albert(200, 2, 3);
    bool differs = false;
    const auto first = probabilistic_greedy_mvc(g, 10, 0).picks;
    for (Seed s = 1; s < 10 && !differs; ++s) differs = probabilistic_greedy_mvc(g, 10, s).picks != first;
    CHECK(differs);
  }

  TEST_CASE("ratio") {
    CHECK(solution_ratio(0.5, 0.5) == 1.0);
    CHECK(solution_ratio(1.094, 1.0) == doctest::Approx(1.094));
    CHECK(solution_ratio(0.968 * 3.0, 3.0) == doctest::Approx(0.968));
    CHECK_THROWS_AS(solution_ratio(1.0, 0.0), DomainError);
  }

  TEST_CASE("solution json uses original ids") {
    const Graph g = parse_edge_list("10 20\n20 30\n", false, false);
    const auto j = solution_to_json(greedy_mvc(g, 1), g);
    CHECK(j.at("vertices") == nlohmann::json::array({20}));
    CHECK(j.at("budget") == 1);
    CHECK(j.at("problem") == "mvc");
  }
}
