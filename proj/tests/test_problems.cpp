#include <cmath>

#include "doctest.h"
#include "lense/errors.hpp"
#include "lense/problems.hpp"
#include "support.hpp"

using namespace lense;
using lense::test::make_graph;

namespace {

std::vector<Vertex> all_vertices(const Graph& g) {
  std::vector<Vertex> v(g.num_vertices());
  for (Vertex i = 0; i < v.size(); ++i) v[i] = i;
  return v;
}

}  // namespace

TEST_SUITE("problems") {
  TEST_CASE("coverage examples") {
    const Graph p = lense::test::path_graph(3);
    CHECK(mvc_coverage(p, std::vector<Vertex>{1}) == 1.0);
    CHECK(mvc_coverage(p, std::vector<Vertex>{0}) == 0.5);
    const Graph pet = lense::test::petersen();
    REQUIRE(pet.num_edges() == 15);
    for (Vertex v = 0; v < 10; ++v) CHECK(mvc_coverage(pet, std::vector<Vertex>{v}) == doctest::Approx(0.2));
    const Graph empty = make_graph(2, {});
    CHECK_THROWS_AS(mvc_coverage(empty, std::vector<Vertex>{0}), DomainError);
  }

  TEST_CASE("coverage of every vertex is one") {
    Rng rng = make_rng(1);
    for (int i = 0; i < 10; ++i) {
      const Graph g = lense::test::random_graph(10, 0.3, rng, i % 2 == 0);
      CHECK(mvc_coverage(g, all_vertices(g)) == 1.0);
    }
  }

  TEST_CASE("cut examples") {
    const Graph tri = lense::test::triangle();
    CHECK(bmc_cut_value(tri, std::vector<Vertex>{}) == 0);
    CHECK(bmc_cut_value(tri, all_vertices(tri)) == 0);
    CHECK(bmc_cut_value(tri, std::vector<Vertex>{0}) == 2);
    CHECK(bmc_cut_value(lense::test::complete_bipartite(3, 3), std::vector<Vertex>{0, 1, 2}) == 9);
    // direction is ignored
    const Graph d = make_graph(3, {{1, 0}, {0, 2}}, true);
    CHECK(bmc_cut_value(d, std::vector<Vertex>{0}) == 2);
  }

  TEST_CASE("exact spread examples") {
    const Graph chain = make_graph(3, {{0, 1}, {1, 2}}, true, {0.5, 0.5});
    CHECK(ic_spread_exact(chain, std::vector<Vertex>{0}) == doctest::Approx(1.75).epsilon(1e-12));
    const Graph zero = make_graph(4, {{0, 1}, {1, 2}, {2, 3}}, true, {0.0, 0.0, 0.0});
    CHECK(ic_spread_exact(zero, std::vector<Vertex>{0, 2}) == 2.0);
    const Graph diamond = make_graph(4, {{0, 1}, {0, 2}, {1, 3}, {2, 3}}, true, {1, 1, 1, 1});
    CHECK(ic_spread_exact(diamond, std::vector<Vertex>{0}) == 4.0);

    std::vector<std::pair<Vertex, Vertex>> e;
    std::vector<double> w;
    for (Vertex i = 0; i < 21; ++i) {
      e.emplace_back(i, i + 1);
      w.push_back(0.5);
    }
    CHECK_THROWS_AS(ic_spread_exact(make_graph(22, e, true, w), std::vector<Vertex>{0}), SizeError);
  }

  TEST_CASE("monte carlo spread examples") {
    const Graph edgeless = make_graph(4, {{0, 1}}, true, {0.0});
    CHECK(ic_spread_estimate(edgeless, std::vector<Vertex>{2, 3}, 100, 1) == 2.0);
    const Graph arc = make_graph(2, {{0, 1}}, true, {1.0});
    CHECK(ic_spread_estimate(arc, std::vector<Vertex>{0}, 100, 1) == 2.0);
    const Graph fork = make_graph(3, {{0, 1}, {0, 2}}, true, {0.5, 0.5});
    CHECK(std::abs(ic_spread_estimate(fork, std::vector<Vertex>{0}, 10000, 4) - 2.0) < 0.03);
    const Graph bad = make_graph(2, {{0, 1}}, true, {1.5});
    CHECK_THROWS_AS(ic_spread_estimate(bad, std::vector<Vertex>{0}, 10, 1), ValidationError);
  }

  TEST_CASE("estimate agrees with enumeration within four sigma") {
    Rng rng = make_rng(21);
    for (int f = 0; f < 6; ++f) {
      std::vector<std::pair<Vertex, Vertex>> e;
      std::vector<double> w;
      const Vertex n = 6 + static_cast<Vertex>(f % 3);
      for (Vertex u = 0; u < n && e.size() < 14; ++u) {
        for (Vertex v = 0; v < n && e.size() < 14; ++v) {
          if (u != v && uniform01(rng) < 0.35) {
            e.emplace_back(u, v);
            w.push_back(0.1 + 0.8 * uniform01(rng));
          }
        }
      }
      if (e.empty()) continue;
      const Graph g = make_graph(n, e, true, w);
      const std::vector<Vertex> x{0};
      const double exact = ic_spread_exact(g, x);
      // spread lies in [1, n]; its variance is at most (n-1)^2 / 4
      const double sigma = (n - 1) / 2.0 / std::sqrt(10000.0);
      CHECK(std::abs(ic_spread_estimate(g, x, 10000, 99) - exact) < 4 * sigma);
    }
  }

  TEST_CASE("spread estimate is independent of thread count") {
    Rng rng = make_rng(2);
    const Graph g = weighted_cascade(lense::test::random_graph(30, 0.15, rng, true));
    const std::vector<Vertex> x{0, 5};
    CHECK(ic_spread_estimate(g, x, 500, 7, 1) == ic_spread_estimate(g, x, 500, 7, 3));
  }

  TEST_CASE("spread is monotone for a fixed seed") {
    Rng rng = make_rng(4);
    const Graph g = weighted_cascade(lense::test::random_graph(20, 0.2, rng, true));
    const std::vector<Vertex> small{3};
    const std::vector<Vertex> large{3, 8, 11};
    CHECK(ic_spread_estimate(g, small, 300, 5) <= ic_spread_estimate(g, large, 300, 5));
    CHECK(mvc_coverage(g, small) <= mvc_coverage(g, large));
  }

  TEST_CASE("objectives ignore vertex labels") {
    Rng rng = make_rng(6);
    const Graph g = lense::test::random_graph(10, 0.3, rng);
    std::vector<Vertex> perm(10);
    for (Vertex v = 0; v < 10; ++v) perm[v] = 9 - v;
    std::vector<std::pair<Vertex, Vertex>> e;
    for (const Edge& x : g.edges()) e.emplace_back(perm[x.src], perm[x.dst]);
    const Graph h = make_graph(10, e);
    const std::vector<Vertex> x{1, 4};
    const std::vector<Vertex> px{perm[1], perm[4]};
    CHECK(mvc_coverage(g, x) == mvc_coverage(h, px));
    CHECK(bmc_cut_value(g, x) == bmc_cut_value(h, px));
  }

  TEST_CASE("weighted cascade uses in-degree") {
    const Graph g = make_graph(3, {{0, 2}, {1, 2}, {0, 1}}, true);
    const Graph wc = weighted_cascade(g);
    CHECK(wc.weighted());
    for (const Edge& e : wc.edges()) CHECK(e.weight == doctest::Approx(1.0 / static_cast<double>(g.in_degree(e.dst))));
    CHECK_NOTHROW(validate_probabilities(wc));
  }

  TEST_CASE("objective dispatch") {
    const Graph tri = lense::test::triangle();
    CHECK(objective(ProblemSpec{Problem::MVC}, tri, std::vector<Vertex>{0}) == doctest::Approx(2.0 / 3.0));
    CHECK(objective(ProblemSpec{Problem::BMC}, tri, std::vector<Vertex>{0}) == 2.0);
    const Graph arc = make_graph(2, {{0, 1}}, true, {1.0});
    CHECK(objective(ProblemSpec{Problem::IM, 50, 1}, arc, std::vector<Vertex>{0}) == 2.0);
  }

  TEST_CASE("vertex sets are sorted and unique") {
    const std::vector<Vertex> raw{4, 1, 4, 2};
    CHECK(make_vertex_set(raw) == VertexSet{1, 2, 4});
  }

  TEST_CASE("problem names") {
    CHECK(parse_problem("mvc") == Problem::MVC);
    CHECK(parse_problem("Bmc") == Problem::BMC);
    CHECK(parse_problem("IM") == Problem::IM);
    CHECK(to_string(Problem::IM) == "im");
    CHECK_THROWS_AS(parse_problem("tsp"), ConfigError);
  }
}
