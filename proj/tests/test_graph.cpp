#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>

#include "doctest.h"
#include "lense/errors.hpp"
#include "lense/features.hpp"
#include "lense/graph.hpp"
#include "support.hpp"

using namespace lense;
using lense::test::make_graph;

TEST_SUITE("graph") {
  TEST_CASE("parse a minimal path") {
    const Graph g = parse_edge_list("0 1\n1 2", false, false);
    CHECK(g.num_vertices() == 3);
    CHECK(g.num_edges() == 2);
    CHECK(g.edge(0).weight == 1.0);
  }

  TEST_CASE("comments and duplicate edges collapse") {
    CHECK(parse_edge_list("# c\n0 1\n0 1", false, false).num_edges() == 1);
    // reversed duplicate coincides in an undirected graph but not a directed one
    CHECK(parse_edge_list("0 1\n1 0", false, false).num_edges() == 1);
    CHECK(parse_edge_list("0 1\n1 0", true, false).num_edges() == 2);
  }

  TEST_CASE("dedup keeps the first weight") {
    const Graph g = parse_edge_list("5 7 0.25\n5 7 0.75\n", true, true);
    REQUIRE(g.num_edges() == 1);
    CHECK(g.edge(0).weight == 0.25);
  }

  TEST_CASE("weighted directed arc") {
    const Graph g = parse_edge_list("0 1 0.5", true, true);
    REQUIRE(g.num_edges() == 1);
    CHECK(g.edge(0).src == 0);
    CHECK(g.edge(0).dst == 1);
    CHECK(g.edge(0).weight == 0.5);
    REQUIRE(g.in_arcs(1).size() == 1);
    CHECK(g.in_arcs(1)[0].to == 0);
    CHECK(g.in_arcs(0).empty());
  }

  TEST_CASE("original ids are kept and remapped densely") {
    const Graph g = parse_edge_list("100 7\n7 42\n", false, false);
    CHECK(g.num_vertices() == 3);
    CHECK(g.original_id(0) == 7);
    CHECK(g.original_id(1) == 42);
    CHECK(g.original_id(2) == 100);
    CHECK(g.find(42).value() == 1);
    CHECK_FALSE(g.find(8).has_value());
  }

  TEST_CASE("self loops are dropped") {
    const Graph g = parse_edge_list("0 0\n0 1\n", false, false);
    CHECK(g.num_edges() == 1);
    CHECK(g.num_vertices() == 2);
  }

  TEST_CASE("malformed lines report their line number") {
    try {
      parse_edge_list("# header\n0 1\n2\n", false, false);
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.line() == 3);
      CHECK(e.kind() == ErrorKind::Parse);
    }
    try {
      parse_edge_list("0 1\n1 x\n", false, false);
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.line() == 2);
    }
    CHECK_THROWS_AS(parse_edge_list("0 1 2 3\n", false, false), ParseError);
    CHECK_THROWS_AS(parse_edge_list("0 1 abc\n", false, true), ParseError);
  }

  TEST_CASE("negative weights are rejected") {
    CHECK_THROWS_AS(parse_edge_list("0 1 -0.5\n", true, true), ValidationError);
    CHECK_THROWS_AS(make_graph(2, {{0, 1}}, true, {-1.0}), ValidationError);
  }

  TEST_CASE("neighbor queries") {
    const Graph p = lense::test::path_graph(3);
    CHECK(std::vector<Vertex>(p.neighbors(1).begin(), p.neighbors(1).end()) == std::vector<Vertex>{0, 2});
    const Graph d = make_graph(3, {{0, 1}, {2, 0}}, true);
    CHECK(std::vector<Vertex>(d.neighbors(0).begin(), d.neighbors(0).end()) == std::vector<Vertex>{1, 2});
    CHECK(d.out_arcs(0).size() == 1);
    CHECK(d.in_arcs(0).size() == 1);
    CHECK_THROWS_AS(p.neighbors(3), LookupError);
  }

  TEST_CASE("degree sums") {
    Rng rng = make_rng(11);
    for (int trial = 0; trial < 20; ++trial) {
      const Graph u = lense::test::random_graph(15, 0.3, rng);
      std::size_t sum = 0;
      for (Vertex v = 0; v < u.num_vertices(); ++v) sum += u.degree(v);
      CHECK(sum == 2 * u.num_edges());
      const Graph d = lense::test::random_graph(15, 0.2, rng, true);
      std::size_t outs = 0, ins = 0;
      for (Vertex v = 0; v < d.num_vertices(); ++v) {
        outs += d.out_arcs(v).size();
        ins += d.in_arcs(v).size();
      }
      CHECK(outs == d.num_edges());
      CHECK(ins == d.num_edges());
    }
  }

  TEST_CASE("load from file and write back") {
    const auto dir = std::filesystem::temp_directory_path() / "lense_graph_test";
    std::filesystem::create_directories(dir);
    {
      std::ofstream(dir / "g.txt") << "# comment\n3 4 0.5\n4 9 0.25\n";
    }
    const Graph g = load_edge_list(dir / "g.txt", true, true);
    write_edge_list(g, dir / "out.txt");
    const Graph h = load_edge_list(dir / "out.txt", true, true);
    REQUIRE(h.num_edges() == 2);
    for (std::uint32_t e = 0; e < 2; ++e) {
      CHECK(h.original_id(h.edge(e).src) == g.original_id(g.edge(e).src));
      CHECK(h.edge(e).weight == g.edge(e).weight);
    }
    CHECK_THROWS_AS(load_edge_list(dir / "missing.txt", false, false), MissingArtifactError);
    std::filesystem::remove_all(dir);
  }

  TEST_CASE("split is a deterministic partition") {
    Rng rng = make_rng(3);
    const Graph g = lense::test::random_graph(40, 0.15, rng);
    const auto [a, b] = split_edges(g, 0.3, 17);
    CHECK(a.num_edges() + b.num_edges() == g.num_edges());

    std::set<std::pair<OriginalId, OriginalId>> all, seen;
    for (const Edge& e : g.edges()) all.emplace(g.original_id(e.src), g.original_id(e.dst));
    for (const Graph* side : {&a, &b}) {
      std::set<OriginalId> endpoints;
      for (const Edge& e : side->edges()) {
        const auto key = std::make_pair(side->original_id(e.src), side->original_id(e.dst));
        CHECK(all.count(key) == 1);
        CHECK(seen.insert(key).second);
        endpoints.insert(key.first);
        endpoints.insert(key.second);
      }
      // vertex set is exactly the endpoints
      CHECK(endpoints.size() == side->num_vertices());
    }
    CHECK(seen == all);

    const auto [a2, b2] = split_edges(g, 0.3, 17);
    REQUIRE(a2.num_edges() == a.num_edges());
    for (std::uint32_t e = 0; e < a.num_edges(); ++e) {
      CHECK(a2.original_id(a2.edge(e).src) == a.original_id(a.edge(e).src));
      CHECK(a2.original_id(a2.edge(e).dst) == a.original_id(a.edge(e).dst));
    }
  }

  TEST_CASE("split size follows the binomial law") {
    std::vector<std::pair<Vertex, Vertex>> e;
    for (Vertex i = 0; i < 10000; ++i) e.emplace_back(i, i + 1);
    const Graph g = make_graph(10001, e);
    const double sigma = std::sqrt(10000 * 0.3 * 0.7);
    for (Seed s : {1, 2, 3}) {
      const auto [train, test] = split_edges(g, 0.3, s);
      CHECK(std::abs(static_cast<double>(train.num_edges()) - 3000.0) < 3 * sigma);
    }
  }

  TEST_CASE("split of a single edge leaves one side empty") {
    const Graph g = make_graph(2, {{0, 1}});
    CHECK_THROWS_AS(split_edges(g, 0.5, 1), SplitError);
  }

  TEST_CASE("eigenvector centrality closed forms") {
    const auto tri = eigenvector_centrality(lense::test::triangle());
    CHECK(tri.converged);
    for (double s : tri.scores) CHECK(s == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-9));

    const auto star = eigenvector_centrality(lense::test::star_graph(3));
    CHECK(star.scores[0] / star.scores[1] == doctest::Approx(std::sqrt(3.0)).epsilon(1e-6));

    const auto path = eigenvector_centrality(lense::test::path_graph(3));
    CHECK(path.scores[1] / path.scores[0] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-6));
  }

  TEST_CASE("eigenvector centrality has unit norm and ignores labels") {
    Rng rng = make_rng(5);
    const Graph g = lense::test::random_graph(12, 0.4, rng);
    const auto base = eigenvector_centrality(g);
    double norm = 0.0;
    for (double s : base.scores) {
      CHECK(s >= 0.0);
      norm += s * s;
    }
    CHECK(norm == doctest::Approx(1.0).epsilon(1e-9));

    std::vector<Vertex> perm(g.num_vertices());
    for (Vertex v = 0; v < perm.size(); ++v) perm[v] = v;
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<std::pair<Vertex, Vertex>> e;
    for (const Edge& x : g.edges()) e.emplace_back(perm[x.src], perm[x.dst]);
    const auto relabeled = eigenvector_centrality(make_graph(g.num_vertices(), e));
    for (Vertex v = 0; v < perm.size(); ++v) {
      CHECK(relabeled.scores[perm[v]] == doctest::Approx(base.scores[v]).epsilon(1e-6));
    }
  }

  TEST_CASE("features on small graphs") {
    const FeatureTable star = compute_features(lense::test::star_graph(3), Problem::MVC);
    CHECK(star.cols() == 2);
    CHECK(star.values(0, 0) == 1.0);
    CHECK(star.values(1, 0) == 0.0);

    const Graph im = make_graph(3, {{0, 1}, {0, 2}}, true, {0.5, 0.5});
    const FeatureTable t = compute_features(im, Problem::IM);
    CHECK(t.cols() == 3);
    CHECK(t.values(0, 2) == 1.0);
    CHECK(t.values(1, 2) == 0.0);
    CHECK(t.values(2, 2) == 0.0);

    const FeatureTable tri = compute_features(lense::test::triangle(), Problem::BMC);
    for (Vertex v = 0; v < 3; ++v) CHECK(tri.values(v, 0) == 0.0);
  }

  TEST_CASE("features stay in the unit interval on the fitted graph") {
    Rng rng = make_rng(8);
    for (int trial = 0; trial < 10; ++trial) {
      const Graph g = lense::test::random_graph(25, 0.2, rng, trial % 2 == 1);
      const Problem p = trial % 2 == 1 ? Problem::IM : Problem::MVC;
      const FeatureTable f = compute_features(g, p);
      CHECK(f.cols() == feature_count(p));
      CHECK(f.values.allFinite());
      CHECK(f.values.minCoeff() >= 0.0);
      CHECK(f.values.maxCoeff() <= 1.0);
    }
  }

  TEST_CASE("features reuse foreign stats without clipping") {
    const FeatureTable fit = compute_features(lense::test::path_graph(4), Problem::MVC);
    const FeatureTable star = compute_features(lense::test::star_graph(5), Problem::MVC, fit.stats);
    // path degrees span [1,2]; a degree-5 center scales to 4
    CHECK(star.values(0, 0) == doctest::Approx(4.0));
  }

  TEST_CASE("induced and edge subgraphs keep original ids") {
    const Graph g = lense::test::path_graph(5);
    const std::vector<Vertex> keep{3, 1, 2, 2};
    const Subgraph s = induced_subgraph(g, keep);
    CHECK(s.host == std::vector<Vertex>{1, 2, 3});
    CHECK(s.graph.num_edges() == 2);
    CHECK(s.local(2).value() == 1);
    CHECK_FALSE(s.local(0).has_value());
    const std::vector<std::uint32_t> edges{0, 3};
    const Subgraph es = edge_subgraph(g, edges);
    CHECK(es.host == std::vector<Vertex>{0, 1, 3, 4});
    CHECK(es.graph.original_id(3) == 4);
  }

  TEST_CASE("preferential attachment graph") {
    const Graph g = barabasi_albert(200, 3, 9);
    CHECK(g.num_vertices() == 200);
    // star seed (3 edges) plus m edges per later vertex
    CHECK(g.num_edges() == 3 + (200 - 4) * 3);
    const Graph h = barabasi_albert(200, 3, 9);
    CHECK(h.num_edges() == g.num_edges());
    for (std::uint32_t e = 0; e < g.num_edges(); ++e) CHECK(h.edge(e).src == g.edge(e).src);
  }
}
