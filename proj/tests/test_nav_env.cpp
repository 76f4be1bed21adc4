#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "doctest.h"
#include "lense/errors.hpp"
#include "lense/nav_env.hpp"
#include "support.hpp"

using namespace lense;
using lense::test::make_graph;

namespace {

// Embedding from subgraph size; one degree row per vertex.
Observation size_embedding(const Subgraph& s) {
  Observation o;
  o.embedding = nn::Vector(2);
  o.embedding << static_cast<double>(s.graph.num_vertices()) / 10.0, static_cast<double>(s.graph.num_edges()) / 10.0;
  o.vertex_embeddings = nn::Matrix(s.graph.num_vertices(), 1);
  for (Vertex v = 0; v < s.graph.num_vertices(); ++v) o.vertex_embeddings(v, 0) = static_cast<double>(s.graph.degree(v));
  return o;
}

std::set<std::pair<Vertex, Vertex>> host_edges(const Subgraph& s) {
  std::set<std::pair<Vertex, Vertex>> out;
  for (const Edge& e : s.graph.edges()) {
    Vertex a = s.host[e.src], b = s.host[e.dst];
    out.emplace(std::min(a, b), std::max(a, b));
  }
  return out;
}

ActionTuple first_action(const NavState&, const ActionSets& sets, Rng&) { return sets.all.front(); }

// Two-hub layout: v=0, u=1, v's outside neighbors 2,3,4, u's outside neighbors 5,6.
Graph two_hub_graph() { return make_graph(7, {{0, 1}, {0, 2}, {0, 3}, {0, 4}, {1, 5}, {1, 6}}); }

}  // namespace

TEST_SUITE("nav_env") {
  TEST_CASE("induction examples") {
    const Graph p = lense::test::path_graph(4);
    const Subgraph a = induce_subgraph(p, std::vector<Vertex>{1});
    CHECK(a.host == std::vector<Vertex>{0, 1, 2});
    CHECK(host_edges(a) == std::set<std::pair<Vertex, Vertex>>{{0, 1}, {1, 2}});
    const Subgraph b = induce_subgraph(p, std::vector<Vertex>{1, 2});
    CHECK(b.host == std::vector<Vertex>{0, 1, 2, 3});
    CHECK(b.graph.num_edges() == 3);

    // star with an extra leaf-leaf edge: only edges touching X survive
    const Graph star = make_graph(5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}, {2, 3}});
    const Subgraph s = induce_subgraph(star, std::vector<Vertex>{1});
    CHECK(s.host == std::vector<Vertex>{0, 1});
    CHECK(host_edges(s) == std::set<std::pair<Vertex, Vertex>>{{0, 1}});
    CHECK(satisfies_induction(star, std::vector<Vertex>{1}, s));
    // the vertex-induced subgraph on the same vertices keeps (0,2)-style edges and fails the audit
    const Subgraph wrong = induced_subgraph(star, std::vector<Vertex>{0, 1, 2});
    CHECK_FALSE(satisfies_induction(star, std::vector<Vertex>{1}, wrong));

    CHECK_THROWS_AS(induce_subgraph(p, std::vector<Vertex>{}), DomainError);
  }

  TEST_CASE("induction predicate on random sets") {
    Rng rng = make_rng(7);
    for (int trial = 0; trial < 50; ++trial) {
      const Graph g = lense::test::random_graph(30, 0.1, rng, trial % 3 == 0);
      std::vector<Vertex> x;
      for (Vertex v = 0; v < 30; ++v) {
        if (uniform01(rng) < 0.2) x.push_back(v);
      }
      if (x.empty()) x.push_back(0);
      CHECK(satisfies_induction(g, x, induce_subgraph(g, x)));
    }
  }

  TEST_CASE("candidate sets around two hubs") {
    const Graph g = two_hub_graph();
    const VertexSet x{0, 1};
    std::map<Vertex, int> v_counts;
    const int draws = 10000;
    for (int s = 0; s < draws; ++s) {
      Rng rng = make_rng(static_cast<Seed>(s));
      const ActionSets sets = sample_actions(g, x, nullptr, rng);
      REQUIRE(sets.all.size() == 2);
      CHECK(sets.guided.empty());
      for (const ActionTuple& a : sets.all) {
        if (a.out == 0) ++v_counts[a.in];
        else CHECK((a.in == 5 || a.in == 6));
      }
    }
    const double sigma = std::sqrt(draws * (1.0 / 3.0) * (2.0 / 3.0));
    for (Vertex c : {2, 3, 4}) CHECK(std::abs(v_counts[c] - draws / 3.0) < 3 * sigma);
  }

  TEST_CASE("guided subset and exhausted neighborhoods") {
    const Graph g = two_hub_graph();
    const VertexSet solution{2};
    bool saw_guided = false;
    for (Seed s = 0; s < 50; ++s) {
      Rng rng = make_rng(s);
      const ActionSets sets = sample_actions(g, VertexSet{0, 1}, &solution, rng);
      for (const ActionTuple& a : sets.guided) {
        CHECK(a == ActionTuple{0, 2});
        CHECK(std::find(sets.all.begin(), sets.all.end(), a) != sets.all.end());
        saw_guided = true;
      }
      const bool drew = std::find(sets.all.begin(), sets.all.end(), ActionTuple{0, 2}) != sets.all.end();
      CHECK(drew == !sets.guided.empty());
    }
    CHECK(saw_guided);

    // vertex 2's only neighbor is in X
    Rng rng = make_rng(1);
    const ActionSets sets = sample_actions(g, VertexSet{0, 2}, nullptr, rng);
    CHECK(sets.all.size() == 1);
    CHECK(sets.all[0].out == 0);

    const Graph edge = make_graph(2, {{0, 1}});
    CHECK_THROWS_AS(sample_actions(edge, VertexSet{0, 1}, nullptr, rng), DeadStateError);
  }

  TEST_CASE("apply action") {
    CHECK(apply_action(VertexSet{1, 2}, {1, 0}) == VertexSet{0, 2});
    CHECK(apply_action(apply_action(VertexSet{1, 2}, {1, 0}), {0, 1}) == VertexSet{1, 2});
    CHECK_THROWS_AS(apply_action(VertexSet{1, 2}, {3, 0}), InternalError);
    CHECK_THROWS_AS(apply_action(VertexSet{1, 2}, {1, 2}), InternalError);

    Rng rng = make_rng(9);
    const Graph g = barabasi_albert(100, 2, 4);
    for (int i = 0; i < 1000; ++i) {
      VertexSet x;
      while (x.size() < 10) {
        x.push_back(static_cast<Vertex>(uniform_index(rng, 100)));
        x = make_vertex_set(x);
      }
      const ActionSets sets = sample_actions(g, x, nullptr, rng);
      const ActionTuple a = sets.all[uniform_index(rng, sets.all.size())];
      const VertexSet y = apply_action(x, a);
      CHECK(y.size() == x.size());
      CHECK(std::is_sorted(y.begin(), y.end()));
    }
  }

  TEST_CASE("reward") {
    GoalPoint goal{nn::Vector::Zero(2), 50.0};
    CHECK(reward(goal, nn::Vector::Zero(2)) == 0.0);
    nn::Vector e(2);
    e << 0.12, 0.16;
    CHECK(reward(goal, e) == doctest::Approx(-10.0).epsilon(1e-12));
    GoalPoint doubled{goal.center, 100.0};
    CHECK(reward(doubled, e) == doctest::Approx(2 * reward(goal, e)));
    CHECK_THROWS_AS(reward(goal, nn::Vector::Zero(3)), ValidationError);
  }

  TEST_CASE("environment construction rejects bad settings") {
    const Graph g = lense::test::path_graph(4);
    CHECK_THROWS_AS(NavEnv(g, size_embedding, GoalPoint{nn::Vector::Zero(2), 0.0}, 2), ValidationError);
    CHECK_THROWS_AS(NavEnv(g, size_embedding, GoalPoint{nn::Vector::Zero(2), 1.0}, 5), ValidationError);
  }

  TEST_CASE("rollout invariants") {
    const Graph g = barabasi_albert(60, 2, 5);
    NavEnv env(g, size_embedding, GoalPoint{nn::Vector::Zero(2), 2.0}, 8);

    const Trajectory zero = rollout(env, first_action, 0, 3);
    CHECK(zero.states.size() == 1);
    CHECK(zero.best == 0);

    const Trajectory tr = rollout(env, first_action, 25, 3);
    REQUIRE(tr.complete);
    CHECK(tr.states.size() == 26);
    CHECK(tr.actions.size() == 25);
    for (std::size_t t = 0; t < tr.states.size(); ++t) {
      const StepRecord& s = tr.states[t];
      CHECK(s.x.size() == 8);
      CHECK(s.reward <= 0.0);
      CHECK(s.goal_distance >= tr.states[tr.best].goal_distance);
      if (t > 0) {
        std::vector<Vertex> diff;
        std::set_symmetric_difference(s.x.begin(), s.x.end(), tr.states[t - 1].x.begin(), tr.states[t - 1].x.end(),
                                      std::back_inserter(diff));
        CHECK(diff.size() == 2);
      }
    }

    const Trajectory again = rollout(env, first_action, 25, 3);
    for (std::size_t t = 0; t < tr.states.size(); ++t) CHECK(again.states[t].x == tr.states[t].x);

    std::ostringstream out;
    write_trajectory_jsonl(g, tr, out, 0);
    const std::string text = out.str();
    CHECK(std::count(text.begin(), text.end(), '\n') == 26);
  }

  TEST_CASE("every visited state satisfies the induction predicate") {
    Rng rng = make_rng(2);
    const Graph g = barabasi_albert(200, 3, 8);
    std::size_t violations = 0;
    for (int r = 0; r < 10; ++r) {
      const std::size_t m = 5 + uniform_index(rng, 46);
      NavEnv env(g, size_embedding, GoalPoint{nn::Vector::Zero(2), 1.0}, m);
      Rng policy_rng = make_rng(static_cast<Seed>(r), 8);
      env.reset(policy_rng);
      for (int t = 0; t < 20; ++t) {
        const ActionSets sets = env.candidates(nullptr, policy_rng);
        env.step(sets.all[uniform_index(policy_rng, sets.all.size())]);
        const NavState& s = env.state();
        if (s.x.size() != m || !satisfies_induction(g, s.x, s.subgraph)) ++violations;
      }
    }
    CHECK(violations == 0);
  }

  TEST_CASE("greedy-to-goal scripted policy closes in") {
    Rng rng = make_rng(13);
    const Graph g = lense::test::random_graph(20, 0.2, rng);
    const GoalPoint goal{size_embedding(induce_subgraph(g, std::vector<Vertex>{0, 1, 2, 3})).embedding, 1.0};
    NavEnv env(g, size_embedding, goal, 4);
    const Policy to_goal = [&](const NavState& s, const ActionSets& sets, Rng&) {
      ActionTuple best = sets.all.front();
      double best_d = INFINITY;
      for (const ActionTuple& a : sets.all) {
        const VertexSet y = apply_action(s.x, a);
        const double d = goal_distance(goal, size_embedding(induce_subgraph(g, y)).embedding);
        if (d < best_d) {
          best_d = d;
          best = a;
        }
      }
      return best;
    };
    for (Seed s = 0; s < 5; ++s) {
      const Trajectory tr = rollout(env, to_goal, 15, s);
      CHECK(tr.states.back().goal_distance <= tr.states.front().goal_distance);
    }
  }

  TEST_CASE("vertex embedding rows follow the subgraph") {
    const Graph g = lense::test::star_graph(4);
    NavEnv env(g, size_embedding, GoalPoint{nn::Vector::Zero(2), 1.0}, 1);
    const NavState& s = env.reset(VertexSet{1});
    CHECK(s.vertex_embedding(0)(0) == 1.0);
    CHECK_THROWS_AS(s.vertex_embedding(3), LookupError);
  }
}
