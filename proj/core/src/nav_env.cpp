#include "lense/nav_env.hpp"

#include <algorithm>
#include <ostream>
#include <set>

#include <nlohmann/json.hpp>

#include "lense/errors.hpp"

namespace lense {

Subgraph induce_subgraph(const Graph& g, std::span<const Vertex> x) {
  if (x.empty()) throw DomainError("cannot induce a subgraph from an empty vertex set");
  Subgraph s;
  std::vector<std::uint32_t> edge_ids;
  for (Vertex v : x) {
    s.host.push_back(v);
    for (Vertex u : g.neighbors(v)) s.host.push_back(u);
    for (const Arc& a : g.out_arcs(v)) edge_ids.push_back(a.edge);
    if (g.directed()) {
      for (const Arc& a : g.in_arcs(v)) edge_ids.push_back(a.edge);
    }
  }
  std::sort(s.host.begin(), s.host.end());
  s.host.erase(std::unique(s.host.begin(), s.host.end()), s.host.end());
  std::sort(edge_ids.begin(), edge_ids.end());
  edge_ids.erase(std::unique(edge_ids.begin(), edge_ids.end()), edge_ids.end());

  std::vector<OriginalId> ids;
  ids.reserve(s.host.size());
  for (Vertex v : s.host) ids.push_back(g.original_id(v));
  std::vector<Edge> edges;
  edges.reserve(edge_ids.size());
  for (std::uint32_t e : edge_ids) {
    const Edge& he = g.edge(e);
    edges.push_back({*s.local(he.src), *s.local(he.dst), he.weight});
  }
  s.graph = Graph::from_edges(g.directed(), g.weighted(), std::move(ids), edges);
  return s;
}

bool satisfies_induction(const Graph& g, std::span<const Vertex> x, const Subgraph& s) {
  std::set<Vertex> in_x(x.begin(), x.end());
  // vertex predicate: v in V_S  <=>  v in X or v adjacent to X
  std::set<Vertex> expected_vertices;
  for (Vertex v = 0; v < g.num_vertices(); ++v) {
    bool member = in_x.count(v) > 0;
    for (Vertex u : g.neighbors(v)) member = member || in_x.count(u) > 0;
    if (member) expected_vertices.insert(v);
  }
  if (std::set<Vertex>(s.host.begin(), s.host.end()) != expected_vertices) return false;
  if (s.graph.num_vertices() != s.host.size()) return false;

  // edge predicate: (u,v) in E_S  <=>  u in X or v in X
  std::set<std::pair<Vertex, Vertex>> expected_edges, actual_edges;
  for (const Edge& e : g.edges()) {
    if (in_x.count(e.src) || in_x.count(e.dst)) expected_edges.insert({e.src, e.dst});
  }
  for (const Edge& e : s.graph.edges()) {
    if (e.src >= s.host.size() || e.dst >= s.host.size()) return false;
    if (s.graph.original_id(e.src) != g.original_id(s.host[e.src])) return false;
    actual_edges.insert({s.host[e.src], s.host[e.dst]});
  }
  return actual_edges == expected_edges && actual_edges.size() == s.graph.num_edges();
}

ActionSets sample_actions(const Graph& g, const VertexSet& x, const VertexSet* solution, Rng& rng) {
  ActionSets sets;
  std::vector<Vertex> outside;
  for (Vertex v : x) {
    outside.clear();
    for (Vertex u : g.neighbors(v)) {
      if (!std::binary_search(x.begin(), x.end(), u)) outside.push_back(u);
    }
    if (outside.empty()) continue;
    const ActionTuple a{v, outside[uniform_index(rng, outside.size())]};
    sets.all.push_back(a);
    if (solution && std::binary_search(solution->begin(), solution->end(), a.in)) sets.guided.push_back(a);
  }
  if (sets.all.empty()) throw DeadStateError("no vertex of X has a neighbor outside X");
  return sets;
}

VertexSet apply_action(const VertexSet& x, const ActionTuple& a) {
  if (a.out == a.in || !std::binary_search(x.begin(), x.end(), a.out) ||
      std::binary_search(x.begin(), x.end(), a.in)) {
    throw InternalError("action is not valid for the current vertex set");
  }
  VertexSet next;
  next.reserve(x.size());
  for (Vertex v : x) {
    if (v != a.out) next.push_back(v);
  }
  next.insert(std::upper_bound(next.begin(), next.end(), a.in), a.in);
  return next;
}

double goal_distance(const GoalPoint& goal, const nn::Vector& embedding) {
  if (goal.center.size() != embedding.size()) throw ValidationError("goal/embedding dimension mismatch");
  return (goal.center - embedding).norm();
}

double reward(const GoalPoint& goal, const nn::Vector& embedding) { return -goal.beta * goal_distance(goal, embedding); }

nn::RowVector NavState::vertex_embedding(Vertex host_vertex) const {
  const auto local = subgraph.local(host_vertex);
  if (!local) throw LookupError("vertex not in the current subgraph");
  return obs.vertex_embeddings.row(*local);
}

NavEnv::NavEnv(const Graph& g, Embedder embed, GoalPoint goal, std::size_t subset_size)
    : graph_(&g), embed_(std::move(embed)), goal_(std::move(goal)), m_(subset_size) {
  if (!(goal_.beta > 0.0)) throw ValidationError("reward scale beta must be positive");
  if (m_ == 0 || m_ > g.num_vertices()) throw ValidationError("subset size must lie in [1, |V|]");
}

const NavState& NavEnv::reset(Rng& rng) {
  // partial Fisher-Yates: the first m entries are a uniform m-subset
  std::vector<Vertex> pool(graph_->num_vertices());
  for (Vertex v = 0; v < pool.size(); ++v) pool[v] = v;
  for (std::size_t i = 0; i < m_; ++i) {
    const std::size_t j = i + uniform_index(rng, pool.size() - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(m_);
  return reset(make_vertex_set(pool));
}

const NavState& NavEnv::reset(VertexSet x0) {
  if (x0.size() != m_) throw ValidationError("initial vertex set has the wrong size");
  state_.x = std::move(x0);
  state_.t = 0;
  observe();
  return state_;
}

ActionSets NavEnv::candidates(const VertexSet* solution, Rng& rng) const {
  return sample_actions(*graph_, state_.x, solution, rng);
}

double NavEnv::step(const ActionTuple& a) {
  state_.x = apply_action(state_.x, a);
  ++state_.t;
  observe();
  return -goal_.beta * state_.distance;
}

void NavEnv::observe() {
  state_.subgraph = induce_subgraph(*graph_, state_.x);
  state_.obs = embed_(state_.subgraph);
  state_.distance = goal_distance(goal_, state_.obs.embedding);
}

Trajectory rollout(NavEnv& env, const Policy& policy, std::size_t steps, Seed seed) {
  Rng env_rng = make_rng(seed, 1);
  Rng policy_rng = make_rng(seed, 2);
  Trajectory tr;
  auto record = [&](const NavState& s) {
    tr.states.push_back({s.t, s.x, s.obs.embedding, -env.goal().beta * s.distance, s.distance});
    if (s.distance < tr.states[tr.best].goal_distance) tr.best = tr.states.size() - 1;
  };
  record(env.reset(env_rng));
  for (std::size_t t = 0; t < steps; ++t) {
    ActionSets sets;
    try {
      sets = env.candidates(nullptr, env_rng);
    } catch (const DeadStateError&) {
      tr.complete = false;
      break;
    }
    const ActionTuple a = policy(env.state(), sets, policy_rng);
    env.step(a);
    tr.actions.push_back(a);
    record(env.state());
  }
  return tr;
}

void write_trajectory_jsonl(const Graph& g, const Trajectory& tr, std::ostream& out, std::size_t episode) {
  for (const StepRecord& s : tr.states) {
    nlohmann::ordered_json j;
    j["episode"] = episode;
    j["t"] = s.t;
    auto& ids = j["X"] = nlohmann::ordered_json::array();
    for (Vertex v : s.x) ids.push_back(g.original_id(v));
    j["embedding"] = std::vector<double>(s.embedding.data(), s.embedding.data() + s.embedding.size());
    j["reward"] = s.reward;
    j["goal_distance"] = s.goal_distance;
    out << j.dump() << '\n';
  }
}

}  // namespace lense
