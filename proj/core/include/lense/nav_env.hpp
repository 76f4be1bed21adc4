#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "lense/graph.hpp"
#include "lense/neural.hpp"
#include "lense/problems.hpp"
#include "lense/rng.hpp"

namespace lense {

/// Swap out host vertex `out` (in X) for host vertex `in` (a neighbor of
/// `out` outside X).
struct ActionTuple {
  Vertex out;
  Vertex in;

  friend bool operator==(const ActionTuple&, const ActionTuple&) = default;
  friend auto operator<=>(const ActionTuple&, const ActionTuple&) = default;
};

struct GoalPoint {
  nn::Vector center;
  double beta = 1.0;
};

/// Subgraph spanned by X: every vertex of X, all their neighbors, and every
/// edge with at least one endpoint in X. Throws DomainError for empty X.
Subgraph induce_subgraph(const Graph& g, std::span<const Vertex> x);

/// True iff `s` has exactly the vertex and edge sets induce_subgraph defines.
/// Independent of induce_subgraph's construction; used for audits.
bool satisfies_induction(const Graph& g, std::span<const Vertex> x, const Subgraph& s);

struct ActionSets {
  std::vector<ActionTuple> all;     // A_t
  std::vector<ActionTuple> guided;  // B_t: tuples whose incoming vertex is a known solution vertex
};

/// One uniformly drawn outside neighbor per vertex of X; vertices whose whole
/// neighborhood lies in X contribute nothing. Throws DeadStateError when no
/// vertex yields a tuple.
ActionSets sample_actions(const Graph& g, const VertexSet& x, const VertexSet* solution, Rng& rng);

/// (X \ {out}) + {in}. Throws InternalError if the action is invalid for X.
VertexSet apply_action(const VertexSet& x, const ActionTuple& a);

double goal_distance(const GoalPoint& goal, const nn::Vector& embedding);

/// -beta * |g* - embedding|_2.
double reward(const GoalPoint& goal, const nn::Vector& embedding);

/// What the environment sees of a state: the subgraph embedding and one
/// vertex-embedding row per subgraph vertex (rows follow Subgraph::host).
struct Observation {
  nn::Vector embedding;
  nn::Matrix vertex_embeddings;
};

using Embedder = std::function<Observation(const Subgraph&)>;

struct NavState {
  VertexSet x;
  Subgraph subgraph;
  Observation obs;
  double distance = 0.0;
  std::size_t t = 0;

  /// Vertex-embedding row of a host vertex of the subgraph.
  nn::RowVector vertex_embedding(Vertex host_vertex) const;
};

/// The subgraph-navigation MDP over a fixed host graph.
class NavEnv {
 public:
  NavEnv(const Graph& g, Embedder embed, GoalPoint goal, std::size_t subset_size);

  /// X_0 drawn uniformly without replacement.
  const NavState& reset(Rng& rng);
  const NavState& reset(VertexSet x0);

  ActionSets candidates(const VertexSet* solution, Rng& rng) const;

  /// Applies the action and returns the reward for entering the new state.
  double step(const ActionTuple& a);

  const NavState& state() const noexcept { return state_; }
  const Graph& graph() const noexcept { return *graph_; }
  const GoalPoint& goal() const noexcept { return goal_; }
  std::size_t subset_size() const noexcept { return m_; }

 private:
  void observe();

  const Graph* graph_;
  Embedder embed_;
  GoalPoint goal_;
  std::size_t m_;
  NavState state_;
};

struct StepRecord {
  std::size_t t = 0;
  VertexSet x;
  nn::Vector embedding;
  double reward = 0.0;
  double goal_distance = 0.0;
};

struct Trajectory {
  std::vector<StepRecord> states;  // s_0 .. s_T
  std::vector<ActionTuple> actions;
  std::size_t best = 0;            // index of the state closest to the goal
  bool complete = true;            // false when a dead state cut the episode short
};

using Policy = std::function<ActionTuple(const NavState&, const ActionSets&, Rng&)>;

/// Runs T steps from a random X_0. Candidate sets and X_0 come from the rollout
/// seed; the policy gets its own stream.
Trajectory rollout(NavEnv& env, const Policy& policy, std::size_t steps, Seed seed);

/// JSON lines {t, X (original ids), embedding, reward, goal_distance}.
void write_trajectory_jsonl(const Graph& g, const Trajectory& tr, std::ostream& out, std::size_t episode);

}  // namespace lense
