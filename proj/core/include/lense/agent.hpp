#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "lense/nav_env.hpp"
#include "lense/neural.hpp"
#include "lense/qnet.hpp"

namespace lense {

/// Replay record. The next state's sampled candidate actions are stored with
/// their vertex embeddings so the bootstrap max is reproducible.
struct Transition {
  nn::Vector state;
  nn::RowVector out_vertex;
  nn::RowVector in_vertex;
  double reward = 0.0;
  nn::Vector next_state;
  nn::Matrix next_out_vertices;  // one row per candidate action of s_{t+1}
  nn::Matrix next_in_vertices;
  bool terminal = false;
};

/// Fixed-capacity FIFO ring.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);
  void push(Transition t);
  std::size_t size() const noexcept { return ring_.size(); }
  std::size_t capacity() const noexcept { return capacity_; }
  std::size_t total_inserted() const noexcept { return inserted_; }
  /// i-th oldest stored transition.
  const Transition& at(std::size_t i) const;
  /// `count` uniform draws with replacement.
  std::vector<const Transition*> sample(std::size_t count, Rng& rng) const;

 private:
  std::size_t capacity_;
  std::vector<Transition> ring_;
  std::size_t head_ = 0;  // slot of the oldest transition once full
  std::size_t inserted_ = 0;
};

struct Selection {
  ActionTuple action{};
  bool exploratory = false;  // taken by one of the two random branches
  bool guided = false;       // drawn from B_t
};

/// Guided epsilon-greedy: uniform over B_t with probability eps * alpha
/// (uniform over A_t when B_t is empty), uniform over A_t with probability
/// eps * (1 - alpha), otherwise argmax Q over A_t with ties to the smallest
/// (out, in) pair.
Selection select_action(const ActionSets& sets, double eps, double alpha, const QNetwork& q, const NavState& state,
                        Rng& rng);

/// Q values of every candidate in `actions` for `state`.
nn::Vector action_values(const QNetwork& q, const NavState& state, std::span<const ActionTuple> actions);

/// Mean squared TD error over the batch with targets
/// y = r + gamma * max_a' Q_target(s', a') (y = r when terminal). With
/// `accumulate`, adds d loss / d params of `online` into its gradients.
double td_loss(QNetwork& online, const QNetwork& target, std::span<const Transition* const> batch, double gamma,
               bool accumulate);

/// One Adam step on td_loss; returns the loss before the step.
double td_update(QNetwork& online, const QNetwork& target, std::span<const Transition* const> batch, double gamma,
                 nn::Adam& adam);

struct AgentConfig {
  std::size_t train_steps = 2000;  // T_train
  std::size_t episodes = 10;       // N'
  double alpha = 0.0;              // guidance level
  std::size_t update_every = 20;   // c
  double eps_start = 1.0;
  double eps_decay = 0.9995;
  double eps_min = 0.01;
  double gamma = 0.995;
  double lr = 1e-3;
  std::size_t batch = 128;
  std::size_t replay_capacity = 25000;
  double polyak = 0.0025;
  std::size_t hidden = 128;
};

struct EpisodeLog {
  std::size_t episode = 0;
  double mean_reward = 0.0;
  double initial_distance = 0.0;
  double final_distance = 0.0;
  double epsilon = 0.0;
  double loss = 0.0;  // mean TD loss over this episode's updates
  bool complete = true;
};

struct AgentTrainResult {
  QNetwork qnet;
  std::vector<EpisodeLog> log;
  std::size_t exploratory_actions = 0;
  std::size_t guided_actions = 0;
  std::size_t updates = 0;
  std::size_t replay_size = 0;
  double final_epsilon = 1.0;
};

/// DQN training with guided exploration on the env's (train) graph. `solution`
/// is the known solution set B; epsilon decays after every random-branch
/// action; the target network tracks the online one by Polyak averaging after
/// each replay update.
AgentTrainResult train_agent(NavEnv& env, const VertexSet& solution, const AgentConfig& config, Seed seed);

/// Greedy policy (epsilon = 0) of a trained Q-network.
Policy greedy_policy(const QNetwork& q);

struct NavigationResult {
  std::vector<Trajectory> episodes;
  std::vector<double> seconds;
};

/// Test-time navigation: `n_episodes` greedy rollouts of `steps` steps, each
/// from its own random X_0.
NavigationResult navigate_test(NavEnv& env, const QNetwork& q, std::size_t steps, std::size_t n_episodes, Seed seed);

/// CSV header + rows {episode, mean_reward, final_distance, epsilon, loss}.
void write_training_log(const std::vector<EpisodeLog>& log, std::ostream& out);

}  // namespace lense
