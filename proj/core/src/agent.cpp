#include "lense/agent.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <optional>
#include <ostream>

#include "lense/errors.hpp"

namespace lense {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0) throw ConfigError("replay capacity must be positive");
}

void ReplayBuffer::push(Transition t) {
  ++inserted_;
  if (ring_.size() < capacity_) {
    ring_.push_back(std::move(t));
    return;
  }
  ring_[head_] = std::move(t);
  head_ = (head_ + 1) % capacity_;
}

const Transition& ReplayBuffer::at(std::size_t i) const {
  if (i >= ring_.size()) throw LookupError("replay index out of range");
  return ring_[(head_ + i) % ring_.size()];
}

std::vector<const Transition*> ReplayBuffer::sample(std::size_t count, Rng& rng) const {
  if (ring_.empty()) throw LookupError("cannot sample from an empty replay buffer");
  std::vector<const Transition*> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(&ring_[uniform_index(rng, ring_.size())]);
  return out;
}

namespace {

struct ActionInputs {
  nn::Matrix out_vertices;
  nn::Matrix in_vertices;
};

ActionInputs gather_actions(const NavState& state, std::span<const ActionTuple> actions) {
  const auto n = static_cast<Eigen::Index>(actions.size());
  const Eigen::Index dv = state.obs.vertex_embeddings.cols();
  ActionInputs in{nn::Matrix(n, dv), nn::Matrix(n, dv)};
  for (Eigen::Index i = 0; i < n; ++i) {
    in.out_vertices.row(i) = state.vertex_embedding(actions[static_cast<std::size_t>(i)].out);
    in.in_vertices.row(i) = state.vertex_embedding(actions[static_cast<std::size_t>(i)].in);
  }
  return in;
}

}  // namespace

nn::Vector action_values(const QNetwork& q, const NavState& state, std::span<const ActionTuple> actions) {
  const ActionInputs in = gather_actions(state, actions);
  return q.evaluate_actions(state.obs.embedding, in.out_vertices, in.in_vertices);
}

Selection select_action(const ActionSets& sets, double eps, double alpha, const QNetwork& q, const NavState& state,
                        Rng& rng) {
  if (sets.all.empty()) throw DeadStateError("no candidate actions");
  if (eps < 0.0 || eps > 1.0 || alpha < 0.0 || alpha > 1.0) throw ValidationError("eps and alpha must lie in [0, 1]");
  Selection sel;
  const double r = eps > 0.0 ? uniform01(rng) : 1.0;
  if (r < eps * alpha) {
    const auto& pool = sets.guided.empty() ? sets.all : sets.guided;
    sel.action = pool[uniform_index(rng, pool.size())];
    sel.exploratory = true;
    sel.guided = !sets.guided.empty();
    return sel;
  }
  if (r < eps) {
    sel.action = sets.all[uniform_index(rng, sets.all.size())];
    sel.exploratory = true;
    return sel;
  }
  const nn::Vector values = action_values(q, state, sets.all);
  std::size_t best = 0;
  for (std::size_t i = 1; i < sets.all.size(); ++i) {
    const auto qi = values[static_cast<Eigen::Index>(i)];
    const auto qb = values[static_cast<Eigen::Index>(best)];
    if (qi > qb || (qi == qb && sets.all[i] < sets.all[best])) best = i;
  }
  sel.action = sets.all[best];
  return sel;
}

double td_loss(QNetwork& online, const QNetwork& target, std::span<const Transition* const> batch, double gamma,
               bool accumulate) {
  if (batch.empty()) throw ValidationError("empty TD batch");
  const auto n = static_cast<Eigen::Index>(batch.size());
  const Eigen::Index d = static_cast<Eigen::Index>(online.config().state_dim);
  const Eigen::Index dv = static_cast<Eigen::Index>(online.config().vertex_dim);
  nn::Matrix states(n, d), outs(n, dv), ins(n, dv);
  nn::Vector y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Transition& t = *batch[static_cast<std::size_t>(i)];
    states.row(i) = t.state.transpose();
    outs.row(i) = t.out_vertex;
    ins.row(i) = t.in_vertex;
    y[i] = t.reward;
    if (!t.terminal) {
      if (t.next_out_vertices.rows() == 0) throw DataError("non-terminal transition without next actions");
      y[i] += gamma * target.evaluate_actions(t.next_state, t.next_out_vertices, t.next_in_vertices).maxCoeff();
    }
  }
  QNetwork::Cache cache;
  const nn::Vector q = online.forward(states, outs, ins, accumulate ? &cache : nullptr);
  const nn::Vector diff = q - y;
  const double loss = diff.squaredNorm() / static_cast<double>(n);
  if (accumulate) online.backward(cache, (2.0 / static_cast<double>(n)) * diff);
  return loss;
}

double td_update(QNetwork& online, const QNetwork& target, std::span<const Transition* const> batch, double gamma,
                 nn::Adam& adam) {
  const nn::ParamRefs params = online.params();
  nn::zero_grads(params);
  const double loss = td_loss(online, target, batch, gamma, true);
  adam.step(params);
  return loss;
}

namespace {

Transition make_transition(const NavState& s, const ActionTuple& a, double r) {
  Transition t;
  t.state = s.obs.embedding;
  t.out_vertex = s.vertex_embedding(a.out);
  t.in_vertex = s.vertex_embedding(a.in);
  t.reward = r;
  return t;
}

}  // namespace

AgentTrainResult train_agent(NavEnv& env, const VertexSet& solution, const AgentConfig& config, Seed seed) {
  if (config.train_steps == 0 || config.episodes == 0) throw ConfigError("training needs at least one step and episode");
  if (config.update_every == 0 || config.batch == 0) throw ConfigError("update interval and batch must be positive");

  Rng env_rng = make_rng(seed, 1);
  Rng policy_rng = make_rng(seed, 2);
  Rng replay_rng = make_rng(seed, 3);

  const NavState& first = env.reset(env_rng);
  const QNetConfig qcfg{static_cast<std::size_t>(first.obs.embedding.size()),
                        static_cast<std::size_t>(first.obs.vertex_embeddings.cols()), config.hidden};
  AgentTrainResult result{QNetwork(qcfg, derive_seed(seed, 4)), {}, 0, 0, 0, 0, config.eps_start};
  QNetwork target = result.qnet;
  nn::Adam adam(nn::AdamConfig{.lr = config.lr});
  ReplayBuffer replay(config.replay_capacity);
  double eps = config.eps_start;

  for (std::size_t episode = 0; episode < config.episodes; ++episode) {
    if (episode > 0) env.reset(env_rng);
    EpisodeLog log;
    log.episode = episode;
    log.initial_distance = env.state().distance;
    double reward_sum = 0.0;
    double loss_sum = 0.0;
    std::size_t steps = 0, updates = 0;

    std::optional<ActionSets> sets;
    try {
      sets = env.candidates(&solution, env_rng);
    } catch (const DeadStateError&) {
      log.complete = false;
    }
    for (std::size_t t = 1; sets && t <= config.train_steps; ++t) {
      const Selection sel = select_action(*sets, eps, config.alpha, result.qnet, env.state(), policy_rng);
      if (sel.exploratory) {
        ++result.exploratory_actions;
        if (sel.guided) ++result.guided_actions;
        eps = std::max(config.eps_min, eps * config.eps_decay);
      }
      Transition tr = make_transition(env.state(), sel.action, 0.0);
      tr.reward = env.step(sel.action);
      reward_sum += tr.reward;
      ++steps;

      std::optional<ActionSets> next;
      try {
        next = env.candidates(&solution, env_rng);
      } catch (const DeadStateError&) {
        log.complete = false;
      }
      tr.terminal = t == config.train_steps || !next;
      if (!tr.terminal) {
        const ActionInputs in = gather_actions(env.state(), next->all);
        tr.next_state = env.state().obs.embedding;
        tr.next_out_vertices = in.out_vertices;
        tr.next_in_vertices = in.in_vertices;
      }
      replay.push(std::move(tr));

      if (t % config.update_every == 0) {
        const auto batch = replay.sample(std::min(config.batch, replay.size()), replay_rng);
        loss_sum += td_update(result.qnet, target, batch, config.gamma, adam);
        nn::polyak_update(target.params(), result.qnet.params(), config.polyak);
        ++updates;
        ++result.updates;
      }
      sets = std::move(next);
    }
    log.mean_reward = steps ? reward_sum / static_cast<double>(steps) : 0.0;
    log.final_distance = env.state().distance;
    log.epsilon = eps;
    log.loss = updates ? loss_sum / static_cast<double>(updates) : 0.0;
    result.log.push_back(log);
  }
  result.replay_size = replay.size();
  result.final_epsilon = eps;
  return result;
}

Policy greedy_policy(const QNetwork& q) {
  return [&q](const NavState& s, const ActionSets& sets, Rng& rng) {
    return select_action(sets, 0.0, 0.0, q, s, rng).action;
  };
}

NavigationResult navigate_test(NavEnv& env, const QNetwork& q, std::size_t steps, std::size_t n_episodes, Seed seed) {
  NavigationResult res;
  const Policy policy = greedy_policy(q);
  for (std::size_t e = 0; e < n_episodes; ++e) {
    const auto start = std::chrono::steady_clock::now();
    res.episodes.push_back(rollout(env, policy, steps, derive_seed(seed, e)));
    res.seconds.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  }
  return res;
}

void write_training_log(const std::vector<EpisodeLog>& log, std::ostream& out) {
  out << "episode,mean_reward,final_distance,epsilon,loss\n";
  out.precision(10);
  for (const EpisodeLog& l : log) {
    out << l.episode << ',' << l.mean_reward << ',' << l.final_distance << ',' << l.epsilon << ',' << l.loss << '\n';
  }
}

}  // namespace lense
