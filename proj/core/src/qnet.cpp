#include "lense/qnet.hpp"

#include "lense/errors.hpp"

namespace lense {

QNetwork::QNetwork(QNetConfig config, Seed seed) : config_(config) {
  const auto d = static_cast<Eigen::Index>(config_.state_dim);
  const auto dv = static_cast<Eigen::Index>(config_.vertex_dim);
  const auto h = static_cast<Eigen::Index>(config_.hidden);
  if (d == 0 || dv == 0 || h == 0) throw ConfigError("Q-network widths must be positive");
  state_in_ = nn::Linear("qnet.state_in", d, h);
  out_in_ = nn::Linear("qnet.out_vertex_in", dv, h);
  in_in_ = nn::Linear("qnet.in_vertex_in", dv, h);
  fc1_ = nn::Linear("qnet.fc1", 3 * h, h);
  fc2_ = nn::Linear("qnet.fc2", h, h);
  out_ = nn::Linear("qnet.out", h, 1);
  Rng rng = make_rng(seed, 0x9e7);
  for (nn::Linear* l : {&state_in_, &out_in_, &in_in_, &fc1_, &fc2_, &out_}) l->init(rng);
}

nn::Vector QNetwork::forward(const nn::Matrix& state, const nn::Matrix& out_vertex, const nn::Matrix& in_vertex,
                             Cache* cache) const {
  if (state.rows() != out_vertex.rows() || state.rows() != in_vertex.rows()) {
    throw ValidationError("Q-network inputs must have matching row counts");
  }
  const Eigen::Index h = state_in_.out_dim();
  nn::Matrix s_pre = state_in_.forward(state);
  nn::Matrix o_pre = out_in_.forward(out_vertex);
  nn::Matrix i_pre = in_in_.forward(in_vertex);
  nn::Matrix concat(state.rows(), 3 * h);
  concat << nn::relu(s_pre), nn::relu(o_pre), nn::relu(i_pre);
  nn::Matrix f1_pre = fc1_.forward(concat);
  nn::Matrix f1 = nn::relu(f1_pre);
  nn::Matrix f2_pre = fc2_.forward(f1);
  nn::Matrix f2 = nn::relu(f2_pre);
  nn::Vector q = out_.forward(f2).col(0);
  if (cache) {
    cache->state = state;
    cache->out_vertex = out_vertex;
    cache->in_vertex = in_vertex;
    cache->state_pre = std::move(s_pre);
    cache->out_pre = std::move(o_pre);
    cache->in_pre = std::move(i_pre);
    cache->concat = std::move(concat);
    cache->fc1_pre = std::move(f1_pre);
    cache->fc1 = std::move(f1);
    cache->fc2_pre = std::move(f2_pre);
    cache->fc2 = std::move(f2);
  }
  return q;
}

nn::Vector QNetwork::evaluate_actions(const nn::Vector& state, const nn::Matrix& out_vertex,
                                      const nn::Matrix& in_vertex) const {
  const Eigen::Index n = out_vertex.rows();
  const Eigen::Index h = state_in_.out_dim();
  const nn::RowVector s = nn::relu(state_in_.forward(state.transpose())).row(0);
  nn::Matrix concat(n, 3 * h);
  concat.leftCols(h) = s.replicate(n, 1);
  concat.middleCols(h, h) = nn::relu(out_in_.forward(out_vertex));
  concat.rightCols(h) = nn::relu(in_in_.forward(in_vertex));
  const nn::Matrix f2 = nn::relu(fc2_.forward(nn::relu(fc1_.forward(concat))));
  return out_.forward(f2).col(0);
}

double QNetwork::q_value(const nn::Vector& state, const nn::RowVector& out_vertex,
                         const nn::RowVector& in_vertex) const {
  return forward(state.transpose(), out_vertex, in_vertex)[0];
}

void QNetwork::backward(const Cache& cache, const nn::Vector& d_q) {
  const Eigen::Index h = state_in_.out_dim();
  nn::Matrix d = out_.backward(cache.fc2, d_q);
  d = fc2_.backward(cache.fc1, nn::relu_backward(cache.fc2_pre, d));
  const nn::Matrix d_concat = fc1_.backward(cache.concat, nn::relu_backward(cache.fc1_pre, d));
  state_in_.backward(cache.state, nn::relu_backward(cache.state_pre, d_concat.leftCols(h)));
  out_in_.backward(cache.out_vertex, nn::relu_backward(cache.out_pre, d_concat.middleCols(h, h)));
  in_in_.backward(cache.in_vertex, nn::relu_backward(cache.in_pre, d_concat.rightCols(h)));
}

nn::ParamRefs QNetwork::params() {
  nn::ParamRefs refs;
  for (nn::Linear* l : {&state_in_, &out_in_, &in_in_, &fc1_, &fc2_, &out_}) l->collect(refs);
  return refs;
}

nlohmann::json QNetwork::to_json() {
  nlohmann::json j;
  j["config"] = {{"state_dim", config_.state_dim}, {"vertex_dim", config_.vertex_dim}, {"hidden", config_.hidden}};
  j["params"] = nn::params_to_json(params());
  return j;
}

QNetwork QNetwork::from_json(const nlohmann::json& j) {
  const auto& c = j.at("config");
  QNetConfig cfg{c.at("state_dim").get<std::size_t>(), c.at("vertex_dim").get<std::size_t>(),
                 c.at("hidden").get<std::size_t>()};
  QNetwork q(cfg, 0);
  nn::params_from_json(q.params(), j.at("params"));
  return q;
}

}  // namespace lense
