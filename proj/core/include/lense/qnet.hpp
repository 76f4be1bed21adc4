#pragma once

#include <nlohmann/json.hpp>

#include "lense/neural.hpp"
#include "lense/rng.hpp"

namespace lense {

struct QNetConfig {
  std::size_t state_dim = 10;   // d
  std::size_t vertex_dim = 30;  // d'
  std::size_t hidden = 128;
};

/// Q(s, v, u): three independent ReLU input layers for the subgraph
/// embedding, the outgoing vertex and the incoming vertex, concatenated and
/// fed through two ReLU layers and a final linear unit.
class QNetwork {
 public:
  struct Cache {
    nn::Matrix state, out_vertex, in_vertex;
    nn::Matrix state_pre, out_pre, in_pre;
    nn::Matrix concat;
    nn::Matrix fc1_pre, fc1;
    nn::Matrix fc2_pre, fc2;
  };

  QNetwork() = default;
  QNetwork(QNetConfig config, Seed seed);

  /// One Q value per row; the three inputs have one row per (s, a) pair.
  nn::Vector forward(const nn::Matrix& state, const nn::Matrix& out_vertex, const nn::Matrix& in_vertex,
                     Cache* cache = nullptr) const;

  /// Q for many actions of one state; the state head runs once.
  nn::Vector evaluate_actions(const nn::Vector& state, const nn::Matrix& out_vertex,
                              const nn::Matrix& in_vertex) const;

  double q_value(const nn::Vector& state, const nn::RowVector& out_vertex, const nn::RowVector& in_vertex) const;

  /// Accumulates parameter gradients for d loss / d Q (one entry per row).
  void backward(const Cache& cache, const nn::Vector& d_q);

  nn::ParamRefs params();
  const QNetConfig& config() const noexcept { return config_; }

  nlohmann::json to_json();
  static QNetwork from_json(const nlohmann::json& j);

 private:
  QNetConfig config_;
  nn::Linear state_in_, out_in_, in_in_;
  nn::Linear fc1_, fc2_, out_;
};

}  // namespace lense
