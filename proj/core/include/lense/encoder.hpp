#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include <nlohmann/json.hpp>

#include "lense/features.hpp"
#include "lense/graph.hpp"
#include "lense/neural.hpp"
#include "lense/rng.hpp"

namespace lense {

struct EncoderConfig {
  std::size_t in_features = 2;
  std::size_t hidden = 30;  // d': GraphSAGE width, also the vertex-embedding size
  std::size_t embed = 10;   // d: subgraph embedding size
  double pool_ratio = 0.8;
};

/// Encoder input for one subgraph: feature rows, local adjacency (direction
/// ignored) and a stable key per row used to break pooling ties.
struct EncoderInput {
  nn::Matrix x;
  nn::Adjacency adj;
  std::vector<std::int64_t> keys;
};

/// Rows follow `s.host`; features come from the host graph's table.
EncoderInput make_encoder_input(const Subgraph& s, const FeatureTable& host_features);

struct EncoderOutput {
  nn::Vector embedding;
  nn::Matrix vertex_embeddings;  // first GraphSAGE layer, before any pooling
};

/// Subgraph encoder: three GraphSAGE + top-k pooling blocks, [mean; max]
/// readout after each block, readouts summed, then a linear map to R^d.
class Encoder {
 public:
  struct Trace {
    std::array<nn::Adjacency, 3> adj;
    std::array<nn::SageLayer::Cache, 3> sage;
    std::array<nn::TopKPool::Cache, 3> pool;
    std::array<std::vector<int>, 3> argmax;
    std::array<Eigen::Index, 3> pooled_rows{};
    nn::Matrix readout_sum;  // 1 x 2d'
  };

  Encoder() = default;
  Encoder(EncoderConfig config, Seed seed);

  EncoderOutput encode(const EncoderInput& input, Trace* trace = nullptr) const;

  /// Accumulates parameter gradients of a loss with d loss / d embedding.
  void backward(const Trace& trace, const nn::Vector& d_embedding);

  nn::ParamRefs params();
  const EncoderConfig& config() const noexcept { return config_; }

  nlohmann::json to_json();
  static Encoder from_json(const nlohmann::json& j);

 private:
  EncoderConfig config_;
  std::array<nn::SageLayer, 3> sage_;
  std::array<nn::TopKPool, 3> pool_;
  nn::Linear head_;
};

}  // namespace lense
