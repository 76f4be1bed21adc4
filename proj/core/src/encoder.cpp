#include "lense/encoder.hpp"

#include "lense/errors.hpp"

namespace lense {

EncoderInput make_encoder_input(const Subgraph& s, const FeatureTable& host_features) {
  EncoderInput in;
  in.x = host_features.gather(s.host);
  in.adj.resize(s.host.size());
  for (Vertex v = 0; v < s.graph.num_vertices(); ++v) {
    const auto nbrs = s.graph.neighbors(v);
    in.adj[v].assign(nbrs.begin(), nbrs.end());
  }
  in.keys.assign(s.graph.original_ids().begin(), s.graph.original_ids().end());
  return in;
}

Encoder::Encoder(EncoderConfig config, Seed seed) : config_(config) {
  if (config_.in_features == 0 || config_.hidden == 0 || config_.embed == 0) {
    throw ConfigError("encoder widths must be positive");
  }
  if (!(config_.pool_ratio > 0.0 && config_.pool_ratio <= 1.0)) throw ConfigError("pool_ratio must lie in (0,1]");
  const auto f = static_cast<Eigen::Index>(config_.in_features);
  const auto h = static_cast<Eigen::Index>(config_.hidden);
  const auto d = static_cast<Eigen::Index>(config_.embed);
  Rng rng = make_rng(seed, 0xe1);
  for (std::size_t i = 0; i < 3; ++i) {
    const std::string tag = "encoder.block" + std::to_string(i + 1);
    sage_[i] = nn::SageLayer(tag + ".sage", i == 0 ? f : h, h);
    sage_[i].init(rng);
    pool_[i] = nn::TopKPool(tag + ".pool", h, config_.pool_ratio);
    pool_[i].init(rng);
  }
  head_ = nn::Linear("encoder.head", 2 * h, d);
  head_.init(rng);
}

EncoderOutput Encoder::encode(const EncoderInput& input, Trace* trace) const {
  if (input.x.rows() == 0) throw DomainError("cannot encode an empty subgraph");
  if (input.x.cols() != static_cast<Eigen::Index>(config_.in_features)) {
    throw ValidationError("encoder input has " + std::to_string(input.x.cols()) + " features, expected " +
                          std::to_string(config_.in_features));
  }
  EncoderOutput out;
  nn::Matrix h = input.x;
  nn::Adjacency adj = input.adj;
  std::vector<std::int64_t> keys = input.keys;
  nn::RowVector sum = nn::RowVector::Zero(2 * static_cast<Eigen::Index>(config_.hidden));
  for (std::size_t i = 0; i < 3; ++i) {
    nn::Matrix conv = sage_[i].forward(h, adj, trace ? &trace->sage[i] : nullptr);
    if (i == 0) out.vertex_embeddings = conv;
    auto pooled = pool_[i].forward(conv, adj, keys, trace ? &trace->pool[i] : nullptr);
    std::vector<int> argmax;
    sum += nn::readout(pooled.h, &argmax);
    if (trace) {
      trace->adj[i] = std::move(adj);
      trace->argmax[i] = std::move(argmax);
      trace->pooled_rows[i] = pooled.h.rows();
    }
    std::vector<std::int64_t> next_keys;
    next_keys.reserve(pooled.kept.size());
    for (int r : pooled.kept) next_keys.push_back(keys[static_cast<std::size_t>(r)]);
    keys = std::move(next_keys);
    h = std::move(pooled.h);
    adj = std::move(pooled.adj);
  }
  if (trace) trace->readout_sum = sum;
  out.embedding = head_.forward(sum).row(0).transpose();
  return out;
}

void Encoder::backward(const Trace& trace, const nn::Vector& d_embedding) {
  const nn::Matrix d_sum = head_.backward(trace.readout_sum, d_embedding.transpose());
  const nn::RowVector d_readout = d_sum.row(0);
  nn::Matrix d_next;  // gradient w.r.t. the pooled output of the current block
  for (int i = 2; i >= 0; --i) {
    const auto b = static_cast<std::size_t>(i);
    nn::Matrix d_pooled = nn::readout_backward(trace.pooled_rows[b], trace.argmax[b], d_readout);
    if (d_next.size() > 0) d_pooled += d_next;
    const nn::Matrix d_conv = pool_[b].backward(trace.pool[b], d_pooled);
    d_next = sage_[b].backward(trace.sage[b], trace.adj[b], d_conv);
  }
}

nn::ParamRefs Encoder::params() {
  nn::ParamRefs refs;
  for (std::size_t i = 0; i < 3; ++i) {
    sage_[i].collect(refs);
    pool_[i].collect(refs);
  }
  head_.collect(refs);
  return refs;
}

nlohmann::json Encoder::to_json() {
  nlohmann::json j;
  j["config"] = {{"in_features", config_.in_features},
                 {"hidden", config_.hidden},
                 {"embed", config_.embed},
                 {"pool_ratio", config_.pool_ratio}};
  j["params"] = nn::params_to_json(params());
  return j;
}

Encoder Encoder::from_json(const nlohmann::json& j) {
  const auto& c = j.at("config");
  EncoderConfig cfg;
  cfg.in_features = c.at("in_features").get<std::size_t>();
  cfg.hidden = c.at("hidden").get<std::size_t>();
  cfg.embed = c.at("embed").get<std::size_t>();
  cfg.pool_ratio = c.at("pool_ratio").get<double>();
  Encoder e(cfg, 0);
  nn::params_from_json(e.params(), j.at("params"));
  return e;
}

}  // namespace lense
