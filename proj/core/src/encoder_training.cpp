#include "lense/encoder_training.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>

#include "lense/errors.hpp"

namespace lense {

EncoderLoss parse_encoder_loss(std::string_view name) {
  if (name == "infonce" || name == "info_nce") return EncoderLoss::InfoNce;
  if (name == "cross_entropy" || name == "ce") return EncoderLoss::CrossEntropy;
  if (name == "ordinal") return EncoderLoss::Ordinal;
  throw ConfigError("unknown encoder loss '" + std::string(name) + "'");
}

namespace {

struct ClassIndex {
  int classes = 0;
  std::vector<std::vector<std::size_t>> members;  // by class - 1
  std::vector<std::vector<std::size_t>> others;   // everything not in the class
};

ClassIndex index_classes(const std::vector<int>& labels) {
  ClassIndex idx;
  for (int l : labels) {
    if (l < 1) throw DataError("labels must be classes 1..K");
    idx.classes = std::max(idx.classes, l);
  }
  idx.members.resize(static_cast<std::size_t>(idx.classes));
  idx.others.resize(static_cast<std::size_t>(idx.classes));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    for (int c = 1; c <= idx.classes; ++c) {
      (labels[i] == c ? idx.members : idx.others)[static_cast<std::size_t>(c - 1)].push_back(i);
    }
  }
  for (int c = 1; c <= idx.classes; ++c) {
    if (idx.members[static_cast<std::size_t>(c - 1)].size() < 2) {
      throw ConfigError("class " + std::to_string(c) + " has fewer than 2 samples");
    }
  }
  return idx;
}

struct Query {
  std::size_t anchor = 0;
  std::size_t positive = 0;
  std::vector<std::size_t> negatives;
};

Query draw_query(std::size_t anchor, int label, const ClassIndex& idx, std::size_t negatives, Rng& rng) {
  Query q;
  q.anchor = anchor;
  const auto& same = idx.members[static_cast<std::size_t>(label - 1)];
  do {
    q.positive = same[uniform_index(rng, same.size())];
  } while (q.positive == anchor);
  const auto& other = idx.others[static_cast<std::size_t>(label - 1)];
  for (std::size_t i = 0; i < negatives; ++i) q.negatives.push_back(other[uniform_index(rng, other.size())]);
  return q;
}

}  // namespace

EncoderTrainResult train_encoder(const std::vector<EncoderInput>& inputs, const std::vector<int>& labels,
                                 const EncoderConfig& encoder_config, const EncoderTrainConfig& config, Seed seed) {
  if (inputs.size() != labels.size() || inputs.empty()) throw DataError("inputs and labels must be non-empty and aligned");
  if (config.batch == 0) throw ConfigError("batch size must be positive");
  const ClassIndex idx = index_classes(labels);

  EncoderTrainResult result;
  result.encoder = Encoder(encoder_config, seed);
  nn::ParamRefs params = result.encoder.params();
  if (config.loss != EncoderLoss::InfoNce) {
    Rng head_rng = make_rng(seed, 0x4ead);
    result.class_head.emplace("classifier.head", static_cast<Eigen::Index>(encoder_config.embed), idx.classes);
    result.class_head->init(head_rng);
    result.class_head->collect(params);
  }
  nn::Adam adam(nn::AdamConfig{.lr = config.lr});
  Rng rng = make_rng(seed, 0x7a1);

  double best = std::numeric_limits<double>::infinity();
  std::size_t stale = 0;
  std::vector<std::size_t> order(inputs.size());
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[uniform_index(rng, i)]);

    double epoch_total = 0.0;
    for (std::size_t start = 0; start < order.size(); start += config.batch) {
      const std::size_t end = std::min(order.size(), start + config.batch);
      const double scale = 1.0 / static_cast<double>(end - start);

      std::vector<Query> queries;
      std::map<std::size_t, std::size_t> slot;  // sample -> position in `traces`
      for (std::size_t k = start; k < end; ++k) {
        const std::size_t a = order[k];
        Query q = config.loss == EncoderLoss::InfoNce ? draw_query(a, labels[a], idx, config.negatives, rng)
                                                      : Query{a, a, {}};
        slot.emplace(q.anchor, 0);
        if (config.loss == EncoderLoss::InfoNce) {
          slot.emplace(q.positive, 0);
          for (std::size_t n : q.negatives) slot.emplace(n, 0);
        }
        queries.push_back(std::move(q));
      }
      std::vector<Encoder::Trace> traces(slot.size());
      std::vector<nn::Vector> emb(slot.size());
      std::vector<nn::Vector> d_emb(slot.size());
      {
        std::size_t s = 0;
        for (auto& [sample, pos] : slot) {
          pos = s;
          emb[s] = result.encoder.encode(inputs[sample], &traces[s]).embedding;
          d_emb[s] = nn::Vector::Zero(emb[s].size());
          ++s;
        }
      }

      nn::zero_grads(params);
      double batch_loss = 0.0;
      for (const Query& q : queries) {
        const std::size_t sa = slot.at(q.anchor);
        if (config.loss == EncoderLoss::InfoNce) {
          std::vector<nn::Vector> negs;
          for (std::size_t n : q.negatives) negs.push_back(emb[slot.at(n)]);
          nn::InfoNceGrad g;
          batch_loss += nn::info_nce(emb[sa], emb[slot.at(q.positive)], negs, config.tau, &g);
          d_emb[sa] += scale * g.query;
          d_emb[slot.at(q.positive)] += scale * g.positive;
          for (std::size_t i = 0; i < q.negatives.size(); ++i) d_emb[slot.at(q.negatives[i])] += scale * g.negatives[i];
        } else {
          const nn::Matrix x = emb[sa].transpose();
          const nn::Vector logits = result.class_head->forward(x).row(0).transpose();
          nn::Vector d_logits;
          if (config.loss == EncoderLoss::CrossEntropy) {
            batch_loss += nn::cross_entropy(logits, labels[q.anchor], &d_logits);
          } else {
            nn::Vector pred = logits.unaryExpr([](double z) { return nn::sigmoid(z); });
            nn::Vector d_pred;
            batch_loss += nn::ordinal_loss(pred, labels[q.anchor], &d_pred);
            d_logits = d_pred.cwiseProduct(pred.cwiseProduct((1.0 - pred.array()).matrix()));
          }
          const nn::Matrix dx = result.class_head->backward(x, scale * d_logits.transpose());
          d_emb[sa] += dx.row(0).transpose();
        }
      }
      for (const auto& [sample, pos] : slot) result.encoder.backward(traces[pos], d_emb[pos]);
      adam.step(params);
      epoch_total += batch_loss;
    }
    const double mean = epoch_total / static_cast<double>(inputs.size());
    result.epoch_loss.push_back(mean);
    if (mean < best - config.min_improvement) {
      best = mean;
      stale = 0;
    } else if (++stale >= config.patience) {
      break;
    }
  }
  return result;
}

double evaluate_info_nce(const Encoder& encoder, const std::vector<EncoderInput>& inputs,
                         const std::vector<int>& labels, const EncoderTrainConfig& config, Seed seed) {
  const ClassIndex idx = index_classes(labels);
  std::vector<nn::Vector> emb;
  emb.reserve(inputs.size());
  for (const auto& in : inputs) emb.push_back(encoder.encode(in).embedding);
  Rng rng = make_rng(seed, 0xe7a1);
  double total = 0.0;
  for (std::size_t a = 0; a < inputs.size(); ++a) {
    const Query q = draw_query(a, labels[a], idx, config.negatives, rng);
    std::vector<nn::Vector> negs;
    for (std::size_t n : q.negatives) negs.push_back(emb[n]);
    total += nn::info_nce(emb[a], emb[q.positive], negs, config.tau);
  }
  return total / static_cast<double>(inputs.size());
}

GoalPoint compute_goal(const Encoder& encoder, const std::vector<EncoderInput>& inputs,
                       const std::vector<int>& labels, double beta) {
  GoalPoint goal;
  goal.beta = beta;
  std::size_t count = 0;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (labels[i] != 1) continue;
    const nn::Vector e = encoder.encode(inputs[i]).embedding;
    if (count == 0) goal.center = nn::Vector::Zero(e.size());
    goal.center += e;
    ++count;
  }
  if (count == 0) throw DataError("goal needs at least one class-1 subgraph");
  goal.center /= static_cast<double>(count);
  return goal;
}

}  // namespace lense
