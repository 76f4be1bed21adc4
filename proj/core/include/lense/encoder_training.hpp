#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "lense/encoder.hpp"
#include "lense/nav_env.hpp"
#include "lense/neural.hpp"

namespace lense {

enum class EncoderLoss { InfoNce, CrossEntropy, Ordinal };

EncoderLoss parse_encoder_loss(std::string_view name);

struct EncoderTrainConfig {
  EncoderLoss loss = EncoderLoss::InfoNce;
  double tau = 0.1;
  double lr = 1e-3;
  std::size_t batch = 128;
  std::size_t epochs = 100;
  std::size_t negatives = 6;    // per query; the sum in the loss has this many terms
  std::size_t patience = 10;    // early stop after this many epochs without improvement
  double min_improvement = 1e-4;
};

struct EncoderTrainResult {
  Encoder encoder;
  std::vector<double> epoch_loss;
  /// Classification head (d -> K) for the cross-entropy and ordinal variants.
  std::optional<nn::Linear> class_head;
};

/// Contrastive (or supervised, per config) training over a labelled set of
/// encoder inputs. Labels are classes 1..K. Queries are visited in a seeded
/// shuffled order; each takes one positive from its own class (never itself)
/// and `negatives` draws from the other classes, all with replacement.
/// Throws ConfigError when a class has fewer than two samples.
EncoderTrainResult train_encoder(const std::vector<EncoderInput>& inputs, const std::vector<int>& labels,
                                 const EncoderConfig& encoder_config, const EncoderTrainConfig& config, Seed seed);

/// Mean InfoNCE loss of one pass with fixed sampling; no parameter update.
double evaluate_info_nce(const Encoder& encoder, const std::vector<EncoderInput>& inputs,
                         const std::vector<int>& labels, const EncoderTrainConfig& config, Seed seed);

/// Centroid of the class-1 embeddings.
GoalPoint compute_goal(const Encoder& encoder, const std::vector<EncoderInput>& inputs,
                       const std::vector<int>& labels, double beta);

}  // namespace lense
