#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "lense/dataset.hpp"
#include "lense/encoder.hpp"
#include "lense/features.hpp"
#include "lense/graph.hpp"
#include "lense/heuristics.hpp"
#include "lense/metrics.hpp"
#include "lense/neural.hpp"

namespace lense {

/// Encoder input spanning a whole graph (rows are dense vertex ids).
EncoderInput full_graph_input(const Graph& g, const FeatureTable& features);

struct ClassifierConfig {
  std::size_t in_features = 2;
  std::size_t hidden = 30;
  std::size_t epochs = 200;
  double lr = 1e-3;
};

/// Per-vertex solution-membership classifier: three GraphSAGE layers (the
/// encoder without pooling) and a linear unit read through a sigmoid.
class VertexClassifier {
 public:
  struct Trace {
    std::array<nn::SageLayer::Cache, 3> sage;
    nn::Matrix hidden;
  };

  VertexClassifier() = default;
  VertexClassifier(const ClassifierConfig& config, Seed seed);

  /// One logit per input row.
  nn::Vector logits(const EncoderInput& input, Trace* trace = nullptr) const;
  nn::Vector probabilities(const EncoderInput& input) const;
  void backward(const Trace& trace, const nn::Adjacency& adj, const nn::Vector& d_logits);

  nn::ParamRefs params();
  nlohmann::json to_json();
  static VertexClassifier from_json(const nlohmann::json& j);

 private:
  ClassifierConfig config_;
  std::array<nn::SageLayer, 3> sage_;
  nn::Linear head_;
};

/// Mean binary cross entropy over `positives` (target 1) and `negatives`
/// (target 0). With `accumulate`, adds its gradient to the classifier.
double classifier_loss(VertexClassifier& clf, const EncoderInput& input, std::span<const Vertex> positives,
                       std::span<const Vertex> negatives, bool accumulate);

struct ClassifierTrainResult {
  VertexClassifier classifier;
  std::vector<double> epoch_loss;
};

/// Each epoch draws b = |B| non-solution vertices uniformly without
/// replacement and takes one Adam step on the BCE over those 2b vertices.
/// Throws GenerationError when b > |V| - b.
ClassifierTrainResult train_vertex_classifier(const Graph& g, const FeatureTable& features, const VertexSet& solution,
                                              const ClassifierConfig& config, Seed seed);

/// Keeps the keep_k most probable vertices (ties to the lowest id) and returns
/// the induced subgraph. Throws DomainError when nothing is kept.
Subgraph gnn_rank_prune(const Graph& g, std::span<const double> probabilities, std::size_t keep_k);

/// Keeps every vertex with probability >= 0.5.
Subgraph gnn_threshold_prune(const Graph& g, std::span<const double> probabilities);

/// 1-based rank of each vertex by descending out-weight (degree when
/// unweighted), ties to the lowest id.
std::vector<std::size_t> gcomb_rank(const Graph& g);

struct GcombModel {
  std::vector<std::size_t> max_rank;            // r_{b'} for b' = 1..b
  std::vector<std::pair<double, double>> points;  // (b' / |V|, r_{b'} / |V|)

  /// Piecewise-linear interpolation; clamps outside the fitted range with a
  /// warning on stderr.
  double interpolate(double budget_fraction) const;
  nlohmann::json to_json() const;
  static GcombModel from_json(const nlohmann::json& j);
};

/// Prefix-max ranks of the given solutions (each in pick order) and their
/// normalized interpolation points.
GcombModel gcomb_model(std::span<const std::size_t> rank, std::span<const std::vector<Vertex>> solutions,
                       std::size_t b);

/// Runs the stochastic solver `runs` times with distinct seeds and records the
/// worst rank reached by each solution prefix.
GcombModel gcomb_fit(Problem problem, const Graph& g, std::size_t b, std::size_t runs, Seed seed,
                     const SolverOptions& opts = {});

/// Drops every vertex ranked beyond |V| * interpolate(b / |V|).
Subgraph gcomb_prune(const GcombModel& model, const Graph& g, std::size_t b);

/// Ratio of the reference solver on the pruned graph (scored on the full
/// graph) against the full-graph solution, plus P_V and P_E.
MetricsRow evaluate_pruned(const RatioContext& ctx, const Subgraph& pruned, const std::string& graph_name,
                           const std::string& method, Seed seed);

}  // namespace lense
