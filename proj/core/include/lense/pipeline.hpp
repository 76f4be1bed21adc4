#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "lense/agent.hpp"
#include "lense/baselines.hpp"
#include "lense/config.hpp"
#include "lense/dataset.hpp"
#include "lense/encoder.hpp"
#include "lense/encoder_training.hpp"
#include "lense/features.hpp"
#include "lense/graph.hpp"
#include "lense/heuristics.hpp"
#include "lense/metrics.hpp"

namespace lense {

enum class FeatureNorm { Train, Self };

/// Every knob of one experiment, read from a flat key=value config.
struct PipelineConfig {
  std::string graph_name = "graph";
  std::string graph_path;  // empty: generate a Barabasi-Albert graph
  std::size_t ba_vertices = 2000;
  std::size_t ba_edges_per_vertex = 4;
  bool directed = false;
  bool weighted = false;
  double train_fraction = 0.3;

  Problem problem = Problem::MVC;
  std::size_t budget = 100;
  std::size_t n_sim = 1000;
  std::size_t n_rr = 10000;

  FeatureNorm feature_norm = FeatureNorm::Train;
  DatasetConfig dataset;
  EncoderConfig encoder;
  EncoderTrainConfig encoder_train;
  double beta = 50.0;
  AgentConfig agent;
  std::size_t test_steps = 2000;
  std::size_t test_episodes = 10;

  ClassifierConfig classifier;
  std::size_t gcomb_runs = 10;
  std::vector<std::size_t> report_budgets{1, 10, 25, 50, 75, 100};

  Seed seed = 0;
  std::size_t jobs = 1;

  static PipelineConfig from_config(const Config& c);
  /// Every key from_config understands.
  static const std::set<std::string>& known_keys();
};

/// Loaded or generated host graph, before splitting.
Graph load_host_graph(const PipelineConfig& cfg);

/// Graph as the problem sees it: unweighted IM graphs get weighted-cascade
/// probabilities (computed on the graph passed in, i.e. after splitting).
Graph problem_graph(Graph g, const PipelineConfig& cfg);

/// Whether split graphs on disk carry a weight column.
bool artifact_weighted(const PipelineConfig& cfg);

/// Reference solution and scoring context of a graph.
struct Reference {
  Solution solution;
  RatioContext context;
};

Reference make_reference(const Graph& g, const PipelineConfig& cfg, std::size_t budget);

/// Feature table of `g`: scaled with its own stats or with the train graph's.
FeatureTable pipeline_features(const Graph& g, const FeatureTable& train_features, const PipelineConfig& cfg);

std::vector<EncoderInput> dataset_inputs(const Graph& host, const FeatureTable& features,
                                         const std::vector<LabeledSubgraph>& data);
std::vector<int> dataset_labels(const std::vector<LabeledSubgraph>& data);

Embedder make_embedder(const Encoder& encoder, const FeatureTable& features);

/// Per-episode results of test navigation on one graph.
struct EpisodeResult {
  VertexSet best;
  double ratio = 0.0;
  double p_v = 0.0;
  double p_e = 0.0;
  double initial_distance = 0.0;
  double final_distance = 0.0;
  double best_distance = 0.0;
  double seconds = 0.0;
};

std::vector<EpisodeResult> score_episodes(const NavigationResult& nav, const RatioContext& ctx);

/// Aggregated MetricsRow over episodes (ratio mean and standard error).
MetricsRow summarize_episodes(const std::vector<EpisodeResult>& episodes, const PipelineConfig& cfg,
                              const std::string& method, std::size_t budget);

}  // namespace lense
