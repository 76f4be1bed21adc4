#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <vector>

#include "lense/graph.hpp"
#include "lense/heuristics.hpp"
#include "lense/problems.hpp"

namespace lense {

/// Quality class of a ratio. K = 4: 1 on (0.95, inf), 2 on (0.8, 0.95],
/// 3 on (0.6, 0.8], 4 on [0, 0.6]. K = 3 merges the last two classes.
int label_map(double ratio, int classes = 4);

/// Everything needed to score a candidate subgraph against the full graph.
struct RatioContext {
  const Graph* host = nullptr;
  ProblemSpec objective;     // scoring of the extracted solution on the host
  SolverOptions solver;      // heuristic H
  std::size_t budget = 0;
  double full_score = 0.0;   // f(H(host))
};

/// f(H(S)) / f(H(G)) where H runs on S = induce_subgraph(host, x) and the
/// resulting vertices are scored on the host graph.
double subgraph_ratio(const RatioContext& ctx, const VertexSet& x);

/// Same ratio for an already-built subgraph (e.g. a pruned graph).
double subgraph_ratio(const RatioContext& ctx, const Subgraph& s);

struct LabeledSubgraph {
  VertexSet x;  // host vertices; the subgraph is induce_subgraph(host, x)
  double ratio = 0.0;
  int label = 0;
};

struct DatasetConfig {
  std::size_t per_class = 100;
  std::size_t subset_size = 300;  // M
  int classes = 4;                // K
  std::size_t max_attempts = 20000;
};

/// Balanced dataset of labelled subgraphs. Each draw targets the emptiest
/// class: it seeds ceil(phi_c * b) known solution vertices into X and fills
/// the rest uniformly, then keeps the sample if its actual class still has
/// room. phi_c starts at (1.0, 0.6, 0.3, 0.0) and is bisected on misses.
/// Throws GenerationError naming the class that never filled.
std::vector<LabeledSubgraph> generate_dataset(const RatioContext& ctx, const VertexSet& solution,
                                              const DatasetConfig& config, Seed seed);

/// Recomputes the ratio of every `stride`-th sample and returns how many
/// labels no longer match.
std::size_t audit_dataset(const RatioContext& ctx, const std::vector<LabeledSubgraph>& data, std::size_t stride,
                          int classes);

/// JSON lines {X: [original ids], ratio, label}.
void write_dataset(const Graph& host, const std::vector<LabeledSubgraph>& data, const std::filesystem::path& path);
std::vector<LabeledSubgraph> read_dataset(const Graph& host, const std::filesystem::path& path);

}  // namespace lense
