#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "lense/graph.hpp"
#include "lense/problem.hpp"

namespace lense {

struct ColumnStats {
  double min = 0.0;
  double max = 0.0;
};

/// Raw vertex features of a host graph, min-max scaled.
///
/// Columns: neighbor count, eigenvector centrality and, for IM only, the sum
/// of outgoing edge weights. Rows are indexed by dense vertex id.
struct FeatureTable {
  Eigen::MatrixXd values;
  std::vector<ColumnStats> stats;

  std::size_t rows() const noexcept { return static_cast<std::size_t>(values.rows()); }
  std::size_t cols() const noexcept { return static_cast<std::size_t>(values.cols()); }

  /// Rows for the given vertices, in order.
  Eigen::MatrixXd gather(std::span<const Vertex> vertices) const;
};

std::size_t feature_count(Problem p) noexcept;

/// Unscaled feature columns of `g`.
Eigen::MatrixXd raw_features(const Graph& g, Problem p);

/// Fits min-max stats on `g` and scales. A constant column becomes all zeros
/// and a warning goes to stderr.
FeatureTable compute_features(const Graph& g, Problem p);

/// Scales with stats fitted elsewhere (e.g. the train graph). Values outside
/// the fitted range are not clipped.
FeatureTable compute_features(const Graph& g, Problem p, std::span<const ColumnStats> stats);

}  // namespace lense
