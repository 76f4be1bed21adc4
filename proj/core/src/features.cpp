#include "lense/features.hpp"

#include <iostream>

#include "lense/errors.hpp"

namespace lense {

Eigen::MatrixXd FeatureTable::gather(std::span<const Vertex> vertices) const {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(vertices.size()), values.cols());
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    if (vertices[i] >= rows()) throw LookupError("feature row out of range");
    out.row(static_cast<Eigen::Index>(i)) = values.row(vertices[i]);
  }
  return out;
}

std::size_t feature_count(Problem p) noexcept { return p == Problem::IM ? 3 : 2; }

Eigen::MatrixXd raw_features(const Graph& g, Problem p) {
  const auto n = static_cast<Eigen::Index>(g.num_vertices());
  Eigen::MatrixXd raw(n, static_cast<Eigen::Index>(feature_count(p)));
  const CentralityResult eig = eigenvector_centrality(g);
  for (Vertex v = 0; v < g.num_vertices(); ++v) {
    raw(v, 0) = static_cast<double>(g.degree(v));
    raw(v, 1) = eig.scores[v];
    if (p == Problem::IM) raw(v, 2) = g.out_weight(v);
  }
  return raw;
}

namespace {

FeatureTable scale(Eigen::MatrixXd raw, std::vector<ColumnStats> stats) {
  for (Eigen::Index c = 0; c < raw.cols(); ++c) {
    const ColumnStats& s = stats[static_cast<std::size_t>(c)];
    if (s.max > s.min) {
      raw.col(c) = (raw.col(c).array() - s.min) / (s.max - s.min);
    } else {
      raw.col(c).setZero();
    }
  }
  return FeatureTable{std::move(raw), std::move(stats)};
}

}  // namespace

FeatureTable compute_features(const Graph& g, Problem p) {
  Eigen::MatrixXd raw = raw_features(g, p);
  std::vector<ColumnStats> stats(static_cast<std::size_t>(raw.cols()));
  for (Eigen::Index c = 0; c < raw.cols(); ++c) {
    if (raw.rows() > 0) stats[static_cast<std::size_t>(c)] = {raw.col(c).minCoeff(), raw.col(c).maxCoeff()};
    if (!(stats[static_cast<std::size_t>(c)].max > stats[static_cast<std::size_t>(c)].min)) {
      std::cerr << "warning: feature column " << c << " is constant; set to 0\n";
    }
  }
  return scale(std::move(raw), std::move(stats));
}

FeatureTable compute_features(const Graph& g, Problem p, std::span<const ColumnStats> stats) {
  if (stats.size() != feature_count(p)) throw ValidationError("feature stats have the wrong column count");
  return scale(raw_features(g, p), std::vector<ColumnStats>(stats.begin(), stats.end()));
}

}  // namespace lense
