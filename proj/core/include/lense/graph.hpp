#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "lense/rng.hpp"

namespace lense {

using Vertex = std::uint32_t;
using OriginalId = std::int64_t;

struct Edge {
  Vertex src;
  Vertex dst;
  double weight;
};

/// Adjacency entry: the vertex on the other end and the index of the edge.
struct Arc {
  Vertex to;
  std::uint32_t edge;
};

/// Immutable adjacency structure over dense vertex ids 0..n-1.
///
/// Every vertex keeps the id it had in the source data (`original_id`), so
/// subgraphs and splits can always be mapped back. Undirected graphs store each
/// edge once; `out_arcs`, `in_arcs` and `neighbors` are then symmetric.
class Graph {
 public:
  Graph() = default;

  /// Builds a graph from dense edges. Self-loops are dropped, duplicate edges
  /// keep the first weight (for undirected graphs (u,v) and (v,u) coincide).
  /// Throws ValidationError on negative or non-finite weights and on edge
  /// endpoints outside `original_ids`.
  static Graph from_edges(bool directed, bool weighted, std::vector<OriginalId> original_ids,
                          std::span<const Edge> edges);

  bool directed() const noexcept { return directed_; }
  bool weighted() const noexcept { return weighted_; }
  std::size_t num_vertices() const noexcept { return original_ids_.size(); }
  std::size_t num_edges() const noexcept { return edges_.size(); }
  bool empty() const noexcept { return edges_.empty(); }

  std::span<const Edge> edges() const noexcept { return edges_; }
  const Edge& edge(std::uint32_t e) const { return edges_[e]; }

  std::span<const Arc> out_arcs(Vertex v) const;
  std::span<const Arc> in_arcs(Vertex v) const;

  /// Sorted, duplicate-free union of in- and out-neighbors.
  std::span<const Vertex> neighbors(Vertex v) const;
  std::size_t degree(Vertex v) const { return neighbors(v).size(); }
  double out_weight(Vertex v) const;
  std::size_t in_degree(Vertex v) const { return in_arcs(v).size(); }

  OriginalId original_id(Vertex v) const;
  std::span<const OriginalId> original_ids() const noexcept { return original_ids_; }
  std::optional<Vertex> find(OriginalId id) const;

  bool contains(Vertex v) const noexcept { return v < num_vertices(); }

  /// Copy of this graph with every edge weight replaced.
  Graph with_weights(std::span<const double> weights) const;

 private:
  void check_vertex(Vertex v) const;

  bool directed_ = false;
  bool weighted_ = false;
  std::vector<OriginalId> original_ids_;
  std::vector<Edge> edges_;
  std::vector<std::size_t> out_offsets_{0};
  std::vector<Arc> out_arcs_;
  std::vector<std::size_t> in_offsets_{0};
  std::vector<Arc> in_arcs_;
  std::vector<std::size_t> nbr_offsets_{0};
  std::vector<Vertex> nbrs_;
};

/// A graph carved out of a host graph. Local vertex i is host vertex host[i];
/// `host` is ascending, and the local graph carries the host's original ids.
struct Subgraph {
  Graph graph;
  std::vector<Vertex> host;

  /// Local id of a host vertex, if present.
  std::optional<Vertex> local(Vertex host_vertex) const;
};

/// Subgraph spanned by the given host edges; its vertex set is exactly their
/// endpoints.
Subgraph edge_subgraph(const Graph& g, std::span<const std::uint32_t> edge_ids);

/// Vertex-induced subgraph on `vertices` (any order, duplicates ignored).
Subgraph induced_subgraph(const Graph& g, std::span<const Vertex> vertices);

/// Reads a SNAP-style edge list. Lines starting with '#' are comments; every
/// other non-blank line is "u v" or "u v w". Dense ids follow ascending
/// original id. Without `weighted`, every edge gets weight 1.0.
Graph load_edge_list(const std::filesystem::path& path, bool directed, bool weighted);
Graph parse_edge_list(std::string_view text, bool directed, bool weighted);

void write_edge_list(const Graph& g, const std::filesystem::path& path);

/// JSON object mapping original id (as a string key) to dense id.
void write_id_map(const Graph& g, const std::filesystem::path& path);

/// Independent Bernoulli(train_fraction) draw per edge. Throws SplitError
/// when either side ends up empty.
std::pair<Graph, Graph> split_edges(const Graph& g, double train_fraction, Seed seed);

struct CentralityResult {
  std::vector<double> scores;
  std::size_t iterations = 0;
  bool converged = false;
};

/// Power iteration on the underlying undirected graph. Iterates with A + I so
/// bipartite components converge instead of oscillating; the eigenvectors are
/// those of A. Scores are nonnegative with unit 2-norm.
CentralityResult eigenvector_centrality(const Graph& g, double tol = 1e-10,
                                        std::size_t max_iter = 10000);

/// Preferential-attachment graph: starts from a star on m+1 vertices and
/// attaches each later vertex to m distinct existing vertices chosen with
/// probability proportional to degree.
Graph barabasi_albert(std::size_t n, std::size_t m, Seed seed);

}  // namespace lense
