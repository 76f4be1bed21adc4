#include "lense/graph.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <string>
#include <map>
#include <sstream>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "lense/errors.hpp"

namespace lense {

namespace {

std::uint64_t edge_key(Vertex u, Vertex v, bool directed) {
  if (!directed && u > v) std::swap(u, v);
  return (static_cast<std::uint64_t>(u) << 32) | v;
}

void build_csr(std::size_t n, const std::vector<std::pair<Vertex, Arc>>& entries,
               std::vector<std::size_t>& offsets, std::vector<Arc>& arcs) {
  offsets.assign(n + 1, 0);
  for (const auto& [from, arc] : entries) ++offsets[from + 1];
  for (std::size_t i = 0; i < n; ++i) offsets[i + 1] += offsets[i];
  arcs.resize(entries.size());
  std::vector<std::size_t> cursor(offsets.begin(), offsets.end() - 1);
  for (const auto& [from, arc] : entries) arcs[cursor[from]++] = arc;
  for (std::size_t v = 0; v < n; ++v) {
    std::sort(arcs.begin() + offsets[v], arcs.begin() + offsets[v + 1],
              [](const Arc& a, const Arc& b) { return a.to != b.to ? a.to < b.to : a.edge < b.edge; });
  }
}

}  // namespace

Graph Graph::from_edges(bool directed, bool weighted, std::vector<OriginalId> original_ids,
                        std::span<const Edge> edges) {
  Graph g;
  g.directed_ = directed;
  g.weighted_ = weighted;
  g.original_ids_ = std::move(original_ids);
  const std::size_t n = g.original_ids_.size();

  std::unordered_set<std::uint64_t> seen;
  seen.reserve(edges.size() * 2);
  for (const Edge& e : edges) {
    if (e.src >= n || e.dst >= n) throw ValidationError("edge endpoint outside vertex set");
    if (!std::isfinite(e.weight) || e.weight < 0.0) throw ValidationError("edge weight must be finite and nonnegative");
    if (e.src == e.dst) continue;
    if (!seen.insert(edge_key(e.src, e.dst, directed)).second) continue;
    g.edges_.push_back(e);
  }
  if (g.edges_.size() > std::numeric_limits<std::uint32_t>::max()) throw SizeError("too many edges");

  std::vector<std::pair<Vertex, Arc>> out, in;
  out.reserve(g.edges_.size() * (directed ? 1 : 2));
  for (std::uint32_t i = 0; i < g.edges_.size(); ++i) {
    const Edge& e = g.edges_[i];
    out.push_back({e.src, Arc{e.dst, i}});
    if (directed) {
      in.push_back({e.dst, Arc{e.src, i}});
    } else {
      out.push_back({e.dst, Arc{e.src, i}});
    }
  }
  build_csr(n, out, g.out_offsets_, g.out_arcs_);
  if (directed) {
    build_csr(n, in, g.in_offsets_, g.in_arcs_);
  } else {
    g.in_offsets_ = g.out_offsets_;
    g.in_arcs_ = g.out_arcs_;
  }

  g.nbr_offsets_.assign(n + 1, 0);
  g.nbrs_.clear();
  std::vector<Vertex> scratch;
  for (Vertex v = 0; v < n; ++v) {
    scratch.clear();
    for (std::size_t k = g.out_offsets_[v]; k < g.out_offsets_[v + 1]; ++k) scratch.push_back(g.out_arcs_[k].to);
    if (directed) {
      for (std::size_t k = g.in_offsets_[v]; k < g.in_offsets_[v + 1]; ++k) scratch.push_back(g.in_arcs_[k].to);
    }
    std::sort(scratch.begin(), scratch.end());
    scratch.erase(std::unique(scratch.begin(), scratch.end()), scratch.end());
    g.nbrs_.insert(g.nbrs_.end(), scratch.begin(), scratch.end());
    g.nbr_offsets_[v + 1] = g.nbrs_.size();
  }
  return g;
}

void Graph::check_vertex(Vertex v) const {
  if (v >= num_vertices()) throw LookupError("unknown vertex " + std::to_string(v));
}

std::span<const Arc> Graph::out_arcs(Vertex v) const {
  check_vertex(v);
  return {out_arcs_.data() + out_offsets_[v], out_offsets_[v + 1] - out_offsets_[v]};
}

std::span<const Arc> Graph::in_arcs(Vertex v) const {
  check_vertex(v);
  return {in_arcs_.data() + in_offsets_[v], in_offsets_[v + 1] - in_offsets_[v]};
}

std::span<const Vertex> Graph::neighbors(Vertex v) const {
  check_vertex(v);
  return {nbrs_.data() + nbr_offsets_[v], nbr_offsets_[v + 1] - nbr_offsets_[v]};
}

double Graph::out_weight(Vertex v) const {
  double total = 0.0;
  for (const Arc& a : out_arcs(v)) total += edges_[a.edge].weight;
  return total;
}

OriginalId Graph::original_id(Vertex v) const {
  check_vertex(v);
  return original_ids_[v];
}

std::optional<Vertex> Graph::find(OriginalId id) const {
  // Loaded graphs and all derived subgraphs keep original ids ascending.
  auto it = std::lower_bound(original_ids_.begin(), original_ids_.end(), id);
  if (it != original_ids_.end() && *it == id) return static_cast<Vertex>(it - original_ids_.begin());
  auto lin = std::find(original_ids_.begin(), original_ids_.end(), id);
  if (lin == original_ids_.end()) return std::nullopt;
  return static_cast<Vertex>(lin - original_ids_.begin());
}

Graph Graph::with_weights(std::span<const double> weights) const {
  if (weights.size() != edges_.size()) throw ValidationError("weight vector length differs from edge count");
  std::vector<Edge> e(edges_);
  for (std::size_t i = 0; i < e.size(); ++i) e[i].weight = weights[i];
  return from_edges(directed_, true, original_ids_, e);
}

std::optional<Vertex> Subgraph::local(Vertex host_vertex) const {
  auto it = std::lower_bound(host.begin(), host.end(), host_vertex);
  if (it == host.end() || *it != host_vertex) return std::nullopt;
  return static_cast<Vertex>(it - host.begin());
}

Subgraph edge_subgraph(const Graph& g, std::span<const std::uint32_t> edge_ids) {
  Subgraph s;
  s.host.reserve(edge_ids.size() * 2);
  for (std::uint32_t e : edge_ids) {
    s.host.push_back(g.edge(e).src);
    s.host.push_back(g.edge(e).dst);
  }
  std::sort(s.host.begin(), s.host.end());
  s.host.erase(std::unique(s.host.begin(), s.host.end()), s.host.end());

  std::vector<OriginalId> ids;
  ids.reserve(s.host.size());
  for (Vertex v : s.host) ids.push_back(g.original_id(v));
  std::vector<Edge> edges;
  edges.reserve(edge_ids.size());
  for (std::uint32_t e : edge_ids) {
    const Edge& he = g.edge(e);
    edges.push_back({*s.local(he.src), *s.local(he.dst), he.weight});
  }
  s.graph = Graph::from_edges(g.directed(), g.weighted(), std::move(ids), edges);
  return s;
}

Subgraph induced_subgraph(const Graph& g, std::span<const Vertex> vertices) {
  Subgraph s;
  s.host.assign(vertices.begin(), vertices.end());
  std::sort(s.host.begin(), s.host.end());
  s.host.erase(std::unique(s.host.begin(), s.host.end()), s.host.end());
  for (Vertex v : s.host) {
    if (!g.contains(v)) throw LookupError("unknown vertex " + std::to_string(v));
  }
  std::vector<char> keep(g.num_vertices(), 0);
  for (Vertex v : s.host) keep[v] = 1;

  std::vector<std::uint32_t> chosen;
  for (Vertex v : s.host) {
    for (const Arc& a : g.out_arcs(v)) {
      if (keep[a.to]) chosen.push_back(a.edge);
    }
  }
  std::sort(chosen.begin(), chosen.end());
  chosen.erase(std::unique(chosen.begin(), chosen.end()), chosen.end());

  std::vector<OriginalId> ids;
  for (Vertex v : s.host) ids.push_back(g.original_id(v));
  std::vector<Edge> edges;
  edges.reserve(chosen.size());
  for (std::uint32_t e : chosen) {
    const Edge& he = g.edge(e);
    edges.push_back({*s.local(he.src), *s.local(he.dst), he.weight});
  }
  s.graph = Graph::from_edges(g.directed(), g.weighted(), std::move(ids), edges);
  return s;
}

Graph parse_edge_list(std::string_view text, bool directed, bool weighted) {
  struct RawEdge {
    OriginalId u, v;
    double w;
  };
  std::vector<RawEdge> raw;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    std::vector<std::string_view> tokens;
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
      std::size_t j = i;
      while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
      if (j > i) tokens.push_back(line.substr(i, j - i));
      i = j;
    }
    if (tokens.empty()) continue;
    if (tokens.front().front() == '#') continue;
    if (tokens.size() < 2 || tokens.size() > 3) {
      throw ParseError(line_no, "expected 'u v' or 'u v w', got " + std::to_string(tokens.size()) + " fields");
    }
    auto parse_id = [&](std::string_view tok) {
      OriginalId id{};
      auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), id);
      if (ec != std::errc{} || p != tok.data() + tok.size()) {
        throw ParseError(line_no, "bad vertex id '" + std::string(tok) + "'");
      }
      return id;
    };
    RawEdge e{parse_id(tokens[0]), parse_id(tokens[1]), 1.0};
    if (tokens.size() == 3 && weighted) {
      // from_chars for double is not available on every libstdc++ we target.
      std::string tok(tokens[2]);
      std::size_t used = 0;
      try {
        e.w = std::stod(tok, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != tok.size()) throw ParseError(line_no, "bad weight '" + tok + "'");
      if (!(e.w >= 0.0) || !std::isfinite(e.w)) {
        throw ValidationError("line " + std::to_string(line_no) + ": weight must be finite and nonnegative");
      }
    }
    raw.push_back(e);
  }

  std::vector<OriginalId> ids;
  ids.reserve(raw.size() * 2);
  for (const RawEdge& e : raw) {
    if (e.u == e.v) continue;
    ids.push_back(e.u);
    ids.push_back(e.v);
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  auto dense = [&](OriginalId id) {
    return static_cast<Vertex>(std::lower_bound(ids.begin(), ids.end(), id) - ids.begin());
  };
  std::vector<Edge> edges;
  edges.reserve(raw.size());
  for (const RawEdge& e : raw) {
    if (e.u == e.v) continue;
    edges.push_back({dense(e.u), dense(e.v), e.w});
  }
  return Graph::from_edges(directed, weighted, std::move(ids), edges);
}

Graph load_edge_list(const std::filesystem::path& path, bool directed, bool weighted) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingArtifactError("cannot open edge list " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_edge_list(buf.str(), directed, weighted);
}

void write_edge_list(const Graph& g, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << "# " << (g.directed() ? "directed" : "undirected") << ' ' << g.num_vertices() << " vertices "
      << g.num_edges() << " edges\n";
  char buf[64];
  for (const Edge& e : g.edges()) {
    out << g.original_id(e.src) << ' ' << g.original_id(e.dst);
    if (g.weighted()) {
      std::snprintf(buf, sizeof buf, " %.17g", e.weight);
      out << buf;
    }
    out << '\n';
  }
}

void write_id_map(const Graph& g, const std::filesystem::path& path) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (Vertex v = 0; v < g.num_vertices(); ++v) j[std::to_string(g.original_id(v))] = v;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << j.dump(1) << '\n';
}

std::pair<Graph, Graph> split_edges(const Graph& g, double train_fraction, Seed seed) {
  if (g.empty()) throw SplitError("cannot split an empty graph");
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw ValidationError("train_fraction must lie in (0,1)");
  Rng rng = make_rng(seed, 0x5917);
  std::vector<std::uint32_t> train, test;
  for (std::uint32_t e = 0; e < g.num_edges(); ++e) {
    (uniform01(rng) < train_fraction ? train : test).push_back(e);
  }
  if (train.empty() || test.empty()) throw SplitError("edge split left one side empty; retry with another seed");
  return {edge_subgraph(g, train).graph, edge_subgraph(g, test).graph};
}

CentralityResult eigenvector_centrality(const Graph& g, double tol, std::size_t max_iter) {
  const std::size_t n = g.num_vertices();
  CentralityResult r;
  if (n == 0) {
    r.converged = true;
    return r;
  }
  std::vector<double> x(n, 1.0 / std::sqrt(static_cast<double>(n))), next(n);
  for (r.iterations = 1; r.iterations <= max_iter; ++r.iterations) {
    double norm = 0.0;
    for (Vertex v = 0; v < n; ++v) {
      double s = x[v];
      for (Vertex u : g.neighbors(v)) s += x[u];
      next[v] = s;
      norm += s * s;
    }
    norm = std::sqrt(norm);
    double diff = 0.0;
    for (std::size_t v = 0; v < n; ++v) {
      next[v] /= norm;
      diff += (next[v] - x[v]) * (next[v] - x[v]);
    }
    x.swap(next);
    if (std::sqrt(diff) < tol) {
      r.converged = true;
      break;
    }
  }
  if (!r.converged) r.iterations = max_iter;
  r.scores = std::move(x);
  return r;
}

Graph barabasi_albert(std::size_t n, std::size_t m, Seed seed) {
  if (m < 1 || n <= m) throw ValidationError("barabasi_albert requires 1 <= m < n");
  Rng rng = make_rng(seed, 0xba);
  std::vector<Edge> edges;
  // Every edge contributes both endpoints; sampling a uniform entry is
  // sampling proportional to degree.
  std::vector<Vertex> endpoints;
  for (Vertex v = 1; v <= m; ++v) {
    edges.push_back({0, v, 1.0});
    endpoints.push_back(0);
    endpoints.push_back(v);
  }
  std::vector<Vertex> targets;
  for (Vertex v = static_cast<Vertex>(m + 1); v < n; ++v) {
    targets.clear();
    while (targets.size() < m) {
      Vertex t = endpoints[uniform_index(rng, endpoints.size())];
      if (std::find(targets.begin(), targets.end(), t) == targets.end()) targets.push_back(t);
    }
    for (Vertex t : targets) {
      edges.push_back({t, v, 1.0});
      endpoints.push_back(t);
      endpoints.push_back(v);
    }
  }
  std::vector<OriginalId> ids(n);
  for (std::size_t i = 0; i < n; ++i) ids[i] = static_cast<OriginalId>(i);
  return Graph::from_edges(false, false, std::move(ids), edges);
}

}  // namespace lense
