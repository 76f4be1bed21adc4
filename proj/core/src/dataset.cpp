#include "lense/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "lense/errors.hpp"
#include "lense/nav_env.hpp"

namespace lense {

int label_map(double ratio, int classes) {
  if (!(ratio >= 0.0)) throw DomainError("ratio must be nonnegative");
  if (classes != 3 && classes != 4) throw ConfigError("label mapping supports K = 3 or K = 4");
  if (ratio > 0.95) return 1;
  if (ratio > 0.8) return 2;
  if (classes == 3 || ratio > 0.6) return 3;
  return 4;
}

double subgraph_ratio(const RatioContext& ctx, const Subgraph& s) {
  const Solution local = solve(ctx.objective.kind, s.graph, ctx.budget, ctx.solver);
  std::vector<Vertex> picks;
  picks.reserve(local.picks.size());
  for (Vertex v : local.picks) picks.push_back(s.host[v]);
  return solution_ratio(objective(ctx.objective, *ctx.host, picks), ctx.full_score);
}

double subgraph_ratio(const RatioContext& ctx, const VertexSet& x) {
  return subgraph_ratio(ctx, induce_subgraph(*ctx.host, x));
}

namespace {

VertexSet draw_seeded(const Graph& g, const VertexSet& solution, std::size_t seeded, std::size_t m, Rng& rng) {
  std::vector<Vertex> sol(solution.begin(), solution.end());
  for (std::size_t i = 0; i < seeded; ++i) {
    std::swap(sol[i], sol[i + uniform_index(rng, sol.size() - i)]);
  }
  std::vector<char> taken(g.num_vertices(), 0);
  std::vector<Vertex> x(sol.begin(), sol.begin() + static_cast<std::ptrdiff_t>(seeded));
  for (Vertex v : x) taken[v] = 1;
  // Uniform fill by rejection: the set is small relative to |V|.
  while (x.size() < m) {
    const auto v = static_cast<Vertex>(uniform_index(rng, g.num_vertices()));
    if (taken[v]) continue;
    taken[v] = 1;
    x.push_back(v);
  }
  return make_vertex_set(x);
}

}  // namespace

std::vector<LabeledSubgraph> generate_dataset(const RatioContext& ctx, const VertexSet& solution,
                                              const DatasetConfig& config, Seed seed) {
  const Graph& g = *ctx.host;
  const auto k = static_cast<std::size_t>(config.classes);
  if (config.subset_size > g.num_vertices()) throw ConfigError("subset size M exceeds the train graph");
  if (solution.size() > config.subset_size) throw ConfigError("subset size M must be at least the budget");
  if (config.per_class == 0) throw ConfigError("per_class must be positive");
  label_map(0.0, config.classes);

  std::vector<double> phi = config.classes == 4 ? std::vector<double>{1.0, 0.6, 0.3, 0.0}
                                                : std::vector<double>{1.0, 0.6, 0.0};
  std::vector<double> lo(k, 0.0), hi(k, 1.0);
  std::vector<std::vector<LabeledSubgraph>> bins(k);
  Rng rng = make_rng(seed, 0xda7a);

  for (std::size_t attempt = 0; attempt < config.max_attempts; ++attempt) {
    std::size_t target = k;
    for (std::size_t c = 0; c < k; ++c) {
      if (bins[c].size() < config.per_class && (target == k || bins[c].size() < bins[target].size())) target = c;
    }
    if (target == k) break;

    const auto seeded = static_cast<std::size_t>(std::ceil(phi[target] * static_cast<double>(solution.size()) - 1e-9));
    LabeledSubgraph sample;
    sample.x = draw_seeded(g, solution, std::min(seeded, solution.size()), config.subset_size, rng);
    sample.ratio = subgraph_ratio(ctx, sample.x);
    sample.label = label_map(sample.ratio, config.classes);
    const auto got = static_cast<std::size_t>(sample.label - 1);

    if (got != target) {
      // Bisect the seeding fraction of the class we aimed for.
      if (got > target) {
        lo[target] = phi[target];
        if (hi[target] - lo[target] < 1e-3) hi[target] = std::min(1.0, hi[target] + 0.1);
      } else {
        hi[target] = phi[target];
        if (hi[target] - lo[target] < 1e-3) lo[target] = std::max(0.0, lo[target] - 0.1);
      }
      phi[target] = 0.5 * (lo[target] + hi[target]);
    }
    if (bins[got].size() < config.per_class) bins[got].push_back(std::move(sample));
  }

  std::vector<LabeledSubgraph> out;
  for (std::size_t c = 0; c < k; ++c) {
    if (bins[c].size() < config.per_class) {
      throw GenerationError("class " + std::to_string(c + 1) + " only reached " + std::to_string(bins[c].size()) +
                            "/" + std::to_string(config.per_class) + " samples after " +
                            std::to_string(config.max_attempts) + " attempts");
    }
    for (auto& s : bins[c]) out.push_back(std::move(s));
  }
  return out;
}

std::size_t audit_dataset(const RatioContext& ctx, const std::vector<LabeledSubgraph>& data, std::size_t stride,
                          int classes) {
  std::size_t mismatches = 0;
  for (std::size_t i = 0; i < data.size(); i += std::max<std::size_t>(1, stride)) {
    if (label_map(subgraph_ratio(ctx, data[i].x), classes) != data[i].label) ++mismatches;
  }
  return mismatches;
}

void write_dataset(const Graph& host, const std::vector<LabeledSubgraph>& data, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path.string());
  for (const auto& s : data) {
    nlohmann::ordered_json j;
    auto& ids = j["X"] = nlohmann::ordered_json::array();
    for (Vertex v : s.x) ids.push_back(host.original_id(v));
    j["ratio"] = s.ratio;
    j["label"] = s.label;
    out << j.dump() << '\n';
  }
}

std::vector<LabeledSubgraph> read_dataset(const Graph& host, const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingArtifactError("cannot open dataset " + path.string() + " (run gen-dataset)");
  std::vector<LabeledSubgraph> data;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(line_no, e.what());
    }
    LabeledSubgraph s;
    std::vector<Vertex> x;
    for (const auto& id : j.at("X")) {
      const auto v = host.find(id.get<OriginalId>());
      if (!v) throw DataError("dataset vertex " + std::to_string(id.get<OriginalId>()) + " not in the host graph");
      x.push_back(*v);
    }
    s.x = make_vertex_set(x);
    s.ratio = j.at("ratio").get<double>();
    s.label = j.at("label").get<int>();
    data.push_back(std::move(s));
  }
  return data;
}

}  // namespace lense
