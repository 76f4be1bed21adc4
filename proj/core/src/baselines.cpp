#include "lense/baselines.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iostream>
#include <numeric>

#include "lense/errors.hpp"

namespace lense {

EncoderInput full_graph_input(const Graph& g, const FeatureTable& features) {
  if (features.rows() != g.num_vertices()) throw ValidationError("feature table does not match the graph");
  EncoderInput in;
  in.x = features.values;
  in.adj.resize(g.num_vertices());
  for (Vertex v = 0; v < g.num_vertices(); ++v) {
    const auto nbrs = g.neighbors(v);
    in.adj[v].assign(nbrs.begin(), nbrs.end());
  }
  in.keys.assign(g.original_ids().begin(), g.original_ids().end());
  return in;
}

VertexClassifier::VertexClassifier(const ClassifierConfig& config, Seed seed) : config_(config) {
  if (config_.in_features == 0 || config_.hidden == 0) throw ConfigError("classifier widths must be positive");
  const auto f = static_cast<Eigen::Index>(config_.in_features);
  const auto h = static_cast<Eigen::Index>(config_.hidden);
  Rng rng = make_rng(seed, 0xc1a);
  for (std::size_t i = 0; i < 3; ++i) {
    sage_[i] = nn::SageLayer("classifier.layer" + std::to_string(i + 1), i == 0 ? f : h, h);
    sage_[i].init(rng);
  }
  head_ = nn::Linear("classifier.out", h, 1);
  head_.init(rng);
}

nn::Vector VertexClassifier::logits(const EncoderInput& input, Trace* trace) const {
  if (input.x.cols() != static_cast<Eigen::Index>(config_.in_features)) {
    throw ValidationError("classifier input has the wrong feature width");
  }
  nn::Matrix h = input.x;
  for (std::size_t i = 0; i < 3; ++i) h = sage_[i].forward(h, input.adj, trace ? &trace->sage[i] : nullptr);
  nn::Vector z = head_.forward(h).col(0);
  if (trace) trace->hidden = std::move(h);
  return z;
}

nn::Vector VertexClassifier::probabilities(const EncoderInput& input) const {
  return logits(input).unaryExpr([](double z) { return nn::sigmoid(z); });
}

void VertexClassifier::backward(const Trace& trace, const nn::Adjacency& adj, const nn::Vector& d_logits) {
  nn::Matrix d = head_.backward(trace.hidden, d_logits);
  for (std::size_t i = 3; i-- > 0;) d = sage_[i].backward(trace.sage[i], adj, d);
}

nn::ParamRefs VertexClassifier::params() {
  nn::ParamRefs refs;
  for (auto& s : sage_) s.collect(refs);
  head_.collect(refs);
  return refs;
}

nlohmann::json VertexClassifier::to_json() {
  nlohmann::json j;
  j["config"] = {{"in_features", config_.in_features}, {"hidden", config_.hidden}};
  j["params"] = nn::params_to_json(params());
  return j;
}

VertexClassifier VertexClassifier::from_json(const nlohmann::json& j) {
  ClassifierConfig cfg;
  cfg.in_features = j.at("config").at("in_features").get<std::size_t>();
  cfg.hidden = j.at("config").at("hidden").get<std::size_t>();
  VertexClassifier c(cfg, 0);
  nn::params_from_json(c.params(), j.at("params"));
  return c;
}

double classifier_loss(VertexClassifier& clf, const EncoderInput& input, std::span<const Vertex> positives,
                       std::span<const Vertex> negatives, bool accumulate) {
  const std::size_t count = positives.size() + negatives.size();
  if (count == 0) throw ValidationError("classifier loss needs labelled vertices");
  VertexClassifier::Trace trace;
  const nn::Vector z = clf.logits(input, accumulate ? &trace : nullptr);
  nn::Vector dz = nn::Vector::Zero(z.size());
  const double scale = 1.0 / static_cast<double>(count);
  double loss = 0.0;
  auto add = [&](Vertex v, double target) {
    if (v >= z.size()) throw LookupError("labelled vertex out of range");
    double d = 0.0;
    loss += nn::bce_with_logit(z[v], target, &d);
    dz[v] += scale * d;
  };
  for (Vertex v : positives) add(v, 1.0);
  for (Vertex v : negatives) add(v, 0.0);
  if (accumulate) clf.backward(trace, input.adj, dz);
  return loss * scale;
}

ClassifierTrainResult train_vertex_classifier(const Graph& g, const FeatureTable& features, const VertexSet& solution,
                                              const ClassifierConfig& config, Seed seed) {
  const std::size_t b = solution.size();
  if (b == 0) throw ValidationError("classifier needs a non-empty solution set");
  if (b > g.num_vertices() - b) throw GenerationError("cannot sample b non-solution vertices: b > |V| - b");
  std::vector<Vertex> others;
  for (Vertex v = 0; v < g.num_vertices(); ++v) {
    if (!std::binary_search(solution.begin(), solution.end(), v)) others.push_back(v);
  }
  const EncoderInput input = full_graph_input(g, features);
  ClassifierTrainResult result{VertexClassifier(config, seed), {}};
  const nn::ParamRefs params = result.classifier.params();
  nn::Adam adam(nn::AdamConfig{.lr = config.lr});
  Rng rng = make_rng(seed, 0xc1b);
  std::vector<Vertex> negatives(b);
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    for (std::size_t i = 0; i < b; ++i) {
      std::swap(others[i], others[i + uniform_index(rng, others.size() - i)]);
      negatives[i] = others[i];
    }
    nn::zero_grads(params);
    result.epoch_loss.push_back(classifier_loss(result.classifier, input, solution, negatives, true));
    adam.step(params);
  }
  return result;
}

namespace {

Subgraph keep_vertices(const Graph& g, std::vector<Vertex> kept) {
  if (kept.empty()) throw DomainError("pruning kept no vertices");
  std::sort(kept.begin(), kept.end());
  return induced_subgraph(g, kept);
}

void check_probabilities(const Graph& g, std::span<const double> p) {
  if (p.size() != g.num_vertices()) throw ValidationError("need one probability per vertex");
}

}  // namespace

Subgraph gnn_rank_prune(const Graph& g, std::span<const double> probabilities, std::size_t keep_k) {
  check_probabilities(g, probabilities);
  std::vector<Vertex> order(g.num_vertices());
  std::iota(order.begin(), order.end(), Vertex{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Vertex a, Vertex b) { return probabilities[a] > probabilities[b]; });
  order.resize(std::min(keep_k, order.size()));
  return keep_vertices(g, std::move(order));
}

Subgraph gnn_threshold_prune(const Graph& g, std::span<const double> probabilities) {
  check_probabilities(g, probabilities);
  std::vector<Vertex> kept;
  for (Vertex v = 0; v < g.num_vertices(); ++v) {
    if (probabilities[v] >= 0.5) kept.push_back(v);
  }
  return keep_vertices(g, std::move(kept));
}

std::vector<std::size_t> gcomb_rank(const Graph& g) {
  std::vector<double> key(g.num_vertices());
  for (Vertex v = 0; v < g.num_vertices(); ++v) {
    if (g.weighted()) {
      key[v] = g.out_weight(v);
    } else {
      key[v] = static_cast<double>(g.directed() ? g.out_arcs(v).size() : g.degree(v));
    }
  }
  std::vector<Vertex> order(g.num_vertices());
  std::iota(order.begin(), order.end(), Vertex{0});
  std::stable_sort(order.begin(), order.end(), [&](Vertex a, Vertex b) { return key[a] > key[b]; });
  std::vector<std::size_t> rank(g.num_vertices());
  for (std::size_t i = 0; i < order.size(); ++i) rank[order[i]] = i + 1;
  return rank;
}

double GcombModel::interpolate(double x) const {
  if (points.empty()) throw DomainError("rank interpolator has no points");
  if (x < points.front().first || x > points.back().first) {
    std::cerr << "warning: budget fraction " << x << " outside the fitted range [" << points.front().first << ", "
              << points.back().first << "]; clamping\n";
    return x < points.front().first ? points.front().second : points.back().second;
  }
  const auto hi = std::lower_bound(points.begin(), points.end(), x,
                                   [](const auto& p, double v) { return p.first < v; });
  if (hi->first == x || hi == points.begin()) return hi->second;
  const auto lo = std::prev(hi);
  const double w = (x - lo->first) / (hi->first - lo->first);
  return lo->second + w * (hi->second - lo->second);
}

nlohmann::json GcombModel::to_json() const {
  nlohmann::json j;
  j["max_rank"] = max_rank;
  j["points"] = nlohmann::json::array();
  for (const auto& [x, y] : points) j["points"].push_back({x, y});
  return j;
}

GcombModel GcombModel::from_json(const nlohmann::json& j) {
  GcombModel m;
  m.max_rank = j.at("max_rank").get<std::vector<std::size_t>>();
  for (const auto& p : j.at("points")) m.points.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
  return m;
}

GcombModel gcomb_model(std::span<const std::size_t> rank, std::span<const std::vector<Vertex>> solutions,
                       std::size_t b) {
  if (b == 0 || b > rank.size()) throw BudgetError("budget must lie in [1, |V|]");
  GcombModel m;
  m.max_rank.assign(b, 0);
  for (const auto& picks : solutions) {
    std::size_t worst = 0;
    for (std::size_t i = 0; i < picks.size() && i < b; ++i) {
      if (picks[i] >= rank.size()) throw LookupError("solution vertex out of range");
      worst = std::max(worst, rank[picks[i]]);
      m.max_rank[i] = std::max(m.max_rank[i], worst);
    }
  }
  const auto n = static_cast<double>(rank.size());
  for (std::size_t i = 0; i < b; ++i) m.points.emplace_back(static_cast<double>(i + 1) / n, m.max_rank[i] / n);
  return m;
}

GcombModel gcomb_fit(Problem problem, const Graph& g, std::size_t b, std::size_t runs, Seed seed,
                     const SolverOptions& opts) {
  if (runs == 0) throw ConfigError("rank interpolation needs at least one solver run");
  if (b == 0 || b > g.num_vertices()) throw BudgetError("budget must lie in [1, |V|]");
  std::vector<std::vector<Vertex>> solutions;
  for (std::size_t l = 0; l < runs; ++l) solutions.push_back(stochastic_solve(problem, g, b, derive_seed(seed, l), opts).picks);
  return gcomb_model(gcomb_rank(g), solutions, b);
}

Subgraph gcomb_prune(const GcombModel& model, const Graph& g, std::size_t b) {
  const auto n = static_cast<double>(g.num_vertices());
  const double limit = n * model.interpolate(static_cast<double>(b) / n) + 1e-9;
  const std::vector<std::size_t> rank = gcomb_rank(g);
  std::vector<Vertex> kept;
  for (Vertex v = 0; v < g.num_vertices(); ++v) {
    if (static_cast<double>(rank[v]) <= limit) kept.push_back(v);
  }
  return keep_vertices(g, std::move(kept));
}

MetricsRow evaluate_pruned(const RatioContext& ctx, const Subgraph& pruned, const std::string& graph_name,
                           const std::string& method, Seed seed) {
  const auto start = std::chrono::steady_clock::now();
  MetricsRow row;
  row.graph = graph_name;
  row.problem = to_string(ctx.objective.kind);
  row.method = method;
  row.budget = ctx.budget;
  RatioContext local = ctx;
  local.budget = std::min(ctx.budget, pruned.graph.num_vertices());
  row.ratio = subgraph_ratio(local, pruned);
  row.p_v = pruned_fraction(pruned.graph.num_vertices(), ctx.host->num_vertices());
  row.p_e = pruned_fraction(pruned.graph.num_edges(), ctx.host->num_edges());
  row.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  row.seed = seed;
  return row;
}

}  // namespace lense
