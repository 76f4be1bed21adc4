#include "lense/pipeline.hpp"

#include <cmath>

#include "lense/errors.hpp"
#include "lense/nav_env.hpp"

namespace lense {

const std::set<std::string>& PipelineConfig::known_keys() {
  static const std::set<std::string> keys{
      "graph_name",     "graph",          "ba_vertices",     "ba_m",          "directed",
      "weighted",       "train_fraction", "problem",         "budget",        "n_sim",
      "n_rr",           "feature_norm",   "subset_size",     "classes",       "per_class",
      "max_attempts",   "hidden_dim",     "embed_dim",       "pool_ratio",    "encoder_loss",
      "tau",            "encoder_lr",     "encoder_batch",   "encoder_epochs", "negatives",
      "patience",       "beta",           "train_steps",     "train_episodes", "alpha",
      "update_every",   "eps_start",      "eps_decay",       "eps_min",       "gamma",
      "agent_lr",       "agent_batch",    "replay_capacity", "polyak",        "q_hidden",
      "test_steps",     "test_episodes",  "classifier_epochs", "classifier_lr", "gcomb_runs",
      "report_budgets", "seed",           "jobs"};
  return keys;
}

PipelineConfig PipelineConfig::from_config(const Config& c) {
  c.require_known(known_keys());
  PipelineConfig p;
  p.graph_name = c.get_string("graph_name", p.graph_name);
  p.graph_path = c.get_string("graph", "");
  p.ba_vertices = c.get_size("ba_vertices", p.ba_vertices);
  p.ba_edges_per_vertex = c.get_size("ba_m", p.ba_edges_per_vertex);
  p.directed = c.get_bool("directed", p.directed);
  p.weighted = c.get_bool("weighted", p.weighted);
  p.train_fraction = c.get_double("train_fraction", p.train_fraction);
  p.problem = parse_problem(c.get_string("problem", "MVC"));
  p.budget = c.get_size("budget", p.budget);
  p.n_sim = c.get_size("n_sim", p.n_sim);
  p.n_rr = c.get_size("n_rr", p.n_rr);
  const std::string norm = c.get_string("feature_norm", "train");
  if (norm == "train") {
    p.feature_norm = FeatureNorm::Train;
  } else if (norm == "self") {
    p.feature_norm = FeatureNorm::Self;
  } else {
    throw ConfigError("feature_norm must be 'train' or 'self'");
  }

  p.dataset.subset_size = c.get_size("subset_size", p.dataset.subset_size);
  p.dataset.classes = static_cast<int>(c.get_int("classes", p.dataset.classes));
  if (p.dataset.classes != 3 && p.dataset.classes != 4) throw ConfigError("classes must be 3 or 4");
  p.dataset.per_class = c.get_size("per_class", p.dataset.per_class);
  p.dataset.max_attempts = c.get_size("max_attempts", p.dataset.max_attempts);

  p.encoder.in_features = feature_count(p.problem);
  p.encoder.hidden = c.get_size("hidden_dim", p.encoder.hidden);
  p.encoder.embed = c.get_size("embed_dim", p.encoder.embed);
  p.encoder.pool_ratio = c.get_double("pool_ratio", p.encoder.pool_ratio);
  p.encoder_train.loss = parse_encoder_loss(c.get_string("encoder_loss", "infonce"));
  p.encoder_train.tau = c.get_double("tau", p.encoder_train.tau);
  p.encoder_train.lr = c.get_double("encoder_lr", p.encoder_train.lr);
  p.encoder_train.batch = c.get_size("encoder_batch", p.encoder_train.batch);
  p.encoder_train.epochs = c.get_size("encoder_epochs", p.encoder_train.epochs);
  p.encoder_train.negatives = c.get_size("negatives", p.encoder_train.negatives);
  p.encoder_train.patience = c.get_size("patience", p.encoder_train.patience);

  p.beta = c.get_double("beta", p.beta);
  p.agent.train_steps = c.get_size("train_steps", p.agent.train_steps);
  p.agent.episodes = c.get_size("train_episodes", p.agent.episodes);
  p.agent.alpha = c.get_double("alpha", p.agent.alpha);
  p.agent.update_every = c.get_size("update_every", p.agent.update_every);
  p.agent.eps_start = c.get_double("eps_start", p.agent.eps_start);
  p.agent.eps_decay = c.get_double("eps_decay", p.agent.eps_decay);
  p.agent.eps_min = c.get_double("eps_min", p.agent.eps_min);
  p.agent.gamma = c.get_double("gamma", p.agent.gamma);
  p.agent.lr = c.get_double("agent_lr", p.agent.lr);
  p.agent.batch = c.get_size("agent_batch", p.agent.batch);
  p.agent.replay_capacity = c.get_size("replay_capacity", p.agent.replay_capacity);
  p.agent.polyak = c.get_double("polyak", p.agent.polyak);
  p.agent.hidden = c.get_size("q_hidden", p.agent.hidden);
  p.test_steps = c.get_size("test_steps", p.test_steps);
  p.test_episodes = c.get_size("test_episodes", p.test_episodes);

  p.classifier.in_features = p.encoder.in_features;
  p.classifier.hidden = p.encoder.hidden;
  p.classifier.epochs = c.get_size("classifier_epochs", p.classifier.epochs);
  p.classifier.lr = c.get_double("classifier_lr", p.classifier.lr);
  p.gcomb_runs = c.get_size("gcomb_runs", p.gcomb_runs);
  if (c.has("report_budgets")) {
    p.report_budgets.clear();
    for (double b : c.get_doubles("report_budgets", {})) {
      if (b < 1 || b != std::floor(b)) throw ConfigError("report_budgets must be positive integers");
      p.report_budgets.push_back(static_cast<std::size_t>(b));
    }
  }
  p.seed = static_cast<Seed>(c.get_int("seed", 0));
  p.jobs = c.get_size("jobs", 1);
  if (p.jobs == 0) p.jobs = 1;
  if (!(p.train_fraction > 0.0 && p.train_fraction < 1.0)) throw ConfigError("train_fraction must lie in (0,1)");
  if (p.budget == 0) throw ConfigError("budget must be positive");
  if (!(p.beta > 0.0)) throw ConfigError("beta must be positive");
  if (p.agent.alpha < 0.0 || p.agent.alpha > 1.0) throw ConfigError("alpha must lie in [0,1]");
  return p;
}

Graph load_host_graph(const PipelineConfig& cfg) {
  if (cfg.graph_path.empty()) return barabasi_albert(cfg.ba_vertices, cfg.ba_edges_per_vertex, derive_seed(cfg.seed, 0xba));
  return load_edge_list(cfg.graph_path, cfg.directed, cfg.weighted);
}

Graph problem_graph(Graph g, const PipelineConfig& cfg) {
  if (cfg.problem == Problem::IM && !cfg.weighted) return weighted_cascade(g);
  return g;
}

bool artifact_weighted(const PipelineConfig& cfg) { return cfg.weighted || cfg.problem == Problem::IM; }

Reference make_reference(const Graph& g, const PipelineConfig& cfg, std::size_t budget) {
  Reference r;
  r.context.host = &g;
  r.context.objective = ProblemSpec{cfg.problem, cfg.n_sim, derive_seed(cfg.seed, 0x0b1), cfg.jobs};
  r.context.solver = SolverOptions{cfg.n_rr, derive_seed(cfg.seed, 0x501), cfg.jobs};
  r.context.budget = budget;
  r.solution = solve(cfg.problem, g, budget, r.context.solver);
  r.context.full_score = objective(r.context.objective, g, r.solution.picks);
  return r;
}

FeatureTable pipeline_features(const Graph& g, const FeatureTable& train_features, const PipelineConfig& cfg) {
  if (cfg.feature_norm == FeatureNorm::Self) return compute_features(g, cfg.problem);
  return compute_features(g, cfg.problem, train_features.stats);
}

std::vector<EncoderInput> dataset_inputs(const Graph& host, const FeatureTable& features,
                                         const std::vector<LabeledSubgraph>& data) {
  std::vector<EncoderInput> inputs;
  inputs.reserve(data.size());
  for (const LabeledSubgraph& s : data) inputs.push_back(make_encoder_input(induce_subgraph(host, s.x), features));
  return inputs;
}

std::vector<int> dataset_labels(const std::vector<LabeledSubgraph>& data) {
  std::vector<int> labels;
  labels.reserve(data.size());
  for (const LabeledSubgraph& s : data) labels.push_back(s.label);
  return labels;
}

Embedder make_embedder(const Encoder& encoder, const FeatureTable& features) {
  return [&encoder, &features](const Subgraph& s) {
    EncoderOutput out = encoder.encode(make_encoder_input(s, features));
    return Observation{std::move(out.embedding), std::move(out.vertex_embeddings)};
  };
}

std::vector<EpisodeResult> score_episodes(const NavigationResult& nav, const RatioContext& ctx) {
  std::vector<EpisodeResult> out;
  for (std::size_t e = 0; e < nav.episodes.size(); ++e) {
    const Trajectory& tr = nav.episodes[e];
    EpisodeResult r;
    r.best = tr.states[tr.best].x;
    const Subgraph s = induce_subgraph(*ctx.host, r.best);
    r.ratio = subgraph_ratio(ctx, s);
    r.p_v = pruned_fraction(s.graph.num_vertices(), ctx.host->num_vertices());
    r.p_e = pruned_fraction(s.graph.num_edges(), ctx.host->num_edges());
    r.initial_distance = tr.states.front().goal_distance;
    r.final_distance = tr.states.back().goal_distance;
    r.best_distance = tr.states[tr.best].goal_distance;
    r.seconds = nav.seconds[e];
    out.push_back(std::move(r));
  }
  return out;
}

MetricsRow summarize_episodes(const std::vector<EpisodeResult>& episodes, const PipelineConfig& cfg,
                              const std::string& method, std::size_t budget) {
  std::vector<double> ratios, pv, pe;
  double seconds = 0.0;
  for (const EpisodeResult& e : episodes) {
    ratios.push_back(e.ratio);
    pv.push_back(e.p_v);
    pe.push_back(e.p_e);
    seconds += e.seconds;
  }
  const MeanStderr r = mean_stderr(ratios);
  MetricsRow row;
  row.graph = cfg.graph_name;
  row.problem = std::string(to_string(cfg.problem));
  row.method = method;
  row.budget = budget;
  row.ratio = r.mean;
  row.std_error = r.std_error;
  row.p_v = mean_stderr(pv).mean;
  row.p_e = mean_stderr(pe).mean;
  row.runtime_s = episodes.empty() ? 0.0 : seconds / static_cast<double>(episodes.size());
  row.seed = cfg.seed;
  return row;
}

}  // namespace lense
