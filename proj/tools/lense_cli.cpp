#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "lense/errors.hpp"
#include "lense/pca.hpp"
#include "lense/pipeline.hpp"

namespace fs = std::filesystem;
using namespace lense;

namespace {

// Stage streams under the run seed.
constexpr std::uint64_t kSplitStream = 0x5;
constexpr std::uint64_t kDatasetStream = 0xd;
constexpr std::uint64_t kEncoderStream = 0xe;
constexpr std::uint64_t kAgentStream = 0xa;
constexpr std::uint64_t kTestStream = 0x7;
constexpr std::uint64_t kClassifierStream = 0xc;
constexpr std::uint64_t kGcombStream = 0x6c;

struct Run {
  PipelineConfig cfg;
  fs::path out;
  std::string config_text;

  fs::path path(const std::string& name) const { return out / name; }
};

fs::path require(const Run& run, const std::string& name, const std::string& producer) {
  const fs::path p = run.path(name);
  if (!fs::exists(p)) {
    throw MissingArtifactError("missing " + p.string() + "; run `lense " + producer + "` first");
  }
  return p;
}

nlohmann::json read_json(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw DataError("cannot open " + p.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw DataError("malformed JSON in " + p.string() + ": " + e.what());
  }
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw DataError("cannot write " + p.string());
  out << text;
}

void write_json(const fs::path& p, const nlohmann::json& j) { write_text(p, j.dump(1) + "\n"); }

std::string fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(10) << v;
  return s.str();
}

struct Split {
  Graph train;
  Graph test;
};

Split load_split(const Run& run) {
  const bool weighted = artifact_weighted(run.cfg);
  return {load_edge_list(require(run, "train.edges", "split"), run.cfg.directed, weighted),
          load_edge_list(require(run, "test.edges", "split"), run.cfg.directed, weighted)};
}

// Reference solution as stored by `solve`, bound to its graph.
Reference load_reference(const Run& run, const Graph& g, const std::string& which) {
  const nlohmann::json j = read_json(require(run, "solution_" + which + ".json", "solve"));
  Reference r;
  r.solution.problem = parse_problem(j.at("problem").get<std::string>());
  if (r.solution.problem != run.cfg.problem) {
    throw ConfigError("stored solution is for " + j.at("problem").get<std::string>() + "; rerun `lense solve`");
  }
  for (const auto& id : j.at("vertices")) {
    const auto v = g.find(id.get<OriginalId>());
    if (!v) throw DataError("solution vertex " + std::to_string(id.get<OriginalId>()) + " is not in the graph");
    r.solution.picks.push_back(*v);
  }
  r.solution.score = j.at("score").get<double>();
  r.solution.solver = j.at("solver").get<std::string>();
  r.context.host = &g;
  r.context.objective = ProblemSpec{run.cfg.problem, run.cfg.n_sim, derive_seed(run.cfg.seed, 0x0b1), run.cfg.jobs};
  r.context.solver = SolverOptions{run.cfg.n_rr, derive_seed(run.cfg.seed, 0x501), run.cfg.jobs};
  r.context.budget = r.solution.picks.size();
  r.context.full_score = j.at("full_score").get<double>();
  return r;
}

Encoder load_encoder(const Run& run) {
  return Encoder::from_json(read_json(require(run, "encoder.json", "train-encoder")));
}

GoalPoint load_goal(const Run& run) {
  const nlohmann::json j = read_json(require(run, "goal.json", "train-encoder"));
  GoalPoint g;
  const auto c = j.at("center").get<std::vector<double>>();
  g.center = Eigen::Map<const nn::Vector>(c.data(), static_cast<Eigen::Index>(c.size()));
  g.beta = run.cfg.beta;
  return g;
}

struct TrainSide {
  Split split;
  FeatureTable train_features;
  FeatureTable test_features;
};

TrainSide load_features(const Run& run) {
  TrainSide t{load_split(run), {}, {}};
  t.train_features = compute_features(t.split.train, run.cfg.problem);
  t.test_features = pipeline_features(t.split.test, t.train_features, run.cfg);
  return t;
}

// ---------------------------------------------------------------------------

void cmd_gen_graph(const Run& run) {
  const Graph g = load_host_graph(run.cfg);
  write_edge_list(g, run.path("graph.edges"));
  std::cout << "graph: " << g.num_vertices() << " vertices, " << g.num_edges() << " edges\n";
}

void cmd_split(const Run& run) {
  const Graph host = load_host_graph(run.cfg);
  auto [train, test] = split_edges(host, run.cfg.train_fraction, derive_seed(run.cfg.seed, kSplitStream));
  train = problem_graph(std::move(train), run.cfg);
  test = problem_graph(std::move(test), run.cfg);
  write_edge_list(train, run.path("train.edges"));
  write_edge_list(test, run.path("test.edges"));
  write_id_map(train, run.path("train_ids.json"));
  write_id_map(test, run.path("test_ids.json"));
  std::ostringstream csv;
  csv << "side,vertices,edges\n";
  csv << "host," << host.num_vertices() << ',' << host.num_edges() << '\n';
  csv << "train," << train.num_vertices() << ',' << train.num_edges() << '\n';
  csv << "test," << test.num_vertices() << ',' << test.num_edges() << '\n';
  write_text(run.path("split.csv"), csv.str());
  std::cout << csv.str();
}

void cmd_solve(const Run& run) {
  const Split s = load_split(run);
  for (const auto& [name, g] : {std::pair<std::string, const Graph*>{"train", &s.train}, {"test", &s.test}}) {
    const Reference r = make_reference(*g, run.cfg, run.cfg.budget);
    nlohmann::ordered_json j = solution_to_json(r.solution, *g);
    j["full_score"] = r.context.full_score;
    write_json(run.path("solution_" + name + ".json"), j);
    std::cout << name << ": " << r.solution.solver << " score " << fmt(r.solution.score) << " objective "
              << fmt(r.context.full_score) << '\n';
  }
}

void cmd_gen_dataset(const Run& run) {
  const Split s = load_split(run);
  const Reference ref = load_reference(run, s.train, "train");
  const auto data = generate_dataset(ref.context, ref.solution.set(), run.cfg.dataset,
                                     derive_seed(run.cfg.seed, kDatasetStream));
  write_dataset(s.train, data, run.path("dataset.jsonl"));
  const std::size_t stride = 10;
  const std::size_t mismatches = audit_dataset(ref.context, data, stride, run.cfg.dataset.classes);
  std::map<int, std::size_t> counts;
  for (const auto& d : data) ++counts[d.label];
  std::ostringstream csv;
  csv << "label,count\n";
  for (const auto& [label, n] : counts) csv << label << ',' << n << '\n';
  write_text(run.path("dataset_summary.csv"), csv.str());
  std::cout << "dataset: " << data.size() << " samples; audit mismatches " << mismatches << '\n';
  if (mismatches > 0) throw GenerationError("dataset audit found " + std::to_string(mismatches) + " label mismatches");
}

void cmd_train_encoder(const Run& run) {
  const Split s = load_split(run);
  const auto data = read_dataset(s.train, require(run, "dataset.jsonl", "gen-dataset"));
  const FeatureTable features = compute_features(s.train, run.cfg.problem);
  const auto inputs = dataset_inputs(s.train, features, data);
  const auto labels = dataset_labels(data);
  EncoderTrainResult r =
      train_encoder(inputs, labels, run.cfg.encoder, run.cfg.encoder_train, derive_seed(run.cfg.seed, kEncoderStream));
  const GoalPoint goal = compute_goal(r.encoder, inputs, labels, run.cfg.beta);
  write_json(run.path("encoder.json"), r.encoder.to_json());
  write_json(run.path("goal.json"),
             {{"center", std::vector<double>(goal.center.data(), goal.center.data() + goal.center.size())}});
  std::ostringstream csv;
  csv << "epoch,loss\n";
  for (std::size_t e = 0; e < r.epoch_loss.size(); ++e) csv << e << ',' << fmt(r.epoch_loss[e]) << '\n';
  write_text(run.path("encoder_loss.csv"), csv.str());
  std::cout << "encoder: " << r.epoch_loss.size() << " epochs, loss " << fmt(r.epoch_loss.front()) << " -> "
            << fmt(r.epoch_loss.back()) << '\n';
}

void cmd_train_agent(const Run& run) {
  const TrainSide t = load_features(run);
  const Reference ref = load_reference(run, t.split.train, "train");
  const Encoder encoder = load_encoder(run);
  const GoalPoint goal = load_goal(run);
  NavEnv env(t.split.train, make_embedder(encoder, t.train_features), goal, run.cfg.dataset.subset_size);
  AgentTrainResult r = train_agent(env, ref.solution.set(), run.cfg.agent, derive_seed(run.cfg.seed, kAgentStream));
  write_json(run.path("qnet.json"), r.qnet.to_json());
  std::ostringstream csv;
  csv.precision(10);
  write_training_log(r.log, csv);
  write_text(run.path("agent_log.csv"), csv.str());
  std::cout << "agent: " << r.log.size() << " episodes, " << r.updates << " updates, final epsilon "
            << fmt(r.final_epsilon) << ", replay " << r.replay_size << '\n';
}

void cmd_evaluate(const Run& run) {
  const TrainSide t = load_features(run);
  const Reference ref = load_reference(run, t.split.test, "test");
  const Encoder encoder = load_encoder(run);
  const GoalPoint goal = load_goal(run);
  const QNetwork q = QNetwork::from_json(read_json(require(run, "qnet.json", "train-agent")));
  NavEnv env(t.split.test, make_embedder(encoder, t.test_features), goal, run.cfg.dataset.subset_size);
  const NavigationResult nav =
      navigate_test(env, q, run.cfg.test_steps, run.cfg.test_episodes, derive_seed(run.cfg.seed, kTestStream));
  const auto episodes = score_episodes(nav, ref.context);

  std::ofstream traj(run.path("trajectories.jsonl"), std::ios::binary);
  std::ostringstream trace, eps, best;
  trace << "episode,t,goal_distance\n";
  eps << "episode,ratio,P_V,P_E,vertices,edges,initial_distance,final_distance,best_distance,best_t\n";
  for (std::size_t e = 0; e < nav.episodes.size(); ++e) {
    const Trajectory& tr = nav.episodes[e];
    write_trajectory_jsonl(t.split.test, tr, traj, e);
    for (const StepRecord& s : tr.states) trace << e << ',' << s.t << ',' << fmt(s.goal_distance) << '\n';
    const EpisodeResult& r = episodes[e];
    const Subgraph sub = induce_subgraph(t.split.test, r.best);
    eps << e << ',' << fmt(r.ratio) << ',' << fmt(r.p_v) << ',' << fmt(r.p_e) << ',' << sub.graph.num_vertices() << ','
        << sub.graph.num_edges() << ',' << fmt(r.initial_distance) << ',' << fmt(r.final_distance) << ','
        << fmt(r.best_distance) << ',' << tr.states[tr.best].t << '\n';
    nlohmann::ordered_json j;
    j["episode"] = e;
    auto& ids = j["X"] = nlohmann::ordered_json::array();
    for (Vertex v : r.best) ids.push_back(t.split.test.original_id(v));
    best << j.dump() << '\n';
  }
  write_text(run.path("distance_trace.csv"), trace.str());
  write_text(run.path("episodes.csv"), eps.str());
  write_text(run.path("best_subgraphs.jsonl"), best.str());

  const MetricsRow row = summarize_episodes(episodes, run.cfg, "LeNSE", run.cfg.budget);
  std::ofstream metrics(run.path("metrics.csv"), std::ios::binary);
  write_metrics_csv(metrics, std::span<const MetricsRow>(&row, 1));
  std::cout << "evaluate: ratio " << fmt(row.ratio) << " (se " << fmt(row.std_error) << "), P_V " << fmt(row.p_v)
            << ", P_E " << fmt(row.p_e) << '\n';
}

std::vector<VertexSet> load_best_subgraphs(const Run& run, const Graph& g) {
  std::ifstream in(require(run, "best_subgraphs.jsonl", "evaluate"));
  std::vector<VertexSet> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto j = nlohmann::json::parse(line);
    std::vector<Vertex> x;
    for (const auto& id : j.at("X")) {
      const auto v = g.find(id.get<OriginalId>());
      if (!v) throw DataError("best subgraph refers to an unknown vertex");
      x.push_back(*v);
    }
    out.push_back(make_vertex_set(x));
  }
  return out;
}

void cmd_baseline(const Run& run) {
  const TrainSide t = load_features(run);
  const Reference train_ref = load_reference(run, t.split.train, "train");
  const Reference test_ref = load_reference(run, t.split.test, "test");
  const std::size_t b = run.cfg.budget;

  // GNN-R keeps as many vertices as the agent's subgraphs have on average.
  std::size_t keep_k = 0;
  {
    const auto subs = load_best_subgraphs(run, t.split.test);
    std::size_t total = 0;
    for (const auto& x : subs) total += induce_subgraph(t.split.test, x).graph.num_vertices();
    keep_k = subs.empty() ? b : (total + subs.size() / 2) / subs.size();
  }

  std::vector<MetricsRow> rows;
  auto timed = [&](const std::string& method, auto&& prune) {
    const auto start = std::chrono::steady_clock::now();
    const Subgraph pruned = prune();
    MetricsRow row = evaluate_pruned(test_ref.context, pruned, run.cfg.graph_name, method, run.cfg.seed);
    row.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    rows.push_back(row);
  };

  auto clf = train_vertex_classifier(t.split.train, t.train_features, train_ref.solution.set(), run.cfg.classifier,
                                     derive_seed(run.cfg.seed, kClassifierStream));
  write_json(run.path("classifier.json"), clf.classifier.to_json());
  const nn::Vector p = clf.classifier.probabilities(full_graph_input(t.split.test, t.test_features));
  const std::vector<double> probs(p.data(), p.data() + p.size());
  timed("GNN-R", [&] { return gnn_rank_prune(t.split.test, probs, keep_k); });
  timed("GNN-T", [&] { return gnn_threshold_prune(t.split.test, probs); });

  const GcombModel model = gcomb_fit(run.cfg.problem, t.split.train, b, run.cfg.gcomb_runs,
                                     derive_seed(run.cfg.seed, kGcombStream), train_ref.context.solver);
  write_json(run.path("gcomb.json"), model.to_json());
  timed("GCOMB-P", [&] { return gcomb_prune(model, t.split.test, b); });

  std::ofstream out(run.path("baselines.csv"), std::ios::binary);
  write_metrics_csv(out, rows);
  for (const MetricsRow& r : rows) {
    std::cout << r.method << ": ratio " << fmt(r.ratio) << ", P_V " << fmt(r.p_v) << ", P_E " << fmt(r.p_e) << '\n';
  }
}

void cmd_export_embedding(const Run& run) {
  const Split s = load_split(run);
  const auto data = read_dataset(s.train, require(run, "dataset.jsonl", "gen-dataset"));
  const FeatureTable features = compute_features(s.train, run.cfg.problem);
  const Encoder encoder = load_encoder(run);
  const auto inputs = dataset_inputs(s.train, features, data);
  Eigen::MatrixXd emb(static_cast<Eigen::Index>(inputs.size()), static_cast<Eigen::Index>(run.cfg.encoder.embed));
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    emb.row(static_cast<Eigen::Index>(i)) = encoder.encode(inputs[i]).embedding.transpose();
  }
  const Pca2 pca = Pca2::fit(emb);
  const Eigen::MatrixXd xy = pca.project(emb);
  std::ostringstream csv;
  csv << "x,y,label\n";
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    csv << fmt(xy(r, 0)) << ',' << fmt(xy(r, 1)) << ',' << data[i].label << '\n';
  }
  write_text(run.path("embedding_pca.csv"), csv.str());

  // Trajectories are optional: only present after `evaluate`.
  const fs::path traj = run.path("trajectories.jsonl");
  std::size_t traj_rows = 0;
  if (fs::exists(traj)) {
    std::ifstream in(traj);
    std::ostringstream tcsv;
    tcsv << "episode,t,x,y,goal_distance\n";
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto j = nlohmann::json::parse(line);
      const auto e = j.at("embedding").get<std::vector<double>>();
      const Eigen::MatrixXd row = Eigen::Map<const Eigen::RowVectorXd>(e.data(), static_cast<Eigen::Index>(e.size()));
      const Eigen::MatrixXd p = pca.project(row);
      tcsv << j.at("episode").get<std::size_t>() << ',' << j.at("t").get<std::size_t>() << ',' << fmt(p(0, 0)) << ','
           << fmt(p(0, 1)) << ',' << fmt(j.at("goal_distance").get<double>()) << '\n';
      ++traj_rows;
    }
    write_text(run.path("trajectory_pca.csv"), tcsv.str());
  }
  std::cout << "export-embedding: " << data.size() << " dataset rows, " << traj_rows << " trajectory rows\n";
}

void cmd_report(const Run& run) {
  const Split s = load_split(run);
  const auto subs = load_best_subgraphs(run, s.test);
  std::vector<MetricsRow> rows;
  std::ostringstream per;
  per << "budget,episode,ratio\n";
  for (std::size_t b : run.cfg.report_budgets) {
    if (b > s.test.num_vertices()) throw BudgetError("report budget exceeds the test graph");
    const Reference ref = make_reference(s.test, run.cfg, b);
    const auto start = std::chrono::steady_clock::now();
    std::vector<double> ratios, pv, pe;
    for (std::size_t e = 0; e < subs.size(); ++e) {
      const Subgraph sub = induce_subgraph(s.test, subs[e]);
      RatioContext ctx = ref.context;
      ctx.budget = std::min(b, sub.graph.num_vertices());
      ratios.push_back(subgraph_ratio(ctx, sub));
      pv.push_back(pruned_fraction(sub.graph.num_vertices(), s.test.num_vertices()));
      pe.push_back(pruned_fraction(sub.graph.num_edges(), s.test.num_edges()));
      per << b << ',' << e << ',' << fmt(ratios.back()) << '\n';
    }
    const MeanStderr m = mean_stderr(ratios);
    MetricsRow row{run.cfg.graph_name, std::string(to_string(run.cfg.problem)), "LeNSE", b, m.mean, m.std_error,
                   mean_stderr(pv).mean, mean_stderr(pe).mean, 0.0, run.cfg.seed};
    row.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    rows.push_back(row);
    std::cout << "budget " << b << ": ratio " << fmt(m.mean) << " (se " << fmt(m.std_error) << ")\n";
  }
  std::ofstream out(run.path("report.csv"), std::ios::binary);
  write_metrics_csv(out, rows);
  write_text(run.path("report_episodes.csv"), per.str());
}

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::Parse: return 2;
    case ErrorKind::Validation: return 3;
    case ErrorKind::Config: return 4;
    case ErrorKind::Generation: return 5;
    case ErrorKind::MissingArtifact: return 6;
    case ErrorKind::Data: return 7;
    case ErrorKind::Lookup: return 8;
    case ErrorKind::Domain: return 9;
    case ErrorKind::Budget: return 10;
    case ErrorKind::Size: return 11;
    case ErrorKind::Split: return 12;
    case ErrorKind::DeadState: return 13;
    case ErrorKind::Internal: return 70;
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lense: learned subgraph navigation for combinatorial optimisation on graphs"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> jobs;
  std::string out_dir = "out";
  std::vector<std::string> overrides;
  app.add_option("--config", config_path, "key=value config file")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "override the config seed");
  app.add_option("--jobs", jobs, "worker threads for Monte Carlo loops");
  app.add_option("--out-dir", out_dir, "artifact directory")->capture_default_str();
  app.add_option("--set", overrides, "extra key=value overrides");

  using Handler = void (*)(const Run&);
  const std::vector<std::tuple<std::string, std::string, Handler>> commands{
      {"gen-graph", "write the configured host graph as an edge list", cmd_gen_graph},
      {"split", "split the host graph's edges into train and test graphs", cmd_split},
      {"solve", "run the reference heuristic on the train and test graphs", cmd_solve},
      {"gen-dataset", "generate the balanced labelled subgraph dataset", cmd_gen_dataset},
      {"train-encoder", "train the subgraph encoder and compute the goal", cmd_train_encoder},
      {"train-agent", "train the navigation Q-network", cmd_train_agent},
      {"evaluate", "navigate the test graph and score the subgraphs found", cmd_evaluate},
      {"baseline", "run the GNN-R, GNN-T and GCOMB-P pruning baselines", cmd_baseline},
      {"export-embedding", "2-D PCA projection of dataset embeddings and trajectories", cmd_export_embedding},
      {"report", "ratios of the found subgraphs over several budgets", cmd_report},
  };
  Handler selected = nullptr;
  for (const auto& [name, help, fn] : commands) {
    app.add_subcommand(name, help)->callback([&selected, fn = fn] { selected = fn; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 64;
  }

  try {
    Config config = config_path.empty() ? Config{} : Config::load(config_path);
    for (const std::string& kv : overrides) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
      config.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (seed) config.set("seed", std::to_string(*seed));
    if (jobs) config.set("jobs", std::to_string(*jobs));
    Run run{PipelineConfig::from_config(config), out_dir, config.dump()};
    fs::create_directories(run.out);
    selected(run);
    return 0;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
