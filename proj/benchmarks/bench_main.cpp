#include <vector>

#include <benchmark/benchmark.h>

#include "lense/encoder.hpp"
#include "lense/features.hpp"
#include "lense/heuristics.hpp"
#include "lense/nav_env.hpp"
#include "lense/problems.hpp"

using namespace lense;

namespace {

std::vector<Vertex> first_vertices(std::size_t n) {
  std::vector<Vertex> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = static_cast<Vertex>(i);
  return x;
}

void BM_IcSpread(benchmark::State& state) {
  const Graph g = weighted_cascade(barabasi_albert(static_cast<std::size_t>(state.range(0)), 3, 1));
  const auto x = first_vertices(10);
  for (auto _ : state) benchmark::DoNotOptimize(ic_spread_estimate(g, x, 1000, 7));
  state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_IcSpread)->Arg(1000)->Arg(5000)->Unit(benchmark::kMillisecond);

void BM_InduceSubgraph(benchmark::State& state) {
  const Graph g = barabasi_albert(20000, 4, 2);
  Rng rng = make_rng(3);
  std::vector<Vertex> picks;
  while (picks.size() < static_cast<std::size_t>(state.range(0))) {
    picks.push_back(static_cast<Vertex>(uniform_index(rng, g.num_vertices())));
  }
  const VertexSet x = make_vertex_set(picks);
  for (auto _ : state) benchmark::DoNotOptimize(induce_subgraph(g, x));
}
BENCHMARK(BM_InduceSubgraph)->Arg(100)->Arg(1000)->Unit(benchmark::kMicrosecond);

void BM_EncoderForward(benchmark::State& state) {
  const Graph g = barabasi_albert(5000, 4, 4);
  const FeatureTable features = compute_features(g, Problem::MVC);
  const Encoder enc(EncoderConfig{2, 30, 10, 0.8}, 5);
  const EncoderInput in = make_encoder_input(induce_subgraph(g, first_vertices(static_cast<std::size_t>(state.range(0)))), features);
  for (auto _ : state) benchmark::DoNotOptimize(enc.encode(in));
}
BENCHMARK(BM_EncoderForward)->Arg(100)->Arg(500)->Unit(benchmark::kMicrosecond);

void BM_GreedyMvc(benchmark::State& state) {
  const Graph g = barabasi_albert(static_cast<std::size_t>(state.range(0)), 4, 6);
  for (auto _ : state) benchmark::DoNotOptimize(greedy_mvc(g, 100));
}
BENCHMARK(BM_GreedyMvc)->Arg(5000)->Arg(20000)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
