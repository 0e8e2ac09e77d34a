#include <benchmark/benchmark.h>

#include <vector>

#include "labeldist/classifier.hpp"
#include "labeldist/simulator.hpp"

namespace {

using namespace labeldist;

SyntheticWorldConfig bench_world(std::int64_t n) {
  SyntheticWorldConfig config;
  config.n_examples = n;
  config.dim = 16;
  config.tau_gen = 2.0;
  config.votes = 20;
  config.seed = 99;
  return config;
}

void BM_GenerateSynthetic(benchmark::State& state) {
  const auto config = bench_world(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(generate_synthetic(config));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * config.n_examples);
}
BENCHMARK(BM_GenerateSynthetic)->Arg(1000)->Arg(5000);

void BM_TrainEpoch(benchmark::State& state) {
  const auto n = state.range(0);
  const SyntheticWorld world = generate_synthetic(bench_world(n));
  std::vector<TrainExample> data;
  data.reserve(world.features.size());
  for (std::size_t i = 0; i < world.features.size(); ++i) {
    data.push_back({world.features[i].x, world.true_dists[i]});
  }
  TrainConfig config;
  config.seed = 7;
  const ClassifierParams init = init_params(16, config.seed);
  for (auto _ : state) {
    benchmark::DoNotOptimize(train(init, data, config, 1, LossKind::Kl));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * n);
}
BENCHMARK(BM_TrainEpoch)->Arg(1000)->Arg(5000);

}  // namespace
