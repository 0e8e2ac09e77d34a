#include <benchmark/benchmark.h>

#include <vector>

#include "labeldist/labels.hpp"
#include "labeldist/metrics.hpp"
#include "labeldist/rng.hpp"

namespace {

using namespace labeldist;

// Random points on the simplex via exponential spacings.
std::vector<LabelDistribution> random_dists(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<LabelDistribution> dists;
  dists.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    LabelDistribution d;
    double sum = 0.0;
    for (int c = 0; c < kNumLabels; ++c) {
      d[c] = -std::log(1.0 - rng.uniform01());
      sum += d[c];
    }
    for (int c = 0; c < kNumLabels; ++c) d[c] /= sum;
    dists.push_back(d);
  }
  return dists;
}

void BM_Entropy(benchmark::State& state) {
  const auto dists = random_dists(1024, 7);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(entropy(dists[i++ & 1023]));
  }
}
BENCHMARK(BM_Entropy);

void BM_KlDiv(benchmark::State& state) {
  const auto p = random_dists(1024, 11);
  const auto q = random_dists(1024, 13);
  std::size_t i = 0;
  for (auto _ : state) {
    const std::size_t j = i++ & 1023;
    benchmark::DoNotOptimize(kl_div(p[j], q[j]));
  }
}
BENCHMARK(BM_KlDiv);

void BM_Jsd(benchmark::State& state) {
  const auto p = random_dists(1024, 17);
  const auto q = random_dists(1024, 19);
  std::size_t i = 0;
  for (auto _ : state) {
    const std::size_t j = i++ & 1023;
    benchmark::DoNotOptimize(jsd(p[j], q[j]));
  }
}
BENCHMARK(BM_Jsd);

void BM_ScorePairs(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto human = random_dists(n, 23);
  const auto pred = random_dists(n, 29);
  std::vector<ScoredPair> pairs(n);
  for (std::size_t i = 0; i < n; ++i) {
    pairs[i].uid = "u" + std::to_string(i);
    pairs[i].human = human[i];
    pairs[i].pred = pred[i];
    pairs[i].old_label = Label::Neutral;
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(score_pairs(pairs));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(n));
}
BENCHMARK(BM_ScorePairs)->Arg(1000)->Arg(10000);

}  // namespace

BENCHMARK_MAIN();
