// Copyright 2026 The SPA Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <benchmark/benchmark.h>

#include <vector>

#include "spa/counts.hpp"
#include "spa/simulation.hpp"
#include "spa/weighting.hpp"

namespace {

void BM_VarianceUniform(benchmark::State& state) {
  const auto n = state.range(0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(spa::item_variance_uniform(n, 5));
  }
  state.SetComplexityN(n);
}
BENCHMARK(BM_VarianceUniform)->RangeMultiplier(4)->Range(4, 1024)->Complexity();

void BM_VarianceClassDist(benchmark::State& state) {
  const auto n = state.range(0);
  const spa::ClassDistribution dist({0.4, 0.3, 0.2, 0.1});
  for (auto _ : state) {
    benchmark::DoNotOptimize(spa::item_variance_classdist(n, dist));
  }
  state.SetComplexityN(n);
}
BENCHMARK(BM_VarianceClassDist)
    ->RangeMultiplier(4)
    ->Range(4, 1024)
    ->Complexity();

void BM_EnumerateVariance(benchmark::State& state) {
  const auto n = state.range(0);
  const auto dist = spa::ClassDistribution::uniform(3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(spa::enumerate_variance(n, dist));
  }
}
BENCHMARK(BM_EnumerateVariance)->DenseRange(4, 12, 4);

// Cold cache on every iteration vs. the warm shared cache.
void BM_ComputeWeights(benchmark::State& state) {
  const bool warm = state.range(0) != 0;
  const auto table = spa::synth_table(2000, 9, spa::ClassDistribution::uniform(4),
                                      0.3, 17);
  const auto items = table.item_counts();
  const auto scheme = spa::resolve_scheme(spa::WeightScheme::inv_var_class(),
                                          items);
  spa::VarianceCache cache;
  for (auto _ : state) {
    if (!warm) cache.clear();
    benchmark::DoNotOptimize(spa::compute_weights(scheme, items, cache));
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(items.size()));
}
BENCHMARK(BM_ComputeWeights)->Arg(0)->Arg(1);

}  // namespace

BENCHMARK_MAIN();
