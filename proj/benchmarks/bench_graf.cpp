/*
 * Copyright 2026 The GRAF Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <benchmark/benchmark.h>

#include "graf/datagen.hpp"
#include "graf/forest.hpp"
#include "graf/sensitivity.hpp"

namespace graf {
namespace {

Dataset rbf(std::size_t n) {
  GenSpec spec;
  spec.n_samples = n;
  spec.n_features = 10;
  spec.n_centroids = 10;
  spec.seed = 1;
  return generate(spec);
}

void BM_GrowTree(benchmark::State& state) {
  const Dataset data = rbf(static_cast<std::size_t>(state.range(0)));
  const auto sub = SubspaceView::all(data.n_features());
  std::uint64_t seed = 0;
  for (auto _ : state) {
    Rng rng(seed++);
    benchmark::DoNotOptimize(grow_tree(data, sub, GrowConfig{}, rng));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_GrowTree)->Arg(500)->Arg(2000)->Arg(8000)->Unit(benchmark::kMillisecond);

void BM_TrainForest(benchmark::State& state) {
  const Dataset data = rbf(2000);
  ForestConfig cfg;
  cfg.n_trees = static_cast<std::size_t>(state.range(0));
  cfg.subspace = SubspaceSpec::parse("half");
  for (auto _ : state) benchmark::DoNotOptimize(train_forest(data, cfg, 1));
}
BENCHMARK(BM_TrainForest)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_PredictRow(benchmark::State& state) {
  const Dataset data = rbf(2000);
  ForestConfig cfg;
  cfg.n_trees = 100;
  const Forest forest = train_forest(data, cfg, 1);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(predict_scores(forest, data.row(i)));
    i = (i + 1) % data.size();
  }
}
BENCHMARK(BM_PredictRow);

void BM_Sensitivity(benchmark::State& state) {
  const Dataset data = rbf(2000);
  ForestConfig cfg;
  cfg.n_trees = 100;
  const Forest forest = train_forest(data, cfg, 1);
  for (auto _ : state) benchmark::DoNotOptimize(compute_sensitivity(forest, data));
}
BENCHMARK(BM_Sensitivity)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace graf

BENCHMARK_MAIN();
