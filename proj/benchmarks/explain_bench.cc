/*
 * Copyright 2026 The STR Studio Authors.
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

#include "benchmark/benchmark.h"
#include "fixtures.h"
#include "strstudio/explain/tree_shap.h"

namespace strstudio::bench {
namespace {

void BM_TreeShap(benchmark::State& state) {
  const auto& data = SharedDataset();
  const auto& model = SharedModel();
  size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(explain::ShapValues(model, data.rows[i].instance.values).value());
    i = (i + 1) % data.size();
  }
}
BENCHMARK(BM_TreeShap);

void BM_BruteForceShap(benchmark::State& state) {
  const auto& data = SharedDataset();
  const auto& model = SharedModel();
  size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(explain::BruteForceShap(model, data.rows[i].instance.values).value());
    i = (i + 1) % data.size();
  }
}
BENCHMARK(BM_BruteForceShap)->Unit(benchmark::kMillisecond);

void BM_ShapBatch(benchmark::State& state) {
  const auto& data = SharedDataset();
  const auto& model = SharedModel();
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        explain::ShapValuesBatch(model, data, static_cast<int>(state.range(0))).value());
  }
}
BENCHMARK(BM_ShapBatch)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace strstudio::bench
