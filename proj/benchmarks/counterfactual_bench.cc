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

#include <algorithm>

#include "benchmark/benchmark.h"
#include "fixtures.h"
#include "strstudio/counterfactual/genetic_search.h"

namespace strstudio::bench {
namespace {

void BM_GeneticSearch(benchmark::State& state) {
  const auto& data = SharedDataset();
  const auto& model = SharedModel();
  counterfactual::CfRequest request;
  request.instance = data.rows[0].instance;
  request.target = std::min(1.0, model.PredictUnchecked(request.instance.values) + 0.2);
  request.mutable_features = counterfactual::MutableExcept(data.schema, {}).value();
  request.distance = counterfactual::DistanceSpec::FromSchema(data.schema);
  request.ga.generations = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        counterfactual::SolveCounterfactual(model, data.schema, request).value());
  }
}
BENCHMARK(BM_GeneticSearch)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace strstudio::bench
