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

#ifndef STRSTUDIO_COUNTERFACTUAL_GENETIC_SEARCH_H_
#define STRSTUDIO_COUNTERFACTUAL_GENETIC_SEARCH_H_

#include <cstdint>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "strstudio/catalog/encoder.h"
#include "strstudio/counterfactual/diff.h"
#include "strstudio/counterfactual/distance.h"
#include "strstudio/gbdt/ensemble.h"

namespace strstudio::counterfactual {

struct GaConfig {
  int population_size = 64;
  int generations = 200;
  double crossover_rate = 0.9;
  double mutation_rate = 0.1;  // Per gene.
  int elite_count = 2;
  int tournament_size = 3;
  // The target penalty starts at lambda0 and is multiplied after every
  // generation whose best candidate misses the target, at most
  // lambda_max_steps times.
  double lambda0 = 1.0;
  double lambda_multiplier = 10.0;
  int lambda_max_steps = 6;
  uint64_t seed = 0;

  absl::Status Validate() const;
};

inline constexpr double kDefaultTargetTolerance = 0.02;

struct CfRequest {
  catalog::EncodedInstance instance;
  double target = 0.0;
  std::vector<int> mutable_features;
  DistanceSpec distance;
  double tolerance = kDefaultTargetTolerance;
  GaConfig ga;
};

struct CounterfactualResult {
  catalog::EncodedInstance counterfactual;
  double original_prediction = 0.0;
  double predicted = 0.0;
  double target = 0.0;
  double distance = 0.0;
  bool feasible = false;  // |predicted - target| <= tolerance
  double final_lambda = 0.0;
  std::vector<FeatureChange> diffs;
};

// Best candidates of each generation, as full feature vectors.
struct SearchTrace {
  std::vector<std::vector<std::vector<double>>> elites;
};

// Genetic search for a nearby instance whose prediction hits the target:
// minimizes lambda * (f(x') - target)^2 + distance(x, x') over the mutable
// features. Categorical genes range over codes 1..K, numeric genes over the
// schema range widened by 10% on each side. The result is the closest
// feasible candidate ever evaluated, otherwise the fittest candidate of the
// final generation.
absl::StatusOr<CounterfactualResult> SolveCounterfactual(
    const gbdt::TreeEnsemble& model, const catalog::FeatureSchema& schema,
    const CfRequest& request, SearchTrace* trace = nullptr);

// Indices of features whose names match any of the glob patterns. A
// pattern matching nothing is an error.
absl::StatusOr<std::vector<int>> MatchFeatures(
    const catalog::FeatureSchema& schema,
    const std::vector<std::string>& patterns);

// All features except those matching `frozen`.
absl::StatusOr<std::vector<int>> MutableExcept(
    const catalog::FeatureSchema& schema,
    const std::vector<std::string>& frozen);

}  // namespace strstudio::counterfactual

#endif  // STRSTUDIO_COUNTERFACTUAL_GENETIC_SEARCH_H_
