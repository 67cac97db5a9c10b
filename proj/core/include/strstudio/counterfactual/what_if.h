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

#ifndef STRSTUDIO_COUNTERFACTUAL_WHAT_IF_H_
#define STRSTUDIO_COUNTERFACTUAL_WHAT_IF_H_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "nlohmann/json.hpp"
#include "strstudio/catalog/encoder.h"
#include "strstudio/gbdt/ensemble.h"
#include "strstudio/uncertainty/distribution_estimator.h"

namespace strstudio::counterfactual {

inline constexpr int kDefaultSweepPoints = 11;

struct WhatIfPoint {
  double value = 0.0;
  std::string label;
  double prediction = 0.0;
  bool is_original = false;
  std::optional<uncertainty::PredictionInterval> interval;
};

// All codes for a categorical feature, otherwise `points` evenly spaced
// values over the schema range.
std::vector<double> DefaultSweepValues(const catalog::FeatureSchema& schema,
                                       int feature,
                                       int points = kDefaultSweepPoints);

// Prediction for each candidate substituted into `x` at `feature`. The
// instance's own value is added when absent and flagged; output is sorted by
// value with a missing original first.
absl::StatusOr<std::vector<WhatIfPoint>> WhatIfSweep(
    const gbdt::TreeEnsemble& model, const catalog::FeatureSchema& schema,
    std::span<const double> x, int feature, std::vector<double> candidates);

// As above, with prediction intervals at `coverage`.
absl::StatusOr<std::vector<WhatIfPoint>> WhatIfSweep(
    const uncertainty::DistributionEstimator& estimator,
    const catalog::FeatureSchema& schema, std::span<const double> x,
    int feature, std::vector<double> candidates, double coverage);

nlohmann::json WhatIfToJson(const catalog::FeatureSchema& schema, int feature,
                            const std::vector<WhatIfPoint>& points);

}  // namespace strstudio::counterfactual

#endif  // STRSTUDIO_COUNTERFACTUAL_WHAT_IF_H_
