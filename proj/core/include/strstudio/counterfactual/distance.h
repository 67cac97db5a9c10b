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

#ifndef STRSTUDIO_COUNTERFACTUAL_DISTANCE_H_
#define STRSTUDIO_COUNTERFACTUAL_DISTANCE_H_

#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "strstudio/catalog/dataset.h"

namespace strstudio::counterfactual {

enum class ScaleMethod { kRange, kMad };

// Mixed-type distance: sum_i weight[i] * delta_i, where delta_i is
// |x_i - y_i| / scale[i] on numeric features and categorical_cost on a
// categorical mismatch. A missing value matches only another missing value;
// against a present value it costs 1 (numeric) or categorical_cost.
struct DistanceSpec {
  std::vector<bool> categorical;
  std::vector<double> scale;   // Numeric features; ignored for categorical.
  std::vector<double> weight;  // >= 0.
  double categorical_cost = 1.0;

  size_t size() const { return weight.size(); }
  absl::Status Validate() const;

  // Scales from the schema ranges, unit weights.
  static DistanceSpec FromSchema(const catalog::FeatureSchema& schema);
  // Scales from the median absolute deviation of each numeric column, using
  // the range where the deviation is zero.
  static absl::StatusOr<DistanceSpec> FromMad(const catalog::Dataset& dataset);
};

absl::StatusOr<double> Distance(std::span<const double> x,
                                std::span<const double> y,
                                const DistanceSpec& spec);

}  // namespace strstudio::counterfactual

#endif  // STRSTUDIO_COUNTERFACTUAL_DISTANCE_H_
