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

#ifndef STRSTUDIO_EXPLAIN_PARTIAL_DEPENDENCE_H_
#define STRSTUDIO_EXPLAIN_PARTIAL_DEPENDENCE_H_

#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "nlohmann/json.hpp"
#include "strstudio/catalog/dataset.h"
#include "strstudio/gbdt/ensemble.h"

namespace strstudio::explain {

inline constexpr int kDefaultPdpPoints = 20;

struct PdpCurve {
  int feature = 0;
  std::vector<double> grid;
  std::vector<double> averaged_predictions;
  size_t n_background = 0;

  nlohmann::json ToJson(const catalog::FeatureSchema& schema) const;
  // Columns: value, label, prediction.
  std::string ToCsv(const catalog::FeatureSchema& schema) const;
};

// Codes 1..K for categorical features. For numeric features, up to `points`
// distinct quantiles of the dataset column, falling back to an even spread
// over the schema range when the column has no values.
absl::StatusOr<std::vector<double>> DefaultPdpGrid(
    const catalog::Dataset& dataset, int feature,
    int points = kDefaultPdpPoints);

// Average prediction over the dataset rows with `feature` forced to each grid
// value.
absl::StatusOr<PdpCurve> PartialDependence(const gbdt::TreeEnsemble& ensemble,
                                           const catalog::Dataset& dataset,
                                           int feature,
                                           const std::vector<double>& grid);

struct DependencePoint {
  size_t row = 0;
  double value = 0.0;
  double contribution = 0.0;
};

struct ShapDependence {
  int feature = 0;
  std::vector<DependencePoint> points;   // Rows with a value.
  std::vector<DependencePoint> missing;  // Rows where the feature is missing.

  nlohmann::json ToJson(const catalog::FeatureSchema& schema) const;
  // Columns: row, product_id, value, label, contribution, missing.
  std::string ToCsv(const catalog::FeatureSchema& schema,
                    const catalog::Dataset& dataset) const;
};

absl::StatusOr<ShapDependence> ComputeShapDependence(
    const gbdt::TreeEnsemble& ensemble, const catalog::Dataset& dataset,
    int feature);

}  // namespace strstudio::explain

#endif  // STRSTUDIO_EXPLAIN_PARTIAL_DEPENDENCE_H_
