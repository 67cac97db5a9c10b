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

#include "strstudio/counterfactual/distance.h"

#include <algorithm>
#include <cmath>

#include "strstudio/util/strings.h"

namespace strstudio::counterfactual {

using catalog::IsMissing;

absl::Status DistanceSpec::Validate() const {
  if (categorical.size() != weight.size() || scale.size() != weight.size()) {
    return absl::InvalidArgumentError("distance spec vectors differ in length");
  }
  for (size_t i = 0; i < weight.size(); ++i) {
    if (!(weight[i] >= 0.0) || !std::isfinite(weight[i])) {
      return absl::InvalidArgumentError(StrCat("feature ", i, " has a negative weight"));
    }
    if (!categorical[i] && (!(scale[i] >= 0.0) || !std::isfinite(scale[i]))) {
      return absl::InvalidArgumentError(StrCat("feature ", i, " has an invalid scale"));
    }
  }
  if (!(categorical_cost >= 0.0)) {
    return absl::InvalidArgumentError("categorical_cost must be >= 0");
  }
  return absl::OkStatus();
}

DistanceSpec DistanceSpec::FromSchema(const catalog::FeatureSchema& schema) {
  DistanceSpec spec;
  for (const auto& f : schema.features()) {
    spec.categorical.push_back(f.categorical());
    spec.scale.push_back(f.categorical() ? 1.0 : f.max - f.min);
    spec.weight.push_back(1.0);
  }
  return spec;
}

absl::StatusOr<DistanceSpec> DistanceSpec::FromMad(const catalog::Dataset& dataset) {
  if (dataset.empty()) return absl::InvalidArgumentError("dataset is empty");
  DistanceSpec spec = FromSchema(dataset.schema);
  auto median = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
  };
  for (int f = 0; f < dataset.schema.size(); ++f) {
    if (spec.categorical[f]) continue;
    std::vector<double> column;
    for (const auto& row : dataset.rows) {
      if (!IsMissing(row.instance.values[f])) column.push_back(row.instance.values[f]);
    }
    if (column.empty()) continue;
    const double m = median(column);
    for (double& v : column) v = std::fabs(v - m);
    const double mad = median(column);
    if (mad > 0.0) spec.scale[f] = mad;
  }
  return spec;
}

absl::StatusOr<double> Distance(std::span<const double> x,
                                std::span<const double> y,
                                const DistanceSpec& spec) {
  if (x.size() != y.size() || x.size() != spec.size()) {
    return absl::InvalidArgumentError(
        StrCat("distance between vectors of length ", x.size(), " and ", y.size(),
               " with a spec of length ", spec.size()));
  }
  double total = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    const bool mx = IsMissing(x[i]), my = IsMissing(y[i]);
    if (mx && my) continue;
    if (!mx && !my && x[i] == y[i]) continue;
    double delta;
    if (spec.categorical[i]) {
      delta = spec.categorical_cost;
    } else if (mx || my) {
      delta = 1.0;
    } else {
      if (!(spec.scale[i] > 0.0)) {
        return absl::FailedPreconditionError(
            StrCat("feature ", i, " has zero scale but differs"));
      }
      delta = std::fabs(x[i] - y[i]) / spec.scale[i];
    }
    total += spec.weight[i] * delta;
  }
  return total;
}

}  // namespace strstudio::counterfactual
