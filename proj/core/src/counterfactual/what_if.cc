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

#include "strstudio/counterfactual/what_if.h"

#include <algorithm>
#include <cmath>
#include <functional>

#include "strstudio/util/status_macros.h"
#include "strstudio/util/strings.h"

namespace strstudio::counterfactual {
namespace {

using catalog::IsMissing;

absl::Status CheckCandidate(const catalog::FeatureSpec& spec, double v) {
  if (spec.categorical()) {
    if (v != std::floor(v) || v < 1 || v > spec.num_codes()) {
      return absl::InvalidArgumentError(
          StrCat("'", spec.name, "' takes codes 1..", spec.num_codes(), ", got ", v));
    }
    return absl::OkStatus();
  }
  const double pad = 0.1 * (spec.max - spec.min);
  if (!std::isfinite(v) || v < spec.min - pad || v > spec.max + pad) {
    return absl::InvalidArgumentError(StrCat("value ", v, " is outside the range of '",
                                             spec.name, "'"));
  }
  return absl::OkStatus();
}

using Predictor = std::function<absl::Status(std::span<const double>, WhatIfPoint&)>;

absl::StatusOr<std::vector<WhatIfPoint>> Sweep(const catalog::FeatureSchema& schema,
                                               std::span<const double> x, int feature,
                                               std::vector<double> candidates,
                                               const Predictor& predict) {
  if (static_cast<int>(x.size()) != schema.size()) {
    return absl::InvalidArgumentError("instance does not match the schema");
  }
  if (feature < 0 || feature >= schema.size()) {
    return absl::OutOfRangeError(StrCat("feature index ", feature, " out of range"));
  }
  const auto& spec = schema.feature(feature);
  for (const double v : candidates) RETURN_IF_ERROR(CheckCandidate(spec, v));
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  const double original = x[feature];
  std::vector<WhatIfPoint> out;
  std::vector<double> probe(x.begin(), x.end());
  auto add = [&](double v) -> absl::Status {
    WhatIfPoint p;
    p.value = v;
    p.label = schema.FormatValue(feature, v);
    p.is_original = IsMissing(v) ? IsMissing(original) : v == original;
    probe[feature] = v;
    RETURN_IF_ERROR(predict(probe, p));
    out.push_back(std::move(p));
    return absl::OkStatus();
  };
  const bool listed = !IsMissing(original) &&
                      std::binary_search(candidates.begin(), candidates.end(), original);
  if (IsMissing(original)) RETURN_IF_ERROR(add(original));
  bool inserted = listed || IsMissing(original);
  for (const double v : candidates) {
    if (!inserted && original < v) {
      RETURN_IF_ERROR(add(original));
      inserted = true;
    }
    RETURN_IF_ERROR(add(v));
  }
  if (!inserted) RETURN_IF_ERROR(add(original));
  return out;
}

}  // namespace

std::vector<double> DefaultSweepValues(const catalog::FeatureSchema& schema, int feature,
                                       int points) {
  const auto& spec = schema.feature(feature);
  std::vector<double> out;
  if (spec.categorical()) {
    for (int c = 1; c <= spec.num_codes(); ++c) out.push_back(c);
  } else if (points <= 1 || spec.max <= spec.min) {
    out.push_back(spec.min);
  } else {
    for (int k = 0; k < points; ++k) {
      out.push_back(spec.min + (spec.max - spec.min) * k / (points - 1));
    }
  }
  return out;
}

absl::StatusOr<std::vector<WhatIfPoint>> WhatIfSweep(const gbdt::TreeEnsemble& model,
                                                     const catalog::FeatureSchema& schema,
                                                     std::span<const double> x,
                                                     int feature,
                                                     std::vector<double> candidates) {
  RETURN_IF_ERROR(model.CheckSchema(schema));
  return Sweep(schema, x, feature, std::move(candidates),
               [&](std::span<const double> probe, WhatIfPoint& p) {
                 p.prediction = model.PredictUnchecked(probe);
                 return absl::OkStatus();
               });
}

absl::StatusOr<std::vector<WhatIfPoint>> WhatIfSweep(
    const uncertainty::DistributionEstimator& estimator,
    const catalog::FeatureSchema& schema, std::span<const double> x, int feature,
    std::vector<double> candidates, double coverage) {
  RETURN_IF_ERROR(estimator.CheckSchema(schema));
  if (!(coverage > 0.0 && coverage < 1.0)) {
    return absl::InvalidArgumentError("coverage must be in (0, 1)");
  }
  return Sweep(schema, x, feature, std::move(candidates),
               [&](std::span<const double> probe, WhatIfPoint& p) -> absl::Status {
                 ASSIGN_OR_RETURN(const auto d, estimator.Predict(probe));
                 p.prediction = d.mean;
                 ASSIGN_OR_RETURN(p.interval,
                                  uncertainty::IntervalFor(d, coverage,
                                                           estimator.clamp_intervals));
                 return absl::OkStatus();
               });
}

nlohmann::json WhatIfToJson(const catalog::FeatureSchema& schema, int feature,
                            const std::vector<WhatIfPoint>& points) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& p : points) {
    nlohmann::json j = {{"value", IsMissing(p.value) ? nlohmann::json(nullptr)
                                                     : nlohmann::json(p.value)},
                        {"label", p.label},
                        {"prediction", p.prediction},
                        {"is_original", p.is_original}};
    if (p.interval) j["interval"] = {p.interval->lo, p.interval->hi};
    arr.push_back(std::move(j));
  }
  return {{"feature", schema.feature(feature).name}, {"points", std::move(arr)}};
}

}  // namespace strstudio::counterfactual
