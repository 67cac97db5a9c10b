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

#ifndef STRSTUDIO_UNCERTAINTY_DISTRIBUTION_ESTIMATOR_H_
#define STRSTUDIO_UNCERTAINTY_DISTRIBUTION_ESTIMATOR_H_

#include <span>
#include <string>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "strstudio/catalog/dataset.h"
#include "strstudio/gbdt/ensemble.h"

namespace strstudio::uncertainty {

inline constexpr double kDefaultVarianceFloor = 1e-6;
inline constexpr char kManifestFile[] = "estimator.json";

struct ForecastDistribution {
  double mean = 0.0;
  double std_dev = 0.0;
};

struct PredictionInterval {
  double lo = 0.0;
  double hi = 0.0;
};

// Gaussian forecast from a mean model and a model of the squared error of
// the mean model.
struct DistributionEstimator {
  gbdt::TreeEnsemble base_model;
  gbdt::TreeEnsemble error_model;
  double variance_floor = kDefaultVarianceFloor;
  // Clip intervals to [0, 1], for sell-through targets.
  bool clamp_intervals = false;

  absl::Status Validate() const;
  absl::Status CheckSchema(const catalog::FeatureSchema& schema) const;

  // mean = base(x), std_dev = sqrt(max(error(x), variance_floor)).
  absl::StatusOr<ForecastDistribution> Predict(std::span<const double> x) const;
  absl::StatusOr<PredictionInterval> Interval(std::span<const double> x,
                                              double coverage) const;
};

// mean -/+ z * std_dev with z the two-sided normal quantile of `coverage`.
absl::StatusOr<PredictionInterval> IntervalFor(const ForecastDistribution& d,
                                               double coverage, bool clamp);

// Copy of `train_error` with targets replaced by (y - base(x))^2.
absl::StatusOr<catalog::Dataset> BuildErrorDataset(
    const gbdt::TreeEnsemble& base_model, const catalog::Dataset& train_error);

absl::StatusOr<DistributionEstimator> FitDistributionEstimator(
    const catalog::Dataset& train_base, const catalog::Dataset& train_error,
    const gbdt::TrainConfig& base_config,
    const gbdt::TrainConfig& error_config);

// Writes base_model.json, error_model.json and the manifest into `directory`.
absl::Status SaveEstimator(const DistributionEstimator& estimator,
                           const std::string& directory);
absl::StatusOr<DistributionEstimator> LoadEstimator(
    const std::string& directory);

}  // namespace strstudio::uncertainty

#endif  // STRSTUDIO_UNCERTAINTY_DISTRIBUTION_ESTIMATOR_H_
