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

#include "strstudio/uncertainty/distribution_estimator.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "nlohmann/json.hpp"
#include "strstudio/gbdt/model_io.h"
#include "strstudio/gbdt/trainer.h"
#include "strstudio/uncertainty/normal_quantile.h"
#include "strstudio/util/files.h"
#include "strstudio/util/status_macros.h"
#include "strstudio/util/strings.h"

namespace strstudio::uncertainty {

using nlohmann::json;

absl::Status DistributionEstimator::Validate() const {
  if (!(variance_floor > 0.0) || !std::isfinite(variance_floor)) {
    return absl::InvalidArgumentError("variance_floor must be positive");
  }
  if (base_model.schema_fingerprint != error_model.schema_fingerprint ||
      base_model.num_features != error_model.num_features) {
    return absl::FailedPreconditionError(
        "base and error models were trained on different schemas");
  }
  return absl::OkStatus();
}

absl::Status DistributionEstimator::CheckSchema(
    const catalog::FeatureSchema& schema) const {
  return base_model.CheckSchema(schema);
}

absl::StatusOr<ForecastDistribution> DistributionEstimator::Predict(
    std::span<const double> x) const {
  ASSIGN_OR_RETURN(const double mean, base_model.Predict(x));
  ASSIGN_OR_RETURN(const double variance, error_model.Predict(x));
  return ForecastDistribution{mean, std::sqrt(std::max(variance, variance_floor))};
}

absl::StatusOr<PredictionInterval> DistributionEstimator::Interval(
    std::span<const double> x, double coverage) const {
  ASSIGN_OR_RETURN(const ForecastDistribution d, Predict(x));
  return IntervalFor(d, coverage, clamp_intervals);
}

absl::StatusOr<PredictionInterval> IntervalFor(const ForecastDistribution& d,
                                               double coverage, bool clamp) {
  ASSIGN_OR_RETURN(const double z, TwoSidedZ(coverage));
  PredictionInterval out{d.mean - z * d.std_dev, d.mean + z * d.std_dev};
  if (clamp) {
    out.lo = std::clamp(out.lo, 0.0, 1.0);
    out.hi = std::clamp(out.hi, 0.0, 1.0);
  }
  return out;
}

absl::StatusOr<catalog::Dataset> BuildErrorDataset(
    const gbdt::TreeEnsemble& base_model, const catalog::Dataset& train_error) {
  catalog::Dataset out = train_error;
  for (auto& row : out.rows) {
    ASSIGN_OR_RETURN(const double prediction,
                     base_model.Predict(row.instance.values));
    const double r = row.target_str - prediction;
    row.target_str = r * r;
  }
  return out;
}

absl::StatusOr<DistributionEstimator> FitDistributionEstimator(
    const catalog::Dataset& train_base, const catalog::Dataset& train_error,
    const gbdt::TrainConfig& base_config,
    const gbdt::TrainConfig& error_config) {
  if (train_base.empty() || train_error.empty()) {
    return absl::InvalidArgumentError("training split is empty");
  }
  if (train_base.schema.fingerprint() != train_error.schema.fingerprint()) {
    return absl::InvalidArgumentError("training splits use different schemas");
  }
  std::set<std::string> base_ids;
  for (const auto& row : train_base.rows) {
    if (!row.instance.product_id.empty()) base_ids.insert(row.instance.product_id);
  }
  for (const auto& row : train_error.rows) {
    if (base_ids.contains(row.instance.product_id)) {
      return absl::InvalidArgumentError(StrCat(
          "product ", row.instance.product_id, " appears in both splits"));
    }
  }
  DistributionEstimator estimator;
  ASSIGN_OR_RETURN(estimator.base_model, gbdt::Train(train_base, base_config));
  ASSIGN_OR_RETURN(catalog::Dataset errors,
                   BuildErrorDataset(estimator.base_model, train_error));
  ASSIGN_OR_RETURN(estimator.error_model, gbdt::Train(errors, error_config));
  return estimator;
}

namespace {
constexpr char kBaseFile[] = "base_model.json";
constexpr char kErrorFile[] = "error_model.json";
}  // namespace

absl::Status SaveEstimator(const DistributionEstimator& estimator,
                           const std::string& directory) {
  RETURN_IF_ERROR(estimator.Validate());
  RETURN_IF_ERROR(utils::EnsureDirectory(directory));
  RETURN_IF_ERROR(gbdt::SaveModel(estimator.base_model,
                                  utils::JoinPath(directory, kBaseFile)));
  RETURN_IF_ERROR(gbdt::SaveModel(estimator.error_model,
                                  utils::JoinPath(directory, kErrorFile)));
  const json manifest = {{"version", 1},
                         {"base_model", kBaseFile},
                         {"error_model", kErrorFile},
                         {"variance_floor", estimator.variance_floor},
                         {"clamp_intervals", estimator.clamp_intervals}};
  return utils::WriteFile(utils::JoinPath(directory, kManifestFile),
                          manifest.dump(2) + "\n");
}

absl::StatusOr<DistributionEstimator> LoadEstimator(
    const std::string& directory) {
  const std::string path = utils::JoinPath(directory, kManifestFile);
  ASSIGN_OR_RETURN(const std::string text, utils::ReadFile(path));
  const json manifest = json::parse(text, nullptr, false);
  if (manifest.is_discarded() || !manifest.is_object()) {
    return absl::DataLossError(StrCat(path, ": not valid JSON"));
  }
  if (manifest.value("version", 0) != 1) {
    return absl::FailedPreconditionError(StrCat(path, ": unsupported version"));
  }
  for (const char* key : {"base_model", "error_model"}) {
    if (!manifest.contains(key) || !manifest[key].is_string()) {
      return absl::DataLossError(StrCat(path, ": missing '", key, "'"));
    }
  }
  DistributionEstimator estimator;
  ASSIGN_OR_RETURN(estimator.base_model,
                   gbdt::LoadModel(utils::JoinPath(
                       directory, manifest["base_model"].get<std::string>())));
  ASSIGN_OR_RETURN(estimator.error_model,
                   gbdt::LoadModel(utils::JoinPath(
                       directory, manifest["error_model"].get<std::string>())));
  if (auto it = manifest.find("variance_floor"); it != manifest.end()) {
    if (!it->is_number()) {
      return absl::DataLossError(StrCat(path, ": bad variance_floor"));
    }
    estimator.variance_floor = it->get<double>();
  }
  if (auto it = manifest.find("clamp_intervals"); it != manifest.end()) {
    if (!it->is_boolean()) {
      return absl::DataLossError(StrCat(path, ": bad clamp_intervals"));
    }
    estimator.clamp_intervals = it->get<bool>();
  }
  RETURN_IF_ERROR(estimator.Validate());
  return estimator;
}

}  // namespace strstudio::uncertainty
