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

#include "strstudio/explain/importance.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "strstudio/explain/tree_shap.h"
#include "strstudio/util/csv.h"
#include "strstudio/util/files.h"
#include "strstudio/util/status_macros.h"
#include "strstudio/util/strings.h"

namespace strstudio::explain {
namespace {

ImportanceReport Normalize(ImportanceMethod method, std::vector<double> raw) {
  ImportanceReport report;
  report.method = method;
  double total = 0.0;
  for (const double r : raw) total += r;
  report.scores.assign(raw.size(), 0.0);
  if (total > 0.0) {
    for (size_t i = 0; i < raw.size(); ++i) report.scores[i] = raw[i] / total;
  }
  report.raw = std::move(raw);
  return report;
}

std::string FeatureName(const catalog::FeatureSchema& schema, int i) {
  return i < schema.size() ? schema.feature(i).name : StrCat("f", i);
}

}  // namespace

std::string_view ImportanceMethodName(ImportanceMethod method) {
  return method == ImportanceMethod::kGain ? "gain" : "mean_abs_shap";
}

absl::StatusOr<ImportanceMethod> ParseImportanceMethod(std::string_view name) {
  if (name == "gain") return ImportanceMethod::kGain;
  if (name == "mean_abs_shap" || name == "shap") return ImportanceMethod::kMeanAbsShap;
  return absl::InvalidArgumentError(
      StrCat("unknown importance method '", name, "' (gain, mean_abs_shap)"));
}

std::vector<int> ImportanceReport::Ranking() const {
  std::vector<int> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return scores[a] > scores[b]; });
  return order;
}

nlohmann::json ImportanceReport::ToJson(const catalog::FeatureSchema& schema) const {
  nlohmann::json features = nlohmann::json::array();
  for (const int i : Ranking()) {
    features.push_back({{"feature", FeatureName(schema, i)},
                        {"index", i},
                        {"score", scores[i]},
                        {"raw", raw[i]}});
  }
  return {{"method", ImportanceMethodName(method)}, {"features", std::move(features)}};
}

std::string ImportanceReport::ToCsv(const catalog::FeatureSchema& schema) const {
  std::string out = "rank,feature,score,raw\n";
  int rank = 1;
  for (const int i : Ranking()) {
    out += utils::FormatCsvRow({std::to_string(rank++), FeatureName(schema, i),
                                utils::FormatDouble(scores[i]),
                                utils::FormatDouble(raw[i])});
  }
  return out;
}

absl::StatusOr<ImportanceReport> GainImportance(const gbdt::TreeEnsemble& ensemble) {
  std::vector<double> raw(ensemble.num_features, 0.0);
  int splits = 0;
  for (size_t t = 0; t < ensemble.trees.size(); ++t) {
    for (const auto& node : ensemble.trees[t].nodes) {
      if (node.is_leaf()) continue;
      if (std::isnan(node.gain)) {
        return absl::FailedPreconditionError(
            StrCat("tree ", t, " has no recorded split gains"));
      }
      raw[node.feature] += node.gain;
      ++splits;
    }
  }
  if (splits == 0) {
    return absl::FailedPreconditionError("model has no splits");
  }
  return Normalize(ImportanceMethod::kGain, std::move(raw));
}

absl::StatusOr<ImportanceReport> GlobalShapImportance(
    const gbdt::TreeEnsemble& ensemble, const catalog::Dataset& dataset,
    int num_threads) {
  if (dataset.empty()) return absl::InvalidArgumentError("dataset is empty");
  ASSIGN_OR_RETURN(const std::vector<Attribution> attributions,
                   ShapValuesBatch(ensemble, dataset, num_threads));
  std::vector<double> raw(ensemble.num_features, 0.0);
  for (const Attribution& a : attributions) {
    for (int j = 0; j < ensemble.num_features; ++j) raw[j] += std::fabs(a.contributions[j]);
  }
  for (double& r : raw) r /= static_cast<double>(dataset.size());
  return Normalize(ImportanceMethod::kMeanAbsShap, std::move(raw));
}

}  // namespace strstudio::explain
