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

#include "strstudio/explain/partial_dependence.h"

#include <algorithm>
#include <cmath>

#include "strstudio/explain/tree_shap.h"
#include "strstudio/util/csv.h"
#include "strstudio/util/files.h"
#include "strstudio/util/status_macros.h"
#include "strstudio/util/strings.h"

namespace strstudio::explain {
namespace {

absl::Status CheckFeature(const catalog::FeatureSchema& schema, int feature) {
  if (feature < 0 || feature >= schema.size()) {
    return absl::OutOfRangeError(StrCat("feature index ", feature,
                                        " out of range [0, ", schema.size(), ")"));
  }
  return absl::OkStatus();
}

std::string Label(const catalog::FeatureSchema& schema, int feature, double v) {
  return schema.FormatValue(feature, v);
}

}  // namespace

absl::StatusOr<std::vector<double>> DefaultPdpGrid(const catalog::Dataset& dataset,
                                                   int feature, int points) {
  RETURN_IF_ERROR(CheckFeature(dataset.schema, feature));
  if (points < 1) return absl::InvalidArgumentError("points must be >= 1");
  const catalog::FeatureSpec& spec = dataset.schema.feature(feature);
  std::vector<double> grid;
  if (spec.categorical()) {
    for (int code = 1; code <= spec.num_codes(); ++code) grid.push_back(code);
    return grid;
  }
  std::vector<double> column;
  for (const auto& row : dataset.rows) {
    const double v = row.instance.values[feature];
    if (!catalog::IsMissing(v)) column.push_back(v);
  }
  std::sort(column.begin(), column.end());
  if (column.empty()) {
    if (points == 1 || spec.max <= spec.min) return std::vector<double>{spec.min};
    for (int k = 0; k < points; ++k) {
      grid.push_back(spec.min + (spec.max - spec.min) * k / (points - 1));
    }
    return grid;
  }
  for (int k = 0; k < points; ++k) {
    const double q = points == 1 ? 0.5 : static_cast<double>(k) / (points - 1);
    const double pos = q * static_cast<double>(column.size() - 1);
    const size_t lo = static_cast<size_t>(std::floor(pos));
    const size_t hi = std::min(lo + 1, column.size() - 1);
    const double v = column[lo] + (column[hi] - column[lo]) * (pos - lo);
    if (grid.empty() || v > grid.back()) grid.push_back(v);
  }
  return grid;
}

absl::StatusOr<PdpCurve> PartialDependence(const gbdt::TreeEnsemble& ensemble,
                                           const catalog::Dataset& dataset,
                                           int feature,
                                           const std::vector<double>& grid) {
  RETURN_IF_ERROR(CheckFeature(dataset.schema, feature));
  RETURN_IF_ERROR(ensemble.CheckSchema(dataset.schema));
  if (dataset.empty()) return absl::InvalidArgumentError("dataset is empty");
  if (grid.empty()) return absl::InvalidArgumentError("grid is empty");
  const catalog::FeatureSpec& spec = dataset.schema.feature(feature);
  for (size_t k = 0; k < grid.size(); ++k) {
    if (!std::isfinite(grid[k])) {
      return absl::InvalidArgumentError("grid values must be finite");
    }
    if (spec.categorical()) {
      if (grid[k] != std::floor(grid[k]) || grid[k] < 1 || grid[k] > spec.num_codes()) {
        return absl::InvalidArgumentError(
            StrCat("grid value ", grid[k], " is not a code of '", spec.name, "'"));
      }
    } else if (k > 0 && !(grid[k] > grid[k - 1])) {
      return absl::InvalidArgumentError("numeric grid must be strictly increasing");
    }
  }
  PdpCurve curve;
  curve.feature = feature;
  curve.grid = grid;
  curve.n_background = dataset.size();
  std::vector<double> x;
  for (const double v : grid) {
    double sum = 0.0;
    for (const auto& row : dataset.rows) {
      x = row.instance.values;
      x[feature] = v;
      sum += ensemble.PredictUnchecked(x);
    }
    curve.averaged_predictions.push_back(sum / static_cast<double>(dataset.size()));
  }
  return curve;
}

nlohmann::json PdpCurve::ToJson(const catalog::FeatureSchema& schema) const {
  nlohmann::json points = nlohmann::json::array();
  for (size_t k = 0; k < grid.size(); ++k) {
    points.push_back({{"value", grid[k]},
                      {"label", Label(schema, feature, grid[k])},
                      {"prediction", averaged_predictions[k]}});
  }
  return {{"feature", schema.feature(feature).name},
          {"index", feature},
          {"n_background", n_background},
          {"points", std::move(points)}};
}

std::string PdpCurve::ToCsv(const catalog::FeatureSchema& schema) const {
  std::string out = "value,label,prediction\n";
  for (size_t k = 0; k < grid.size(); ++k) {
    out += utils::FormatCsvRow({utils::FormatDouble(grid[k]),
                                Label(schema, feature, grid[k]),
                                utils::FormatDouble(averaged_predictions[k])});
  }
  return out;
}

absl::StatusOr<ShapDependence> ComputeShapDependence(
    const gbdt::TreeEnsemble& ensemble, const catalog::Dataset& dataset,
    int feature) {
  RETURN_IF_ERROR(CheckFeature(dataset.schema, feature));
  if (dataset.empty()) return absl::InvalidArgumentError("dataset is empty");
  ASSIGN_OR_RETURN(const std::vector<Attribution> attributions,
                   ShapValuesBatch(ensemble, dataset));
  ShapDependence out;
  out.feature = feature;
  for (size_t i = 0; i < dataset.size(); ++i) {
    const double v = dataset.rows[i].instance.values[feature];
    DependencePoint p{i, v, attributions[i].contributions[feature]};
    (catalog::IsMissing(v) ? out.missing : out.points).push_back(p);
  }
  return out;
}

nlohmann::json ShapDependence::ToJson(const catalog::FeatureSchema& schema) const {
  auto to_json = [&](const std::vector<DependencePoint>& pts, bool with_value) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& p : pts) {
      nlohmann::json j = {{"row", p.row}, {"contribution", p.contribution}};
      if (with_value) {
        j["value"] = p.value;
        j["label"] = Label(schema, feature, p.value);
      }
      arr.push_back(std::move(j));
    }
    return arr;
  };
  return {{"feature", schema.feature(feature).name},
          {"index", feature},
          {"points", to_json(points, true)},
          {"missing", to_json(missing, false)}};
}

std::string ShapDependence::ToCsv(const catalog::FeatureSchema& schema,
                                  const catalog::Dataset& dataset) const {
  std::string out = "row,product_id,value,label,contribution,missing\n";
  auto emit = [&](const DependencePoint& p, bool is_missing) {
    out += utils::FormatCsvRow(
        {std::to_string(p.row), dataset.rows[p.row].instance.product_id,
         is_missing ? "" : utils::FormatDouble(p.value),
         is_missing ? "" : Label(schema, feature, p.value),
         utils::FormatDouble(p.contribution), is_missing ? "1" : "0"});
  };
  for (const auto& p : points) emit(p, false);
  for (const auto& p : missing) emit(p, true);
  return out;
}

}  // namespace strstudio::explain
