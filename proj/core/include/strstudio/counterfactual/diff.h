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

#ifndef STRSTUDIO_COUNTERFACTUAL_DIFF_H_
#define STRSTUDIO_COUNTERFACTUAL_DIFF_H_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "strstudio/catalog/encoder.h"

namespace strstudio::counterfactual {

// List price moves below this relative size are flagged negligible.
inline constexpr double kNegligiblePriceChange = 1e-3;

struct FeatureChange {
  int feature = 0;
  std::string name;
  double from = 0.0;
  double to = 0.0;
  std::string from_text;  // Decoded label or 4 significant digits.
  std::string to_text;
  bool negligible = false;
};

// One entry per feature whose value differs, in schema order.
absl::StatusOr<std::vector<FeatureChange>> ComputeDiff(
    std::span<const double> x, std::span<const double> y,
    const catalog::FeatureSchema& schema);

// x with every change applied.
absl::StatusOr<std::vector<double>> ApplyDiff(
    std::span<const double> x, const std::vector<FeatureChange>& changes);

// Feature / input / counterfactual table of the non-negligible changes,
// closed by a forecast row when predictions are given.
std::string DiffMarkdown(const std::vector<FeatureChange>& changes,
                         std::optional<double> original_prediction = std::nullopt,
                         std::optional<double> new_prediction = std::nullopt);

// "21.70%"
std::string FormatPercent(double str);

}  // namespace strstudio::counterfactual

#endif  // STRSTUDIO_COUNTERFACTUAL_DIFF_H_
