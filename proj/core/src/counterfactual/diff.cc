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

#include "strstudio/counterfactual/diff.h"

#include <cmath>

#include "fmt/format.h"
#include "strstudio/util/strings.h"

namespace strstudio::counterfactual {

using catalog::IsMissing;

absl::StatusOr<std::vector<FeatureChange>> ComputeDiff(
    std::span<const double> x, std::span<const double> y,
    const catalog::FeatureSchema& schema) {
  if (x.size() != y.size() || static_cast<int>(x.size()) != schema.size()) {
    return absl::InvalidArgumentError("diff of vectors with mismatched lengths");
  }
  std::vector<FeatureChange> out;
  for (int i = 0; i < schema.size(); ++i) {
    const bool mx = IsMissing(x[i]), my = IsMissing(y[i]);
    if ((mx && my) || (!mx && !my && x[i] == y[i])) continue;
    const auto& spec = schema.feature(i);
    FeatureChange c;
    c.feature = i;
    c.name = spec.name;
    c.from = x[i];
    c.to = y[i];
    c.from_text = schema.FormatValue(i, x[i]);
    c.to_text = schema.FormatValue(i, y[i]);
    c.negligible = spec.source == catalog::FeatureSource::kListPrice && !mx && !my &&
                   std::fabs(y[i] - x[i]) < kNegligiblePriceChange * std::fabs(x[i]);
    out.push_back(std::move(c));
  }
  return out;
}

absl::StatusOr<std::vector<double>> ApplyDiff(
    std::span<const double> x, const std::vector<FeatureChange>& changes) {
  std::vector<double> out(x.begin(), x.end());
  for (const auto& c : changes) {
    if (c.feature < 0 || c.feature >= static_cast<int>(out.size())) {
      return absl::OutOfRangeError(StrCat("change to feature ", c.feature,
                                          " is out of range"));
    }
    out[c.feature] = c.to;
  }
  return out;
}

namespace {

std::string Cell(const std::string& text) {
  std::string out;
  for (const char ch : text) {
    if (ch == '|') out += '\\';
    out += ch;
  }
  return out;
}

}  // namespace

std::string FormatPercent(double str) { return fmt::format("{:.2f}%", 100.0 * str); }

std::string DiffMarkdown(const std::vector<FeatureChange>& changes,
                         std::optional<double> original_prediction,
                         std::optional<double> new_prediction) {
  std::string out = "| Feature | Input | Counterfactual |\n|---|---|---|\n";
  for (const auto& c : changes) {
    if (c.negligible) continue;
    out += StrCat("| ", Cell(c.name), " | ", Cell(c.from_text), " | ",
                  Cell(c.to_text), " |\n");
  }
  if (original_prediction && new_prediction) {
    out += StrCat("| STR forecast | ", FormatPercent(*original_prediction), " | ",
                  FormatPercent(*new_prediction), " |\n");
  }
  return out;
}

}  // namespace strstudio::counterfactual
