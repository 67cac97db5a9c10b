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

#ifndef STRSTUDIO_CATALOG_ENCODER_H_
#define STRSTUDIO_CATALOG_ENCODER_H_

#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "nlohmann/json.hpp"
#include "strstudio/catalog/records.h"

namespace strstudio::catalog {

// Encoded slots hold a real number or kMissing (a quiet NaN).
inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();
inline bool IsMissing(double v) { return std::isnan(v); }

inline constexpr char kListPriceFeature[] = "list_price";
inline constexpr char kLaunchWeekFeature[] = "launch_week";

enum class FeatureKind { kNumeric, kCategorical };

enum class FeatureSource { kAttribute, kListPrice, kLaunchWeek };

struct FeatureSpec {
  std::string name;
  FeatureKind kind = FeatureKind::kNumeric;
  FeatureSource source = FeatureSource::kAttribute;
  // Categorical only: label with code k is labels[k - 1]; sorted ascending.
  std::vector<std::string> labels;
  // Numeric only: observed range of non-missing training values.
  double min = 0.0;
  double max = 0.0;

  bool categorical() const { return kind == FeatureKind::kCategorical; }
  int num_codes() const { return static_cast<int>(labels.size()); }
};

// Ordered feature list plus the encoder tables.
class FeatureSchema {
 public:
  FeatureSchema() = default;
  explicit FeatureSchema(std::vector<FeatureSpec> features);

  // A schema of `d` numeric features named f0..f{d-1}, each with range
  // [lo, hi]. Used for non-catalog regression data.
  static FeatureSchema Numeric(int d, double lo = 0.0, double hi = 1.0);

  int size() const { return static_cast<int>(features_.size()); }
  const FeatureSpec& feature(int i) const { return features_[i]; }
  const std::vector<FeatureSpec>& features() const { return features_; }

  std::optional<int> FindFeature(std::string_view name) const;

  // Code 1..K of `label` for categorical feature `i`.
  std::optional<int> CodeOf(int i, std::string_view label) const;

  // Label for an encoded categorical value, or nullopt when out of range.
  std::optional<std::string> LabelOf(int i, double code) const;

  // Human readable value: decoded label, numeric text, or "MISSING".
  std::string FormatValue(int i, double value) const;

  // Stable identifier of names, kinds and label tables (not ranges).
  const std::string& fingerprint() const { return fingerprint_; }

  nlohmann::json ToJson() const;
  static absl::StatusOr<FeatureSchema> FromJson(const nlohmann::json& json);

 private:
  void ComputeFingerprint();

  std::vector<FeatureSpec> features_;
  std::string fingerprint_;
};

struct EncodedInstance {
  std::vector<double> values;
  std::string product_id;
};

// Builds the schema from training products. Attributes come first (sorted by
// name), then list_price, then launch_week when requested. An attribute is
// numeric when every present value is numeric; categorical labels get codes
// 1..K in sorted order. Attributes with no present value are dropped.
absl::StatusOr<FeatureSchema> FitEncoder(std::span<const ProductRecord> products,
                                         bool include_launch_week = true);

// Total: unseen labels, type mismatches and absent attributes encode as
// kMissing.
EncodedInstance Encode(const ProductRecord& product,
                       const FeatureSchema& schema);

// Inverse of Encode for the schema's features. Product id is carried over;
// category is left empty.
ProductRecord Decode(const EncodedInstance& instance,
                     const FeatureSchema& schema);

}  // namespace strstudio::catalog

#endif  // STRSTUDIO_CATALOG_ENCODER_H_
