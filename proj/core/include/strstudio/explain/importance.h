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

#ifndef STRSTUDIO_EXPLAIN_IMPORTANCE_H_
#define STRSTUDIO_EXPLAIN_IMPORTANCE_H_

#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "nlohmann/json.hpp"
#include "strstudio/catalog/dataset.h"
#include "strstudio/gbdt/ensemble.h"

namespace strstudio::explain {

enum class ImportanceMethod { kGain, kMeanAbsShap };

std::string_view ImportanceMethodName(ImportanceMethod method);
absl::StatusOr<ImportanceMethod> ParseImportanceMethod(std::string_view name);

struct ImportanceReport {
  ImportanceMethod method = ImportanceMethod::kGain;
  std::vector<double> raw;     // Summed gain, or mean |phi|.
  std::vector<double> scores;  // raw / sum(raw); all zero when sum is zero.

  // Feature indices by decreasing score, ties by index.
  std::vector<int> Ranking() const;
  nlohmann::json ToJson(const catalog::FeatureSchema& schema) const;
  // Columns: rank, feature, score, raw.
  std::string ToCsv(const catalog::FeatureSchema& schema) const;
};

// Per-feature total of the split gains recorded at training time.
absl::StatusOr<ImportanceReport> GainImportance(
    const gbdt::TreeEnsemble& ensemble);

// Mean absolute attribution over the rows of `dataset`.
absl::StatusOr<ImportanceReport> GlobalShapImportance(
    const gbdt::TreeEnsemble& ensemble, const catalog::Dataset& dataset,
    int num_threads = 1);

}  // namespace strstudio::explain

#endif  // STRSTUDIO_EXPLAIN_IMPORTANCE_H_
