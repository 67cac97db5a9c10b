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

#ifndef STRSTUDIO_CATALOG_DATASET_H_
#define STRSTUDIO_CATALOG_DATASET_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "strstudio/catalog/encoder.h"
#include "strstudio/catalog/records.h"
#include "strstudio/catalog/sell_through.h"

namespace strstudio::catalog {

inline constexpr double kMinInstanceWeight = 0.01;

struct LabeledInstance {
  EncodedInstance instance;
  double target_str = 0.0;  // Regression target; STR rows lie in [0, 1].
  double weight = 1.0;
};

struct Exclusion {
  std::string product_id;
  std::string reason;
};

struct Dataset {
  FeatureSchema schema;
  std::vector<LabeledInstance> rows;
  std::string provenance;
  // Products left out of `rows`, with the reason.
  std::vector<Exclusion> exclusions;

  size_t size() const { return rows.size(); }
  bool empty() const { return rows.empty(); }
};

struct AssembleOptions {
  int horizon_weeks = kDefaultHorizonWeeks;
  int season_year = 2019;
};

// One row per product with at least one unit received in the horizon.
// weight = units sold in the horizon / mean over eligible products, floored
// at kMinInstanceWeight. Fails when no product is eligible.
absl::StatusOr<Dataset> AssembleDataset(std::span<const ProductRecord> products,
                                        const SalesLedger& ledger,
                                        const FeatureSchema& schema,
                                        const AssembleOptions& options);

// Deterministic partition into parts of the given fractions (positive,
// summing to 1). Part sizes use largest-remainder rounding. Fails if a part
// would be empty.
absl::StatusOr<std::vector<Dataset>> SplitDataset(
    const Dataset& dataset, std::span<const double> fractions, uint64_t seed);

struct DatasetSplit {
  Dataset train_base;
  Dataset train_error;
  Dataset test;
};

absl::StatusOr<DatasetSplit> SplitThreeWay(const Dataset& dataset,
                                           double base_fraction,
                                           double error_fraction,
                                           double test_fraction,
                                           uint64_t seed);

// Subset of rows, keeping schema and provenance.
Dataset SelectRows(const Dataset& dataset, std::span<const size_t> rows);

// dataset.csv (product_id, encoded features, target_str, weight),
// schema.json and exclusions.csv inside `directory`.
inline constexpr char kDatasetFile[] = "dataset.csv";
inline constexpr char kSchemaFile[] = "schema.json";
inline constexpr char kExclusionsFile[] = "exclusions.csv";

std::string FormatDatasetCsv(const Dataset& dataset);
absl::Status SaveDataset(const Dataset& dataset, const std::string& directory);
absl::StatusOr<Dataset> LoadDataset(const std::string& directory);

}  // namespace strstudio::catalog

#endif  // STRSTUDIO_CATALOG_DATASET_H_
