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

#include "strstudio/catalog/dataset.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "strstudio/util/strings.h"
#include "spdlog/spdlog.h"
#include "strstudio/util/csv.h"
#include "strstudio/util/files.h"
#include "strstudio/util/random.h"
#include "strstudio/util/status_macros.h"

namespace strstudio::catalog {

absl::StatusOr<Dataset> AssembleDataset(std::span<const ProductRecord> products,
                                        const SalesLedger& ledger,
                                        const FeatureSchema& schema,
                                        const AssembleOptions& options) {
  const SeasonCalendar calendar(options.season_year);
  Dataset dataset;
  dataset.schema = schema;
  std::vector<int64_t> sold;
  for (const auto& product : products) {
    auto str = ComputeSellThrough(product, ledger, calendar,
                                  options.horizon_weeks);
    if (!str.ok()) {
      spdlog::info("excluding product {}: {}", product.product_id,
                   str.status().message());
      dataset.exclusions.push_back(
          {product.product_id, std::string(str.status().message())});
      continue;
    }
    LabeledInstance row;
    row.instance = Encode(product, schema);
    row.target_str = str->str;
    dataset.rows.push_back(std::move(row));
    sold.push_back(str->units_sold);
  }
  if (dataset.rows.empty()) {
    return absl::FailedPreconditionError(
        "no product has units received within the horizon");
  }
  const double mean =
      static_cast<double>(std::accumulate(sold.begin(), sold.end(),
                                          int64_t{0})) /
      static_cast<double>(sold.size());
  for (size_t i = 0; i < dataset.rows.size(); ++i) {
    const double raw =
        mean > 0 ? static_cast<double>(sold[i]) / mean : 1.0;
    dataset.rows[i].weight = std::max(raw, kMinInstanceWeight);
  }
  dataset.provenance = StrCat(
      "assembled from ", products.size(), " products; season ",
      options.season_year, "; horizon ", options.horizon_weeks, " weeks; ",
      dataset.rows.size(), " eligible, ", dataset.exclusions.size(),
      " excluded");
  return dataset;
}

Dataset SelectRows(const Dataset& dataset, std::span<const size_t> rows) {
  Dataset out;
  out.schema = dataset.schema;
  out.provenance = dataset.provenance;
  out.rows.reserve(rows.size());
  for (const size_t r : rows) out.rows.push_back(dataset.rows[r]);
  return out;
}

absl::StatusOr<std::vector<Dataset>> SplitDataset(
    const Dataset& dataset, std::span<const double> fractions, uint64_t seed) {
  if (fractions.empty()) {
    return absl::InvalidArgumentError("no split fractions given");
  }
  double total = 0.0;
  for (const double f : fractions) {
    if (!(f > 0.0)) {
      return absl::InvalidArgumentError("split fractions must be positive");
    }
    total += f;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    return absl::InvalidArgumentError(
        StrCat("split fractions sum to ", total, ", expected 1"));
  }
  const size_t n = dataset.size();
  std::vector<size_t> sizes(fractions.size());
  std::vector<std::pair<double, size_t>> remainders;
  size_t assigned = 0;
  for (size_t k = 0; k < fractions.size(); ++k) {
    const double exact = fractions[k] * static_cast<double>(n);
    // Guard against 0.6 * 100 evaluating to 59.999...
    sizes[k] = static_cast<size_t>(std::floor(exact + 1e-9));
    assigned += sizes[k];
    remainders.emplace_back(exact - static_cast<double>(sizes[k]), k);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (size_t i = 0; assigned < n; ++i, ++assigned) {
    ++sizes[remainders[i % remainders.size()].second];
  }
  for (size_t k = 0; k < sizes.size(); ++k) {
    if (sizes[k] == 0) {
      return absl::InvalidArgumentError(
          StrCat("split part ", k, " would be empty (", n, " rows)"));
    }
  }

  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  utils::Random rng(seed);
  rng.Shuffle(std::span<size_t>(order));

  std::vector<Dataset> parts;
  size_t offset = 0;
  for (const size_t size : sizes) {
    std::vector<size_t> rows(order.begin() + offset,
                             order.begin() + offset + size);
    std::sort(rows.begin(), rows.end());
    parts.push_back(SelectRows(dataset, rows));
    offset += size;
  }
  return parts;
}

absl::StatusOr<DatasetSplit> SplitThreeWay(const Dataset& dataset,
                                           double base_fraction,
                                           double error_fraction,
                                           double test_fraction,
                                           uint64_t seed) {
  const double fractions[] = {base_fraction, error_fraction, test_fraction};
  ASSIGN_OR_RETURN(auto parts, SplitDataset(dataset, fractions, seed));
  return DatasetSplit{std::move(parts[0]), std::move(parts[1]),
                      std::move(parts[2])};
}

std::string FormatDatasetCsv(const Dataset& dataset) {
  std::vector<std::string> header = {"product_id"};
  for (const auto& f : dataset.schema.features()) header.push_back(f.name);
  header.push_back("target_str");
  header.push_back("weight");
  std::string out = utils::FormatCsvRow(header);
  for (const auto& row : dataset.rows) {
    std::vector<std::string> fields = {row.instance.product_id};
    for (const double v : row.instance.values) {
      fields.push_back(IsMissing(v) ? "" : utils::FormatDouble(v));
    }
    fields.push_back(utils::FormatDouble(row.target_str));
    fields.push_back(utils::FormatDouble(row.weight));
    out += utils::FormatCsvRow(fields);
  }
  return out;
}

absl::Status SaveDataset(const Dataset& dataset,
                         const std::string& directory) {
  RETURN_IF_ERROR(utils::EnsureDirectory(directory));
  RETURN_IF_ERROR(utils::WriteFile(utils::JoinPath(directory, kDatasetFile),
                                   FormatDatasetCsv(dataset)));
  nlohmann::json schema = dataset.schema.ToJson();
  schema["provenance"] = dataset.provenance;
  RETURN_IF_ERROR(utils::WriteFile(utils::JoinPath(directory, kSchemaFile),
                                   schema.dump(2) + "\n"));
  std::string exclusions = "product_id,reason\n";
  for (const auto& e : dataset.exclusions) {
    const std::string fields[] = {e.product_id, e.reason};
    exclusions += utils::FormatCsvRow(fields);
  }
  return utils::WriteFile(utils::JoinPath(directory, kExclusionsFile),
                          exclusions);
}

absl::StatusOr<Dataset> LoadDataset(const std::string& directory) {
  Dataset dataset;
  const std::string schema_path = utils::JoinPath(directory, kSchemaFile);
  ASSIGN_OR_RETURN(const std::string schema_text, utils::ReadFile(schema_path));
  nlohmann::json schema_json =
      nlohmann::json::parse(schema_text, nullptr, /*allow_exceptions=*/false);
  if (schema_json.is_discarded()) {
    return absl::InvalidArgumentError(
        StrCat(schema_path, ": invalid JSON"));
  }
  ASSIGN_OR_RETURN(dataset.schema, FeatureSchema::FromJson(schema_json));
  dataset.provenance = schema_json.value("provenance", "");

  const std::string data_path = utils::JoinPath(directory, kDatasetFile);
  ASSIGN_OR_RETURN(const auto table, utils::ReadCsvFile(data_path));
  const int d = dataset.schema.size();
  if (static_cast<int>(table.header.size()) != d + 3 ||
      table.header.front() != "product_id" ||
      table.header[d + 1] != "target_str" || table.header[d + 2] != "weight") {
    return absl::InvalidArgumentError(
        StrCat(data_path, ": header does not match schema"));
  }
  for (int i = 0; i < d; ++i) {
    if (table.header[i + 1] != dataset.schema.feature(i).name) {
      return absl::InvalidArgumentError(StrCat(
          data_path, ": column ", i + 1, " is '", table.header[i + 1],
          "', schema expects '", dataset.schema.feature(i).name, "'"));
    }
  }
  for (size_t r = 0; r < table.rows.size(); ++r) {
    const auto& cells = table.rows[r];
    LabeledInstance row;
    row.instance.product_id = cells[0];
    row.instance.values.assign(d, kMissing);
    for (int i = 0; i < d; ++i) {
      if (cells[i + 1].empty()) continue;
      auto v = utils::ParseDouble(cells[i + 1]);
      if (!v.ok()) {
        return absl::InvalidArgumentError(StrCat(
            data_path, ": line ", table.line_numbers[r], ": ",
            v.status().message()));
      }
      row.instance.values[i] = *v;
    }
    auto target = utils::ParseDouble(cells[d + 1]);
    auto weight = utils::ParseDouble(cells[d + 2]);
    if (!target.ok() || !weight.ok() || *weight <= 0) {
      return absl::InvalidArgumentError(StrCat(
          data_path, ": line ", table.line_numbers[r],
          ": invalid target or weight"));
    }
    row.target_str = *target;
    row.weight = *weight;
    dataset.rows.push_back(std::move(row));
  }
  const std::string exclusions_path =
      utils::JoinPath(directory, kExclusionsFile);
  if (utils::FileExists(exclusions_path)) {
    ASSIGN_OR_RETURN(const auto excl, utils::ReadCsvFile(exclusions_path));
    for (const auto& cells : excl.rows) {
      if (cells.size() >= 2) dataset.exclusions.push_back({cells[0], cells[1]});
    }
  }
  return dataset;
}

}  // namespace strstudio::catalog
