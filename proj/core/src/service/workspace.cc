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

#include "strstudio/service/workspace.h"

#include <cmath>

#include "spdlog/spdlog.h"
#include "strstudio/util/files.h"
#include "strstudio/util/status_macros.h"
#include "strstudio/util/strings.h"

namespace strstudio::service {

absl::StatusOr<Workspace> Workspace::Load(const std::string& data_dir,
                                          const std::string& model_dir) {
  ASSIGN_OR_RETURN(catalog::RawCatalog raw, catalog::LoadCatalog(data_dir));
  ASSIGN_OR_RETURN(uncertainty::DistributionEstimator estimator,
                   uncertainty::LoadEstimator(model_dir));
  catalog::AssembleOptions options;
  options.season_year = catalog::InferSeasonYear(raw.sales);
  const std::string dataset_dir = utils::JoinPath(data_dir, "dataset");
  catalog::Dataset dataset;
  if (utils::FileExists(utils::JoinPath(dataset_dir, catalog::kSchemaFile))) {
    ASSIGN_OR_RETURN(dataset, catalog::LoadDataset(dataset_dir));
  } else {
    const std::string schema_path = utils::JoinPath(model_dir, catalog::kSchemaFile);
    catalog::FeatureSchema schema;
    if (utils::FileExists(schema_path)) {
      ASSIGN_OR_RETURN(const std::string text, utils::ReadFile(schema_path));
      const auto json = nlohmann::json::parse(text, nullptr, false);
      if (json.is_discarded()) {
        return absl::DataLossError(StrCat(schema_path, ": not valid JSON"));
      }
      ASSIGN_OR_RETURN(schema, catalog::FeatureSchema::FromJson(json));
    } else {
      ASSIGN_OR_RETURN(schema, catalog::FitEncoder(raw.products));
    }
    const auto ledger = catalog::SalesLedger::Build(raw.sales, raw.inventory);
    ASSIGN_OR_RETURN(dataset,
                     catalog::AssembleDataset(raw.products, ledger, schema, options));
  }
  return FromParts(std::move(raw), std::move(dataset), std::move(estimator), options);
}

absl::StatusOr<Workspace> Workspace::FromParts(catalog::RawCatalog catalog,
                                               catalog::Dataset dataset,
                                               uncertainty::DistributionEstimator estimator,
                                               catalog::AssembleOptions options) {
  RETURN_IF_ERROR(estimator.Validate());
  RETURN_IF_ERROR(estimator.CheckSchema(dataset.schema));
  Workspace ws;
  ws.catalog_ = std::move(catalog);
  ws.dataset_ = std::move(dataset);
  ws.estimator_ = std::move(estimator);
  ws.options_ = options;
  ws.Index();
  return ws;
}

void Workspace::Index() {
  ledger_ = catalog::SalesLedger::Build(catalog_.sales, catalog_.inventory);
  for (size_t i = 0; i < catalog_.products.size(); ++i) {
    product_index_[catalog_.products[i].product_id] = i;
  }
  for (size_t i = 0; i < dataset_.rows.size(); ++i) {
    const std::string& id = dataset_.rows[i].instance.product_id;
    if (!id.empty()) row_index_[id] = i;
  }
  size_t orphans = 0;
  for (const auto& [id, row] : row_index_) {
    if (!product_index_.contains(id)) ++orphans;
  }
  if (orphans > 0) {
    spdlog::warn("{} dataset rows refer to products missing from the catalog", orphans);
  }
}

const catalog::ProductRecord* Workspace::FindProduct(const std::string& id) const {
  auto it = product_index_.find(id);
  return it == product_index_.end() ? nullptr : &catalog_.products[it->second];
}

std::optional<size_t> Workspace::RowOf(const std::string& id) const {
  auto it = row_index_.find(id);
  if (it == row_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<double> Workspace::StrOf(const std::string& id) const {
  const auto row = RowOf(id);
  if (!row) return std::nullopt;
  return dataset_.rows[*row].target_str;
}

std::optional<catalog::EncodedInstance> Workspace::InstanceOf(const std::string& id) const {
  if (const auto row = RowOf(id)) return dataset_.rows[*row].instance;
  if (const auto* product = FindProduct(id)) return catalog::Encode(*product, schema());
  return std::nullopt;
}

ProductSeries Workspace::Series(const catalog::ProductRecord& product, int n_weeks) const {
  ProductSeries s;
  s.sold.assign(n_weeks, 0);
  s.received.assign(n_weeks, 0);
  s.inventory_end.assign(n_weeks, 0);
  s.revenue.assign(n_weeks, 0.0);
  const catalog::SeasonCalendar calendar(options_.season_year);
  const int64_t launch = calendar.LaunchOrdinal(product.launch_week);
  for (const auto& flow : ledger_.Flows(product.product_id, launch, n_weeks)) {
    const auto received = catalog::ComputeReceived(flow.inventory_end, flow.sold);
    for (int w = 0; w < n_weeks; ++w) {
      s.sold[w] += flow.sold[w];
      s.received[w] += received[w];
      s.inventory_end[w] += flow.inventory_end[w];
      s.revenue[w] += flow.revenue[w];
    }
  }
  for (int w = 0; w < n_weeks; ++w) {
    s.average_price.push_back(s.sold[w] > 0 ? s.revenue[w] / s.sold[w]
                                            : catalog::kMissing);
  }
  return s;
}

std::optional<catalog::SellThrough> Workspace::SellThroughOf(
    const catalog::ProductRecord& product) const {
  if (!ledger_.HasProduct(product.product_id)) return std::nullopt;
  auto st = catalog::ComputeSellThrough(product, ledger_,
                                        catalog::SeasonCalendar(options_.season_year),
                                        options_.horizon_weeks);
  if (!st.ok()) return std::nullopt;
  return *st;
}

}  // namespace strstudio::service
