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

#ifndef STRSTUDIO_SERVICE_WORKSPACE_H_
#define STRSTUDIO_SERVICE_WORKSPACE_H_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "strstudio/catalog/dataset.h"
#include "strstudio/catalog/records.h"
#include "strstudio/catalog/sell_through.h"
#include "strstudio/uncertainty/distribution_estimator.h"

namespace strstudio::service {

// National weekly series of a product from its launch week.
struct ProductSeries {
  std::vector<int64_t> sold;
  std::vector<int64_t> received;
  std::vector<int64_t> inventory_end;
  std::vector<double> revenue;
  // revenue / sold; missing (NaN) in weeks without sales.
  std::vector<double> average_price;
};

// Read-only state behind the service: raw catalog, labeled dataset and the
// trained estimator.
class Workspace {
 public:
  // Raw CSVs come from `data_dir`. The dataset is read from
  // `data_dir`/dataset when present, otherwise assembled from the raw
  // tables. The estimator is read from `model_dir`.
  static absl::StatusOr<Workspace> Load(const std::string& data_dir,
                                        const std::string& model_dir);

  static absl::StatusOr<Workspace> FromParts(
      catalog::RawCatalog catalog, catalog::Dataset dataset,
      uncertainty::DistributionEstimator estimator,
      catalog::AssembleOptions options = {});

  const catalog::RawCatalog& catalog() const { return catalog_; }
  const catalog::Dataset& dataset() const { return dataset_; }
  const catalog::FeatureSchema& schema() const { return dataset_.schema; }
  const uncertainty::DistributionEstimator& estimator() const {
    return estimator_;
  }
  const catalog::AssembleOptions& options() const { return options_; }

  const catalog::ProductRecord* FindProduct(const std::string& id) const;
  // Dataset row of a product with an observed sell-through.
  std::optional<size_t> RowOf(const std::string& id) const;
  std::optional<double> StrOf(const std::string& id) const;
  // Dataset row instance, or the encoded product record.
  std::optional<catalog::EncodedInstance> InstanceOf(
      const std::string& id) const;

  ProductSeries Series(const catalog::ProductRecord& product,
                       int n_weeks) const;
  std::optional<catalog::SellThrough> SellThroughOf(
      const catalog::ProductRecord& product) const;

 private:
  void Index();

  catalog::RawCatalog catalog_;
  catalog::Dataset dataset_;
  uncertainty::DistributionEstimator estimator_;
  catalog::AssembleOptions options_;
  catalog::SalesLedger ledger_;
  std::map<std::string, size_t> product_index_;
  std::map<std::string, size_t> row_index_;
};

}  // namespace strstudio::service

#endif  // STRSTUDIO_SERVICE_WORKSPACE_H_
