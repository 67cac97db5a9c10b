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

#ifndef STRSTUDIO_BENCHMARKS_FIXTURES_H_
#define STRSTUDIO_BENCHMARKS_FIXTURES_H_

#include "strstudio/catalog/dataset.h"
#include "strstudio/catalog/synthetic.h"
#include "strstudio/gbdt/trainer.h"

namespace strstudio::bench {

// Encoded dataset assembled from a synthetic single-category catalog.
inline catalog::Dataset CatalogDataset(int products, uint64_t seed = 1) {
  const auto synthetic = catalog::GenerateSyntheticCatalog(
      catalog::SyntheticCatalogConfig::SingleCategory("tops", products), seed);
  const auto& raw = synthetic.catalog;
  const auto schema = catalog::FitEncoder(raw.products).value();
  catalog::AssembleOptions options;
  options.season_year = catalog::InferSeasonYear(raw.sales);
  const auto ledger = catalog::SalesLedger::Build(raw.sales, raw.inventory);
  return catalog::AssembleDataset(raw.products, ledger, schema, options).value();
}

inline const catalog::Dataset& SharedDataset() {
  static const auto* data = new catalog::Dataset(CatalogDataset(1000));
  return *data;
}

inline const gbdt::TreeEnsemble& SharedModel() {
  static const auto* model =
      new gbdt::TreeEnsemble(gbdt::Train(SharedDataset(), gbdt::TrainConfig{}).value());
  return *model;
}

}  // namespace strstudio::bench

#endif  // STRSTUDIO_BENCHMARKS_FIXTURES_H_
