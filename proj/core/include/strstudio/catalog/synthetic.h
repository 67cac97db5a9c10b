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

#ifndef STRSTUDIO_CATALOG_SYNTHETIC_H_
#define STRSTUDIO_CATALOG_SYNTHETIC_H_

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "strstudio/catalog/dataset.h"
#include "strstudio/catalog/records.h"

namespace strstudio::catalog {

struct CategorySize {
  std::string name;
  int products = 0;
};

struct SyntheticCatalogConfig {
  std::vector<CategorySize> categories;
  int season_year = 2019;
  int first_launch_week = 6;
  int last_launch_week = 26;
  int n_stores = 12;
  int min_stores_per_product = 3;
  int max_stores_per_product = 6;
  int life_weeks = 8;  // Weeks on sale; must be >= horizon_weeks.
  int horizon_weeks = kDefaultHorizonWeeks;
  // Scale of the heteroscedastic STR noise; 0 gives noise-free targets.
  double noise_scale = 0.06;
  // Realized STR values lie on a 1/str_quantum grid, and window receipts are
  // multiples of str_quantum, so sold/received is exact.
  int str_quantum = 100;
  double missing_rate = 0.03;  // Per categorical attribute cell.
  double replenish_probability = 0.35;

  // The eight category sizes of a spring-summer collection
  // (shorts 100 ... t-shirts 1248, 4630 products in total).
  static SyntheticCatalogConfig FullCatalog();
  static SyntheticCatalogConfig SingleCategory(std::string name, int products);
};

// Simulated flows of one product, known exactly by the generator.
struct ProductTruth {
  std::string product_id;
  double ground_truth_str = 0.0;  // Noise-free STR.
  double realized_str = 0.0;      // STR after noise.
  int64_t window_sold = 0;
  int64_t window_received = 0;
  int64_t total_received = 0;
  int64_t total_sold = 0;
  int64_t final_inventory = 0;
};

using GroundTruthFn = std::function<double(const ProductRecord&)>;

struct SyntheticCatalog {
  RawCatalog catalog;
  std::vector<ProductTruth> truth;  // Parallel to catalog.products.
  GroundTruthFn ground_truth;
};

// The noise-free STR model behind the generator, quantized to
// 1/str_quantum. Depends on the category, every attribute except "trim",
// list price and launch week; "sleeveless" is the best sleeve length.
double SyntheticGroundTruthStr(const ProductRecord& product, int str_quantum);

// Standard deviation of the STR noise for a product.
double SyntheticNoiseSd(const ProductRecord& product, double noise_scale);

// Fully deterministic given `seed`. Records come out in canonical order.
SyntheticCatalog GenerateSyntheticCatalog(const SyntheticCatalogConfig& config,
                                          uint64_t seed);

// A numeric regression task y = mean(x) + stddev(x) * N(0, 1) on x in
// [0, 1]^d, with d >= 4. stddev(x) is sigma_low for x0 < 0.5 and sigma_high
// otherwise. Targets are not clamped.
struct RegressionTask {
  Dataset dataset;
  std::function<double(std::span<const double>)> mean;
  std::function<double(std::span<const double>)> stddev;
};

RegressionTask GenerateHeteroscedasticRegression(size_t n, uint64_t seed,
                                                 double sigma_low = 0.05,
                                                 double sigma_high = 0.15,
                                                 int d = 4);

}  // namespace strstudio::catalog

#endif  // STRSTUDIO_CATALOG_SYNTHETIC_H_
