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

#ifndef STRSTUDIO_GBDT_GRID_SEARCH_H_
#define STRSTUDIO_GBDT_GRID_SEARCH_H_

#include <cstdint>
#include <vector>

#include "absl/status/statusor.h"
#include "nlohmann/json.hpp"
#include "strstudio/catalog/dataset.h"
#include "strstudio/gbdt/ensemble.h"

namespace strstudio::gbdt {

// Cartesian hyperparameter grid. Expansion order is depth outermost, then
// rounds, learning rate, l2 and min split gain. Fields not listed come from
// `base`.
struct ParamGrid {
  std::vector<int> max_depth;
  std::vector<int> n_rounds;
  std::vector<double> learning_rate;
  std::vector<double> l2_leaf_reg;
  std::vector<double> min_split_gain;
  TrainConfig base;

  static ParamGrid Default();
  std::vector<TrainConfig> Expand() const;
};

// Arrays under the same keys as ParamGrid; a scalar counts as a singleton.
// Omitted axes take the default grid's values.
absl::StatusOr<ParamGrid> ParamGridFromJson(const nlohmann::json& json);

struct GridPoint {
  TrainConfig config;
  std::vector<double> fold_rmse;
  double mean_rmse = 0.0;
  double std_rmse = 0.0;  // Population standard deviation over folds.
};

struct CvReport {
  std::vector<GridPoint> points;  // In grid order.
  size_t chosen_index = 0;
  uint64_t fold_seed = 0;
  int k_folds = 0;

  const TrainConfig& chosen() const { return points[chosen_index].config; }
  nlohmann::json ToJson() const;
};

// Row i of the dataset belongs to fold assignment[i] in [0, k).
std::vector<int> AssignFolds(size_t n_rows, int k_folds, uint64_t seed);

// k-fold cross-validated RMSE for every grid point; the point with the
// lowest mean wins, ties going to the earliest. Points are evaluated on up to
// `num_threads` threads; the result does not depend on the thread count.
absl::StatusOr<CvReport> GridSearch(const catalog::Dataset& dataset,
                                    const std::vector<TrainConfig>& grid,
                                    int k_folds, uint64_t seed,
                                    int num_threads = 1);

}  // namespace strstudio::gbdt

#endif  // STRSTUDIO_GBDT_GRID_SEARCH_H_
