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

#ifndef STRSTUDIO_GBDT_TRAINER_H_
#define STRSTUDIO_GBDT_TRAINER_H_

#include <vector>

#include "absl/status/statusor.h"
#include "strstudio/catalog/dataset.h"
#include "strstudio/gbdt/ensemble.h"

namespace strstudio::gbdt {

struct TrainingLog {
  // Weighted training RMSE; entry 0 is the base score alone, entry t is the
  // model after t trees.
  std::vector<double> weighted_rmse;
};

// Gradient boosting on weighted squared error. Each round fits one tree to
// the residuals y - F(x) by exact greedy enumeration of split points:
//   gain = G_L^2/(W_L + l2) + G_R^2/(W_R + l2) - G^2/(W + l2)
// where G sums w * residual and W sums w over a node's rows. With l2 = 0 the
// gain is the reduction in weighted squared error. A split is kept when its
// gain exceeds min_split_gain and both children reach min_child_weight. For
// every candidate threshold, rows missing the feature are tried on both
// sides; the better side becomes the default direction (right on ties).
// Leaves hold G / (W + l2); the learning rate is stored separately.
absl::StatusOr<TreeEnsemble> Train(const catalog::Dataset& dataset,
                                   const TrainConfig& config,
                                   TrainingLog* log = nullptr);

// Unweighted root-mean-squared error of the ensemble over the dataset.
absl::StatusOr<double> Rmse(const TreeEnsemble& ensemble,
                            const catalog::Dataset& dataset);

}  // namespace strstudio::gbdt

#endif  // STRSTUDIO_GBDT_TRAINER_H_
