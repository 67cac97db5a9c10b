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

#ifndef STRSTUDIO_GBDT_ENSEMBLE_H_
#define STRSTUDIO_GBDT_ENSEMBLE_H_

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "strstudio/catalog/encoder.h"

namespace strstudio::gbdt {

inline constexpr double kNotRecorded = std::numeric_limits<double>::quiet_NaN();

// A node of a regression tree. Split nodes send x[feature] < threshold to
// the left child, x[feature] >= threshold to the right child, and missing
// values along default_left.
struct TreeNode {
  int32_t feature = -1;  // -1 on leaves.
  double threshold = 0.0;
  bool default_left = false;
  int32_t left = -1;
  int32_t right = -1;
  double value = 0.0;  // Leaf output, before learning-rate scaling.
  // Loss reduction of the split, recorded at training time.
  double gain = kNotRecorded;
  // Sum of training instance weights that reached the node.
  double cover = kNotRecorded;

  bool is_leaf() const { return left < 0; }
};

struct Tree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root.

  // Index of the leaf reached by `x`.
  int LeafIndex(std::span<const double> x) const;
  double Predict(std::span<const double> x) const {
    return nodes[LeafIndex(x)].value;
  }
  // 0 for a single leaf.
  int Depth() const;
  int NumLeaves() const;
  static Tree Leaf(double value, double cover = kNotRecorded);
};

struct TrainConfig {
  int n_rounds = 100;
  int max_depth = 4;
  double learning_rate = 0.1;
  double l2_leaf_reg = 1.0;
  double min_split_gain = 0.0;
  double min_child_weight = 1.0;
  double row_subsample = 1.0;
  uint64_t seed = 0;

  absl::Status Validate() const;
};

struct TreeEnsemble {
  double base_score = 0.0;
  double learning_rate = 1.0;
  std::vector<Tree> trees;
  int num_features = 0;
  std::string schema_fingerprint;
  TrainConfig train_config;

  // base_score + learning_rate * (sum of tree outputs).
  absl::StatusOr<double> Predict(std::span<const double> x) const;
  absl::StatusOr<std::vector<double>> PredictBatch(
      std::span<const catalog::EncodedInstance> instances) const;

  // Skips the length check.
  double PredictUnchecked(std::span<const double> x) const;

  // Prediction using only the first `n_trees` trees.
  double PredictPrefix(std::span<const double> x, size_t n_trees) const;

  // Fails when `schema` differs from the one the model was trained on.
  absl::Status CheckSchema(const catalog::FeatureSchema& schema) const;

  int NumSplits() const;
};

}  // namespace strstudio::gbdt

#endif  // STRSTUDIO_GBDT_ENSEMBLE_H_
