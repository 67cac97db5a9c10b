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

#include "strstudio/gbdt/ensemble.h"

#include <algorithm>
#include <functional>

#include "strstudio/util/strings.h"

namespace strstudio::gbdt {

int Tree::LeafIndex(std::span<const double> x) const {
  int index = 0;
  while (!nodes[index].is_leaf()) {
    const TreeNode& node = nodes[index];
    const double v = x[node.feature];
    if (catalog::IsMissing(v)) {
      index = node.default_left ? node.left : node.right;
    } else {
      index = v < node.threshold ? node.left : node.right;
    }
  }
  return index;
}

int Tree::Depth() const {
  std::function<int(int)> depth = [&](int i) -> int {
    if (nodes[i].is_leaf()) return 0;
    return 1 + std::max(depth(nodes[i].left), depth(nodes[i].right));
  };
  return nodes.empty() ? 0 : depth(0);
}

int Tree::NumLeaves() const {
  return static_cast<int>(std::count_if(
      nodes.begin(), nodes.end(), [](const TreeNode& n) { return n.is_leaf(); }));
}

Tree Tree::Leaf(double value, double cover) {
  Tree tree;
  TreeNode node;
  node.value = value;
  node.cover = cover;
  tree.nodes.push_back(node);
  return tree;
}

absl::Status TrainConfig::Validate() const {
  if (n_rounds < 0) return absl::InvalidArgumentError("n_rounds must be >= 0");
  if (max_depth < 0) return absl::InvalidArgumentError("max_depth must be >= 0");
  if (!(learning_rate > 0.0 && learning_rate <= 1.0)) {
    return absl::InvalidArgumentError("learning_rate must be in (0, 1]");
  }
  if (!(l2_leaf_reg >= 0.0)) {
    return absl::InvalidArgumentError("l2_leaf_reg must be >= 0");
  }
  if (!(min_split_gain >= 0.0)) {
    return absl::InvalidArgumentError("min_split_gain must be >= 0");
  }
  if (!(min_child_weight >= 0.0)) {
    return absl::InvalidArgumentError("min_child_weight must be >= 0");
  }
  if (!(row_subsample > 0.0 && row_subsample <= 1.0)) {
    return absl::InvalidArgumentError("row_subsample must be in (0, 1]");
  }
  return absl::OkStatus();
}

double TreeEnsemble::PredictUnchecked(std::span<const double> x) const {
  return PredictPrefix(x, trees.size());
}

double TreeEnsemble::PredictPrefix(std::span<const double> x,
                                   size_t n_trees) const {
  // The trainer accumulates raw leaf sums in the same order, so training-time
  // predictions are bit-identical to these.
  double sum = 0.0;
  const size_t n = std::min(n_trees, trees.size());
  for (size_t t = 0; t < n; ++t) sum += trees[t].Predict(x);
  return base_score + learning_rate * sum;
}

absl::StatusOr<double> TreeEnsemble::Predict(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != num_features) {
    return absl::InvalidArgumentError(
        StrCat("instance has ", x.size(), " features, model expects ",
               num_features));
  }
  return PredictUnchecked(x);
}

absl::StatusOr<std::vector<double>> TreeEnsemble::PredictBatch(
    std::span<const catalog::EncodedInstance> instances) const {
  std::vector<double> out;
  out.reserve(instances.size());
  for (const auto& instance : instances) {
    auto p = Predict(instance.values);
    if (!p.ok()) return p.status();
    out.push_back(*p);
  }
  return out;
}

absl::Status TreeEnsemble::CheckSchema(
    const catalog::FeatureSchema& schema) const {
  if (schema.size() != num_features) {
    return absl::FailedPreconditionError(StrCat(
        "schema has ", schema.size(), " features, model expects ", num_features));
  }
  if (!schema_fingerprint.empty() &&
      schema.fingerprint() != schema_fingerprint) {
    return absl::FailedPreconditionError(
        StrCat("schema fingerprint ", schema.fingerprint(),
               " does not match model fingerprint ", schema_fingerprint));
  }
  return absl::OkStatus();
}

int TreeEnsemble::NumSplits() const {
  int n = 0;
  for (const auto& tree : trees) {
    n += static_cast<int>(tree.nodes.size()) - tree.NumLeaves();
  }
  return n;
}

}  // namespace strstudio::gbdt
