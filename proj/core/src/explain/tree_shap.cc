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

#include "strstudio/explain/tree_shap.h"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <thread>

#include "strstudio/util/status_macros.h"
#include "strstudio/util/strings.h"

namespace strstudio::explain {

using gbdt::Tree;
using gbdt::TreeEnsemble;
using gbdt::TreeNode;
using internal::ShapPath;

namespace internal {

void ShapPath::Extend(double zero_fraction, double one_fraction, int feature) {
  const size_t depth = elements_.size();
  elements_.push_back({feature, zero_fraction, one_fraction, depth == 0 ? 1.0 : 0.0});
  const double n = static_cast<double>(depth + 1);
  for (size_t j = depth; j-- > 0;) {
    elements_[j + 1].weight += one_fraction * elements_[j].weight * (j + 1) / n;
    elements_[j].weight = zero_fraction * elements_[j].weight * (depth - j) / n;
  }
}

void ShapPath::Unwind(size_t index) {
  const size_t depth = elements_.size() - 1;
  const double one = elements_[index].one_fraction;
  const double zero = elements_[index].zero_fraction;
  const double n = static_cast<double>(depth + 1);
  double next_one_portion = elements_[depth].weight;
  for (size_t j = depth; j-- > 0;) {
    if (one != 0.0) {
      const double saved = elements_[j].weight;
      elements_[j].weight = next_one_portion * n / ((j + 1) * one);
      next_one_portion = saved - elements_[j].weight * zero * (depth - j) / n;
    } else {
      elements_[j].weight = elements_[j].weight * n / (zero * (depth - j));
    }
  }
  for (size_t j = index; j < depth; ++j) {
    elements_[j].feature = elements_[j + 1].feature;
    elements_[j].zero_fraction = elements_[j + 1].zero_fraction;
    elements_[j].one_fraction = elements_[j + 1].one_fraction;
  }
  elements_.pop_back();
}

double ShapPath::UnwoundSum(size_t index) const {
  const size_t depth = elements_.size() - 1;
  const double one = elements_[index].one_fraction;
  const double zero = elements_[index].zero_fraction;
  const double n = static_cast<double>(depth + 1);
  double next_one_portion = elements_[depth].weight;
  double total = 0.0;
  for (size_t j = depth; j-- > 0;) {
    if (one != 0.0) {
      const double part = next_one_portion * n / ((j + 1) * one);
      total += part;
      next_one_portion = elements_[j].weight - part * zero * (depth - j) / n;
    } else if (zero != 0.0) {
      total += elements_[j].weight / zero / ((depth - j) / n);
    }
  }
  return total;
}

}  // namespace internal

namespace {

int HotChild(const TreeNode& node, std::span<const double> x) {
  const double v = x[node.feature];
  if (catalog::IsMissing(v)) return node.default_left ? node.left : node.right;
  return v < node.threshold ? node.left : node.right;
}

void Recurse(const Tree& tree, int index, std::span<const double> x,
             ShapPath path, double zero_fraction, double one_fraction,
             int feature, std::vector<double>& phi) {
  path.Extend(zero_fraction, one_fraction, feature);
  const TreeNode& node = tree.nodes[index];
  if (node.is_leaf()) {
    const auto& el = path.elements();
    for (size_t i = 1; i < el.size(); ++i) {
      const double w = path.UnwoundSum(i);
      phi[el[i].feature] += w * (el[i].one_fraction - el[i].zero_fraction) * node.value;
    }
    return;
  }
  const int hot = HotChild(node, x);
  const int cold = hot == node.left ? node.right : node.left;
  double incoming_zero = 1.0, incoming_one = 1.0;
  for (size_t i = 1; i < path.size(); ++i) {
    if (path.elements()[i].feature == node.feature) {
      incoming_zero = path.elements()[i].zero_fraction;
      incoming_one = path.elements()[i].one_fraction;
      path.Unwind(i);
      break;
    }
  }
  const double hot_zero = incoming_zero * tree.nodes[hot].cover / node.cover;
  const double cold_zero = incoming_zero * tree.nodes[cold].cover / node.cover;
  // A branch reached with no probability either way adds nothing.
  if (hot_zero != 0.0 || incoming_one != 0.0) {
    Recurse(tree, hot, x, path, hot_zero, incoming_one, node.feature, phi);
  }
  if (cold_zero != 0.0) {
    Recurse(tree, cold, x, path, cold_zero, 0.0, node.feature, phi);
  }
}

// Cover-weighted mean of the leaves.
double ExpectedValue(const Tree& tree, int index) {
  const TreeNode& node = tree.nodes[index];
  if (node.is_leaf()) return node.value;
  return tree.nodes[node.left].cover / node.cover * ExpectedValue(tree, node.left) +
         tree.nodes[node.right].cover / node.cover * ExpectedValue(tree, node.right);
}

absl::Status CheckCovers(const TreeEnsemble& ensemble) {
  for (size_t t = 0; t < ensemble.trees.size(); ++t) {
    for (const TreeNode& node : ensemble.trees[t].nodes) {
      if (std::isnan(node.cover)) {
        return absl::FailedPreconditionError(
            StrCat("tree ", t, " has no cover statistics; retrain the model or "
                   "supply background data"));
      }
      if (!node.is_leaf() && !(node.cover > 0.0)) {
        return absl::FailedPreconditionError(
            StrCat("tree ", t, " has a split with zero cover"));
      }
    }
  }
  return absl::OkStatus();
}

absl::Status CheckInstance(const TreeEnsemble& ensemble, std::span<const double> x) {
  if (static_cast<int>(x.size()) != ensemble.num_features) {
    return absl::InvalidArgumentError(StrCat("instance has ", x.size(),
                                             " features, model expects ",
                                             ensemble.num_features));
  }
  return absl::OkStatus();
}

Attribution ShapUnchecked(const TreeEnsemble& ensemble, std::span<const double> x) {
  Attribution out;
  out.contributions.assign(ensemble.num_features, 0.0);
  double expected = 0.0;
  std::vector<double> phi(ensemble.num_features);
  for (const Tree& tree : ensemble.trees) {
    std::fill(phi.begin(), phi.end(), 0.0);
    Recurse(tree, 0, x, ShapPath(), 1.0, 1.0, -1, phi);
    for (int j = 0; j < ensemble.num_features; ++j) out.contributions[j] += phi[j];
    expected += ExpectedValue(tree, 0);
  }
  for (double& c : out.contributions) c *= ensemble.learning_rate;
  out.base_value = ensemble.base_score + ensemble.learning_rate * expected;
  out.predicted = ensemble.PredictUnchecked(x);
  return out;
}

// Conditional expectation of one tree given the features in `known`.
double SubsetValue(const Tree& tree, int index, std::span<const double> x,
                   uint32_t known) {
  const TreeNode& node = tree.nodes[index];
  if (node.is_leaf()) return node.value;
  if (known & (1u << node.feature)) {
    return SubsetValue(tree, HotChild(node, x), x, known);
  }
  return tree.nodes[node.left].cover / node.cover *
             SubsetValue(tree, node.left, x, known) +
         tree.nodes[node.right].cover / node.cover *
             SubsetValue(tree, node.right, x, known);
}

}  // namespace

nlohmann::json Attribution::ToJson(const catalog::FeatureSchema& schema) const {
  nlohmann::json features = nlohmann::json::array();
  for (size_t i = 0; i < contributions.size(); ++i) {
    features.push_back(
        {{"feature", static_cast<int>(i) < schema.size() ? schema.feature(i).name
                                                         : StrCat("f", i)},
         {"contribution", contributions[i]}});
  }
  return {{"base_value", base_value},
          {"predicted", predicted},
          {"contributions", std::move(features)}};
}

bool HasCovers(const TreeEnsemble& ensemble) {
  for (const Tree& tree : ensemble.trees) {
    for (const TreeNode& node : tree.nodes) {
      if (std::isnan(node.cover)) return false;
    }
  }
  return true;
}

TreeEnsemble RecomputeCovers(const TreeEnsemble& ensemble,
                             const catalog::Dataset& dataset) {
  TreeEnsemble out = ensemble;
  for (Tree& tree : out.trees) {
    for (TreeNode& node : tree.nodes) node.cover = 0.0;
    for (const auto& row : dataset.rows) {
      std::span<const double> x(row.instance.values);
      int index = 0;
      tree.nodes[0].cover += row.weight;
      while (!tree.nodes[index].is_leaf()) {
        index = HotChild(tree.nodes[index], x);
        tree.nodes[index].cover += row.weight;
      }
    }
  }
  return out;
}

absl::StatusOr<Attribution> ShapValues(const TreeEnsemble& ensemble,
                                       std::span<const double> x,
                                       const catalog::Dataset* background) {
  RETURN_IF_ERROR(CheckInstance(ensemble, x));
  if (!HasCovers(ensemble) && background != nullptr) {
    if (background->empty()) {
      return absl::InvalidArgumentError("background dataset is empty");
    }
    const TreeEnsemble with_covers = RecomputeCovers(ensemble, *background);
    RETURN_IF_ERROR(CheckCovers(with_covers));
    return ShapUnchecked(with_covers, x);
  }
  RETURN_IF_ERROR(CheckCovers(ensemble));
  return ShapUnchecked(ensemble, x);
}

absl::StatusOr<std::vector<Attribution>> ShapValuesBatch(
    const TreeEnsemble& ensemble, const catalog::Dataset& dataset,
    int num_threads) {
  RETURN_IF_ERROR(CheckCovers(ensemble));
  for (const auto& row : dataset.rows) {
    RETURN_IF_ERROR(CheckInstance(ensemble, row.instance.values));
  }
  std::vector<Attribution> out(dataset.size());
  const size_t workers =
      std::clamp<size_t>(num_threads, 1, std::max<size_t>(1, dataset.size()));
  std::atomic<size_t> next{0};
  auto work = [&] {
    for (size_t i = next++; i < dataset.size(); i = next++) {
      out[i] = ShapUnchecked(ensemble, dataset.rows[i].instance.values);
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> threads;
    for (size_t t = 0; t < workers; ++t) threads.emplace_back(work);
    for (auto& t : threads) t.join();
  }
  return out;
}

absl::StatusOr<Attribution> BruteForceShap(const TreeEnsemble& ensemble,
                                           std::span<const double> x) {
  RETURN_IF_ERROR(CheckInstance(ensemble, x));
  const int d = ensemble.num_features;
  if (d > kMaxBruteForceFeatures) {
    return absl::InvalidArgumentError(
        StrCat("brute-force attribution supports at most ",
               kMaxBruteForceFeatures, " features, got ", d));
  }
  RETURN_IF_ERROR(CheckCovers(ensemble));
  const uint32_t n_subsets = 1u << d;
  std::vector<double> value(n_subsets, 0.0);
  for (uint32_t s = 0; s < n_subsets; ++s) {
    double sum = 0.0;
    for (const Tree& tree : ensemble.trees) sum += SubsetValue(tree, 0, x, s);
    value[s] = sum;
  }
  // weight[k] = k! (d - k - 1)! / d!
  std::vector<double> weight(std::max(d, 1));
  for (int k = 0; k < d; ++k) {
    double binom = 1.0;  // C(d - 1, k)
    for (int j = 1; j <= k; ++j) binom = binom * (d - k + j - 1) / j;
    weight[k] = 1.0 / (d * binom);
  }
  Attribution out;
  out.contributions.assign(d, 0.0);
  for (int i = 0; i < d; ++i) {
    const uint32_t bit = 1u << i;
    double phi = 0.0;
    for (uint32_t s = 0; s < n_subsets; ++s) {
      if (s & bit) continue;
      phi += weight[std::popcount(s)] * (value[s | bit] - value[s]);
    }
    out.contributions[i] = ensemble.learning_rate * phi;
  }
  out.base_value = ensemble.base_score + ensemble.learning_rate * value[0];
  out.predicted = ensemble.PredictUnchecked(x);
  return out;
}

}  // namespace strstudio::explain
