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

#ifndef STRSTUDIO_EXPLAIN_TREE_SHAP_H_
#define STRSTUDIO_EXPLAIN_TREE_SHAP_H_

#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "nlohmann/json.hpp"
#include "strstudio/catalog/dataset.h"
#include "strstudio/gbdt/ensemble.h"

namespace strstudio::explain {

struct Attribution {
  double base_value = 0.0;
  std::vector<double> contributions;  // One per schema feature.
  double predicted = 0.0;

  nlohmann::json ToJson(const catalog::FeatureSchema& schema) const;
};

// True when every node of every tree carries a training cover.
bool HasCovers(const gbdt::TreeEnsemble& ensemble);

// Copy of the ensemble with covers set to the summed weights of the rows of
// `dataset` reaching each node.
gbdt::TreeEnsemble RecomputeCovers(const gbdt::TreeEnsemble& ensemble,
                                   const catalog::Dataset& dataset);

// Exact Shapley values of the cover-weighted conditional expectation: when a
// feature is left out, a split on it averages both children weighted by their
// training covers. base_value is the expectation with no features known, so
// base_value + sum(contributions) == predicted.
//
// Covers are required; when the model lacks them and `background` is
// given, they are recomputed from it.
absl::StatusOr<Attribution> ShapValues(
    const gbdt::TreeEnsemble& ensemble, std::span<const double> x,
    const catalog::Dataset* background = nullptr);

// Attributions for every row, in row order.
absl::StatusOr<std::vector<Attribution>> ShapValuesBatch(
    const gbdt::TreeEnsemble& ensemble, const catalog::Dataset& dataset,
    int num_threads = 1);

inline constexpr int kMaxBruteForceFeatures = 15;

// Same attribution by enumerating all 2^d feature subsets.
absl::StatusOr<Attribution> BruteForceShap(const gbdt::TreeEnsemble& ensemble,
                                           std::span<const double> x);

namespace internal {

// Permutation weights of the unique features on the current root-to-node
// path, as maintained by the polynomial-time recursion.
class ShapPath {
 public:
  struct Element {
    int feature;
    double zero_fraction;
    double one_fraction;
    double weight;
  };

  void Extend(double zero_fraction, double one_fraction, int feature);
  // Removes element `index`.
  void Unwind(size_t index);
  // Sum of the weights Unwind(index) would leave behind.
  double UnwoundSum(size_t index) const;

  const std::vector<Element>& elements() const { return elements_; }
  size_t size() const { return elements_.size(); }

 private:
  std::vector<Element> elements_;
};

}  // namespace internal
}  // namespace strstudio::explain

#endif  // STRSTUDIO_EXPLAIN_TREE_SHAP_H_
