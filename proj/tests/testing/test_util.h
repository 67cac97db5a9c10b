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

#ifndef STRSTUDIO_TESTS_TESTING_TEST_UTIL_H_
#define STRSTUDIO_TESTS_TESTING_TEST_UTIL_H_

#include <string>
#include <vector>

#include "strstudio/catalog/dataset.h"
#include "strstudio/catalog/synthetic.h"
#include "strstudio/gbdt/ensemble.h"
#include "strstudio/service/workspace.h"
#include "strstudio/uncertainty/distribution_estimator.h"
#include "strstudio/util/random.h"

namespace strstudio::testing {

// Removes the directory tree on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::string& path() const { return path_; }
  std::string File(const std::string& name) const;

 private:
  std::string path_;
};

// Dataset over FeatureSchema::Numeric(d) from explicit rows. Empty `weights`
// means all ones.
catalog::Dataset MakeDataset(const std::vector<std::vector<double>>& x,
                             const std::vector<double>& y,
                             const std::vector<double>& weights = {});

// Ensemble of up to `max_trees` trees over `num_features` features on [0, 1]
// with consistent covers, recorded gains, and random default directions.
// Uses at least one tree.
gbdt::TreeEnsemble RandomEnsemble(utils::Random& rng, int num_features,
                                  int max_trees, int max_depth);

// Uniform point in [0, 1]^d; each coordinate is missing with `missing_rate`.
std::vector<double> RandomPoint(utils::Random& rng, int d,
                                double missing_rate = 0.0);

// Nonlinear regression data with d >= 4 features, additive noise `noise`.
catalog::Dataset RandomRegression(size_t n, int d, uint64_t seed,
                                  double noise = 0.1,
                                  double missing_rate = 0.0);

// Small synthetic catalog with a fitted estimator, shared by service and
// end-to-end tests.
struct SyntheticWorkspace {
  catalog::SyntheticCatalog synthetic;
  catalog::Dataset dataset;
  catalog::DatasetSplit split;
  uncertainty::DistributionEstimator estimator;
};

SyntheticWorkspace BuildSyntheticWorkspace(int products, uint64_t seed,
                                           int n_rounds = 60);
service::Workspace ToWorkspace(const SyntheticWorkspace& parts);

}  // namespace strstudio::testing

#endif  // STRSTUDIO_TESTS_TESTING_TEST_UTIL_H_
