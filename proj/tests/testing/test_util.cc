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

#include "testing/test_util.h"

#include <stdlib.h>

#include <cmath>
#include <filesystem>
#include <stdexcept>

#include "strstudio/catalog/encoder.h"
#include "strstudio/catalog/sell_through.h"
#include "strstudio/gbdt/trainer.h"
#include "strstudio/util/files.h"
#include "strstudio/util/strings.h"

namespace strstudio::testing {

TempDir::TempDir() {
  std::string pattern =
      (std::filesystem::temp_directory_path() / "strstudio_test_XXXXXX").string();
  if (mkdtemp(pattern.data()) == nullptr) {
    throw std::runtime_error("mkdtemp failed");
  }
  path_ = pattern;
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

std::string TempDir::File(const std::string& name) const {
  return utils::JoinPath(path_, name);
}

catalog::Dataset MakeDataset(const std::vector<std::vector<double>>& x,
                             const std::vector<double>& y,
                             const std::vector<double>& weights) {
  catalog::Dataset d;
  const int dims = x.empty() ? 1 : static_cast<int>(x[0].size());
  d.schema = catalog::FeatureSchema::Numeric(dims);
  for (size_t i = 0; i < x.size(); ++i) {
    catalog::LabeledInstance row;
    row.instance.values = x[i];
    row.instance.product_id = StrCat("p", i);
    row.target_str = y[i];
    row.weight = weights.empty() ? 1.0 : weights[i];
    d.rows.push_back(std::move(row));
  }
  return d;
}

namespace {

void Grow(utils::Random& rng, gbdt::Tree& tree, int node, int depth,
          int max_depth, int num_features) {
  const double cover = tree.nodes[node].cover;
  if (depth >= max_depth || (depth > 0 && rng.Bernoulli(0.25))) {
    tree.nodes[node].value = rng.Uniform(-1.0, 1.0);
    return;
  }
  const int left = static_cast<int>(tree.nodes.size());
  const double fraction = rng.Uniform(0.05, 0.95);
  gbdt::TreeNode l, r;
  l.cover = cover * fraction;
  r.cover = cover - l.cover;
  tree.nodes.push_back(l);
  tree.nodes.push_back(r);
  auto& n = tree.nodes[node];
  n.feature = static_cast<int32_t>(rng.UniformIndex(num_features));
  n.threshold = rng.Uniform(0.1, 0.9);
  n.default_left = rng.Bernoulli(0.5);
  n.left = left;
  n.right = left + 1;
  n.gain = rng.Uniform(0.01, 5.0);
  Grow(rng, tree, left, depth + 1, max_depth, num_features);
  Grow(rng, tree, left + 1, depth + 1, max_depth, num_features);
}

}  // namespace

gbdt::TreeEnsemble RandomEnsemble(utils::Random& rng, int num_features,
                                  int max_trees, int max_depth) {
  gbdt::TreeEnsemble e;
  e.num_features = num_features;
  e.base_score = rng.Uniform(-0.5, 0.5);
  e.learning_rate = rng.Uniform(0.1, 1.0);
  const int trees = 1 + static_cast<int>(rng.UniformIndex(max_trees));
  for (int t = 0; t < trees; ++t) {
    gbdt::Tree tree;
    gbdt::TreeNode root;
    root.cover = rng.Uniform(10.0, 100.0);
    tree.nodes.push_back(root);
    Grow(rng, tree, 0, 0, max_depth, num_features);
    e.trees.push_back(std::move(tree));
  }
  return e;
}

std::vector<double> RandomPoint(utils::Random& rng, int d, double missing_rate) {
  std::vector<double> x(d);
  for (auto& v : x) {
    v = rng.Bernoulli(missing_rate) ? catalog::kMissing : rng.Uniform();
  }
  return x;
}

catalog::Dataset RandomRegression(size_t n, int d, uint64_t seed, double noise,
                                  double missing_rate) {
  utils::Random rng(seed);
  std::vector<std::vector<double>> x;
  std::vector<double> y, w;
  for (size_t i = 0; i < n; ++i) {
    auto p = RandomPoint(rng, d);
    const double target = std::sin(3.0 * p[0]) + p[1] * p[2] + (p[3] > 0.6 ? 0.5 : 0.0) +
                          noise * rng.Normal();
    for (auto& v : p) {
      if (rng.Bernoulli(missing_rate)) v = catalog::kMissing;
    }
    x.push_back(std::move(p));
    y.push_back(target);
    w.push_back(rng.Uniform(0.2, 2.0));
  }
  return MakeDataset(x, y, w);
}

SyntheticWorkspace BuildSyntheticWorkspace(int products, uint64_t seed, int n_rounds) {
  SyntheticWorkspace out;
  out.synthetic = catalog::GenerateSyntheticCatalog(
      catalog::SyntheticCatalogConfig::SingleCategory("tops", products), seed);
  const auto& raw = out.synthetic.catalog;
  const auto schema = catalog::FitEncoder(raw.products).value();
  catalog::AssembleOptions options;
  options.season_year = catalog::InferSeasonYear(raw.sales);
  const auto ledger = catalog::SalesLedger::Build(raw.sales, raw.inventory);
  out.dataset = catalog::AssembleDataset(raw.products, ledger, schema, options).value();
  out.split = catalog::SplitThreeWay(out.dataset, 0.6, 0.2, 0.2, seed).value();
  gbdt::TrainConfig base;
  base.n_rounds = n_rounds;
  base.max_depth = 4;
  gbdt::TrainConfig error = base;
  error.n_rounds = n_rounds / 2;
  error.max_depth = 3;
  out.estimator = uncertainty::FitDistributionEstimator(out.split.train_base,
                                                        out.split.train_error, base, error)
                      .value();
  out.estimator.clamp_intervals = true;
  return out;
}

service::Workspace ToWorkspace(const SyntheticWorkspace& parts) {
  catalog::AssembleOptions options;
  options.season_year = catalog::InferSeasonYear(parts.synthetic.catalog.sales);
  return service::Workspace::FromParts(parts.synthetic.catalog, parts.dataset, parts.estimator,
                                       options)
      .value();
}

}  // namespace strstudio::testing
