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

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gtest/gtest.h"
#include "strstudio/catalog/calendar.h"
#include "strstudio/catalog/sell_through.h"
#include "strstudio/explain/importance.h"
#include "strstudio/explain/partial_dependence.h"
#include "strstudio/explain/tree_shap.h"
#include "strstudio/gbdt/trainer.h"
#include "testing/test_util.h"

namespace strstudio::explain {
namespace {

using gbdt::Tree;
using gbdt::TreeEnsemble;
using gbdt::TreeNode;
using strstudio::testing::MakeDataset;
using strstudio::testing::RandomEnsemble;
using strstudio::testing::RandomPoint;

// Stump on `feature`: below `threshold` gives `left`, else `right`.
Tree Stump(int feature, double threshold, double left, double right, double left_cover,
           double right_cover, double gain = 1.0) {
  Tree t;
  TreeNode root;
  root.feature = feature;
  root.threshold = threshold;
  root.left = 1;
  root.right = 2;
  root.cover = left_cover + right_cover;
  root.gain = gain;
  TreeNode l, r;
  l.value = left;
  l.cover = left_cover;
  r.value = right;
  r.cover = right_cover;
  t.nodes = {root, l, r};
  return t;
}

TreeEnsemble Wrap(std::vector<Tree> trees, int d, double base = 0.0, double lr = 1.0) {
  TreeEnsemble e;
  e.base_score = base;
  e.learning_rate = lr;
  e.num_features = d;
  e.trees = std::move(trees);
  return e;
}

// Conditional expectation given the features in `known`, following covers
// for the rest.
double Conditional(const Tree& tree, int node, std::span<const double> x,
                   const std::vector<bool>& known) {
  const TreeNode& n = tree.nodes[node];
  if (n.is_leaf()) return n.value;
  if (known[n.feature]) {
    const double v = x[n.feature];
    const bool left = std::isnan(v) ? n.default_left : v < n.threshold;
    return Conditional(tree, left ? n.left : n.right, x, known);
  }
  return (tree.nodes[n.left].cover * Conditional(tree, n.left, x, known) +
          tree.nodes[n.right].cover * Conditional(tree, n.right, x, known)) /
         n.cover;
}

// Shapley values by averaging marginal contributions over every ordering.
std::vector<double> PermutationShap(const TreeEnsemble& e, std::span<const double> x) {
  const int d = e.num_features;
  std::vector<int> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> phi(d, 0.0);
  double count = 0;
  auto value = [&](const std::vector<bool>& known) {
    double s = 0;
    for (const Tree& t : e.trees) s += Conditional(t, 0, x, known);
    return e.learning_rate * s;
  };
  do {
    std::vector<bool> known(d, false);
    double before = value(known);
    for (int f : order) {
      known[f] = true;
      const double after = value(known);
      phi[f] += after - before;
      before = after;
    }
    ++count;
  } while (std::next_permutation(order.begin(), order.end()));
  for (double& p : phi) p /= count;
  return phi;
}

TEST(ShapPathTest, ExtendAndUnwindWeights) {
  internal::ShapPath path;
  path.Extend(1.0, 1.0, -1);
  ASSERT_EQ(path.size(), 1u);
  EXPECT_DOUBLE_EQ(path.elements()[0].weight, 1.0);
  path.Extend(0.2, 0.8, 0);
  EXPECT_NEAR(path.elements()[0].weight, 0.1, 1e-12);
  EXPECT_NEAR(path.elements()[1].weight, 0.4, 1e-12);
  path.Extend(0.3, 0.7, 1);
  EXPECT_NEAR(path.elements()[0].weight, 0.02, 1e-12);
  EXPECT_NEAR(path.elements()[1].weight, 0.19 / 3, 1e-12);
  EXPECT_NEAR(path.elements()[2].weight, 0.56 / 3, 1e-12);

  auto undo_last = path;
  EXPECT_NEAR(undo_last.UnwoundSum(2), 0.5, 1e-12);
  undo_last.Unwind(2);
  ASSERT_EQ(undo_last.size(), 2u);
  EXPECT_NEAR(undo_last.elements()[0].weight, 0.1, 1e-12);
  EXPECT_NEAR(undo_last.elements()[1].weight, 0.4, 1e-12);

  internal::ShapPath direct;
  direct.Extend(1.0, 1.0, -1);
  direct.Extend(0.3, 0.7, 1);
  auto undo_middle = path;
  undo_middle.Unwind(1);
  ASSERT_EQ(undo_middle.size(), 2u);
  EXPECT_EQ(undo_middle.elements()[1].feature, 1);
  for (size_t i = 0; i < 2; ++i) {
    EXPECT_NEAR(undo_middle.elements()[i].weight, direct.elements()[i].weight, 1e-12);
  }
}

TEST(TreeShapTest, SingleSplitClosedForm) {
  const double a = 0.7, b = -0.3;
  const auto e = Wrap({Stump(0, 0.5, a, b, 10, 10)}, 2, 0.1, 0.5);
  const std::vector<double> left = {0.2, 0.9};
  const auto phi = ShapValues(e, left).value();
  EXPECT_NEAR(phi.contributions[0], 0.5 * (a - b) / 2, 1e-12);
  EXPECT_EQ(phi.contributions[1], 0.0);
  EXPECT_NEAR(phi.base_value, 0.1 + 0.5 * (a + b) / 2, 1e-12);
  const std::vector<double> right = {0.8, 0.1};
  EXPECT_NEAR(ShapValues(e, right).value().contributions[0], 0.5 * (b - a) / 2, 1e-12);
}

TEST(TreeShapTest, BaseOnlyModel) {
  const auto e = Wrap({Tree::Leaf(0.0, 4.0)}, 3, 0.42);
  const std::vector<double> x = {0.1, 0.2, 0.3};
  const auto phi = ShapValues(e, x).value();
  EXPECT_EQ(phi.base_value, 0.42);
  EXPECT_EQ(phi.predicted, 0.42);
  for (double c : phi.contributions) EXPECT_EQ(c, 0.0);
}

TEST(TreeShapTest, MatchesPermutationOracle) {
  utils::Random rng(2024);
  for (int trial = 0; trial < 40; ++trial) {
    const int d = 2 + static_cast<int>(rng.UniformIndex(4));
    const auto e = RandomEnsemble(rng, d, 4, 4);
    const auto x = RandomPoint(rng, d, 0.2);
    const auto fast = ShapValues(e, x).value();
    const auto oracle = PermutationShap(e, x);
    const auto brute = BruteForceShap(e, x).value();
    for (int f = 0; f < d; ++f) {
      EXPECT_NEAR(fast.contributions[f], oracle[f], 1e-9) << trial << " " << f;
      EXPECT_NEAR(brute.contributions[f], oracle[f], 1e-9) << trial << " " << f;
    }
    EXPECT_NEAR(fast.base_value, brute.base_value, 1e-9);
  }
}

TEST(TreeShapTest, LocalAccuracy) {
  utils::Random rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const int d = 3 + static_cast<int>(rng.UniformIndex(6));
    const auto e = RandomEnsemble(rng, d, 12, 5);
    const auto x = RandomPoint(rng, d, 0.15);
    const auto phi = ShapValues(e, x).value();
    const double total =
        std::accumulate(phi.contributions.begin(), phi.contributions.end(), phi.base_value);
    EXPECT_NEAR(total, e.Predict(x).value(), 1e-9);
    EXPECT_EQ(phi.predicted, e.Predict(x).value());
  }
}

TEST(TreeShapTest, AdditivityDummyAndScaling) {
  utils::Random rng(99);
  for (int trial = 0; trial < 30; ++trial) {
    auto e = RandomEnsemble(rng, 4, 8, 4);
    e.num_features = 5;  // Feature 4 is never used.
    const auto x = RandomPoint(rng, 5, 0.1);
    const auto whole = ShapValues(e, x).value();
    EXPECT_EQ(whole.contributions[4], 0.0);

    const size_t half = e.trees.size() / 2;
    auto first = e, second = e;
    first.trees.assign(e.trees.begin(), e.trees.begin() + half);
    second.trees.assign(e.trees.begin() + half, e.trees.end());
    second.base_score = 0.0;
    const auto p1 = ShapValues(first, x).value();
    const auto p2 = ShapValues(second, x).value();
    for (int f = 0; f < 5; ++f) {
      EXPECT_NEAR(whole.contributions[f], p1.contributions[f] + p2.contributions[f], 1e-12);
    }

    auto scaled = e;
    scaled.learning_rate *= 3.0;
    const auto p3 = ShapValues(scaled, x).value();
    for (int f = 0; f < 5; ++f) EXPECT_NEAR(p3.contributions[f], 3.0 * whole.contributions[f], 1e-12);
  }
}

TEST(TreeShapTest, CoversAndValidation) {
  auto e = Wrap({Stump(0, 0.5, 1.0, -1.0, 3, 1)}, 2);
  EXPECT_TRUE(HasCovers(e));
  const std::vector<double> x = {0.1, 0.1};
  EXPECT_FALSE(ShapValues(e, std::vector<double>{0.1}).ok());
  auto bare = e;
  for (auto& n : bare.trees[0].nodes) n.cover = gbdt::kNotRecorded;
  EXPECT_FALSE(HasCovers(bare));
  EXPECT_FALSE(ShapValues(bare, x).ok());
  const auto background = MakeDataset({{0.1, 0}, {0.2, 0}, {0.3, 0}, {0.9, 0}}, {0, 0, 0, 0});
  const auto recomputed = RecomputeCovers(bare, background);
  EXPECT_EQ(recomputed.trees[0].nodes[0].cover, 4.0);
  EXPECT_EQ(recomputed.trees[0].nodes[1].cover, 3.0);
  EXPECT_EQ(recomputed.trees[0].nodes[2].cover, 1.0);
  const auto with_bg = ShapValues(bare, x, &background).value();
  const auto recorded = ShapValues(e, x).value();
  EXPECT_NEAR(with_bg.contributions[0], recorded.contributions[0], 1e-12);
  EXPECT_NEAR(recorded.contributions[0], 1.0 - 0.5, 1e-12);
}

TEST(TreeShapTest, RecomputedCoversMatchTraining) {
  const auto data = strstudio::testing::RandomRegression(300, 5, 3);
  gbdt::TrainConfig config;
  config.n_rounds = 10;
  config.max_depth = 3;
  const auto model = gbdt::Train(data, config).value();
  const auto recomputed = RecomputeCovers(model, data);
  for (size_t t = 0; t < model.trees.size(); ++t) {
    for (size_t n = 0; n < model.trees[t].nodes.size(); ++n) {
      EXPECT_NEAR(recomputed.trees[t].nodes[n].cover, model.trees[t].nodes[n].cover, 1e-9);
    }
  }
}

TEST(TreeShapTest, BatchMatchesSingleAcrossThreads) {
  const auto data = strstudio::testing::RandomRegression(200, 6, 4, 0.1, 0.1);
  gbdt::TrainConfig config;
  config.n_rounds = 15;
  const auto model = gbdt::Train(data, config).value();
  const auto one = ShapValuesBatch(model, data, 1).value();
  const auto four = ShapValuesBatch(model, data, 4).value();
  ASSERT_EQ(one.size(), data.size());
  for (size_t i = 0; i < data.size(); ++i) {
    const auto single = ShapValues(model, data.rows[i].instance.values).value();
    EXPECT_EQ(one[i].contributions, single.contributions);
    EXPECT_EQ(four[i].contributions, single.contributions);
  }
}

TEST(BruteForceTest, RejectsWideModels) {
  utils::Random rng(1);
  auto e = RandomEnsemble(rng, 3, 2, 2);
  e.num_features = kMaxBruteForceFeatures + 1;
  const std::vector<double> x(e.num_features, 0.5);
  EXPECT_FALSE(BruteForceShap(e, x).ok());
  EXPECT_TRUE(ShapValues(e, x).ok());
}

TEST(ImportanceTest, GainShares) {
  const auto e = Wrap({Stump(0, 0.5, 1, -1, 5, 5, 3.0), Stump(1, 0.5, 1, -1, 5, 5, 1.0)}, 3);
  const auto report = GainImportance(e).value();
  EXPECT_EQ(report.method, ImportanceMethod::kGain);
  EXPECT_DOUBLE_EQ(report.scores[0], 0.75);
  EXPECT_DOUBLE_EQ(report.scores[1], 0.25);
  EXPECT_EQ(report.scores[2], 0.0);
  EXPECT_EQ(report.raw[0], 3.0);
  EXPECT_EQ(report.Ranking(), (std::vector<int>{0, 1, 2}));
  const auto schema = catalog::FeatureSchema::Numeric(3);
  const std::string csv = report.ToCsv(schema);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "rank,feature,score,raw");
  EXPECT_EQ(report.ToJson(schema)["method"], "gain");
}

TEST(ImportanceTest, GainNeedsSplitsAndRecordedGains) {
  EXPECT_EQ(GainImportance(Wrap({Tree::Leaf(0.2, 1)}, 2)).status().code(),
            absl::StatusCode::kFailedPrecondition);
  auto e = Wrap({Stump(0, 0.5, 1, -1, 5, 5, 3.0)}, 2);
  e.trees[0].nodes[0].gain = gbdt::kNotRecorded;
  EXPECT_EQ(GainImportance(e).status().code(), absl::StatusCode::kFailedPrecondition);
}

TEST(ImportanceTest, MethodNames) {
  EXPECT_EQ(ParseImportanceMethod("gain").value(), ImportanceMethod::kGain);
  EXPECT_EQ(ParseImportanceMethod("mean_abs_shap").value(), ImportanceMethod::kMeanAbsShap);
  EXPECT_FALSE(ParseImportanceMethod("split_count").ok());
  EXPECT_EQ(ImportanceMethodName(ImportanceMethod::kMeanAbsShap), "mean_abs_shap");
}

TEST(ImportanceTest, ShapSharesSumToOne) {
  const auto data = strstudio::testing::RandomRegression(300, 6, 5);
  gbdt::TrainConfig config;
  config.n_rounds = 20;
  const auto model = gbdt::Train(data, config).value();
  const auto report = GlobalShapImportance(model, data).value();
  EXPECT_NEAR(std::accumulate(report.scores.begin(), report.scores.end(), 0.0), 1.0, 1e-12);
  const auto phi = ShapValuesBatch(model, data).value();
  for (int f = 0; f < 6; ++f) {
    double mean = 0;
    for (const auto& a : phi) mean += std::abs(a.contributions[f]);
    EXPECT_NEAR(report.raw[f], mean / phi.size(), 1e-12);
  }
  const auto gain = GainImportance(model).value();
  EXPECT_NEAR(std::accumulate(gain.scores.begin(), gain.scores.end(), 0.0), 1.0, 1e-12);
}

TEST(ImportanceTest, ShapSharesOfConstantModelAreZero) {
  const auto data = MakeDataset({{0.1}, {0.2}}, {1, 1});
  const auto report = GlobalShapImportance(Wrap({Tree::Leaf(0.0, 2)}, 1, 1.0), data).value();
  EXPECT_EQ(report.scores, std::vector<double>{0.0});
  catalog::Dataset empty;
  empty.schema = data.schema;
  EXPECT_FALSE(GlobalShapImportance(Wrap({Tree::Leaf(0.0, 2)}, 1), empty).ok());
}

TEST(ImportanceTest, GainAndShapRankingsCanDisagree) {
  // A high-gain split with tiny leaves against a low-gain split with large
  // leaves.
  const auto e = Wrap({Stump(0, 0.5, 0.01, -0.01, 5, 5, 10.0), Stump(1, 0.5, 1, -1, 5, 5, 1.0)}, 2);
  const auto data = MakeDataset({{0.1, 0.1}, {0.9, 0.9}, {0.2, 0.8}, {0.8, 0.2}}, {0, 0, 0, 0});
  EXPECT_EQ(GainImportance(e).value().Ranking().front(), 0);
  EXPECT_EQ(GlobalShapImportance(e, data).value().Ranking().front(), 1);
}

TEST(ImportanceTest, IrrelevantCatalogAttributeRanksLast) {
  auto config = catalog::SyntheticCatalogConfig::SingleCategory("tops", 1500);
  config.noise_scale = 0.0;
  const auto synthetic = catalog::GenerateSyntheticCatalog(config, 17);
  const auto& raw = synthetic.catalog;
  const auto schema = catalog::FitEncoder(raw.products).value();
  catalog::AssembleOptions options;
  options.season_year = catalog::InferSeasonYear(raw.sales);
  const auto ledger = catalog::SalesLedger::Build(raw.sales, raw.inventory);
  const auto data = catalog::AssembleDataset(raw.products, ledger, schema, options).value();
  gbdt::TrainConfig train;
  train.n_rounds = 100;
  train.max_depth = 4;
  const auto model = gbdt::Train(data, train).value();
  const auto report = GlobalShapImportance(model, data).value();
  const int trim = schema.FindFeature("trim").value();
  EXPECT_EQ(report.Ranking().back(), trim);
  EXPECT_LT(report.scores[trim], 0.01);
}

TEST(PdpTest, ConstantModelIsFlat) {
  const auto data = MakeDataset({{0.1, 0.3}, {0.5, 0.6}, {0.9, 0.2}}, {0, 0, 0});
  const auto curve =
      PartialDependence(Wrap({Tree::Leaf(0.0, 3)}, 2, 0.25), data, 0, {0.0, 0.5, 1.0}).value();
  EXPECT_EQ(curve.averaged_predictions, (std::vector<double>{0.25, 0.25, 0.25}));
  EXPECT_EQ(curve.n_background, 3u);
}

TEST(PdpTest, StepAndAdditiveModel) {
  // f(x) = step(x0) + step(x1); the curve over x0 is the step plus the
  // background mean of the x1 term.
  const auto e = Wrap({Stump(0, 0.5, 1.0, 3.0, 2, 2), Stump(1, 0.4, 0.0, 2.0, 2, 2)}, 2, 0.0, 0.5);
  const auto data = MakeDataset({{0.1, 0.1}, {0.9, 0.8}, {0.3, 0.9}, {0.7, 0.2}}, {0, 0, 0, 0});
  const auto curve = PartialDependence(e, data, 0, {0.2, 0.6}).value();
  EXPECT_NEAR(curve.averaged_predictions[0], 0.5 * (1.0 + 1.0), 1e-12);
  EXPECT_NEAR(curve.averaged_predictions[1], 0.5 * (3.0 + 1.0), 1e-12);
  EXPECT_FALSE(PartialDependence(e, data, 0, {0.6, 0.2}).ok());
  EXPECT_FALSE(PartialDependence(e, data, 0, {}).ok());
  EXPECT_FALSE(PartialDependence(e, data, 5, {0.1}).ok());
  const std::string csv = curve.ToCsv(data.schema);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "value,label,prediction");
}

TEST(PdpTest, DefaultGridIsIncreasingQuantiles) {
  const auto data = strstudio::testing::RandomRegression(500, 4, 8, 0.1, 0.1);
  const auto grid = DefaultPdpGrid(data, 1, 20).value();
  ASSERT_GE(grid.size(), 2u);
  EXPECT_LE(grid.size(), 20u);
  EXPECT_TRUE(std::is_sorted(grid.begin(), grid.end()));
  EXPECT_EQ(std::adjacent_find(grid.begin(), grid.end()), grid.end());
  EXPECT_FALSE(DefaultPdpGrid(data, 1, 0).ok());
}

TEST(ShapDependenceTest, PointsMatchBatchAttributions) {
  const auto data = strstudio::testing::RandomRegression(150, 4, 9, 0.1, 0.2);
  gbdt::TrainConfig config;
  config.n_rounds = 10;
  const auto model = gbdt::Train(data, config).value();
  const auto dep = ComputeShapDependence(model, data, 2).value();
  size_t n_missing = 0;
  for (const auto& r : data.rows) n_missing += std::isnan(r.instance.values[2]);
  EXPECT_EQ(dep.missing.size(), n_missing);
  EXPECT_EQ(dep.points.size() + dep.missing.size(), data.size());
  const auto phi = ShapValuesBatch(model, data).value();
  for (const auto& p : dep.points) {
    EXPECT_EQ(p.value, data.rows[p.row].instance.values[2]);
    EXPECT_EQ(p.contribution, phi[p.row].contributions[2]);
  }
  EXPECT_FALSE(ComputeShapDependence(model, data, 4).ok());
}

}  // namespace
}  // namespace strstudio::explain
