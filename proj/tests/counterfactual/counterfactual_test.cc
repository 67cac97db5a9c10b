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
#include <limits>

#include "gtest/gtest.h"
#include "strstudio/counterfactual/diff.h"
#include "strstudio/counterfactual/distance.h"
#include "strstudio/counterfactual/genetic_search.h"
#include "strstudio/counterfactual/json_io.h"
#include "strstudio/counterfactual/what_if.h"
#include "strstudio/explain/tree_shap.h"
#include "strstudio/gbdt/trainer.h"
#include "testing/test_util.h"

namespace strstudio::counterfactual {
namespace {

using catalog::FeatureKind;
using catalog::FeatureSchema;
using catalog::FeatureSpec;

constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

FeatureSpec Spec(std::string name, FeatureKind kind,
                 catalog::FeatureSource source = catalog::FeatureSource::kAttribute) {
  FeatureSpec s;
  s.name = std::move(name);
  s.kind = kind;
  s.source = source;
  return s;
}

FeatureSchema MixedSchema() {
  FeatureSpec color = Spec("color", FeatureKind::kCategorical);
  color.labels = {"black", "red", "white"};
  FeatureSpec neck = Spec("neckline", FeatureKind::kCategorical);
  neck.labels = {"round", "strap", "v"};
  FeatureSpec price = Spec("list_price", FeatureKind::kNumeric, catalog::FeatureSource::kListPrice);
  price.min = 10;
  price.max = 50;
  return FeatureSchema({color, neck, price});
}

TEST(DistanceTest, DefinitionExamples) {
  const auto schema = MixedSchema();
  const auto spec = DistanceSpec::FromSchema(schema);
  ASSERT_TRUE(spec.Validate().ok());
  const std::vector<double> x = {1, 2, 20};
  EXPECT_EQ(Distance(x, x, spec).value(), 0.0);
  EXPECT_EQ(Distance(x, std::vector<double>{3, 2, 20}, spec).value(), 1.0);
  EXPECT_DOUBLE_EQ(Distance(x, std::vector<double>{1, 2, 40}, spec).value(), 0.5);
  EXPECT_DOUBLE_EQ(Distance(x, std::vector<double>{2, 3, 10}, spec).value(), 2.25);
}

TEST(DistanceTest, MissingWeightsAndErrors) {
  auto spec = DistanceSpec::FromSchema(MixedSchema());
  const std::vector<double> x = {kMissing, 2, kMissing};
  EXPECT_EQ(Distance(x, x, spec).value(), 0.0);
  EXPECT_EQ(Distance(x, std::vector<double>{1, 2, kMissing}, spec).value(), 1.0);
  EXPECT_EQ(Distance(x, std::vector<double>{kMissing, 2, 30}, spec).value(), 1.0);
  spec.weight = {2.0, 0.0, 1.0};
  spec.categorical_cost = 0.5;
  EXPECT_EQ(Distance(std::vector<double>{1, 1, 10}, std::vector<double>{2, 3, 10}, spec).value(),
            1.0);
  EXPECT_FALSE(Distance(x, std::vector<double>{1, 2}, spec).ok());
  spec.scale[2] = 0.0;
  EXPECT_FALSE(Distance(std::vector<double>{1, 1, 10}, std::vector<double>{1, 1, 11}, spec).ok());
  EXPECT_EQ(Distance(std::vector<double>{1, 1, 10}, std::vector<double>{1, 1, 10}, spec).value(),
            0.0);
}

TEST(DistanceTest, MadScales) {
  const auto data = strstudio::testing::MakeDataset({{0.0}, {1.0}, {2.0}, {3.0}, {10.0}},
                                                    {0, 0, 0, 0, 0});
  const auto spec = DistanceSpec::FromMad(data).value();
  EXPECT_EQ(spec.scale[0], 1.0);
}

TEST(DiffTest, IdenticalIsEmptyAndRoundTrips) {
  const auto schema = MixedSchema();
  const std::vector<double> x = {1, 1, 19.99};
  EXPECT_TRUE(ComputeDiff(x, x, schema).value().empty());
  const std::vector<double> y = {3, kMissing, 24.5};
  const auto diff = ComputeDiff(x, y, schema).value();
  ASSERT_EQ(diff.size(), 3u);
  EXPECT_EQ(diff[0].name, "color");
  EXPECT_EQ(diff[0].from_text, "black");
  EXPECT_EQ(diff[0].to_text, "white");
  EXPECT_EQ(diff[1].to_text, "MISSING");
  EXPECT_EQ(diff[2].from_text, "19.99");
  EXPECT_EQ(diff[2].to_text, "24.5");
  const auto applied = ApplyDiff(x, diff).value();
  EXPECT_EQ(applied[0], y[0]);
  EXPECT_TRUE(std::isnan(applied[1]));
  EXPECT_EQ(applied[2], y[2]);
}

TEST(DiffTest, MarkdownTable) {
  const auto schema = MixedSchema();
  const auto diff =
      ComputeDiff(std::vector<double>{1, 1, 20}, std::vector<double>{2, 3, 20.000001}, schema)
          .value();
  ASSERT_EQ(diff.size(), 3u);
  EXPECT_TRUE(diff[2].negligible);
  const std::string md = DiffMarkdown(diff, 0.217, 0.6056);
  EXPECT_EQ(md,
            "| Feature | Input | Counterfactual |\n|---|---|---|\n"
            "| color | black | red |\n| neckline | round | v |\n"
            "| STR forecast | 21.70% | 60.56% |\n");
  EXPECT_EQ(FormatPercent(0.217), "21.70%");
}

// A model over three categorical features with K codes each, trained on an
// additive code effect.
struct DiscreteModel {
  FeatureSchema schema;
  gbdt::TreeEnsemble model;
};

DiscreteModel TrainDiscrete(int k, uint64_t seed) {
  std::vector<FeatureSpec> specs;
  for (int f = 0; f < 3; ++f) {
    FeatureSpec s = Spec("attr" + std::to_string(f), FeatureKind::kCategorical);
    for (int c = 0; c < k; ++c) s.labels.push_back(std::string(1, static_cast<char>('a' + c)));
    specs.push_back(s);
  }
  utils::Random rng(seed);
  std::vector<std::vector<double>> effect(3, std::vector<double>(k));
  for (auto& e : effect)
    for (double& v : e) v = rng.Uniform(0.0, 0.3);
  catalog::Dataset data;
  data.schema = FeatureSchema(specs);
  for (int i = 0; i < 400; ++i) {
    catalog::LabeledInstance row;
    double y = 0;
    for (int f = 0; f < 3; ++f) {
      const int code = 1 + static_cast<int>(rng.UniformIndex(k));
      row.instance.values.push_back(code);
      y += effect[f][code - 1];
    }
    row.instance.product_id = "d" + std::to_string(i);
    row.target_str = y;
    data.rows.push_back(row);
  }
  gbdt::TrainConfig config;
  config.n_rounds = 30;
  config.max_depth = 3;
  config.learning_rate = 0.3;
  return {data.schema, gbdt::Train(data, config).value()};
}

TEST(SearchTest, MatchesEnumerationOptimum) {
  int agree = 0, cases = 0;
  for (uint64_t seed = 0; seed < 40; ++seed) {
    const int k = 3 + static_cast<int>(seed % 3);
    const auto dm = TrainDiscrete(k, seed);
    utils::Random rng(seed + 1000);
    std::vector<double> x(3), other(3);
    for (int f = 0; f < 3; ++f) {
      x[f] = 1 + static_cast<double>(rng.UniformIndex(k));
      other[f] = 1 + static_cast<double>(rng.UniformIndex(k));
    }
    CfRequest req;
    req.instance.values = x;
    req.target = dm.model.Predict(other).value();
    req.mutable_features = {0, 1, 2};
    req.distance = DistanceSpec::FromSchema(dm.schema);
    req.ga.seed = seed;
    double best = std::numeric_limits<double>::infinity();
    std::vector<double> c(3);
    for (c[0] = 1; c[0] <= k; ++c[0])
      for (c[1] = 1; c[1] <= k; ++c[1])
        for (c[2] = 1; c[2] <= k; ++c[2])
          if (std::abs(dm.model.Predict(c).value() - req.target) <= req.tolerance)
            best = std::min(best, Distance(x, c, req.distance).value());
    const auto result = SolveCounterfactual(dm.model, dm.schema, req).value();
    ++cases;
    if (result.feasible && result.distance == best) ++agree;
  }
  EXPECT_GE(agree, 0.95 * cases);
}

TEST(SearchTest, IdentityTargetReturnsInput) {
  const auto dm = TrainDiscrete(4, 5);
  CfRequest req;
  req.instance.values = {2, 3, 1};
  req.target = dm.model.Predict(req.instance.values).value();
  req.mutable_features = {0, 1, 2};
  req.distance = DistanceSpec::FromSchema(dm.schema);
  const auto result = SolveCounterfactual(dm.model, dm.schema, req).value();
  EXPECT_TRUE(result.feasible);
  EXPECT_EQ(result.distance, 0.0);
  EXPECT_EQ(result.counterfactual.values, req.instance.values);
  EXPECT_TRUE(result.diffs.empty());
}

TEST(SearchTest, RejectsBadRequests) {
  const auto dm = TrainDiscrete(3, 6);
  CfRequest req;
  req.instance.values = {1, 1, 1};
  req.distance = DistanceSpec::FromSchema(dm.schema);
  EXPECT_FALSE(SolveCounterfactual(dm.model, dm.schema, req).ok());
  req.mutable_features = {7};
  EXPECT_FALSE(SolveCounterfactual(dm.model, dm.schema, req).ok());
  req.mutable_features = {0};
  req.tolerance = 0.0;
  EXPECT_FALSE(SolveCounterfactual(dm.model, dm.schema, req).ok());
  req.tolerance = 0.02;
  req.ga.population_size = 1;
  EXPECT_FALSE(SolveCounterfactual(dm.model, dm.schema, req).ok());
  req.ga = GaConfig{};
  req.instance.values = {1, 1};
  EXPECT_FALSE(SolveCounterfactual(dm.model, dm.schema, req).ok());
}

TEST(SearchTest, FrozenFeaturesHoldInEveryElite) {
  const auto parts = strstudio::testing::BuildSyntheticWorkspace(300, 3, 40);
  const auto& schema = parts.dataset.schema;
  const auto frozen = MatchFeatures(schema, {"color_*"}).value();
  ASSERT_FALSE(frozen.empty());
  const auto movable = MutableExcept(schema, {"color_*"}).value();
  EXPECT_EQ(frozen.size() + movable.size(), static_cast<size_t>(schema.size()));
  EXPECT_FALSE(MatchFeatures(schema, {"nothing_*"}).ok());
  const auto& model = parts.estimator.base_model;
  for (size_t i = 0; i < 5; ++i) {
    const auto& row = parts.split.test.rows[i];
    CfRequest req;
    req.instance = row.instance;
    req.target = std::clamp(model.Predict(row.instance.values).value() + 0.2, 0.0, 1.0);
    req.mutable_features = movable;
    req.distance = DistanceSpec::FromSchema(schema);
    req.ga.generations = 60;
    req.ga.seed = i;
    SearchTrace trace;
    const auto result = SolveCounterfactual(model, schema, req, &trace).value();
    ASSERT_FALSE(trace.elites.empty());
    const auto same = [&](const std::vector<double>& v) {
      for (int f : frozen) {
        const double a = v[f], b = row.instance.values[f];
        if (!(a == b || (std::isnan(a) && std::isnan(b)))) return false;
      }
      return true;
    };
    EXPECT_TRUE(same(result.counterfactual.values));
    for (const auto& generation : trace.elites) {
      for (const auto& elite : generation) {
        ASSERT_TRUE(same(elite));
        if (result.feasible &&
            std::abs(model.Predict(elite).value() - req.target) <= req.tolerance) {
          EXPECT_LE(result.distance, Distance(row.instance.values, elite, req.distance).value());
        }
      }
    }
    for (const auto& change : result.diffs) {
      EXPECT_EQ(std::find(frozen.begin(), frozen.end(), change.feature), frozen.end());
    }
  }
}

TEST(SearchTest, DeterministicGivenSeed) {
  const auto parts = strstudio::testing::BuildSyntheticWorkspace(200, 4, 30);
  const auto& schema = parts.dataset.schema;
  CfRequest req;
  req.instance = parts.split.test.rows[0].instance;
  req.target = 0.8;
  req.mutable_features = MutableExcept(schema, {}).value();
  req.distance = DistanceSpec::FromSchema(schema);
  req.ga.generations = 40;
  req.ga.seed = 77;
  const auto a = SolveCounterfactual(parts.estimator.base_model, schema, req).value();
  const auto b = SolveCounterfactual(parts.estimator.base_model, schema, req).value();
  EXPECT_EQ(ResultToJson(schema, a).dump(), ResultToJson(schema, b).dump());
}

TEST(SearchTest, ChangesTheMostNegativeShapFeature) {
  // Feature 0 dominates and sits low at x, so raising the forecast is
  // cheapest through it.
  std::vector<std::vector<double>> xs;
  std::vector<double> ys;
  utils::Random rng(3);
  for (int i = 0; i < 600; ++i) {
    std::vector<double> v = {rng.Uniform(), rng.Uniform(), rng.Uniform(), rng.Uniform()};
    ys.push_back(0.6 * v[0] + 0.1 * v[1] + 0.1 * v[2] + 0.1 * v[3]);
    xs.push_back(v);
  }
  const auto train = strstudio::testing::MakeDataset(xs, ys);
  gbdt::TrainConfig config;
  config.n_rounds = 80;
  config.max_depth = 2;
  config.learning_rate = 0.2;
  const auto model = gbdt::Train(train, config).value();
  const std::vector<double> x = {0.1, 0.6, 0.5, 0.4};
  const auto phi = explain::ShapValues(model, x).value();
  const int most_negative = static_cast<int>(
      std::min_element(phi.contributions.begin(), phi.contributions.end()) -
      phi.contributions.begin());
  ASSERT_EQ(most_negative, 0);
  int changed = 0;
  for (uint64_t seed = 0; seed < 20; ++seed) {
    CfRequest req;
    req.instance.values = x;
    req.target = model.Predict(x).value() + 0.2;
    req.mutable_features = {0, 1, 2, 3};
    req.distance = DistanceSpec::FromSchema(train.schema);
    req.ga.seed = seed;
    req.ga.generations = 100;
    const auto result = SolveCounterfactual(model, train.schema, req).value();
    if (result.counterfactual.values[0] != x[0]) ++changed;
  }
  EXPECT_GE(changed, 14);
}

TEST(WhatIfTest, SweepEqualsPredict) {
  const auto parts = strstudio::testing::BuildSyntheticWorkspace(200, 6, 30);
  const auto& schema = parts.dataset.schema;
  const auto& x = parts.split.test.rows[0].instance.values;
  for (int f = 0; f < schema.size(); ++f) {
    const auto values = DefaultSweepValues(schema, f);
    ASSERT_FALSE(values.empty());
    const auto points = WhatIfSweep(parts.estimator, schema, x, f, values, 0.9).value();
    int originals = 0;
    for (const auto& p : points) {
      std::vector<double> probe = x;
      probe[f] = p.value;
      EXPECT_EQ(p.prediction, parts.estimator.base_model.Predict(probe).value());
      ASSERT_TRUE(p.interval.has_value());
      const auto expected = parts.estimator.Interval(probe, 0.9).value();
      EXPECT_EQ(p.interval->lo, expected.lo);
      EXPECT_EQ(p.interval->hi, expected.hi);
      originals += p.is_original;
    }
    EXPECT_EQ(originals, 1);
    EXPECT_EQ(WhatIfToJson(schema, f, points)["points"].size(), points.size());
  }
  EXPECT_FALSE(WhatIfSweep(parts.estimator, schema, x, 0, {1.0}, 1.5).ok());
  EXPECT_FALSE(WhatIfSweep(parts.estimator, schema, x, schema.size(), {1.0}, 0.9).ok());
}

TEST(JsonIoTest, RequestParsing) {
  const auto schema = MixedSchema();
  std::string bad;
  const auto inst = InstanceFromJson(schema, {{"color", "red"}, {"list_price", 25}}).value();
  EXPECT_EQ(inst.values[0], 2.0);
  EXPECT_TRUE(std::isnan(inst.values[1]));
  EXPECT_EQ(inst.values[2], 25.0);
  EXPECT_FALSE(InstanceFromJson(schema, {{"colour", "red"}}, nullptr, &bad).ok());
  EXPECT_EQ(bad, "colour");
  EXPECT_FALSE(InstanceFromJson(schema, {{"color", "green"}}, nullptr, &bad).ok());
  EXPECT_EQ(bad, "color");
  const auto req = CfRequestFromJson(schema, {{"instance", {{"color", "red"}}},
                                              {"target", 0.5},
                                              {"freeze", {"color"}},
                                              {"ga", {{"generations", 10}, {"seed", 3}}}})
                       .value();
  EXPECT_EQ(req.mutable_features, (std::vector<int>{1, 2}));
  EXPECT_EQ(req.ga.generations, 10);
  EXPECT_EQ(req.ga.seed, 3u);
  EXPECT_EQ(req.tolerance, kDefaultTargetTolerance);
  const auto round = GaConfigFromJson(GaConfigToJson(req.ga)).value();
  EXPECT_EQ(GaConfigToJson(round), GaConfigToJson(req.ga));
  EXPECT_FALSE(CfRequestFromJson(schema, {{"instance", nlohmann::json::object()}}).ok());
}

}  // namespace
}  // namespace strstudio::counterfactual
