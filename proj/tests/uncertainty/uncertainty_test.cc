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

#include <cmath>

#include "gtest/gtest.h"
#include "strstudio/catalog/synthetic.h"
#include "strstudio/gbdt/model_io.h"
#include "strstudio/gbdt/trainer.h"
#include "strstudio/uncertainty/distribution_estimator.h"
#include "strstudio/uncertainty/normal_quantile.h"
#include "strstudio/util/files.h"
#include "testing/test_util.h"

namespace strstudio::uncertainty {
namespace {

using strstudio::testing::MakeDataset;
using strstudio::testing::TempDir;

TEST(NormalQuantileTest, ReferenceValues) {
  EXPECT_NEAR(TwoSidedZ(0.90).value(), 1.6449, 1e-3);
  EXPECT_NEAR(TwoSidedZ(0.95).value(), 1.9600, 1e-3);
  EXPECT_NEAR(TwoSidedZ(0.99).value(), 2.5758, 1e-3);
  EXPECT_EQ(std::floor(TwoSidedZ(0.90).value() * 100) / 100, 1.64);
  EXPECT_NEAR(NormalQuantile(0.95).value(), 1.6448536269514722, 1e-8);
  EXPECT_NEAR(NormalQuantile(0.975).value(), 1.959963984540054, 1e-8);
  EXPECT_NEAR(NormalQuantile(0.995).value(), 2.5758293035489004, 1e-8);
  EXPECT_NEAR(NormalQuantile(1e-10).value(), -6.361340902404056, 1e-8);
  EXPECT_EQ(NormalQuantile(0.5).value(), 0.0);
}

TEST(NormalQuantileTest, InvertsCdfAndIsOdd) {
  for (double p = 0.001; p < 1.0; p += 0.00731) {
    const double z = NormalQuantile(p).value();
    EXPECT_NEAR(NormalCdf(z), p, 1e-12);
    EXPECT_NEAR(NormalQuantile(1 - p).value(), -z, 1e-9);
  }
}

TEST(NormalQuantileTest, DomainErrors) {
  EXPECT_FALSE(NormalQuantile(0.0).ok());
  EXPECT_FALSE(NormalQuantile(1.0).ok());
  EXPECT_FALSE(TwoSidedZ(0.0).ok());
  EXPECT_FALSE(TwoSidedZ(1.0).ok());
  EXPECT_FALSE(TwoSidedZ(-0.2).ok());
  EXPECT_FALSE(TwoSidedZ(std::nan("")).ok());
}

TEST(IntervalTest, NinetyPercentShape) {
  const ForecastDistribution d{0.4, 0.1};
  const auto i = IntervalFor(d, 0.90, false).value();
  const double z = TwoSidedZ(0.90).value();
  EXPECT_DOUBLE_EQ(i.lo, 0.4 - z * 0.1);
  EXPECT_DOUBLE_EQ(i.hi, 0.4 + z * 0.1);
  EXPECT_NEAR(i.hi - 0.4, 0.164, 0.0005);
  EXPECT_NEAR(0.4 - i.lo, i.hi - 0.4, 1e-15);
}

TEST(IntervalTest, CollapsesAndNests) {
  const ForecastDistribution d{0.2, 0.3};
  const auto tiny = IntervalFor(d, 1e-9, false).value();
  EXPECT_NEAR(tiny.lo, 0.2, 1e-9);
  EXPECT_NEAR(tiny.hi, 0.2, 1e-9);
  PredictionInterval previous{0.2, 0.2};
  for (double c = 0.05; c < 1.0; c += 0.05) {
    const auto i = IntervalFor(d, c, false).value();
    EXPECT_LE(i.lo, previous.lo);
    EXPECT_GE(i.hi, previous.hi);
    previous = i;
  }
  const auto clamped = IntervalFor(d, 0.99, true).value();
  EXPECT_EQ(clamped.lo, 0.0);
  EXPECT_LE(clamped.hi, 1.0);
  EXPECT_FALSE(IntervalFor(d, 1.0, false).ok());
}

catalog::Dataset StepData(size_t n, uint64_t seed, double noise) {
  utils::Random rng(seed);
  std::vector<std::vector<double>> x;
  std::vector<double> y;
  for (size_t i = 0; i < n; ++i) {
    const double a = static_cast<double>(rng.UniformIndex(3));
    const double b = static_cast<double>(rng.UniformIndex(2));
    x.push_back({a, b});
    y.push_back(0.1 * a + 0.3 * b + noise * rng.Normal());
  }
  auto d = MakeDataset(x, y);
  for (size_t i = 0; i < n; ++i) d.rows[i].instance.product_id = "s" + std::to_string(seed) + "_" + std::to_string(i);
  return d;
}

gbdt::TrainConfig Exact() {
  gbdt::TrainConfig c;
  c.n_rounds = 5;
  c.max_depth = 3;
  c.learning_rate = 1.0;
  c.l2_leaf_reg = 0.0;
  return c;
}

TEST(EstimatorTest, NoiseFreeDataHitsTheFloor) {
  const auto est = FitDistributionEstimator(StepData(200, 1, 0.0), StepData(100, 2, 0.0), Exact(),
                                            Exact())
                       .value();
  for (const auto& x : std::vector<std::vector<double>>{{0, 0}, {1, 1}, {2, 0}}) {
    const auto d = est.Predict(x).value();
    EXPECT_EQ(d.std_dev, std::sqrt(est.variance_floor));
    EXPECT_NEAR(d.mean, 0.1 * x[0] + 0.3 * x[1], 1e-12);
  }
}

TEST(EstimatorTest, MeanIsBaseModelAndStdPositive) {
  const auto est = FitDistributionEstimator(StepData(300, 3, 0.1), StepData(300, 4, 0.1), Exact(),
                                            Exact())
                       .value();
  utils::Random rng(8);
  for (int i = 0; i < 200; ++i) {
    const std::vector<double> x = {rng.Uniform(-1, 3), rng.Uniform(-1, 2)};
    const auto a = est.Predict(x).value();
    EXPECT_EQ(a.mean, est.base_model.Predict(x).value());
    EXPECT_GE(a.std_dev, std::sqrt(est.variance_floor));
    const auto b = est.Predict(x).value();
    EXPECT_EQ(a.mean, b.mean);
    EXPECT_EQ(a.std_dev, b.std_dev);
  }
  EXPECT_FALSE(est.Predict(std::vector<double>{1.0}).ok());
}

TEST(EstimatorTest, ErrorTargetsAreSquaredResiduals) {
  const auto base_rows = StepData(300, 5, 0.1);
  const auto error_rows = StepData(200, 6, 0.1);
  const auto base = gbdt::Train(base_rows, Exact()).value();
  const auto e = BuildErrorDataset(base, error_rows).value();
  ASSERT_EQ(e.rows.size(), error_rows.rows.size());
  for (size_t i = 0; i < e.rows.size(); ++i) {
    const double r = error_rows.rows[i].target_str - base.Predict(error_rows.rows[i].instance.values).value();
    EXPECT_EQ(e.rows[i].target_str, r * r);
    EXPECT_EQ(e.rows[i].weight, error_rows.rows[i].weight);
  }
  const auto est = FitDistributionEstimator(base_rows, error_rows, Exact(), Exact()).value();
  EXPECT_EQ(gbdt::SerializeModel(est.error_model),
            gbdt::SerializeModel(gbdt::Train(e, Exact()).value()));
}

TEST(EstimatorTest, RejectsBadSplits) {
  const auto a = StepData(50, 7, 0.1);
  catalog::Dataset empty;
  empty.schema = a.schema;
  EXPECT_FALSE(FitDistributionEstimator(a, empty, Exact(), Exact()).ok());
  EXPECT_FALSE(FitDistributionEstimator(empty, a, Exact(), Exact()).ok());
  EXPECT_FALSE(FitDistributionEstimator(a, a, Exact(), Exact()).ok());
  auto other = strstudio::testing::RandomRegression(50, 4, 1);
  EXPECT_FALSE(FitDistributionEstimator(a, other, Exact(), Exact()).ok());
}

TEST(EstimatorTest, RecoversTwoVarianceLevels) {
  auto train = catalog::GenerateHeteroscedasticRegression(10000, 11);
  auto error = catalog::GenerateHeteroscedasticRegression(10000, 12);
  for (auto& r : error.dataset.rows) r.instance.product_id = "e" + r.instance.product_id;
  gbdt::TrainConfig base;
  base.n_rounds = 200;
  base.max_depth = 4;
  base.learning_rate = 0.1;
  gbdt::TrainConfig err = base;
  err.n_rounds = 100;
  err.max_depth = 2;
  const auto est = FitDistributionEstimator(train.dataset, error.dataset, base, err).value();
  const auto probe = catalog::GenerateHeteroscedasticRegression(2000, 13);
  double low = 0, high = 0;
  int n_low = 0, n_high = 0;
  for (const auto& r : probe.dataset.rows) {
    const double var = std::pow(est.Predict(r.instance.values).value().std_dev, 2);
    if (r.instance.values[0] < 0.5) {
      low += var;
      ++n_low;
    } else {
      high += var;
      ++n_high;
    }
  }
  EXPECT_NEAR(low / n_low, 0.05 * 0.05, 0.2 * 0.05 * 0.05);
  EXPECT_NEAR(high / n_high, 0.15 * 0.15, 0.2 * 0.15 * 0.15);
}

TEST(EstimatorTest, SaveLoadRoundTrip) {
  auto est = FitDistributionEstimator(StepData(200, 14, 0.1), StepData(100, 15, 0.1), Exact(),
                                      Exact())
                 .value();
  est.clamp_intervals = true;
  est.variance_floor = 2e-6;
  TempDir dir;
  ASSERT_TRUE(SaveEstimator(est, dir.path()).ok());
  EXPECT_TRUE(utils::FileExists(dir.File(kManifestFile)));
  const auto back = LoadEstimator(dir.path());
  ASSERT_TRUE(back.ok()) << back.status();
  EXPECT_EQ(back->variance_floor, 2e-6);
  EXPECT_TRUE(back->clamp_intervals);
  EXPECT_EQ(gbdt::SerializeModel(back->base_model), gbdt::SerializeModel(est.base_model));
  EXPECT_EQ(gbdt::SerializeModel(back->error_model), gbdt::SerializeModel(est.error_model));
}

TEST(EstimatorTest, ValidateCatchesMismatch) {
  auto est = FitDistributionEstimator(StepData(100, 16, 0.1), StepData(100, 17, 0.1), Exact(),
                                      Exact())
                 .value();
  EXPECT_TRUE(est.Validate().ok());
  auto broken = est;
  broken.error_model.schema_fingerprint = "deadbeef";
  EXPECT_FALSE(broken.Validate().ok());
  broken = est;
  broken.variance_floor = 0.0;
  EXPECT_FALSE(broken.Validate().ok());
}

TEST(CalibrationTest, NinetyPercentCoverageOnHeteroscedasticData) {
  auto train = catalog::GenerateHeteroscedasticRegression(6000, 21);
  auto error = catalog::GenerateHeteroscedasticRegression(6000, 22);
  for (auto& r : error.dataset.rows) r.instance.product_id = "e" + r.instance.product_id;
  gbdt::TrainConfig base;
  base.n_rounds = 150;
  base.max_depth = 4;
  gbdt::TrainConfig err = base;
  err.n_rounds = 80;
  err.max_depth = 2;
  const auto est = FitDistributionEstimator(train.dataset, error.dataset, base, err).value();
  const auto test = catalog::GenerateHeteroscedasticRegression(10000, 23);
  int covered = 0;
  for (const auto& r : test.dataset.rows) {
    const auto i = est.Interval(r.instance.values, 0.90).value();
    if (r.target_str >= i.lo && r.target_str <= i.hi) ++covered;
  }
  const double coverage = covered / 10000.0;
  EXPECT_GE(coverage, 0.85);
  EXPECT_LE(coverage, 0.94);
}

}  // namespace
}  // namespace strstudio::uncertainty
