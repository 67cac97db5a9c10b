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

#include <fstream>
#include <thread>

#include "gtest/gtest.h"
#include "httplib.h"
#include "strstudio/explain/tree_shap.h"
#include "strstudio/service/api.h"
#include "strstudio/service/draft_store.h"
#include "strstudio/service/http_server.h"
#include "strstudio/service/report.h"
#include "strstudio/util/config.h"
#include "strstudio/util/files.h"
#include "testing/test_util.h"

namespace strstudio::service {
namespace {

using nlohmann::json;
using strstudio::testing::TempDir;

class ApiTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    parts_ = new strstudio::testing::SyntheticWorkspace(
        strstudio::testing::BuildSyntheticWorkspace(250, 12, 40));
    ws_ = new Workspace(strstudio::testing::ToWorkspace(*parts_));
  }
  static void TearDownTestSuite() {
    delete ws_;
    delete parts_;
  }

  void SetUp() override {
    int tick = 0;
    drafts_ = DraftStore::Open("", [tick]() mutable {
                return "2026-01-01T00:00:" + std::to_string(10 + tick++) + "Z";
              }).value();
    api_ = std::make_unique<ForecastApi>(*ws_, drafts_.get());
  }

  ApiResponse Get(const std::string& path, std::map<std::string, std::string> query = {}) {
    return api_->Handle({"GET", path, std::move(query), ""});
  }
  ApiResponse Post(const std::string& path, const json& body) {
    return api_->Handle({"POST", path, {}, body.dump()});
  }

  static strstudio::testing::SyntheticWorkspace* parts_;
  static Workspace* ws_;
  std::unique_ptr<DraftStore> drafts_;
  std::unique_ptr<ForecastApi> api_;
};

strstudio::testing::SyntheticWorkspace* ApiTest::parts_ = nullptr;
Workspace* ApiTest::ws_ = nullptr;

TEST_F(ApiTest, ForecastEqualsEngine) {
  const auto& est = ws_->estimator();
  for (size_t i = 0; i < 20; ++i) {
    const std::string id = ws_->dataset().rows[i].instance.product_id;
    const auto r = Post("/forecast", {{"product_id", id}});
    ASSERT_EQ(r.status, 200) << r.body.dump();
    const auto x = ws_->InstanceOf(id)->values;
    const auto dist = est.Predict(x).value();
    const auto interval = est.Interval(x, 0.9).value();
    EXPECT_EQ(r.body["mean"].get<double>(), dist.mean);
    EXPECT_EQ(r.body["std_dev"].get<double>(), dist.std_dev);
    EXPECT_EQ(r.body["interval"]["lo"].get<double>(), interval.lo);
    EXPECT_EQ(r.body["interval"]["hi"].get<double>(), interval.hi);
    const auto phi = explain::ShapValues(est.base_model, x).value();
    EXPECT_EQ(r.body["attribution"], phi.ToJson(ws_->schema()));

    const auto view = Get("/products/" + id);
    ASSERT_EQ(view.status, 200);
    EXPECT_EQ(view.body["forecast"]["mean"], r.body["mean"]);
    EXPECT_EQ(view.body["forecast"]["interval"], r.body["interval"]);
    EXPECT_EQ(view.body["attribution"], r.body["attribution"]);

    const auto by_attrs = Post("/forecast", {{"attributes", r.body["instance"]}});
    ASSERT_EQ(by_attrs.status, 200) << by_attrs.body.dump();
    EXPECT_EQ(by_attrs.body["mean"], r.body["mean"]);
  }
}

TEST_F(ApiTest, ForecastCoverageOption) {
  const std::string id = ws_->dataset().rows[0].instance.product_id;
  const auto wide = Post("/forecast", {{"product_id", id}, {"coverage", 0.99}});
  const auto narrow = Post("/forecast", {{"product_id", id}, {"coverage", 0.5}});
  ASSERT_EQ(wide.status, 200);
  EXPECT_LE(wide.body["interval"]["lo"].get<double>(), narrow.body["interval"]["lo"].get<double>());
  EXPECT_GE(wide.body["interval"]["hi"].get<double>(), narrow.body["interval"]["hi"].get<double>());
  EXPECT_EQ(Post("/forecast", {{"product_id", id}, {"coverage", 1.0}}).status, 400);
}

TEST_F(ApiTest, SummaryHistogramsSumToCounts) {
  for (const auto& query : std::vector<std::map<std::string, std::string>>{
           {}, {{"str_min", "0.2"}}, {{"category", "tops"}, {"str_max", "0.7"}}}) {
    auto grouped = query;
    grouped["group_by"] = "category";
    const auto s = Get("/summary", grouped);
    ASSERT_EQ(s.status, 200) << s.body.dump();
    int64_t total = 0, excluded = 0;
    for (const auto& g : s.body["groups"]) {
      int64_t hist = 0;
      for (const auto& h : g["histogram"]) hist += h.get<int64_t>();
      EXPECT_EQ(hist, g["count"].get<int64_t>());
      total += g["count"].get<int64_t>();
      excluded += g["excluded"].get<int64_t>();
    }
    EXPECT_EQ(total, s.body["count"].get<int64_t>());
    const auto listing = Get("/products", query);
    ASSERT_EQ(listing.status, 200);
    EXPECT_EQ(listing.body["total"].get<int64_t>(), total + excluded);
  }
  EXPECT_EQ(HistogramBin(0.0), 0);
  EXPECT_EQ(HistogramBin(0.1), 1);
  EXPECT_EQ(HistogramBin(1.0), kHistogramBins - 1);
}

TEST_F(ApiTest, ReadEndpointsAreIdempotent) {
  const std::string id = ws_->dataset().rows[3].instance.product_id;
  const std::string feature = ws_->schema().feature(0).name;
  const std::vector<std::pair<std::string, std::map<std::string, std::string>>> reads = {
      {"/health", {}},
      {"/schema", {}},
      {"/products", {{"sort", "str_desc"}, {"page_size", "7"}, {"page", "2"}}},
      {"/products/" + id, {{"weeks", "6"}}},
      {"/summary", {{"group_by", "category"}}},
      {"/importance", {{"method", "gain"}}},
      {"/importance", {{"method", "mean_abs_shap"}}},
      {"/pdp", {{"feature", feature}, {"points", "5"}}},
      {"/designs", {}}};
  std::vector<std::string> first;
  for (const auto& [path, query] : reads) {
    const auto r = Get(path, query);
    EXPECT_EQ(r.status, 200) << path << " " << r.body.dump();
    first.push_back(r.body.dump());
  }
  Post("/forecast", {{"product_id", id}});
  for (size_t i = 0; i < reads.size(); ++i) {
    EXPECT_EQ(Get(reads[i].first, reads[i].second).body.dump(), first[i]) << reads[i].first;
  }
  const auto page = json::parse(first[2]);
  EXPECT_EQ(page["items"].size(), 7u);
}

TEST_F(ApiTest, ErrorStatuses) {
  EXPECT_EQ(Get("/products", {{"colour", "red"}}).status, 400);
  EXPECT_EQ(Get("/products", {{"str_min", "abc"}}).body["field"], "str_min");
  EXPECT_EQ(Get("/products", {{"page_size", "0"}}).status, 400);
  EXPECT_EQ(Get("/products/no-such-product").status, 404);
  EXPECT_EQ(Get("/nowhere").status, 404);
  EXPECT_EQ(Get("/importance", {{"method", "split_count"}}).status, 400);
  EXPECT_EQ(Get("/pdp", {{"feature", "no_such"}}).status, 400);
  EXPECT_EQ(Get("/summary", {{"group_by", "no_such"}}).status, 400);
  EXPECT_EQ(Post("/forecast", {{"product_id", "missing"}}).status, 404);
  EXPECT_EQ(Post("/forecast", {{"bogus", 1}}).status, 400);
  EXPECT_EQ(api_->Handle({"POST", "/forecast", {}, "{not json"}).status, 400);
  EXPECT_EQ(api_->Handle({"POST", "/products", {}, "{}"}).status, 405);
  EXPECT_EQ(Get("/forecast").status, 405);
  const auto e = Get("/products/no-such-product");
  EXPECT_EQ(e.body["code"], "not_found");
  EXPECT_TRUE(e.body["message"].is_string());
}

TEST_F(ApiTest, WhatIfAndCounterfactualEndpoints) {
  const std::string id = ws_->dataset().rows[1].instance.product_id;
  const std::string feature = ws_->schema().feature(0).name;
  const auto w = Post("/whatif", {{"product_id", id}, {"feature", feature}});
  ASSERT_EQ(w.status, 200) << w.body.dump();
  EXPECT_FALSE(w.body["points"].empty());
  EXPECT_EQ(Post("/whatif", {{"product_id", id}, {"feature", "zzz"}}).body["field"], "feature");

  const double mean = Post("/forecast", {{"product_id", id}}).body["mean"].get<double>();
  const json request = {{"product_id", id},
                        {"target", mean},
                        {"freeze", {"color_*"}},
                        {"ga", {{"generations", 20}, {"seed", 1}}}};
  const auto c = Post("/counterfactual", request);
  ASSERT_EQ(c.status, 200) << c.body.dump();
  EXPECT_EQ(c.body["distance"].get<double>(), 0.0);
  EXPECT_TRUE(c.body["markdown"].is_string());
  EXPECT_EQ(Post("/counterfactual", request).body.dump(), c.body.dump());
}

TEST_F(ApiTest, DesignLifecycle) {
  const auto created = Post("/designs", {{"name", "Linen wrap"},
                                         {"category", "tops"},
                                         {"attributes", {{"sleeve_length", "sleeveless"}}}});
  ASSERT_EQ(created.status, 201) << created.body.dump();
  const std::string id = created.body["draft_id"];
  EXPECT_EQ(created.body["status"], "docket");
  EXPECT_EQ(Post("/designs/" + id + "/like", json::object()).body["likes"], 1);
  const auto fb = Post("/designs/" + id + "/feedback", {{"author", "buyer"}, {"text", "shorter"}});
  EXPECT_EQ(fb.body["feedback"].size(), 1u);
  EXPECT_EQ(Post("/designs/" + id + "/feedback", {{"text", ""}}).status, 400);
  EXPECT_EQ(Post("/designs/" + id + "/status", {{"status", "sample"}}).status, 200);
  EXPECT_EQ(Post("/designs/" + id + "/status", {{"status", "docket"}}).status, 409);
  EXPECT_EQ(Post("/designs/" + id + "/status", {{"status", "rejected"}}).status, 200);
  EXPECT_EQ(Post("/designs/" + id + "/status", {{"status", "ordered"}}).status, 409);
  EXPECT_EQ(Post("/designs/" + id + "/status", {{"status", "bogus"}}).status, 400);
  EXPECT_EQ(Post("/designs/nope/like", json::object()).status, 404);
  EXPECT_EQ(Get("/designs", {{"status", "rejected"}}).body["total"], 1);
  EXPECT_EQ(Get("/designs", {{"status", "docket"}}).body["total"], 0);
  EXPECT_EQ(Get("/designs/" + id).body["status"], "rejected");
  EXPECT_EQ(Post("/designs", {{"title", "x"}}).status, 400);
  EXPECT_EQ(Post("/designs", {{"attributes", {{"sleeve_length", "cape"}}}}).body["field"], "sleeve_length");

  ForecastApi no_store(*ws_, nullptr);
  EXPECT_EQ(no_store.Handle({"GET", "/designs", {}, ""}).status, 503);
}

TEST(DraftStoreTest, TransitionsTable) {
  using S = DraftStatus;
  EXPECT_TRUE(IsLegalTransition(S::kDocket, S::kSample));
  EXPECT_TRUE(IsLegalTransition(S::kSample, S::kOrdered));
  EXPECT_TRUE(IsLegalTransition(S::kOrdered, S::kRejected));
  EXPECT_FALSE(IsLegalTransition(S::kSample, S::kDocket));
  EXPECT_FALSE(IsLegalTransition(S::kRejected, S::kRejected));
  EXPECT_FALSE(IsLegalTransition(S::kRejected, S::kDocket));
  for (auto s : {S::kDocket, S::kSample, S::kOrdered, S::kRejected}) {
    EXPECT_EQ(ParseDraftStatus(DraftStatusName(s)), s);
  }
  EXPECT_FALSE(ParseDraftStatus("archived").has_value());
}

TEST(DraftStoreTest, ReplaysLog) {
  TempDir dir;
  const std::string log = dir.File("drafts.jsonl");
  auto clock = [] { return std::string("2026-02-03T04:05:06Z"); };
  std::string before;
  {
    auto store = DraftStore::Open(log, clock).value();
    const auto a = store->Create({"A", "tops", {{"fit", "slim"}}, {"img/a.png"}}).value();
    const auto b = store->Create({"B", "tops", json::object(), {}}).value();
    EXPECT_NE(a.draft_id, b.draft_id);
    ASSERT_TRUE(store->Like(a.draft_id).ok());
    ASSERT_TRUE(store->Like(a.draft_id).ok());
    ASSERT_TRUE(store->AddFeedback(b.draft_id, "d", "nice").ok());
    ASSERT_TRUE(store->SetStatus(b.draft_id, DraftStatus::kSample).ok());
    EXPECT_EQ(store->SetStatus(b.draft_id, DraftStatus::kDocket).status().code(),
              absl::StatusCode::kFailedPrecondition);
    EXPECT_EQ(store->Like("missing").status().code(), absl::StatusCode::kNotFound);
    for (const auto& d : store->List()) before += d.ToJson().dump();
  }
  auto reopened = DraftStore::Open(log, clock).value();
  std::string after;
  for (const auto& d : reopened->List()) after += d.ToJson().dump();
  EXPECT_EQ(after, before);
  EXPECT_EQ(reopened->List(DraftStatus::kSample).size(), 1u);
  const auto c = reopened->Create({"C", "tops", json::object(), {}}).value();
  EXPECT_EQ(reopened->List().size(), 3u);
  EXPECT_FALSE(reopened->Get("nope").has_value());
  EXPECT_TRUE(reopened->Get(c.draft_id).has_value());

  {
    std::ofstream corrupt(log, std::ios::app);
    corrupt << "{broken\n";
  }
  EXPECT_FALSE(DraftStore::Open(log, clock).ok());
  EXPECT_EQ(DraftStore::SystemClock().size(), 20u);
}

TEST_F(ApiTest, HttpServerServesTheApi) {
  HttpServer server(*api_);
  const int port = server.Bind("127.0.0.1", 0).value();
  ASSERT_GT(port, 0);
  std::thread loop([&] { EXPECT_TRUE(server.Listen().ok()); });
  server.WaitUntilReady();
  httplib::Client client("127.0.0.1", port);
  const auto health = client.Get("/health");
  ASSERT_TRUE(health);
  EXPECT_EQ(health->status, 200);
  EXPECT_EQ(json::parse(health->body), Get("/health").body);

  const std::string id = ws_->dataset().rows[2].instance.product_id;
  const json body = {{"product_id", id}};
  const auto forecast = client.Post("/forecast", body.dump(), "application/json");
  ASSERT_TRUE(forecast);
  EXPECT_EQ(forecast->status, 200);
  EXPECT_EQ(json::parse(forecast->body), Post("/forecast", body).body);

  const auto listing = client.Get("/products?sort=str_desc&page_size=3");
  ASSERT_TRUE(listing);
  EXPECT_EQ(json::parse(listing->body),
            Get("/products", {{"sort", "str_desc"}, {"page_size", "3"}}).body);
  const auto missing = client.Get("/products/nope");
  ASSERT_TRUE(missing);
  EXPECT_EQ(missing->status, 404);
  server.Stop();
  loop.join();
}

TEST_F(ApiTest, ExportReportWritesArtifacts) {
  TempDir dir;
  ReportOptions options;
  options.product_ids = {ws_->dataset().rows[0].instance.product_id};
  options.top_features = 2;
  options.pdp_points = 6;
  ASSERT_TRUE(ExportReport(*ws_, dir.path(), options).ok());
  for (const char* f : {"report.md", "importance_gain.csv", "importance_gain.svg",
                        "importance_mean_abs_shap.csv", "importance_mean_abs_shap.svg"}) {
    EXPECT_TRUE(utils::FileExists(dir.File(f))) << f;
  }
  EXPECT_TRUE(utils::FileExists(dir.File("explain_" + options.product_ids[0] + ".json")));
  const std::string md = utils::ReadFile(dir.File("report.md")).value();
  EXPECT_NE(md.find(options.product_ids[0]), std::string::npos);
  options.product_ids = {"unknown-product"};
  EXPECT_FALSE(ExportReport(*ws_, dir.path(), options).ok());
}

TEST(ChartTest, SvgShapes) {
  const std::string bars = BarChartSvg("Importance", {{"a", 0.7}, {"b<c", 0.3}});
  EXPECT_EQ(bars.rfind("<svg", 0), 0u);
  EXPECT_NE(bars.find("b&lt;c"), std::string::npos);
  const std::string line = LineChartSvg("PDP", "x", {0, 1, 2}, {0.1, 0.2, 0.15});
  EXPECT_NE(line.find("</svg>"), std::string::npos);
  EXPECT_NE(ScatterSvg("SHAP", "x", {0, 1}, {0.1, -0.1}).find("circle"), std::string::npos);
}

TEST(ConfigTest, TomlSubset) {
  const auto doc = utils::ParseToml(R"(
# training settings
seed = 7
split = [0.6, 0.2, 0.2]
name = "tops \"v1\""

[base_model]
n_rounds = 1_000
learning_rate = 0.05
enabled = true

[ga.lambda]
steps = 3
)")
                       .value();
  EXPECT_EQ(doc["seed"], 7);
  EXPECT_EQ(doc["split"], json::array({0.6, 0.2, 0.2}));
  EXPECT_EQ(doc["name"], "tops \"v1\"");
  EXPECT_EQ(doc["base_model"]["n_rounds"], 1000);
  EXPECT_EQ(doc["base_model"]["learning_rate"], 0.05);
  EXPECT_EQ(doc["base_model"]["enabled"], true);
  EXPECT_EQ(doc["ga"]["lambda"]["steps"], 3);
  EXPECT_FALSE(utils::ParseToml("a = 1\na = 2\n").ok());
  EXPECT_FALSE(utils::ParseToml("[[runs]]\n").ok());
  EXPECT_FALSE(utils::ParseToml("a = \n").ok());
  const auto err = utils::ParseToml("x = 1\ny = @\n");
  ASSERT_FALSE(err.ok());
  EXPECT_NE(std::string(err.status().message()).find("line 2"), std::string::npos);
}

TEST(ConfigTest, LoadsJsonAndToml) {
  TempDir dir;
  ASSERT_TRUE(utils::WriteFile(dir.File("a.json"), R"({"k_folds": 3})").ok());
  ASSERT_TRUE(utils::WriteFile(dir.File("b.toml"), "k_folds = 4\n").ok());
  ASSERT_TRUE(utils::WriteFile(dir.File("c.toml"), "[1, 2]").ok());
  EXPECT_EQ(utils::LoadConfigFile(dir.File("a.json")).value()["k_folds"], 3);
  EXPECT_EQ(utils::LoadConfigFile(dir.File("b.toml")).value()["k_folds"], 4);
  EXPECT_FALSE(utils::LoadConfigFile(dir.File("c.toml")).ok());
  EXPECT_FALSE(utils::LoadConfigFile(dir.File("none.toml")).ok());
}

}  // namespace
}  // namespace strstudio::service
