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

// str_studio: command line front end for the sell-through forecasting engine.

#include <pthread.h>
#include <signal.h>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "nlohmann/json.hpp"
#include "spdlog/spdlog.h"
#include "strstudio/catalog/dataset.h"
#include "strstudio/catalog/records.h"
#include "strstudio/catalog/sell_through.h"
#include "strstudio/catalog/synthetic.h"
#include "strstudio/catalog/taxonomy.h"
#include "strstudio/counterfactual/diff.h"
#include "strstudio/counterfactual/genetic_search.h"
#include "strstudio/counterfactual/json_io.h"
#include "strstudio/counterfactual/what_if.h"
#include "strstudio/explain/importance.h"
#include "strstudio/explain/partial_dependence.h"
#include "strstudio/explain/tree_shap.h"
#include "strstudio/gbdt/grid_search.h"
#include "strstudio/gbdt/model_io.h"
#include "strstudio/gbdt/trainer.h"
#include "strstudio/service/api.h"
#include "strstudio/service/draft_store.h"
#include "strstudio/service/http_server.h"
#include "strstudio/service/report.h"
#include "strstudio/service/workspace.h"
#include "strstudio/uncertainty/distribution_estimator.h"
#include "strstudio/util/config.h"
#include "strstudio/util/csv.h"
#include "strstudio/util/files.h"
#include "strstudio/util/status_macros.h"
#include "strstudio/util/strings.h"

namespace strstudio::cli {
namespace {

using nlohmann::json;

constexpr char kSplitFile[] = "split.json";
constexpr char kCvReportFile[] = "cv_report.json";
constexpr char kTrainingLogFile[] = "training_log.csv";

struct Globals {
  std::string data_dir;
  std::string model_dir = "model";
  std::string out;
  uint64_t seed = 42;
  std::string config_path;
  int threads = 1;
  bool verbose = false;
};

// Settings read from --config.
struct Settings {
  std::vector<double> split = {0.6, 0.2, 0.2};
  int horizon_weeks = catalog::kDefaultHorizonWeeks;
  int k_folds = 5;
  gbdt::TrainConfig base_model;
  gbdt::TrainConfig error_model;
  json grid = json::object();
  json ga = json::object();
};

absl::StatusOr<Settings> LoadSettings(const Globals& g) {
  Settings s;
  if (g.config_path.empty()) return s;
  ASSIGN_OR_RETURN(const json config, utils::LoadConfigFile(g.config_path));
  for (const auto& [key, value] : config.items()) {
    auto bad = [&](std::string_view what) {
      return absl::InvalidArgumentError(StrCat(g.config_path, ": '", key, "' ", what));
    };
    if (key == "split") {
      if (!value.is_array()) return bad("must be an array of three fractions");
      s.split.clear();
      for (const auto& v : value) {
        if (!v.is_number()) return bad("must be an array of three fractions");
        s.split.push_back(v.get<double>());
      }
      if (s.split.size() != 3) return bad("must be an array of three fractions");
    } else if (key == "horizon_weeks" || key == "k_folds") {
      if (!value.is_number_integer()) return bad("must be an integer");
      (key == "k_folds" ? s.k_folds : s.horizon_weeks) = value.get<int>();
    } else if (key == "base_model" || key == "error_model") {
      auto cfg = gbdt::TrainConfigFromJson(value);
      if (!cfg.ok()) return bad(StatusMessage(cfg.status()));
      (key == "base_model" ? s.base_model : s.error_model) = *cfg;
    } else if (key == "grid") {
      if (!value.is_object()) return bad("must be a table");
      s.grid = value;
    } else if (key == "ga") {
      if (!value.is_object()) return bad("must be a table");
      s.ga = value;
    } else {
      return bad("is not a known setting");
    }
  }
  return s;
}

absl::Status RequireDataDir(const Globals& g) {
  if (g.data_dir.empty()) {
    return absl::InvalidArgumentError("no data directory; pass --data-dir or set STR_STUDIO_DATA");
  }
  return absl::OkStatus();
}

std::string OutDir(const Globals& g, const std::string& fallback) {
  return g.out.empty() ? fallback : g.out;
}

absl::StatusOr<catalog::Dataset> AssembleFromCatalog(const std::string& data_dir,
                                                     const std::string& taxonomy_path,
                                                     int horizon_weeks) {
  ASSIGN_OR_RETURN(catalog::RawCatalog raw, catalog::LoadCatalog(data_dir));
  if (!taxonomy_path.empty()) {
    ASSIGN_OR_RETURN(const auto rules, catalog::LoadTaxonomy(taxonomy_path));
    const int renamed = catalog::ApplyTaxonomy(rules, raw.products);
    spdlog::info("taxonomy renamed {} attribute values", renamed);
  }
  ASSIGN_OR_RETURN(const catalog::FeatureSchema schema, catalog::FitEncoder(raw.products));
  catalog::AssembleOptions options;
  options.horizon_weeks = horizon_weeks;
  options.season_year = catalog::InferSeasonYear(raw.sales);
  const auto ledger = catalog::SalesLedger::Build(raw.sales, raw.inventory);
  return catalog::AssembleDataset(raw.products, ledger, schema, options);
}

// The ingested dataset under data_dir/dataset, or one assembled on the fly.
absl::StatusOr<catalog::Dataset> LoadDatasetFor(const Globals& g, const Settings& s) {
  RETURN_IF_ERROR(RequireDataDir(g));
  const std::string dir = utils::JoinPath(g.data_dir, "dataset");
  if (utils::FileExists(utils::JoinPath(dir, catalog::kSchemaFile))) {
    return catalog::LoadDataset(dir);
  }
  return AssembleFromCatalog(g.data_dir, "", s.horizon_weeks);
}

absl::StatusOr<catalog::DatasetSplit> SplitFor(const catalog::Dataset& dataset, const Settings& s,
                                              uint64_t seed) {
  return catalog::SplitThreeWay(dataset, s.split[0], s.split[1], s.split[2], seed);
}

absl::StatusOr<service::Workspace> LoadWorkspace(const Globals& g) {
  RETURN_IF_ERROR(RequireDataDir(g));
  return service::Workspace::Load(g.data_dir, g.model_dir);
}

absl::StatusOr<int> FeatureIndex(const catalog::FeatureSchema& schema, const std::string& name) {
  const auto f = schema.FindFeature(name);
  if (!f) return absl::NotFoundError(StrCat("unknown feature '", name, "'"));
  return *f;
}

absl::StatusOr<catalog::EncodedInstance> ProductInstance(const service::Workspace& ws,
                                                        const std::string& id) {
  auto instance = ws.InstanceOf(id);
  if (!instance) return absl::NotFoundError(StrCat("unknown product '", id, "'"));
  return *std::move(instance);
}

absl::Status WriteJson(const std::string& path, const json& doc) {
  return utils::WriteFile(path, doc.dump(2) + "\n");
}

absl::Status WriteOutput(const Globals& g, const std::string& name, const std::string& content) {
  if (g.out.empty()) return absl::OkStatus();
  RETURN_IF_ERROR(utils::EnsureDirectory(g.out));
  return utils::WriteFile(utils::JoinPath(g.out, name), content);
}

// --- synth ------------------------------------------------------------------

struct SynthArgs {
  std::string profile = "full";
  int products = 0;
  double noise = -1.0;
};

absl::Status RunSynth(const Globals& g, const SynthArgs& a) {
  catalog::SyntheticCatalogConfig config;
  if (a.profile == "full") {
    config = catalog::SyntheticCatalogConfig::FullCatalog();
  } else if (a.profile == "tops") {
    config = catalog::SyntheticCatalogConfig::SingleCategory("tops", 1031);
  } else if (a.profile == "small") {
    config = catalog::SyntheticCatalogConfig::SingleCategory("tops", 300);
  } else {
    return absl::InvalidArgumentError(
        StrCat("unknown profile '", a.profile, "' (full, tops, small)"));
  }
  if (a.products > 0) {
    for (auto& c : config.categories) c.products = a.products;
  }
  if (a.noise >= 0.0) config.noise_scale = a.noise;
  const std::string out = OutDir(g, g.data_dir);
  if (out.empty()) return absl::InvalidArgumentError("pass --out or --data-dir for the catalog");
  const auto synthetic = catalog::GenerateSyntheticCatalog(config, g.seed);
  RETURN_IF_ERROR(catalog::SaveCatalog(synthetic.catalog, out));
  std::string truth = "product_id,ground_truth_str,realized_str,window_sold,window_received\n";
  for (const auto& t : synthetic.truth) {
    truth += utils::FormatCsvRow({t.product_id, utils::FormatDouble(t.ground_truth_str),
                                  utils::FormatDouble(t.realized_str), std::to_string(t.window_sold),
                                  std::to_string(t.window_received)});
  }
  RETURN_IF_ERROR(utils::WriteFile(utils::JoinPath(out, "truth.csv"), truth));
  fmt::print("wrote {} products, {} sales rows, {} inventory rows, {} stores to {}\n",
             synthetic.catalog.products.size(), synthetic.catalog.sales.size(),
             synthetic.catalog.inventory.size(), synthetic.catalog.stores.size(), out);
  return absl::OkStatus();
}

// --- ingest -----------------------------------------------------------------

absl::Status RunIngest(const Globals& g, const std::string& taxonomy) {
  RETURN_IF_ERROR(RequireDataDir(g));
  ASSIGN_OR_RETURN(const Settings s, LoadSettings(g));
  ASSIGN_OR_RETURN(const catalog::Dataset dataset,
                   AssembleFromCatalog(g.data_dir, taxonomy, s.horizon_weeks));
  const std::string out = OutDir(g, utils::JoinPath(g.data_dir, "dataset"));
  RETURN_IF_ERROR(catalog::SaveDataset(dataset, out));
  fmt::print("{} rows, {} features, {} excluded products -> {}\n", dataset.size(),
             dataset.schema.size(), dataset.exclusions.size(), out);
  return absl::OkStatus();
}

// --- train / tune / evaluate -------------------------------------------------

absl::Status RunTrain(const Globals& g, const std::string& params_path) {
  ASSIGN_OR_RETURN(Settings s, LoadSettings(g));
  if (!params_path.empty()) {
    ASSIGN_OR_RETURN(const std::string text, utils::ReadFile(params_path));
    const json report = json::parse(text, nullptr, false);
    if (report.is_discarded() || !report.contains("chosen_config") ||
        !report["chosen_config"].is_object()) {
      return absl::InvalidArgumentError(StrCat(params_path, ": not a cross-validation report"));
    }
    ASSIGN_OR_RETURN(s.base_model, gbdt::TrainConfigFromJson(report["chosen_config"]));
  }
  ASSIGN_OR_RETURN(const catalog::Dataset dataset, LoadDatasetFor(g, s));
  ASSIGN_OR_RETURN(const catalog::DatasetSplit split, SplitFor(dataset, s, g.seed));
  s.base_model.seed = s.base_model.seed == 0 ? g.seed : s.base_model.seed;
  s.error_model.seed = s.error_model.seed == 0 ? g.seed : s.error_model.seed;
  gbdt::TrainingLog log;
  ASSIGN_OR_RETURN(const gbdt::TreeEnsemble base, gbdt::Train(split.train_base, s.base_model, &log));
  ASSIGN_OR_RETURN(const catalog::Dataset error_rows,
                   uncertainty::BuildErrorDataset(base, split.train_error));
  ASSIGN_OR_RETURN(const gbdt::TreeEnsemble error, gbdt::Train(error_rows, s.error_model));
  uncertainty::DistributionEstimator estimator;
  estimator.base_model = base;
  estimator.error_model = error;
  estimator.clamp_intervals = true;
  RETURN_IF_ERROR(uncertainty::SaveEstimator(estimator, g.model_dir));
  RETURN_IF_ERROR(utils::WriteFile(utils::JoinPath(g.model_dir, catalog::kSchemaFile),
                                   dataset.schema.ToJson().dump(2) + "\n"));
  auto ids = [](const catalog::Dataset& d) {
    json out = json::array();
    for (const auto& r : d.rows) out.push_back(r.instance.product_id);
    return out;
  };
  RETURN_IF_ERROR(WriteJson(utils::JoinPath(g.model_dir, kSplitFile),
                            {{"seed", g.seed},
                             {"fractions", s.split},
                             {"train_base", ids(split.train_base)},
                             {"train_error", ids(split.train_error)},
                             {"test", ids(split.test)}}));
  std::string log_csv = "round,weighted_rmse\n";
  for (size_t t = 0; t < log.weighted_rmse.size(); ++t) {
    log_csv += utils::FormatCsvRow({std::to_string(t), utils::FormatDouble(log.weighted_rmse[t])});
  }
  RETURN_IF_ERROR(utils::WriteFile(utils::JoinPath(g.model_dir, kTrainingLogFile), log_csv));
  ASSIGN_OR_RETURN(const double train_rmse, gbdt::Rmse(base, split.train_base));
  fmt::print("trained on {} rows ({} for the error model), {} trees, train RMSE {:.4f} -> {}\n",
             split.train_base.size(), split.train_error.size(), base.trees.size(), train_rmse,
             g.model_dir);
  return absl::OkStatus();
}

absl::Status RunTune(const Globals& g) {
  ASSIGN_OR_RETURN(const Settings s, LoadSettings(g));
  ASSIGN_OR_RETURN(const catalog::Dataset dataset, LoadDatasetFor(g, s));
  ASSIGN_OR_RETURN(const catalog::DatasetSplit split, SplitFor(dataset, s, g.seed));
  gbdt::ParamGrid grid = gbdt::ParamGrid::Default();
  if (!s.grid.empty()) {
    ASSIGN_OR_RETURN(grid, gbdt::ParamGridFromJson(s.grid));
  }
  if (grid.base.seed == 0) grid.base.seed = g.seed;
  ASSIGN_OR_RETURN(const gbdt::CvReport report,
                   gbdt::GridSearch(split.train_base, grid.Expand(), s.k_folds, g.seed, g.threads));
  const std::string out = OutDir(g, g.model_dir);
  RETURN_IF_ERROR(utils::EnsureDirectory(out));
  RETURN_IF_ERROR(WriteJson(utils::JoinPath(out, kCvReportFile), report.ToJson()));
  const auto& best = report.points[report.chosen_index];
  fmt::print("{} grid points, {}-fold; best mean RMSE {:.4f} (depth {}, rounds {}, eta {}, l2 {})\n",
             report.points.size(), report.k_folds, best.mean_rmse, best.config.max_depth,
             best.config.n_rounds, best.config.learning_rate, best.config.l2_leaf_reg);
  return absl::OkStatus();
}

absl::StatusOr<catalog::Dataset> TestSplit(const Globals& g, const catalog::Dataset& dataset) {
  const std::string path = utils::JoinPath(g.model_dir, kSplitFile);
  ASSIGN_OR_RETURN(const std::string text, utils::ReadFile(path));
  const json split = json::parse(text, nullptr, false);
  if (split.is_discarded() || !split.contains("test") || !split["test"].is_array()) {
    return absl::DataLossError(StrCat(path, ": malformed split file"));
  }
  std::map<std::string, size_t> index;
  for (size_t i = 0; i < dataset.rows.size(); ++i) index[dataset.rows[i].instance.product_id] = i;
  std::vector<size_t> rows;
  for (const auto& id : split["test"]) {
    auto it = index.find(id.get<std::string>());
    if (it == index.end()) {
      return absl::FailedPreconditionError(
          StrCat("test product '", id.get<std::string>(), "' is not in the dataset"));
    }
    rows.push_back(it->second);
  }
  return catalog::SelectRows(dataset, rows);
}

absl::Status RunEvaluate(const Globals& g, double coverage) {
  ASSIGN_OR_RETURN(const Settings s, LoadSettings(g));
  ASSIGN_OR_RETURN(const catalog::Dataset dataset, LoadDatasetFor(g, s));
  ASSIGN_OR_RETURN(const auto estimator, uncertainty::LoadEstimator(g.model_dir));
  RETURN_IF_ERROR(estimator.CheckSchema(dataset.schema));
  ASSIGN_OR_RETURN(const catalog::Dataset test, TestSplit(g, dataset));
  if (test.empty()) return absl::FailedPreconditionError("the test split is empty");
  ASSIGN_OR_RETURN(const double rmse, gbdt::Rmse(estimator.base_model, test));
  size_t covered = 0;
  double width = 0.0;
  for (const auto& row : test.rows) {
    ASSIGN_OR_RETURN(const auto interval, estimator.Interval(row.instance.values, coverage));
    if (row.target_str >= interval.lo && row.target_str <= interval.hi) ++covered;
    width += interval.hi - interval.lo;
  }
  const double n = static_cast<double>(test.size());
  const json report = {{"n_test", test.size()},
                       {"rmse", rmse},
                       {"coverage_nominal", coverage},
                       {"coverage_empirical", covered / n},
                       {"mean_interval_width", width / n}};
  RETURN_IF_ERROR(WriteOutput(g, "evaluation.json", report.dump(2) + "\n"));
  fmt::print("test rows {}  RMSE {:.4f}  {:.0f}% interval coverage {:.3f}  mean width {:.4f}\n",
             test.size(), rmse, coverage * 100, covered / n, width / n);
  return absl::OkStatus();
}

// --- explanations ------------------------------------------------------------

absl::Status RunExplain(const Globals& g, const std::vector<std::string>& products) {
  ASSIGN_OR_RETURN(const auto ws, LoadWorkspace(g));
  json out = json::array();
  for (const auto& id : products) {
    ASSIGN_OR_RETURN(const auto instance, ProductInstance(ws, id));
    ASSIGN_OR_RETURN(const auto a, explain::ShapValues(ws.estimator().base_model, instance.values,
                                                       &ws.dataset()));
    json item = a.ToJson(ws.schema());
    item["product_id"] = id;
    out.push_back(std::move(item));
  }
  const std::string text = out.dump(2) + "\n";
  RETURN_IF_ERROR(WriteOutput(g, "explanations.json", text));
  std::cout << text;
  return absl::OkStatus();
}

absl::Status RunImportance(const Globals& g, const std::string& method_name) {
  ASSIGN_OR_RETURN(const auto method, explain::ParseImportanceMethod(method_name));
  ASSIGN_OR_RETURN(const auto ws, LoadWorkspace(g));
  const auto& model = ws.estimator().base_model;
  ASSIGN_OR_RETURN(const auto report, method == explain::ImportanceMethod::kGain
                                          ? explain::GainImportance(model)
                                          : explain::GlobalShapImportance(model, ws.dataset(),
                                                                          g.threads));
  const std::string csv = report.ToCsv(ws.schema());
  const std::string tag(explain::ImportanceMethodName(method));
  RETURN_IF_ERROR(WriteOutput(g, "importance_" + tag + ".csv", csv));
  RETURN_IF_ERROR(WriteOutput(g, "importance_" + tag + ".json", report.ToJson(ws.schema()).dump(2) + "\n"));
  std::cout << csv;
  return absl::OkStatus();
}

absl::Status RunPdp(const Globals& g, const std::string& feature, int points) {
  ASSIGN_OR_RETURN(const auto ws, LoadWorkspace(g));
  ASSIGN_OR_RETURN(const int f, FeatureIndex(ws.schema(), feature));
  ASSIGN_OR_RETURN(const auto grid, explain::DefaultPdpGrid(ws.dataset(), f, points));
  ASSIGN_OR_RETURN(const auto curve,
                   explain::PartialDependence(ws.estimator().base_model, ws.dataset(), f, grid));
  const std::string csv = curve.ToCsv(ws.schema());
  RETURN_IF_ERROR(WriteOutput(g, "pdp_" + feature + ".csv", csv));
  RETURN_IF_ERROR(WriteOutput(g, "pdp_" + feature + ".json", curve.ToJson(ws.schema()).dump(2) + "\n"));
  std::cout << csv;
  return absl::OkStatus();
}

// --- what-if / counterfactual ------------------------------------------------

struct WhatIfArgs {
  std::string product;
  std::string feature;
  std::vector<std::string> values;
  double coverage = service::kDefaultCoverage;
};

absl::Status RunWhatIf(const Globals& g, const WhatIfArgs& a) {
  ASSIGN_OR_RETURN(const auto ws, LoadWorkspace(g));
  ASSIGN_OR_RETURN(const int f, FeatureIndex(ws.schema(), a.feature));
  ASSIGN_OR_RETURN(const auto instance, ProductInstance(ws, a.product));
  std::vector<double> candidates;
  for (const auto& v : a.values) {
    if (ws.schema().feature(f).categorical()) {
      const auto code = ws.schema().CodeOf(f, v);
      if (!code) return absl::InvalidArgumentError(StrCat("'", v, "' is not a label of ", a.feature));
      candidates.push_back(*code);
    } else {
      ASSIGN_OR_RETURN(const double d, utils::ParseDouble(v));
      candidates.push_back(d);
    }
  }
  if (candidates.empty()) candidates = counterfactual::DefaultSweepValues(ws.schema(), f);
  ASSIGN_OR_RETURN(const auto points, counterfactual::WhatIfSweep(ws.estimator(), ws.schema(),
                                                                  instance.values, f, candidates,
                                                                  a.coverage));
  json out = counterfactual::WhatIfToJson(ws.schema(), f, points);
  out["product_id"] = a.product;
  RETURN_IF_ERROR(WriteOutput(g, "whatif.json", out.dump(2) + "\n"));
  for (const auto& p : points) {
    fmt::print("{:>16} {:8.4f}{}\n", p.label, p.prediction, p.is_original ? "  (current)" : "");
  }
  return absl::OkStatus();
}

struct CounterfactualArgs {
  std::string product;
  std::optional<double> target;
  std::optional<double> delta;
  std::vector<std::string> freeze;
  std::vector<std::string> mutable_globs;
  std::optional<double> tolerance;
  std::string request_path;
};

absl::Status RunCounterfactual(const Globals& g, const CounterfactualArgs& a) {
  ASSIGN_OR_RETURN(const Settings s, LoadSettings(g));
  ASSIGN_OR_RETURN(const auto ws, LoadWorkspace(g));
  json body = json::object();
  if (!a.request_path.empty()) {
    ASSIGN_OR_RETURN(const std::string text, utils::ReadFile(a.request_path));
    body = json::parse(text, nullptr, false);
    if (body.is_discarded() || !body.is_object()) {
      return absl::InvalidArgumentError(StrCat(a.request_path, ": not a JSON object"));
    }
  }
  std::string product = a.product;
  if (product.empty() && body.contains("product_id") && body["product_id"].is_string()) {
    product = body["product_id"].get<std::string>();
  }
  if (product.empty()) return absl::InvalidArgumentError("pass --product");
  ASSIGN_OR_RETURN(const auto instance, ProductInstance(ws, product));
  body["product_id"] = product;
  if (a.target && a.delta) return absl::InvalidArgumentError("pass either --target or --delta");
  if (a.target) body["target"] = *a.target;
  if (a.delta) {
    ASSIGN_OR_RETURN(const double current, ws.estimator().base_model.Predict(instance.values));
    body["target"] = std::clamp(current + *a.delta, 0.0, 1.0);
  }
  if (!body.contains("target")) return absl::InvalidArgumentError("pass --target or --delta");
  if (!a.freeze.empty()) body["freeze"] = a.freeze;
  if (!a.mutable_globs.empty()) body["mutable"] = a.mutable_globs;
  if (a.tolerance) body["tolerance"] = *a.tolerance;
  json ga = s.ga;
  if (body.contains("ga") && body["ga"].is_object()) ga.update(body["ga"]);
  if (!ga.contains("seed")) ga["seed"] = g.seed;
  body["ga"] = ga;
  std::string field;
  auto request = counterfactual::CfRequestFromJson(ws.schema(), body, &instance, &ws.dataset(), &field);
  if (!request.ok()) {
    return field.empty() ? request.status()
                         : absl::InvalidArgumentError(StrCat(field, ": ", StatusMessage(request.status())));
  }
  ASSIGN_OR_RETURN(const auto result, counterfactual::SolveCounterfactual(ws.estimator().base_model,
                                                                          ws.schema(), *request));
  json out = counterfactual::ResultToJson(ws.schema(), result);
  out["product_id"] = product;
  const std::string markdown =
      counterfactual::DiffMarkdown(result.diffs, result.original_prediction, result.predicted);
  RETURN_IF_ERROR(WriteOutput(g, "counterfactual.json", out.dump(2) + "\n"));
  RETURN_IF_ERROR(WriteOutput(g, "counterfactual.md", markdown));
  fmt::print("target {}  reached {}  distance {:.4f}  {}\n\n{}",
             counterfactual::FormatPercent(result.target),
             counterfactual::FormatPercent(result.predicted), result.distance,
             result.feasible ? "feasible" : "not feasible", markdown);
  return absl::OkStatus();
}

// --- serve / export-report ----------------------------------------------------

absl::Status RunServe(const Globals& g, const std::string& host, int port,
                      const std::string& drafts_path) {
  ASSIGN_OR_RETURN(const auto ws, LoadWorkspace(g));
  const std::string log = drafts_path.empty() ? utils::JoinPath(g.data_dir, "drafts.jsonl") : drafts_path;
  ASSIGN_OR_RETURN(auto drafts, service::DraftStore::Open(log));
  const service::ForecastApi api(ws, drafts.get());
  service::HttpServer server(api);
  ASSIGN_OR_RETURN(const int bound, server.Bind(host, port));
  fmt::print("listening on http://{}:{}\n", host, bound);
  std::fflush(stdout);

  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);
  std::thread waiter([&] {
    int received = 0;
    sigwait(&signals, &received);
    spdlog::info("signal {}, shutting down", received);
    server.Stop();
  });
  const absl::Status status = server.Listen();
  pthread_kill(waiter.native_handle(), SIGTERM);
  waiter.join();
  return status;
}

absl::Status RunExportReport(const Globals& g, const service::ReportOptions& options) {
  ASSIGN_OR_RETURN(const auto ws, LoadWorkspace(g));
  const std::string out = OutDir(g, "report");
  RETURN_IF_ERROR(service::ExportReport(ws, out, options));
  fmt::print("report written to {}\n", utils::JoinPath(out, "report.md"));
  return absl::OkStatus();
}

int Fail(const absl::Status& status) {
  const json error = {{"error",
                       {{"code", absl::StatusCodeToString(status.code())},
                        {"message", StatusMessage(status)}}}};
  std::cerr << error.dump() << "\n";
  return 1;
}

}  // namespace

int Main(int argc, char** argv) {
  CLI::App app{"Sell-through forecasting, explanation and counterfactual tool", "str_studio"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--data-dir", g.data_dir, "Catalog directory (sales, inventory, products, stores)")
      ->envname("STR_STUDIO_DATA");
  app.add_option("--model-dir", g.model_dir, "Directory holding the trained estimator")
      ->capture_default_str();
  app.add_option("--out", g.out, "Output directory for artifacts");
  app.add_option("--seed", g.seed, "Random seed")->capture_default_str();
  app.add_option("--config", g.config_path, "Settings file (JSON or TOML)");
  app.add_option("--threads", g.threads, "Worker threads")->check(CLI::PositiveNumber);
  app.add_flag("-v,--verbose", g.verbose, "Debug logging");

  std::function<absl::Status()> action;

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic catalog with known ground truth");
  synth_cmd->add_option("--profile", synth.profile, "full, tops or small")
      ->capture_default_str();
  synth_cmd->add_option("--products", synth.products, "Override the products per category");
  synth_cmd->add_option("--noise", synth.noise, "Override the noise scale");
  synth_cmd->callback([&] { action = [&] { return RunSynth(g, synth); }; });

  std::string taxonomy;
  auto* ingest_cmd = app.add_subcommand("ingest", "Build the encoded sell-through dataset");
  ingest_cmd->add_option("--taxonomy", taxonomy, "Rename table (attribute,from_label,to_label)");
  ingest_cmd->callback([&] { action = [&] { return RunIngest(g, taxonomy); }; });

  std::string params;
  auto* train_cmd = app.add_subcommand("train", "Fit the mean and error models");
  train_cmd->add_option("--params", params, "Use the chosen point of a cv_report.json");
  train_cmd->callback([&] { action = [&] { return RunTrain(g, params); }; });

  auto* tune_cmd = app.add_subcommand("tune", "k-fold grid search over boosting parameters");
  tune_cmd->callback([&] { action = [&] { return RunTune(g); }; });

  double coverage = service::kDefaultCoverage;
  auto* eval_cmd = app.add_subcommand("evaluate", "RMSE and interval coverage on the held-out split");
  eval_cmd->add_option("--coverage", coverage, "Nominal interval coverage")->capture_default_str();
  eval_cmd->callback([&] { action = [&] { return RunEvaluate(g, coverage); }; });

  std::vector<std::string> explain_products;
  auto* explain_cmd = app.add_subcommand("explain", "SHAP attribution for products");
  explain_cmd->add_option("--product", explain_products, "Product id (repeatable)")
      ->required()
      ->delimiter(',');
  explain_cmd->callback([&] { action = [&] { return RunExplain(g, explain_products); }; });

  std::string method = "gain";
  auto* importance_cmd = app.add_subcommand("importance", "Global feature importance");
  importance_cmd->add_option("--method", method, "gain or mean_abs_shap")->capture_default_str();
  importance_cmd->callback([&] { action = [&] { return RunImportance(g, method); }; });

  std::string pdp_feature;
  int pdp_points = explain::kDefaultPdpPoints;
  auto* pdp_cmd = app.add_subcommand("pdp", "Partial dependence curve of one feature");
  pdp_cmd->add_option("--feature", pdp_feature, "Feature name")->required();
  pdp_cmd->add_option("--points", pdp_points, "Grid points")->capture_default_str();
  pdp_cmd->callback([&] { action = [&] { return RunPdp(g, pdp_feature, pdp_points); }; });

  WhatIfArgs whatif;
  auto* whatif_cmd = app.add_subcommand("whatif", "Sweep one feature of a product");
  whatif_cmd->add_option("--product", whatif.product, "Product id")->required();
  whatif_cmd->add_option("--feature", whatif.feature, "Feature name")->required();
  whatif_cmd->add_option("--values", whatif.values, "Candidate values or labels")->delimiter(',');
  whatif_cmd->add_option("--coverage", whatif.coverage, "Interval coverage")->capture_default_str();
  whatif_cmd->callback([&] { action = [&] { return RunWhatIf(g, whatif); }; });

  CounterfactualArgs cf;
  auto* cf_cmd = app.add_subcommand("counterfactual", "Closest attribute change reaching a target STR");
  cf_cmd->add_option("--product", cf.product, "Product id");
  cf_cmd->add_option("--target", cf.target, "Target STR in [0, 1]");
  cf_cmd->add_option("--delta", cf.delta, "Target relative to the current forecast");
  cf_cmd->add_option("--freeze", cf.freeze, "Feature globs that may not change")->delimiter(',');
  cf_cmd->add_option("--mutable", cf.mutable_globs, "Feature globs that may change")->delimiter(',');
  cf_cmd->add_option("--tolerance", cf.tolerance, "Accepted |forecast - target|");
  cf_cmd->add_option("--request", cf.request_path, "JSON request body");
  cf_cmd->callback([&] { action = [&] { return RunCounterfactual(g, cf); }; });

  std::string host = "127.0.0.1";
  int port = 8080;
  std::string drafts_path;
  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP JSON API");
  serve_cmd->add_option("--host", host, "Bind address")->capture_default_str();
  serve_cmd->add_option("--port", port, "Port, 0 for any")->capture_default_str();
  serve_cmd->add_option("--drafts", drafts_path, "Design draft log (default <data-dir>/drafts.jsonl)");
  serve_cmd->callback([&] { action = [&] { return RunServe(g, host, port, drafts_path); }; });

  service::ReportOptions report;
  auto* report_cmd = app.add_subcommand("export-report", "Markdown and SVG report bundle");
  report_cmd->add_option("--product", report.product_ids, "Products to explain")->delimiter(',');
  report_cmd->add_option("--top", report.top_features, "Features with PDP curves")
      ->capture_default_str();
  report_cmd->add_option("--points", report.pdp_points, "PDP grid points")->capture_default_str();
  report_cmd->callback([&] { action = [&] { return RunExportReport(g, report); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  spdlog::set_level(g.verbose ? spdlog::level::debug : spdlog::level::warn);
  const absl::Status status = action();
  return status.ok() ? 0 : Fail(status);
}

}  // namespace strstudio::cli

int main(int argc, char** argv) { return strstudio::cli::Main(argc, argv); }
