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

#include "strstudio/gbdt/grid_search.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <thread>

#include "strstudio/gbdt/model_io.h"
#include "strstudio/gbdt/trainer.h"
#include "strstudio/util/random.h"
#include "strstudio/util/status_macros.h"
#include "strstudio/util/strings.h"

namespace strstudio::gbdt {

using nlohmann::json;

ParamGrid ParamGrid::Default() {
  ParamGrid grid;
  grid.max_depth = {3, 4, 6};
  grid.n_rounds = {50, 100, 200};
  grid.learning_rate = {0.05, 0.1, 0.3};
  grid.l2_leaf_reg = {0.0, 1.0};
  grid.min_split_gain = {0.0};
  return grid;
}

std::vector<TrainConfig> ParamGrid::Expand() const {
  auto or_base = []<typename T>(const std::vector<T>& axis, T fallback) {
    return axis.empty() ? std::vector<T>{fallback} : axis;
  };
  std::vector<TrainConfig> out;
  for (const int depth : or_base(max_depth, base.max_depth)) {
    for (const int rounds : or_base(n_rounds, base.n_rounds)) {
      for (const double lr : or_base(learning_rate, base.learning_rate)) {
        for (const double l2 : or_base(l2_leaf_reg, base.l2_leaf_reg)) {
          for (const double gamma : or_base(min_split_gain, base.min_split_gain)) {
            TrainConfig c = base;
            c.max_depth = depth;
            c.n_rounds = rounds;
            c.learning_rate = lr;
            c.l2_leaf_reg = l2;
            c.min_split_gain = gamma;
            out.push_back(c);
          }
        }
      }
    }
  }
  return out;
}

namespace {

template <typename T>
absl::Status ReadAxis(const json& j, const char* key, std::vector<T>& axis) {
  auto it = j.find(key);
  if (it == j.end()) return absl::OkStatus();
  const json values = it->is_array() ? *it : json::array({*it});
  axis.clear();
  for (const auto& v : values) {
    const bool ok = std::is_integral_v<T> ? v.is_number_integer() : v.is_number();
    if (!ok) {
      return absl::InvalidArgumentError(StrCat("grid axis '", key, "' has a bad value"));
    }
    axis.push_back(v.get<T>());
  }
  if (axis.empty()) {
    return absl::InvalidArgumentError(StrCat("grid axis '", key, "' is empty"));
  }
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<ParamGrid> ParamGridFromJson(const json& j) {
  if (!j.is_object()) return absl::InvalidArgumentError("grid must be an object");
  ParamGrid grid = ParamGrid::Default();
  json base = json::object();
  for (const auto& [key, value] : j.items()) {
    if (key == "max_depth" || key == "n_rounds" || key == "learning_rate" ||
        key == "l2_leaf_reg" || key == "min_split_gain") {
      continue;
    }
    base[key] = value;
  }
  ASSIGN_OR_RETURN(grid.base, TrainConfigFromJson(base));
  RETURN_IF_ERROR(ReadAxis(j, "max_depth", grid.max_depth));
  RETURN_IF_ERROR(ReadAxis(j, "n_rounds", grid.n_rounds));
  RETURN_IF_ERROR(ReadAxis(j, "learning_rate", grid.learning_rate));
  RETURN_IF_ERROR(ReadAxis(j, "l2_leaf_reg", grid.l2_leaf_reg));
  RETURN_IF_ERROR(ReadAxis(j, "min_split_gain", grid.min_split_gain));
  for (const TrainConfig& c : grid.Expand()) RETURN_IF_ERROR(c.Validate());
  return grid;
}

json CvReport::ToJson() const {
  json points_json = json::array();
  for (const GridPoint& p : points) {
    points_json.push_back({{"config", TrainConfigToJson(p.config)},
                           {"fold_rmse", p.fold_rmse},
                           {"mean_rmse", p.mean_rmse},
                           {"std_rmse", p.std_rmse}});
  }
  return {{"k_folds", k_folds},
          {"fold_seed", fold_seed},
          {"chosen_index", chosen_index},
          {"chosen_config", points.empty() ? json(nullptr)
                                           : TrainConfigToJson(chosen())},
          {"points", std::move(points_json)}};
}

std::vector<int> AssignFolds(size_t n_rows, int k_folds, uint64_t seed) {
  std::vector<size_t> order(n_rows);
  std::iota(order.begin(), order.end(), size_t{0});
  utils::Random rng(seed);
  rng.Shuffle(std::span<size_t>(order));
  std::vector<int> fold(n_rows);
  for (size_t i = 0; i < n_rows; ++i) {
    fold[order[i]] = static_cast<int>(i % static_cast<size_t>(k_folds));
  }
  return fold;
}

absl::StatusOr<CvReport> GridSearch(const catalog::Dataset& dataset,
                                    const std::vector<TrainConfig>& grid,
                                    int k_folds, uint64_t seed,
                                    int num_threads) {
  if (k_folds < 2) return absl::InvalidArgumentError("k_folds must be >= 2");
  if (grid.empty()) return absl::InvalidArgumentError("grid is empty");
  for (const TrainConfig& c : grid) RETURN_IF_ERROR(c.Validate());
  const size_t n = dataset.size();
  if (n < 2 * static_cast<size_t>(k_folds)) {
    return absl::InvalidArgumentError(
        StrCat("dataset of ", n, " rows leaves a fold with fewer than 2 rows"));
  }

  const std::vector<int> fold = AssignFolds(n, k_folds, seed);
  std::vector<catalog::Dataset> train(k_folds), held_out(k_folds);
  for (int f = 0; f < k_folds; ++f) {
    std::vector<size_t> in, out;
    for (size_t i = 0; i < n; ++i) (fold[i] == f ? out : in).push_back(i);
    train[f] = catalog::SelectRows(dataset, in);
    held_out[f] = catalog::SelectRows(dataset, out);
  }

  CvReport report;
  report.k_folds = k_folds;
  report.fold_seed = seed;
  report.points.resize(grid.size());
  std::vector<absl::Status> status(grid.size());

  auto evaluate = [&](size_t g) {
    GridPoint& point = report.points[g];
    point.config = grid[g];
    for (int f = 0; f < k_folds; ++f) {
      auto model = Train(train[f], grid[g]);
      if (!model.ok()) {
        status[g] = model.status();
        return;
      }
      auto rmse = Rmse(*model, held_out[f]);
      if (!rmse.ok()) {
        status[g] = rmse.status();
        return;
      }
      point.fold_rmse.push_back(*rmse);
    }
    double sum = 0.0;
    for (const double r : point.fold_rmse) sum += r;
    point.mean_rmse = sum / k_folds;
    double sq = 0.0;
    for (const double r : point.fold_rmse) {
      sq += (r - point.mean_rmse) * (r - point.mean_rmse);
    }
    point.std_rmse = std::sqrt(sq / k_folds);
  };

  const size_t workers = std::clamp<size_t>(num_threads, 1, grid.size());
  if (workers == 1) {
    for (size_t g = 0; g < grid.size(); ++g) evaluate(g);
  } else {
    std::atomic<size_t> next{0};
    std::vector<std::thread> threads;
    for (size_t t = 0; t < workers; ++t) {
      threads.emplace_back([&] {
        for (size_t g = next++; g < grid.size(); g = next++) evaluate(g);
      });
    }
    for (auto& t : threads) t.join();
  }
  for (const auto& s : status) RETURN_IF_ERROR(s);

  for (size_t g = 1; g < grid.size(); ++g) {
    if (report.points[g].mean_rmse < report.points[report.chosen_index].mean_rmse) {
      report.chosen_index = g;
    }
  }
  return report;
}

}  // namespace strstudio::gbdt
