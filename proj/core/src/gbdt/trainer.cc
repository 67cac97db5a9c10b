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

#include "strstudio/gbdt/trainer.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "strstudio/util/random.h"
#include "strstudio/util/strings.h"

namespace strstudio::gbdt {
namespace {

using catalog::IsMissing;

// Weighted residual statistics of a set of rows.
struct Stats {
  double g = 0.0;  // sum of w * residual
  double w = 0.0;  // sum of w
  int64_t n = 0;

  void Add(double wg, double weight) {
    g += wg;
    w += weight;
    ++n;
  }
};

Stats operator+(const Stats& a, const Stats& b) {
  return {a.g + b.g, a.w + b.w, a.n + b.n};
}
Stats operator-(const Stats& a, const Stats& b) {
  return {a.g - b.g, a.w - b.w, a.n - b.n};
}

struct SplitCandidate {
  double gain = -1.0;
  int feature = -1;
  double threshold = 0.0;
  bool default_left = false;
};

// Column-major copy of the features with per-feature presorted row orders.
class FeatureMatrix {
 public:
  explicit FeatureMatrix(const catalog::Dataset& dataset)
      : n_rows_(dataset.size()), n_features_(dataset.schema.size()) {
    columns_.assign(n_features_, std::vector<double>(n_rows_));
    sorted_.resize(n_features_);
    missing_.resize(n_features_);
    for (size_t i = 0; i < n_rows_; ++i) {
      const auto& values = dataset.rows[i].instance.values;
      for (int f = 0; f < n_features_; ++f) columns_[f][i] = values[f];
    }
    for (int f = 0; f < n_features_; ++f) {
      for (size_t i = 0; i < n_rows_; ++i) {
        (IsMissing(columns_[f][i]) ? missing_[f] : sorted_[f]).push_back(i);
      }
      const auto& col = columns_[f];
      std::stable_sort(sorted_[f].begin(), sorted_[f].end(),
                       [&](size_t a, size_t b) { return col[a] < col[b]; });
    }
  }

  double value(int f, size_t i) const { return columns_[f][i]; }
  const std::vector<size_t>& sorted(int f) const { return sorted_[f]; }
  const std::vector<size_t>& missing(int f) const { return missing_[f]; }
  int n_features() const { return n_features_; }

 private:
  size_t n_rows_;
  int n_features_;
  std::vector<std::vector<double>> columns_;
  std::vector<std::vector<size_t>> sorted_;
  std::vector<std::vector<size_t>> missing_;
};

double Score(const Stats& s, double l2) { return s.g * s.g / (s.w + l2); }

// Split point strictly above `lo` and at most `hi`.
double Midpoint(double lo, double hi) {
  const double mid = lo + (hi - lo) / 2.0;
  return mid > lo ? mid : hi;
}

class TreeBuilder {
 public:
  TreeBuilder(const FeatureMatrix& x, const TrainConfig& config)
      : x_(x), config_(config) {}

  // `rows` lists sampled row indices in increasing order. Returns a tree with
  // leaf values, gains and covers filled in.
  Tree Build(const std::vector<size_t>& rows, const std::vector<double>& wg,
             const std::vector<double>& weight, size_t n_total_rows) {
    Tree tree;
    tree.nodes.emplace_back();
    std::vector<int> position(n_total_rows, -1);
    for (const size_t i : rows) position[i] = 0;

    std::vector<int> frontier = {0};
    std::vector<Stats> node_stats(1);
    for (const size_t i : rows) node_stats[0].Add(wg[i], weight[i]);

    for (int depth = 0; depth < config_.max_depth && !frontier.empty();
         ++depth) {
      std::vector<int> slot_of(tree.nodes.size(), -1);
      for (size_t s = 0; s < frontier.size(); ++s) slot_of[frontier[s]] = s;
      std::vector<SplitCandidate> best(frontier.size());

      for (int f = 0; f < x_.n_features(); ++f) {
        std::vector<Stats> miss(frontier.size());
        for (const size_t i : x_.missing(f)) {
          const int node = position[i];
          if (node < 0 || slot_of[node] < 0) continue;
          miss[slot_of[node]].Add(wg[i], weight[i]);
        }
        std::vector<Stats> present(frontier.size());
        for (size_t s = 0; s < frontier.size(); ++s) {
          present[s] = node_stats[frontier[s]] - miss[s];
          present[s].n = node_stats[frontier[s]].n - miss[s].n;
        }
        std::vector<Stats> left(frontier.size());
        std::vector<double> last(frontier.size(), 0.0);
        std::vector<bool> has_last(frontier.size(), false);
        for (const size_t i : x_.sorted(f)) {
          const int node = position[i];
          if (node < 0) continue;
          const int s = slot_of[node];
          if (s < 0) continue;
          const double v = x_.value(f, i);
          if (has_last[s] && v > last[s]) {
            Evaluate(f, Midpoint(last[s], v), left[s], present[s], miss[s],
                     node_stats[frontier[s]], best[s]);
          }
          left[s].Add(wg[i], weight[i]);
          last[s] = v;
          has_last[s] = true;
        }
      }

      std::vector<int> next_frontier;
      for (size_t s = 0; s < frontier.size(); ++s) {
        const int node = frontier[s];
        const SplitCandidate& c = best[s];
        const double floor_gain =
            std::max(config_.min_split_gain, 1e-12 * node_stats[node].w);
        if (c.feature < 0 || !(c.gain > floor_gain)) continue;
        const int left = static_cast<int>(tree.nodes.size());
        tree.nodes.emplace_back();
        tree.nodes.emplace_back();
        TreeNode& n = tree.nodes[node];
        n.feature = c.feature;
        n.threshold = c.threshold;
        n.default_left = c.default_left;
        n.left = left;
        n.right = left + 1;
        n.gain = c.gain;
        next_frontier.push_back(left);
        next_frontier.push_back(left + 1);
      }
      if (next_frontier.empty()) break;

      // Route rows of the split nodes to their children.
      node_stats.resize(tree.nodes.size());
      for (const int child : next_frontier) node_stats[child] = Stats{};
      for (const size_t i : rows) {
        const int node = position[i];
        const TreeNode& n = tree.nodes[node];
        if (n.is_leaf()) continue;
        const double v = x_.value(n.feature, i);
        const int child = IsMissing(v) ? (n.default_left ? n.left : n.right)
                                       : (v < n.threshold ? n.left : n.right);
        position[i] = child;
        node_stats[child].Add(wg[i], weight[i]);
      }
      frontier = std::move(next_frontier);
    }

    // Leaf values and covers from a fresh pass in row order.
    std::vector<Stats> totals(tree.nodes.size());
    for (const size_t i : rows) {
      int node = 0;
      totals[node].Add(wg[i], weight[i]);
      while (!tree.nodes[node].is_leaf()) {
        const TreeNode& n = tree.nodes[node];
        const double v = x_.value(n.feature, i);
        node = IsMissing(v) ? (n.default_left ? n.left : n.right)
                            : (v < n.threshold ? n.left : n.right);
        totals[node].Add(wg[i], weight[i]);
      }
    }
    for (size_t k = 0; k < tree.nodes.size(); ++k) {
      TreeNode& n = tree.nodes[k];
      n.cover = totals[k].w;
      if (n.is_leaf()) n.value = totals[k].g / (totals[k].w + config_.l2_leaf_reg);
    }
    return tree;
  }

 private:
  void Evaluate(int feature, double threshold, const Stats& left_present,
                const Stats& present, const Stats& miss, const Stats& total,
                SplitCandidate& best) const {
    const double l2 = config_.l2_leaf_reg;
    const Stats right_present = present - left_present;
    const double parent = Score(total, l2);
    // Missing rows go right first; ties keep default right.
    for (const bool missing_left : {false, true}) {
      if (missing_left && miss.n == 0) break;
      const Stats l = missing_left ? left_present + miss : left_present;
      const Stats r = missing_left ? right_present : right_present + miss;
      if (l.n < 1 || r.n < 1) continue;
      if (l.w < config_.min_child_weight || r.w < config_.min_child_weight) {
        continue;
      }
      const double gain = Score(l, l2) + Score(r, l2) - parent;
      if (gain > best.gain) {
        best = {gain, feature, threshold, missing_left};
      }
    }
  }

  const FeatureMatrix& x_;
  const TrainConfig& config_;
};

absl::Status ValidateDataset(const catalog::Dataset& dataset) {
  if (dataset.empty()) return absl::InvalidArgumentError("dataset is empty");
  const size_t d = dataset.schema.size();
  for (size_t i = 0; i < dataset.size(); ++i) {
    const auto& row = dataset.rows[i];
    if (row.instance.values.size() != d) {
      return absl::InvalidArgumentError(StrCat(
          "row ", i, " has ", row.instance.values.size(),
          " features, schema has ", d));
    }
    if (!std::isfinite(row.target_str)) {
      return absl::InvalidArgumentError(
          StrCat("row ", i, " has a non-finite target"));
    }
    if (!std::isfinite(row.weight) || !(row.weight > 0)) {
      return absl::InvalidArgumentError(
          StrCat("row ", i, " has a non-positive or non-finite weight"));
    }
  }
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<TreeEnsemble> Train(const catalog::Dataset& dataset,
                                   const TrainConfig& config,
                                   TrainingLog* log) {
  if (auto s = config.Validate(); !s.ok()) return s;
  if (auto s = ValidateDataset(dataset); !s.ok()) return s;

  const size_t n = dataset.size();
  std::vector<double> y(n), weight(n);
  double sum_wy = 0.0, sum_w = 0.0;
  for (size_t i = 0; i < n; ++i) {
    y[i] = dataset.rows[i].target_str;
    weight[i] = dataset.rows[i].weight;
    sum_wy += weight[i] * y[i];
    sum_w += weight[i];
  }

  TreeEnsemble ensemble;
  ensemble.base_score = sum_wy / sum_w;
  ensemble.learning_rate = config.learning_rate;
  ensemble.num_features = dataset.schema.size();
  ensemble.schema_fingerprint = dataset.schema.fingerprint();
  ensemble.train_config = config;

  const FeatureMatrix x(dataset);
  TreeBuilder builder(x, config);
  utils::Random rng(config.seed);

  // raw_sum[i] is the running sum of leaf values, so the prediction is
  // base + lr * raw_sum exactly as TreeEnsemble::PredictPrefix computes it.
  std::vector<double> raw_sum(n, 0.0);
  std::vector<double> wg(n);
  auto weighted_rmse = [&]() {
    double sse = 0.0;
    for (size_t i = 0; i < n; ++i) {
      const double r =
          y[i] - (ensemble.base_score + ensemble.learning_rate * raw_sum[i]);
      sse += weight[i] * r * r;
    }
    return std::sqrt(sse / sum_w);
  };
  if (log != nullptr) {
    log->weighted_rmse.clear();
    log->weighted_rmse.push_back(weighted_rmse());
  }

  std::vector<size_t> all_rows(n);
  std::iota(all_rows.begin(), all_rows.end(), size_t{0});
  const size_t sample_size =
      config.row_subsample >= 1.0
          ? n
          : std::max<size_t>(1, static_cast<size_t>(std::llround(
                                    config.row_subsample * n)));

  for (int round = 0; round < config.n_rounds; ++round) {
    for (size_t i = 0; i < n; ++i) {
      const double prediction =
          ensemble.base_score + ensemble.learning_rate * raw_sum[i];
      wg[i] = weight[i] * (y[i] - prediction);
    }
    std::vector<size_t> rows;
    if (sample_size == n) {
      rows = all_rows;
    } else {
      std::vector<size_t> pool = all_rows;
      for (size_t k = 0; k < sample_size; ++k) {
        std::swap(pool[k], pool[k + rng.UniformIndex(n - k)]);
      }
      rows.assign(pool.begin(), pool.begin() + sample_size);
      std::sort(rows.begin(), rows.end());
    }
    Tree tree = builder.Build(rows, wg, weight, n);
    for (size_t i = 0; i < n; ++i) {
      raw_sum[i] += tree.Predict(dataset.rows[i].instance.values);
    }
    ensemble.trees.push_back(std::move(tree));
    if (log != nullptr) log->weighted_rmse.push_back(weighted_rmse());
  }
  return ensemble;
}

absl::StatusOr<double> Rmse(const TreeEnsemble& ensemble,
                            const catalog::Dataset& dataset) {
  if (dataset.empty()) return absl::InvalidArgumentError("dataset is empty");
  double sse = 0.0;
  for (const auto& row : dataset.rows) {
    auto p = ensemble.Predict(row.instance.values);
    if (!p.ok()) return p.status();
    const double r = row.target_str - *p;
    sse += r * r;
  }
  return std::sqrt(sse / static_cast<double>(dataset.size()));
}

}  // namespace strstudio::gbdt
