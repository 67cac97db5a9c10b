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

#include "strstudio/catalog/synthetic.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>

#include "strstudio/util/strings.h"
#include "strstudio/util/random.h"

namespace strstudio::catalog {
namespace {

using utils::Random;

struct CategoricalAttribute {
  const char* name;
  std::vector<std::pair<std::string, double>> effects;  // label -> STR shift
};

// Effects on STR. Attributes flagged seasonal get an extra summer-dependent
// term in SyntheticGroundTruthStr.
const std::vector<CategoricalAttribute>& CategoricalAttributes() {
  static const auto* attributes = new std::vector<CategoricalAttribute>{
      {"sleeve_length",
       {{"long sleeve", -0.08},
        {"3/4 sleeve", -0.02},
        {"short sleeve", 0.04},
        {"sleeveless", 0.10}}},
      {"neckline",
       {{"round", 0.0},
        {"v-neck", 0.03},
        {"strap", 0.06},
        {"button down", 0.04},
        {"collar", -0.02},
        {"boat", 0.01}}},
      {"pattern",
       {{"solid", 0.0},
        {"striped", 0.05},
        {"floral", 0.03},
        {"checked", -0.03},
        {"printed", 0.02}}},
      {"fit",
       {{"regular", 0.0},
        {"slim", 0.02},
        {"relaxed", 0.03},
        {"oversized", -0.04}}},
      {"length",
       {{"above knee", -0.05},
        {"regular", 0.04},
        {"midi", 0.02},
        {"maxi", -0.01},
        {"cropped", 0.01}}},
      {"fabric",
       {{"cotton", 0.03},
        {"linen", 0.0},
        {"polyester", -0.04},
        {"denim", 0.0},
        {"viscose", 0.02},
        {"knit", 0.0}}},
      // Carried by the catalog but ignored by the STR model.
      {"trim",
       {{"none", 0.0}, {"lace", 0.0}, {"embroidery", 0.0}, {"buttons", 0.0}}},
  };
  return *attributes;
}

struct CategoryTraits {
  double base_str;
  double base_price;
};

CategoryTraits TraitsOf(const std::string& category) {
  static const auto* traits = new std::map<std::string, CategoryTraits>{
      {"shorts", {0.28, 1299}}, {"pants", {0.22, 1999}},
      {"dresses", {0.24, 2499}}, {"jeans", {0.26, 2299}},
      {"shirts", {0.25, 1799}}, {"knits", {0.20, 1599}},
      {"tops", {0.30, 1399}},   {"t-shirts", {0.33, 799}},
  };
  const auto it = traits->find(category);
  return it == traits->end() ? CategoryTraits{0.25, 1499} : it->second;
}

const std::string* Label(const ProductRecord& p, const std::string& name) {
  const auto it = p.attributes.find(name);
  if (it == p.attributes.end()) return nullptr;
  return std::get_if<std::string>(&it->second);
}

double Number(const ProductRecord& p, const std::string& name,
              double fallback) {
  const auto it = p.attributes.find(name);
  if (it == p.attributes.end()) return fallback;
  const double* d = std::get_if<double>(&it->second);
  return d ? *d : fallback;
}

// 0 before week 14, ramping to 1 at week 24.
double Summer(int launch_week) {
  return std::clamp((launch_week - 14) / 10.0, 0.0, 1.0);
}

double EffectOf(const CategoricalAttribute& attribute,
                const std::string* label) {
  if (label == nullptr) return 0.0;
  for (const auto& [l, effect] : attribute.effects) {
    if (l == *label) return effect;
  }
  return 0.0;
}

double ContinuousGroundTruth(const ProductRecord& p) {
  const CategoryTraits traits = TraitsOf(p.category);
  const double summer = Summer(p.launch_week);
  double g = traits.base_str;
  for (const auto& attribute : CategoricalAttributes()) {
    g += EffectOf(attribute, Label(p, attribute.name));
  }
  const std::string* sleeve = Label(p, "sleeve_length");
  if (sleeve && *sleeve == "sleeveless") g += 0.06 * summer;
  if (sleeve && *sleeve == "long sleeve") g -= 0.04 * summer;
  const std::string* fabric = Label(p, "fabric");
  if (fabric && *fabric == "linen") g += 0.05 * summer;
  if (fabric && *fabric == "knit") g -= 0.03 * summer;

  const double hue = Number(p, "color_hue", 90.0);
  const double saturation = Number(p, "color_saturation", 0.35);
  const double value = Number(p, "color_value", 0.5);
  g += 0.07 * std::cos(2.0 * std::numbers::pi * hue / 180.0);
  g -= 0.25 * (saturation - 0.35) * (saturation - 0.35);
  g += 0.06 * (value - 0.5);
  if (p.list_price > 0) g -= 0.12 * std::log(p.list_price / traits.base_price);
  g += 0.04 * std::sin(std::numbers::pi * (p.launch_week - 6) / 20.0);
  return std::clamp(g, 0.03, 0.95);
}

int64_t Quantize(double str, int quantum) {
  return std::clamp<int64_t>(std::llround(str * quantum), 0, quantum);
}

}  // namespace

SyntheticCatalogConfig SyntheticCatalogConfig::FullCatalog() {
  SyntheticCatalogConfig config;
  config.categories = {{"shorts", 100}, {"pants", 346},  {"dresses", 445},
                       {"jeans", 461},  {"shirts", 483}, {"knits", 516},
                       {"tops", 1031},  {"t-shirts", 1248}};
  return config;
}

SyntheticCatalogConfig SyntheticCatalogConfig::SingleCategory(
    std::string name, int products) {
  SyntheticCatalogConfig config;
  config.categories = {{std::move(name), products}};
  return config;
}

double SyntheticGroundTruthStr(const ProductRecord& product, int str_quantum) {
  return static_cast<double>(
             Quantize(ContinuousGroundTruth(product), str_quantum)) /
         str_quantum;
}

double SyntheticNoiseSd(const ProductRecord& product, double noise_scale) {
  const std::string* pattern = Label(product, "pattern");
  const double pattern_factor = (pattern && *pattern == "solid") ? 0.5 : 1.0;
  return noise_scale * pattern_factor *
         (1.0 + 0.5 * Summer(product.launch_week));
}

SyntheticCatalog GenerateSyntheticCatalog(const SyntheticCatalogConfig& config,
                                          uint64_t seed) {
  Random rng(seed);
  SyntheticCatalog out;
  const int quantum = std::max(1, config.str_quantum);
  const int horizon = std::max(1, config.horizon_weeks);
  const int life = std::max(config.life_weeks, horizon);
  const int n_stores = std::max(1, config.n_stores);

  for (int s = 0; s < n_stores; ++s) {
    StoreRecord store;
    store.store_id = fmt::format("S{:03d}", s + 1);
    store.address = fmt::format("{} High Street, District {}",
                                    10 + rng.UniformIndex(190), s % 7 + 1);
    store.latitude = std::round(rng.Uniform(8.0, 30.0) * 1e4) / 1e4;
    store.longitude = std::round(rng.Uniform(70.0, 88.0) * 1e4) / 1e4;
    store.capacity = rng.UniformInt(500, 5000);
    store.selling_area = std::round(rng.Uniform(200.0, 1500.0));
    out.catalog.stores.push_back(std::move(store));
  }

  const auto& attributes = CategoricalAttributes();
  int next_product = 1;
  int next_customer = 1;
  for (const auto& category : config.categories) {
    const CategoryTraits traits = TraitsOf(category.name);
    for (int k = 0; k < category.products; ++k) {
      ProductRecord p;
      p.product_id = fmt::format("P{:05d}", next_product++);
      p.category = category.name;
      p.launch_week = static_cast<int>(
          rng.UniformInt(config.first_launch_week, config.last_launch_week));
      p.carry_weeks = life;
      p.list_price = std::round(traits.base_price *
                                std::exp(0.25 * rng.Normal()) * 2.0) /
                     2.0;
      for (const auto& attribute : attributes) {
        if (rng.Bernoulli(config.missing_rate)) {
          p.attributes[attribute.name] = std::monostate{};
        } else {
          p.attributes[attribute.name] =
              attribute.effects[rng.UniformIndex(attribute.effects.size())]
                  .first;
        }
      }
      p.attributes["color_hue"] = std::round(rng.Uniform(0.0, 180.0) * 1e4) / 1e4;
      p.attributes["color_saturation"] = std::round(rng.Uniform() * 1e4) / 1e4;
      p.attributes["color_value"] = std::round(rng.Uniform() * 1e4) / 1e4;

      ProductTruth truth;
      truth.product_id = p.product_id;
      truth.ground_truth_str = SyntheticGroundTruthStr(p, quantum);
      const double noisy =
          ContinuousGroundTruth(p) +
          (config.noise_scale > 0
               ? SyntheticNoiseSd(p, config.noise_scale) * rng.Normal()
               : 0.0);
      const int64_t str_units =
          config.noise_scale > 0 ? Quantize(std::clamp(noisy, 0.0, 1.0), quantum)
                                 : Quantize(ContinuousGroundTruth(p), quantum);
      truth.realized_str = static_cast<double>(str_units) / quantum;

      // Stores carrying the product.
      const int lo = std::clamp(config.min_stores_per_product, 1, n_stores);
      const int hi = std::clamp(config.max_stores_per_product, lo, n_stores);
      const int k_stores = static_cast<int>(rng.UniformInt(lo, hi));
      std::vector<size_t> store_order(n_stores);
      std::iota(store_order.begin(), store_order.end(), size_t{0});
      rng.Shuffle(std::span<size_t>(store_order));
      store_order.resize(k_stores);
      std::sort(store_order.begin(), store_order.end());

      // Receipts per store and week (initial allocation plus at most one
      // replenishment inside the window).
      std::vector<std::vector<int64_t>> receipts(
          k_stores, std::vector<int64_t>(life, 0));
      for (int s = 0; s < k_stores; ++s) {
        receipts[s][0] = rng.UniformInt(10, 40);
        if (horizon > 1 && rng.Bernoulli(config.replenish_probability)) {
          const int week = static_cast<int>(
              rng.UniformInt(1, std::min(2, horizon - 1)));
          receipts[s][week] += rng.UniformInt(5, 20);
        }
      }
      int64_t window_received = 0;
      for (const auto& r : receipts) {
        window_received += std::accumulate(r.begin(), r.end(), int64_t{0});
      }
      const int64_t pad = (quantum - window_received % quantum) % quantum;
      receipts[0][0] += pad;
      window_received += pad;
      const int64_t window_sold = str_units * (window_received / quantum);

      // Split the window sales across stores in proportion to receipts.
      std::vector<int64_t> quota(k_stores, 0);
      std::vector<std::pair<double, int>> remainders;
      int64_t assigned = 0;
      for (int s = 0; s < k_stores; ++s) {
        const int64_t received_s =
            std::accumulate(receipts[s].begin(), receipts[s].end(), int64_t{0});
        const double exact = static_cast<double>(window_sold) *
                             static_cast<double>(received_s) /
                             static_cast<double>(window_received);
        quota[s] = static_cast<int64_t>(std::floor(exact));
        assigned += quota[s];
        remainders.emplace_back(exact - static_cast<double>(quota[s]), s);
      }
      std::stable_sort(
          remainders.begin(), remainders.end(),
          [](const auto& a, const auto& b) { return a.first > b.first; });
      for (size_t i = 0; assigned < window_sold; ++i, ++assigned) {
        ++quota[remainders[i % remainders.size()].second];
      }

      const int64_t launch_ordinal =
          SeasonCalendar(config.season_year).LaunchOrdinal(p.launch_week);
      const Date launch_monday =
          Date(std::chrono::days(launch_ordinal * 7 - 3));
      for (int s = 0; s < k_stores; ++s) {
        const std::string& store_id =
            out.catalog.stores[store_order[s]].store_id;
        int64_t on_hand = 0;
        int64_t previous_end = -1;
        int64_t sold_so_far = 0;
        for (int w = 0; w < life; ++w) {
          on_hand += receipts[s][w];
          truth.total_received += receipts[s][w];
          int64_t sell = 0;
          if (w < horizon) {
            const int64_t remaining = quota[s] - sold_so_far;
            if (w == horizon - 1) {
              sell = remaining;
            } else {
              const double pace = static_cast<double>(remaining) /
                                  static_cast<double>(horizon - w) *
                                  rng.Uniform(0.5, 1.5);
              sell = std::min({on_hand, remaining,
                               static_cast<int64_t>(std::llround(pace))});
            }
            sold_so_far += sell;
          } else {
            sell = static_cast<int64_t>(std::floor(
                static_cast<double>(on_hand) * rng.Uniform(0.1, 0.4)));
          }
          on_hand -= sell;
          truth.total_sold += sell;

          // Sales lines for the week.
          const Date monday = launch_monday + std::chrono::days(7 * w);
          const double price =
              w < horizon ? p.list_price : std::round(p.list_price * 0.7 * 2) / 2;
          int64_t left = sell;
          const int64_t lines =
              sell == 0 ? 0 : std::min<int64_t>(sell, rng.UniformInt(1, 3));
          for (int64_t line = 0; line < lines; ++line) {
            const int64_t units =
                line == lines - 1 ? left
                                  : rng.UniformInt(1, left - (lines - line - 1));
            left -= units;
            SalesTransaction t;
            t.customer_id = rng.Bernoulli(0.2)
                                ? std::string()
                                : fmt::format("C{:06d}", next_customer++);
            t.product_id = p.product_id;
            t.store_id = store_id;
            t.units = units;
            t.unit_price = price;
            t.date = monday + std::chrono::days(rng.UniformIndex(7));
            out.catalog.sales.push_back(std::move(t));
          }

          // Snapshots are only written when the level changes.
          if (on_hand != previous_end || w == 0) {
            out.catalog.inventory.push_back(
                {p.product_id, store_id, monday + std::chrono::days(6),
                 on_hand});
          }
          previous_end = on_hand;
        }
        truth.final_inventory += on_hand;
      }
      truth.window_sold = window_sold;
      truth.window_received = window_received;
      out.truth.push_back(truth);
      out.catalog.products.push_back(std::move(p));
    }
  }
  SortCanonical(out.catalog);
  // Products are generated in id order already, so truth stays parallel.
  out.ground_truth = [quantum](const ProductRecord& p) {
    return SyntheticGroundTruthStr(p, quantum);
  };
  return out;
}

RegressionTask GenerateHeteroscedasticRegression(size_t n, uint64_t seed,
                                                 double sigma_low,
                                                 double sigma_high, int d) {
  d = std::max(d, 4);
  RegressionTask task;
  task.mean = [](std::span<const double> x) {
    return 0.3 + 0.3 * x[1] + 0.2 * (x[2] > 0.5 ? 1.0 : 0.0) +
           0.1 * std::sin(2.0 * std::numbers::pi * x[3]);
  };
  task.stddev = [sigma_low, sigma_high](std::span<const double> x) {
    return x[0] < 0.5 ? sigma_low : sigma_high;
  };
  Random rng(seed);
  task.dataset.schema = FeatureSchema::Numeric(d);
  task.dataset.provenance = StrCat("heteroscedastic regression, seed ",
                                         seed, ", n ", n);
  task.dataset.rows.reserve(n);
  for (size_t i = 0; i < n; ++i) {
    LabeledInstance row;
    row.instance.values.resize(d);
    for (int j = 0; j < d; ++j) row.instance.values[j] = rng.Uniform();
    row.instance.product_id = StrCat("r", i);
    row.target_str = task.mean(row.instance.values) +
                     task.stddev(row.instance.values) * rng.Normal();
    task.dataset.rows.push_back(std::move(row));
  }
  return task;
}

}  // namespace strstudio::catalog
