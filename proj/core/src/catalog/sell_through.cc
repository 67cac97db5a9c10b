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

#include "strstudio/catalog/sell_through.h"

#include <algorithm>

#include "strstudio/util/strings.h"

namespace strstudio::catalog {

SalesLedger SalesLedger::Build(std::span<const SalesTransaction> sales,
                               std::span<const InventorySnapshot> inventory) {
  SalesLedger ledger;
  for (const auto& t : sales) {
    auto& history = ledger.products_[t.product_id][t.store_id];
    const int64_t week = WeekOrdinal(t.date);
    history.sales.emplace_back(week, t.units);
    history.revenue.emplace_back(week,
                                 static_cast<double>(t.units) * t.unit_price);
  }
  for (const auto& s : inventory) {
    auto& history = ledger.products_[s.product_id][s.store_id];
    history.snapshots.emplace_back(s.date.time_since_epoch().count(),
                                   s.units_on_hand);
  }
  for (auto& [product, stores] : ledger.products_) {
    for (auto& [store, history] : stores) {
      std::stable_sort(
          history.snapshots.begin(), history.snapshots.end(),
          [](const auto& a, const auto& b) { return a.first < b.first; });
    }
  }
  return ledger;
}

std::vector<WeeklyFlow> SalesLedger::Flows(const std::string& product_id,
                                           int64_t first_week,
                                           int n_weeks) const {
  std::vector<WeeklyFlow> flows;
  const auto product = products_.find(product_id);
  if (product == products_.end() || n_weeks <= 0) return flows;
  for (const auto& [store_id, history] : product->second) {
    WeeklyFlow flow;
    flow.store_id = store_id;
    flow.sold.assign(n_weeks, 0);
    flow.inventory_end.assign(n_weeks, 0);
    flow.revenue.assign(n_weeks, 0.0);
    for (const auto& [week, units] : history.sales) {
      const int64_t w = week - first_week;
      if (w >= 0 && w < n_weeks) flow.sold[w] += units;
    }
    for (const auto& [week, amount] : history.revenue) {
      const int64_t w = week - first_week;
      if (w >= 0 && w < n_weeks) flow.revenue[w] += amount;
    }
    // Latest snapshot dated on or before the end of each week.
    size_t next = 0;
    int64_t on_hand = 0;
    for (int w = 0; w < n_weeks; ++w) {
      const int64_t week = first_week + w;
      while (next < history.snapshots.size() &&
             WeekOrdinal(Date(std::chrono::days(
                 history.snapshots[next].first))) <= week) {
        on_hand = history.snapshots[next].second;
        ++next;
      }
      flow.inventory_end[w] = on_hand;
    }
    flows.push_back(std::move(flow));
  }
  return flows;
}

std::vector<int64_t> ComputeReceived(std::span<const int64_t> inventory_end,
                                     std::span<const int64_t> sold) {
  const size_t n = std::min(inventory_end.size(), sold.size());
  std::vector<int64_t> received(n, 0);
  int64_t previous = 0;
  for (size_t w = 0; w < n; ++w) {
    received[w] = std::max<int64_t>(0, inventory_end[w] - previous + sold[w]);
    previous = inventory_end[w];
  }
  return received;
}

absl::StatusOr<SellThrough> ComputeSellThrough(const ProductRecord& product,
                                               const SalesLedger& ledger,
                                               const SeasonCalendar& calendar,
                                               int horizon_weeks) {
  if (horizon_weeks < 1) {
    return absl::InvalidArgumentError("horizon_weeks must be >= 1");
  }
  const int64_t launch = calendar.LaunchOrdinal(product.launch_week);
  SellThrough result;
  for (const auto& flow : ledger.Flows(product.product_id, launch,
                                       horizon_weeks)) {
    const auto received = ComputeReceived(flow.inventory_end, flow.sold);
    for (int w = 0; w < horizon_weeks; ++w) {
      result.units_sold += flow.sold[w];
      result.units_received += received[w];
    }
  }
  if (result.units_received <= 0) {
    return absl::FailedPreconditionError(StrCat(
        "no units received in the first ", horizon_weeks,
        " weeks after launch (product ", product.product_id, ")"));
  }
  result.str = std::clamp(static_cast<double>(result.units_sold) /
                              static_cast<double>(result.units_received),
                          0.0, 1.0);
  return result;
}

int InferSeasonYear(std::span<const SalesTransaction> sales, int fallback) {
  if (sales.empty()) return fallback;
  Date earliest = sales.front().date;
  for (const auto& t : sales) earliest = std::min(earliest, t.date);
  return ToIsoWeek(earliest).year;
}

}  // namespace strstudio::catalog
