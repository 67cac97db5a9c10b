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

#ifndef STRSTUDIO_CATALOG_SELL_THROUGH_H_
#define STRSTUDIO_CATALOG_SELL_THROUGH_H_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "strstudio/catalog/calendar.h"
#include "strstudio/catalog/records.h"

namespace strstudio::catalog {

inline constexpr int kDefaultHorizonWeeks = 4;

// Weekly series for one product in one store. Index 0 is the first week of
// the requested window.
struct WeeklyFlow {
  std::string store_id;
  std::vector<int64_t> sold;
  // End-of-week units on hand; weeks without a snapshot carry the previous
  // known value forward (0 before the first snapshot).
  std::vector<int64_t> inventory_end;
  std::vector<double> revenue;
};

// Sales and inventory grouped by product and store, with dates resolved to
// week ordinals.
class SalesLedger {
 public:
  static SalesLedger Build(std::span<const SalesTransaction> sales,
                           std::span<const InventorySnapshot> inventory);

  // Flows for weeks [first_week, first_week + n_weeks), one per store that
  // sold or stocked the product, ordered by store id.
  std::vector<WeeklyFlow> Flows(const std::string& product_id,
                                int64_t first_week, int n_weeks) const;

  bool HasProduct(const std::string& product_id) const {
    return products_.count(product_id) > 0;
  }

 private:
  struct StoreHistory {
    std::vector<std::pair<int64_t, int64_t>> sales;  // (week, units)
    std::vector<std::pair<int64_t, double>> revenue;
    std::vector<std::pair<int64_t, int64_t>> snapshots;  // sorted by date
  };
  std::map<std::string, std::map<std::string, StoreHistory>> products_;
};

// Units received per week from end-of-week inventory and units sold:
// received(w) = max(0, inv(w) - inv(w-1) + sold(w)), with inv(-1) = 0.
std::vector<int64_t> ComputeReceived(std::span<const int64_t> inventory_end,
                                     std::span<const int64_t> sold);

struct SellThrough {
  int64_t units_sold = 0;
  int64_t units_received = 0;
  double str = 0.0;  // units_sold / units_received, clamped to [0, 1]
};

// Sell-through rate over the first `horizon_weeks` from launch, aggregated
// over all stores. Fails with FAILED_PRECONDITION when no unit was received
// inside the window.
absl::StatusOr<SellThrough> ComputeSellThrough(const ProductRecord& product,
                                               const SalesLedger& ledger,
                                               const SeasonCalendar& calendar,
                                               int horizon_weeks =
                                                   kDefaultHorizonWeeks);

// Season year used when none is configured: the earliest ISO year among the
// sales dates (or the current fallback when there are no sales).
int InferSeasonYear(std::span<const SalesTransaction> sales,
                    int fallback = 2019);

}  // namespace strstudio::catalog

#endif  // STRSTUDIO_CATALOG_SELL_THROUGH_H_
