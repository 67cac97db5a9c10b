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

#ifndef STRSTUDIO_CATALOG_RECORDS_H_
#define STRSTUDIO_CATALOG_RECORDS_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "strstudio/catalog/calendar.h"

namespace strstudio::catalog {

// One point-of-sale line: `units` of a product bought in a store on a day.
struct SalesTransaction {
  std::string customer_id;  // Empty when the customer is unknown.
  std::string product_id;
  std::string store_id;
  int64_t units = 0;
  double unit_price = 0.0;
  Date date;
};

// Units of a product on hand in a store at the end of `date`.
struct InventorySnapshot {
  std::string product_id;
  std::string store_id;
  Date date;
  int64_t units_on_hand = 0;
};

struct StoreRecord {
  std::string store_id;
  std::string address;
  double latitude = 0.0;
  double longitude = 0.0;
  std::optional<int64_t> capacity;
  std::optional<double> selling_area;
};

// An attribute value is missing, numeric, or a categorical label.
using AttributeValue = std::variant<std::monostate, double, std::string>;

inline bool IsMissingValue(const AttributeValue& v) {
  return std::holds_alternative<std::monostate>(v);
}

struct ProductRecord {
  std::string product_id;
  std::string category;
  // Keyed by attribute name (without the "attr:" column prefix).
  std::map<std::string, AttributeValue> attributes;
  double list_price = 0.0;
  int launch_week = 1;  // ISO week of the selling season, 1..53.
  std::optional<int> carry_weeks;
};

// The four retail databases.
struct RawCatalog {
  std::vector<ProductRecord> products;
  std::vector<SalesTransaction> sales;
  std::vector<InventorySnapshot> inventory;
  std::vector<StoreRecord> stores;
};

// File names inside a catalog directory.
inline constexpr char kSalesFile[] = "sales.csv";
inline constexpr char kInventoryFile[] = "inventory.csv";
inline constexpr char kProductsFile[] = "products.csv";
inline constexpr char kStoresFile[] = "stores.csv";
inline constexpr char kAttributePrefix[] = "attr:";

// Loaders validate every row and return records sorted by primary key:
// sales by (product, store, date, customer) with ties kept in file order,
// inventory by (product, store, date), products and stores by id.
// Errors name the file and line.
absl::StatusOr<std::vector<SalesTransaction>> LoadSales(
    const std::string& path);
absl::StatusOr<std::vector<InventorySnapshot>> LoadInventory(
    const std::string& path);
absl::StatusOr<std::vector<ProductRecord>> LoadProducts(
    const std::string& path);
absl::StatusOr<std::vector<StoreRecord>> LoadStores(const std::string& path);

absl::StatusOr<RawCatalog> LoadCatalog(const std::string& directory);

std::string FormatSalesCsv(const std::vector<SalesTransaction>& sales);
std::string FormatInventoryCsv(const std::vector<InventorySnapshot>& rows);
std::string FormatProductsCsv(const std::vector<ProductRecord>& products);
std::string FormatStoresCsv(const std::vector<StoreRecord>& stores);

absl::Status SaveCatalog(const RawCatalog& catalog,
                         const std::string& directory);

// Sorts records into the canonical loader order.
void SortCanonical(RawCatalog& catalog);

}  // namespace strstudio::catalog

#endif  // STRSTUDIO_CATALOG_RECORDS_H_
