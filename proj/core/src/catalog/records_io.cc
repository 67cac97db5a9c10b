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
#include <set>
#include <tuple>

#include "strstudio/util/strings.h"
#include "strstudio/catalog/records.h"
#include "strstudio/util/csv.h"
#include "strstudio/util/files.h"
#include "strstudio/util/status_macros.h"

namespace strstudio::catalog {
namespace {

using utils::CsvTable;
using utils::FormatDouble;
using utils::ParseDouble;
using utils::ParseInt;

absl::StatusOr<std::vector<size_t>> RequireColumns(
    const CsvTable& table, const std::vector<std::string>& names,
    const std::string& path) {
  std::vector<size_t> indices;
  for (const auto& name : names) {
    const auto index = table.ColumnIndex(name);
    if (!index) {
      return absl::InvalidArgumentError(
          StrCat(path, ": missing required column '", name, "'"));
    }
    indices.push_back(*index);
  }
  return indices;
}

absl::Status RowError(const std::string& path, int line,
                      std::string_view message) {
  return absl::InvalidArgumentError(
      StrCat(path, ": line ", line, ": ", message));
}

template <typename T>
absl::StatusOr<T> Field(const std::string& path, int line,
                        std::string_view column, absl::StatusOr<T> parsed) {
  if (!parsed.ok()) {
    return RowError(path, line,
                    StrCat(column, ": ", parsed.status().message()));
  }
  return parsed;
}

bool SalesLess(const SalesTransaction& a, const SalesTransaction& b) {
  return std::tie(a.product_id, a.store_id, a.date, a.customer_id) <
         std::tie(b.product_id, b.store_id, b.date, b.customer_id);
}

bool InventoryLess(const InventorySnapshot& a, const InventorySnapshot& b) {
  return std::tie(a.product_id, a.store_id, a.date) <
         std::tie(b.product_id, b.store_id, b.date);
}

}  // namespace

void SortCanonical(RawCatalog& catalog) {
  std::stable_sort(catalog.sales.begin(), catalog.sales.end(), SalesLess);
  std::stable_sort(catalog.inventory.begin(), catalog.inventory.end(),
                   InventoryLess);
  std::stable_sort(catalog.products.begin(), catalog.products.end(),
                   [](const auto& a, const auto& b) {
                     return a.product_id < b.product_id;
                   });
  std::stable_sort(
      catalog.stores.begin(), catalog.stores.end(),
      [](const auto& a, const auto& b) { return a.store_id < b.store_id; });
}

absl::StatusOr<std::vector<SalesTransaction>> LoadSales(
    const std::string& path) {
  ASSIGN_OR_RETURN(const CsvTable table, utils::ReadCsvFile(path));
  ASSIGN_OR_RETURN(const auto cols,
                   RequireColumns(table,
                                  {"customer_id", "product_id", "store_id",
                                   "units", "unit_price", "date"},
                                  path));
  std::vector<SalesTransaction> sales;
  sales.reserve(table.rows.size());
  for (size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const int line = table.line_numbers[r];
    SalesTransaction t;
    t.customer_id = row[cols[0]];
    t.product_id = row[cols[1]];
    t.store_id = row[cols[2]];
    if (t.product_id.empty()) return RowError(path, line, "empty product_id");
    if (t.store_id.empty()) return RowError(path, line, "empty store_id");
    ASSIGN_OR_RETURN(t.units, Field(path, line, "units", ParseInt(row[cols[3]])));
    if (t.units < 0) {
      return RowError(path, line,
                      StrCat("units must be >= 0, got ", t.units));
    }
    ASSIGN_OR_RETURN(t.unit_price, Field(path, line, "unit_price",
                                         ParseDouble(row[cols[4]])));
    if (t.unit_price < 0) {
      return RowError(path, line, "unit_price must be >= 0");
    }
    ASSIGN_OR_RETURN(t.date,
                     Field(path, line, "date", ParseIsoDate(row[cols[5]])));
    sales.push_back(std::move(t));
  }
  std::stable_sort(sales.begin(), sales.end(), SalesLess);
  return sales;
}

absl::StatusOr<std::vector<InventorySnapshot>> LoadInventory(
    const std::string& path) {
  ASSIGN_OR_RETURN(const CsvTable table, utils::ReadCsvFile(path));
  ASSIGN_OR_RETURN(
      const auto cols,
      RequireColumns(table,
                     {"product_id", "store_id", "date", "units_on_hand"},
                     path));
  std::vector<InventorySnapshot> rows;
  std::vector<int> lines;
  rows.reserve(table.rows.size());
  for (size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const int line = table.line_numbers[r];
    InventorySnapshot s;
    s.product_id = row[cols[0]];
    s.store_id = row[cols[1]];
    if (s.product_id.empty()) return RowError(path, line, "empty product_id");
    if (s.store_id.empty()) return RowError(path, line, "empty store_id");
    ASSIGN_OR_RETURN(s.date,
                     Field(path, line, "date", ParseIsoDate(row[cols[2]])));
    ASSIGN_OR_RETURN(s.units_on_hand, Field(path, line, "units_on_hand",
                                            ParseInt(row[cols[3]])));
    if (s.units_on_hand < 0) {
      return RowError(path, line, "units_on_hand must be >= 0");
    }
    rows.push_back(std::move(s));
    lines.push_back(line);
  }
  std::vector<size_t> order(rows.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return InventoryLess(rows[a], rows[b]);
  });
  std::vector<InventorySnapshot> sorted;
  sorted.reserve(rows.size());
  for (size_t k = 0; k < order.size(); ++k) {
    const auto& s = rows[order[k]];
    if (!sorted.empty()) {
      const auto& prev = sorted.back();
      if (prev.product_id == s.product_id && prev.store_id == s.store_id &&
          prev.date == s.date) {
        return RowError(
            path, lines[order[k]],
            StrCat("duplicate snapshot for (product=", s.product_id,
                         ", store=", s.store_id,
                         ", date=", FormatIsoDate(s.date), ")"));
      }
    }
    sorted.push_back(s);
  }
  return sorted;
}

absl::StatusOr<std::vector<ProductRecord>> LoadProducts(
    const std::string& path) {
  ASSIGN_OR_RETURN(const CsvTable table, utils::ReadCsvFile(path));
  ASSIGN_OR_RETURN(
      const auto cols,
      RequireColumns(table,
                     {"product_id", "category", "launch_week", "list_price"},
                     path));
  const auto carry_col = table.ColumnIndex("carry_weeks");

  // Attribute columns, with a per-column numeric/categorical decision: a
  // column is numeric when every non-empty cell parses as a number.
  struct AttributeColumn {
    size_t index;
    std::string name;
    bool numeric;
  };
  std::vector<AttributeColumn> attribute_columns;
  const std::string prefix = kAttributePrefix;
  for (size_t c = 0; c < table.header.size(); ++c) {
    const std::string& name = table.header[c];
    if (name.rfind(prefix, 0) != 0) continue;
    if (name.size() == prefix.size()) {
      return absl::InvalidArgumentError(
          StrCat(path, ": attribute column without a name"));
    }
    bool numeric = true;
    for (const auto& row : table.rows) {
      if (!row[c].empty() && !ParseDouble(row[c]).ok()) {
        numeric = false;
        break;
      }
    }
    attribute_columns.push_back({c, name.substr(prefix.size()), numeric});
  }

  std::vector<ProductRecord> products;
  products.reserve(table.rows.size());
  for (size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const int line = table.line_numbers[r];
    ProductRecord p;
    p.product_id = row[cols[0]];
    p.category = row[cols[1]];
    if (p.product_id.empty()) return RowError(path, line, "empty product_id");
    if (p.category.empty()) {
      return RowError(path, line,
                      StrCat("empty category for product ",
                                   p.product_id));
    }
    ASSIGN_OR_RETURN(const int64_t week, Field(path, line, "launch_week",
                                               ParseInt(row[cols[2]])));
    if (week < 1 || week > 53) {
      return RowError(path, line, "launch_week must be in [1, 53]");
    }
    p.launch_week = static_cast<int>(week);
    ASSIGN_OR_RETURN(p.list_price, Field(path, line, "list_price",
                                         ParseDouble(row[cols[3]])));
    if (p.list_price < 0) return RowError(path, line, "list_price must be >= 0");
    if (carry_col && !row[*carry_col].empty()) {
      ASSIGN_OR_RETURN(const int64_t carry,
                       Field(path, line, "carry_weeks",
                             ParseInt(row[*carry_col])));
      if (carry < 1) return RowError(path, line, "carry_weeks must be >= 1");
      p.carry_weeks = static_cast<int>(carry);
    }
    for (const auto& column : attribute_columns) {
      const std::string& cell = row[column.index];
      if (cell.empty()) {
        p.attributes[column.name] = std::monostate{};
      } else if (column.numeric) {
        p.attributes[column.name] = *ParseDouble(cell);
      } else {
        p.attributes[column.name] = cell;
      }
    }
    products.push_back(std::move(p));
  }
  std::stable_sort(products.begin(), products.end(),
                   [](const auto& a, const auto& b) {
                     return a.product_id < b.product_id;
                   });
  for (size_t i = 1; i < products.size(); ++i) {
    if (products[i].product_id == products[i - 1].product_id) {
      return absl::InvalidArgumentError(StrCat(
          path, ": duplicate product_id '", products[i].product_id, "'"));
    }
  }
  return products;
}

absl::StatusOr<std::vector<StoreRecord>> LoadStores(const std::string& path) {
  ASSIGN_OR_RETURN(const CsvTable table, utils::ReadCsvFile(path));
  ASSIGN_OR_RETURN(
      const auto cols,
      RequireColumns(table, {"store_id", "address", "lat", "lon"}, path));
  const auto capacity_col = table.ColumnIndex("capacity");
  const auto area_col = table.ColumnIndex("selling_area");
  std::vector<StoreRecord> stores;
  for (size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const int line = table.line_numbers[r];
    StoreRecord s;
    s.store_id = row[cols[0]];
    if (s.store_id.empty()) return RowError(path, line, "empty store_id");
    s.address = row[cols[1]];
    ASSIGN_OR_RETURN(s.latitude,
                     Field(path, line, "lat", ParseDouble(row[cols[2]])));
    ASSIGN_OR_RETURN(s.longitude,
                     Field(path, line, "lon", ParseDouble(row[cols[3]])));
    if (s.latitude < -90 || s.latitude > 90) {
      return RowError(path, line, "lat must be in [-90, 90]");
    }
    if (s.longitude < -180 || s.longitude > 180) {
      return RowError(path, line, "lon must be in [-180, 180]");
    }
    if (capacity_col && !row[*capacity_col].empty()) {
      ASSIGN_OR_RETURN(s.capacity, Field(path, line, "capacity",
                                         ParseInt(row[*capacity_col])));
    }
    if (area_col && !row[*area_col].empty()) {
      ASSIGN_OR_RETURN(s.selling_area, Field(path, line, "selling_area",
                                             ParseDouble(row[*area_col])));
    }
    stores.push_back(std::move(s));
  }
  std::stable_sort(
      stores.begin(), stores.end(),
      [](const auto& a, const auto& b) { return a.store_id < b.store_id; });
  for (size_t i = 1; i < stores.size(); ++i) {
    if (stores[i].store_id == stores[i - 1].store_id) {
      return absl::InvalidArgumentError(StrCat(
          path, ": duplicate store_id '", stores[i].store_id, "'"));
    }
  }
  return stores;
}

absl::StatusOr<RawCatalog> LoadCatalog(const std::string& directory) {
  RawCatalog catalog;
  ASSIGN_OR_RETURN(catalog.products,
                   LoadProducts(utils::JoinPath(directory, kProductsFile)));
  ASSIGN_OR_RETURN(catalog.sales,
                   LoadSales(utils::JoinPath(directory, kSalesFile)));
  ASSIGN_OR_RETURN(catalog.inventory,
                   LoadInventory(utils::JoinPath(directory, kInventoryFile)));
  ASSIGN_OR_RETURN(catalog.stores,
                   LoadStores(utils::JoinPath(directory, kStoresFile)));
  return catalog;
}

std::string FormatSalesCsv(const std::vector<SalesTransaction>& sales) {
  std::string out = "customer_id,product_id,store_id,units,unit_price,date\n";
  for (const auto& t : sales) {
    const std::string fields[] = {t.customer_id,
                                  t.product_id,
                                  t.store_id,
                                  StrCat(t.units),
                                  FormatDouble(t.unit_price),
                                  FormatIsoDate(t.date)};
    out += utils::FormatCsvRow(fields);
  }
  return out;
}

std::string FormatInventoryCsv(const std::vector<InventorySnapshot>& rows) {
  std::string out = "product_id,store_id,date,units_on_hand\n";
  for (const auto& s : rows) {
    const std::string fields[] = {s.product_id, s.store_id,
                                  FormatIsoDate(s.date),
                                  StrCat(s.units_on_hand)};
    out += utils::FormatCsvRow(fields);
  }
  return out;
}

std::string FormatProductsCsv(const std::vector<ProductRecord>& products) {
  std::set<std::string> attribute_names;
  bool any_carry = false;
  for (const auto& p : products) {
    for (const auto& [name, value] : p.attributes) attribute_names.insert(name);
    any_carry = any_carry || p.carry_weeks.has_value();
  }
  std::vector<std::string> header = {"product_id", "category", "launch_week",
                                     "list_price"};
  if (any_carry) header.push_back("carry_weeks");
  for (const auto& name : attribute_names) {
    header.push_back(kAttributePrefix + name);
  }
  std::string out = utils::FormatCsvRow(header);
  for (const auto& p : products) {
    std::vector<std::string> fields = {p.product_id, p.category,
                                       StrCat(p.launch_week),
                                       FormatDouble(p.list_price)};
    if (any_carry) {
      fields.push_back(p.carry_weeks ? StrCat(*p.carry_weeks) : "");
    }
    for (const auto& name : attribute_names) {
      const auto it = p.attributes.find(name);
      if (it == p.attributes.end() || IsMissingValue(it->second)) {
        fields.emplace_back();
      } else if (const double* d = std::get_if<double>(&it->second)) {
        fields.push_back(FormatDouble(*d));
      } else {
        fields.push_back(std::get<std::string>(it->second));
      }
    }
    out += utils::FormatCsvRow(fields);
  }
  return out;
}

std::string FormatStoresCsv(const std::vector<StoreRecord>& stores) {
  std::string out = "store_id,address,lat,lon,capacity,selling_area\n";
  for (const auto& s : stores) {
    const std::string fields[] = {
        s.store_id,
        s.address,
        FormatDouble(s.latitude),
        FormatDouble(s.longitude),
        s.capacity ? StrCat(*s.capacity) : "",
        s.selling_area ? FormatDouble(*s.selling_area) : ""};
    out += utils::FormatCsvRow(fields);
  }
  return out;
}

absl::Status SaveCatalog(const RawCatalog& catalog,
                         const std::string& directory) {
  RETURN_IF_ERROR(utils::EnsureDirectory(directory));
  RETURN_IF_ERROR(utils::WriteFile(utils::JoinPath(directory, kProductsFile),
                                   FormatProductsCsv(catalog.products)));
  RETURN_IF_ERROR(utils::WriteFile(utils::JoinPath(directory, kSalesFile),
                                   FormatSalesCsv(catalog.sales)));
  RETURN_IF_ERROR(utils::WriteFile(utils::JoinPath(directory, kInventoryFile),
                                   FormatInventoryCsv(catalog.inventory)));
  RETURN_IF_ERROR(utils::WriteFile(utils::JoinPath(directory, kStoresFile),
                                   FormatStoresCsv(catalog.stores)));
  return absl::OkStatus();
}

}  // namespace strstudio::catalog
