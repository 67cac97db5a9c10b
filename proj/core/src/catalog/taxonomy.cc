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

#include "strstudio/catalog/taxonomy.h"

#include <map>
#include <utility>

#include "strstudio/util/strings.h"
#include "strstudio/util/csv.h"
#include "strstudio/util/status_macros.h"

namespace strstudio::catalog {

absl::StatusOr<std::vector<TaxonomyRule>> LoadTaxonomy(
    const std::string& path) {
  ASSIGN_OR_RETURN(const auto table, utils::ReadCsvFile(path));
  const auto a = table.ColumnIndex("attribute");
  const auto f = table.ColumnIndex("from_label");
  const auto t = table.ColumnIndex("to_label");
  if (!a || !f || !t) {
    return absl::InvalidArgumentError(StrCat(
        path, ": expected columns attribute,from_label,to_label"));
  }
  std::vector<TaxonomyRule> rules;
  std::map<std::pair<std::string, std::string>, int> seen;
  for (size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    TaxonomyRule rule{row[*a], row[*f], row[*t]};
    if (rule.attribute.empty() || rule.from_label.empty() ||
        rule.to_label.empty()) {
      return absl::InvalidArgumentError(StrCat(
          path, ": line ", table.line_numbers[r], ": empty field"));
    }
    const auto key = std::make_pair(rule.attribute, rule.from_label);
    if (seen.count(key)) {
      return absl::InvalidArgumentError(StrCat(
          path, ": line ", table.line_numbers[r], ": '", rule.from_label,
          "' of '", rule.attribute, "' already mapped on line ", seen[key]));
    }
    seen[key] = table.line_numbers[r];
    rules.push_back(std::move(rule));
  }
  return rules;
}

int ApplyTaxonomy(std::span<const TaxonomyRule> rules,
                  std::vector<ProductRecord>& products) {
  std::map<std::pair<std::string, std::string>, std::string> lookup;
  for (const auto& rule : rules) {
    lookup[{rule.attribute, rule.from_label}] = rule.to_label;
  }
  int changed = 0;
  for (auto& p : products) {
    if (const auto it = lookup.find({"category", p.category});
        it != lookup.end()) {
      p.category = it->second;
      ++changed;
    }
    for (auto& [name, value] : p.attributes) {
      auto* label = std::get_if<std::string>(&value);
      if (label == nullptr) continue;
      if (const auto it = lookup.find({name, *label}); it != lookup.end()) {
        *label = it->second;
        ++changed;
      }
    }
  }
  return changed;
}

}  // namespace strstudio::catalog
