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

#ifndef STRSTUDIO_CATALOG_TAXONOMY_H_
#define STRSTUDIO_CATALOG_TAXONOMY_H_

#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "strstudio/catalog/records.h"

namespace strstudio::catalog {

// Rename or merge one label. `attribute` is an attribute name, or
// "category" for the product category.
struct TaxonomyRule {
  std::string attribute;
  std::string from_label;
  std::string to_label;
};

// Reads a CSV with columns attribute,from_label,to_label. A (attribute,
// from_label) pair may appear once.
absl::StatusOr<std::vector<TaxonomyRule>> LoadTaxonomy(const std::string& path);

// Applies the rules once each (no chaining). Returns the number of values
// changed.
int ApplyTaxonomy(std::span<const TaxonomyRule> rules,
                  std::vector<ProductRecord>& products);

}  // namespace strstudio::catalog

#endif  // STRSTUDIO_CATALOG_TAXONOMY_H_
