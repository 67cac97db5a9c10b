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

#ifndef STRSTUDIO_UTIL_CSV_H_
#define STRSTUDIO_UTIL_CSV_H_

#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"

namespace strstudio::utils {

// An RFC 4180 table: a header row followed by records. Quoted fields may
// contain commas, doubled quotes and newlines.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  // 1-based line on which each record starts (the header is line 1).
  std::vector<int> line_numbers;

  // Index of `column` in the header, if present.
  std::optional<size_t> ColumnIndex(std::string_view column) const;
};

// Parses `text`. Every record must have as many fields as the header.
absl::StatusOr<CsvTable> ParseCsv(std::string_view text);
absl::StatusOr<CsvTable> ReadCsvFile(const std::string& path);

// Quotes a field only when it contains a comma, quote, or line break.
std::string EscapeCsvField(std::string_view field);

// Formats a record and appends "\n".
std::string FormatCsvRow(std::span<const std::string> fields);
inline std::string FormatCsvRow(std::initializer_list<std::string> fields) {
  return FormatCsvRow(std::span<const std::string>(fields.begin(), fields.size()));
}

}  // namespace strstudio::utils

#endif  // STRSTUDIO_UTIL_CSV_H_
