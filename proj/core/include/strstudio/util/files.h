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

#ifndef STRSTUDIO_UTIL_FILES_H_
#define STRSTUDIO_UTIL_FILES_H_

#include <cstdint>
#include <string>
#include <string_view>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace strstudio::utils {

absl::StatusOr<std::string> ReadFile(const std::string& path);

// Writes through a temporary sibling file and renames it into place.
absl::Status WriteFile(const std::string& path, std::string_view content);

absl::Status EnsureDirectory(const std::string& path);

std::string JoinPath(std::string_view a, std::string_view b);

bool FileExists(const std::string& path);

uint32_t Crc32(std::string_view data);

// Shortest decimal representation that parses back to the same double.
std::string FormatDouble(double value);

absl::StatusOr<double> ParseDouble(std::string_view text);
absl::StatusOr<int64_t> ParseInt(std::string_view text);

}  // namespace strstudio::utils

#endif  // STRSTUDIO_UTIL_FILES_H_
