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

#ifndef STRSTUDIO_UTIL_CONFIG_H_
#define STRSTUDIO_UTIL_CONFIG_H_

#include <string>
#include <string_view>

#include "absl/status/statusor.h"
#include "nlohmann/json.hpp"

namespace strstudio::utils {

// Parses the TOML subset used by configuration files: comments, [table] and
// [dotted.table] headers, and `key = value` lines whose value is a string,
// integer, float, boolean or a single-line array of those.
absl::StatusOr<nlohmann::json> ParseToml(std::string_view text);

// Reads a JSON or TOML file. Files ending in ".json", or whose first
// non-blank character is '{', are JSON.
absl::StatusOr<nlohmann::json> LoadConfigFile(const std::string& path);

}  // namespace strstudio::utils

#endif  // STRSTUDIO_UTIL_CONFIG_H_
