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

#ifndef STRSTUDIO_GBDT_MODEL_IO_H_
#define STRSTUDIO_GBDT_MODEL_IO_H_

#include <string>
#include <string_view>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "nlohmann/json.hpp"
#include "strstudio/gbdt/ensemble.h"

namespace strstudio::gbdt {

inline constexpr int kModelFormatVersion = 1;

nlohmann::json TrainConfigToJson(const TrainConfig& config);
// Missing keys keep their defaults; unknown keys are rejected.
absl::StatusOr<TrainConfig> TrainConfigFromJson(const nlohmann::json& json);

// JSON document followed by a "crc32 xxxxxxxx" footer line covering the
// document bytes.
std::string SerializeModel(const TreeEnsemble& ensemble);
absl::StatusOr<TreeEnsemble> ParseModel(std::string_view text);

absl::Status SaveModel(const TreeEnsemble& ensemble, const std::string& path);
absl::StatusOr<TreeEnsemble> LoadModel(const std::string& path);

// Appends / verifies a checksum footer. Shared by other artifact files.
std::string WithChecksumFooter(std::string_view document);
absl::StatusOr<std::string_view> StripChecksumFooter(std::string_view text);

}  // namespace strstudio::gbdt

#endif  // STRSTUDIO_GBDT_MODEL_IO_H_
