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

#ifndef STRSTUDIO_COUNTERFACTUAL_JSON_IO_H_
#define STRSTUDIO_COUNTERFACTUAL_JSON_IO_H_

#include <span>
#include <string>

#include "absl/status/statusor.h"
#include "nlohmann/json.hpp"
#include "strstudio/catalog/dataset.h"
#include "strstudio/counterfactual/genetic_search.h"

namespace strstudio::counterfactual {

// {"feature": value | "label" | null, ...}. Starts from `base` (all missing
// when null) and overrides the listed features. Unknown names or labels are
// errors naming the field.
absl::StatusOr<catalog::EncodedInstance> InstanceFromJson(
    const catalog::FeatureSchema& schema, const nlohmann::json& json,
    const catalog::EncodedInstance* base = nullptr,
    std::string* bad_field = nullptr);

nlohmann::json InstanceToJson(const catalog::FeatureSchema& schema,
                              std::span<const double> values);

nlohmann::json GaConfigToJson(const GaConfig& config);
absl::StatusOr<GaConfig> GaConfigFromJson(const nlohmann::json& json);

// Request document:
//   instance    feature map, applied over `base`
//   target      desired prediction
//   mutable     glob list of mutable features (default: all)
//   freeze      glob list of frozen features, alternative to mutable
//   tolerance   default 0.02
//   distance    {"scale": "range" | "mad", "weights": {name: w},
//                "categorical_cost": c}
//   ga          GaConfig fields
// `background` is needed for MAD scales.
absl::StatusOr<CfRequest> CfRequestFromJson(
    const catalog::FeatureSchema& schema, const nlohmann::json& json,
    const catalog::EncodedInstance* base = nullptr,
    const catalog::Dataset* background = nullptr,
    std::string* bad_field = nullptr);

nlohmann::json ResultToJson(const catalog::FeatureSchema& schema,
                            const CounterfactualResult& result);

}  // namespace strstudio::counterfactual

#endif  // STRSTUDIO_COUNTERFACTUAL_JSON_IO_H_
