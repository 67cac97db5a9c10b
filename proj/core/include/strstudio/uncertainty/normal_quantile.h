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

#ifndef STRSTUDIO_UNCERTAINTY_NORMAL_QUANTILE_H_
#define STRSTUDIO_UNCERTAINTY_NORMAL_QUANTILE_H_

#include "absl/status/statusor.h"

namespace strstudio::uncertainty {

// Inverse standard normal CDF (Wichura's AS 241, about 1e-16 relative
// accuracy). Requires 0 < p < 1.
absl::StatusOr<double> NormalQuantile(double p);

// z such that P(|Z| <= z) = coverage, for 0 < coverage < 1.
absl::StatusOr<double> TwoSidedZ(double coverage);

double NormalCdf(double z);

}  // namespace strstudio::uncertainty

#endif  // STRSTUDIO_UNCERTAINTY_NORMAL_QUANTILE_H_
