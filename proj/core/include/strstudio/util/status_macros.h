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

#ifndef STRSTUDIO_UTIL_STATUS_MACROS_H_
#define STRSTUDIO_UTIL_STATUS_MACROS_H_

#include <string>
#include <utility>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace strstudio {

inline std::string StatusMessage(const absl::Status& status) {
  return std::string(status.message());
}

}  // namespace strstudio

#define STRSTUDIO_MACRO_CONCAT_INNER(x, y) x##y
#define STRSTUDIO_MACRO_CONCAT(x, y) STRSTUDIO_MACRO_CONCAT_INNER(x, y)

// Returns from the enclosing function if `expr` evaluates to a non-OK status.
#define RETURN_IF_ERROR(expr)                      \
  do {                                             \
    const absl::Status _status_to_check = (expr);  \
    if (!_status_to_check.ok()) {                  \
      return _status_to_check;                     \
    }                                              \
  } while (0)

#define STRSTUDIO_ASSIGN_OR_RETURN_IMPL(statusor, lhs, rexpr) \
  auto statusor = (rexpr);                                    \
  if (!statusor.ok()) {                                       \
    return statusor.status();                                 \
  }                                                           \
  lhs = std::move(statusor).value()

// Evaluates `rexpr` (a StatusOr<T>), returns its status on error, otherwise
// moves the value into `lhs`. `lhs` may be a declaration.
#define ASSIGN_OR_RETURN(lhs, rexpr)                                          \
  STRSTUDIO_ASSIGN_OR_RETURN_IMPL(                                            \
      STRSTUDIO_MACRO_CONCAT(_status_or_value_, __LINE__), lhs, rexpr)

#endif  // STRSTUDIO_UTIL_STATUS_MACROS_H_
