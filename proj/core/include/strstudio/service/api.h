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

#ifndef STRSTUDIO_SERVICE_API_H_
#define STRSTUDIO_SERVICE_API_H_

#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "absl/status/statusor.h"
#include "nlohmann/json.hpp"
#include "strstudio/explain/importance.h"
#include "strstudio/service/draft_store.h"
#include "strstudio/service/workspace.h"

namespace strstudio::service {

struct ApiRequest {
  std::string method;  // "GET" or "POST"
  std::string path;
  std::map<std::string, std::string> query;
  std::string body;
};

struct ApiResponse {
  int status = 200;
  nlohmann::json body;
};

inline constexpr double kDefaultCoverage = 0.9;
inline constexpr int kHistogramBins = 10;
inline constexpr int kSellerListSize = 10;

// Bin k covers [k/10, (k+1)/10); the last bin also takes 1.0.
int HistogramBin(double str);

// Transport-independent JSON API over a workspace and a draft store. Every
// read endpoint is a pure function of the loaded state. Errors have the body
// {"code", "message", "field"?}.
//
//   GET  /health
//   GET  /schema
//   GET  /products       category, q, attr:<name>, str_min, str_max,
//                        sort=id|str_desc|str_asc, page, page_size
//   GET  /products/{id}  weeks
//   GET  /summary        group_by plus the /products filters
//   POST /forecast
//   POST /whatif
//   POST /counterfactual
//   GET  /importance     method=gain|mean_abs_shap
//   GET  /pdp            feature, points
//   POST /designs
//   GET  /designs        status
//   GET  /designs/{id}
//   POST /designs/{id}/feedback
//   POST /designs/{id}/like
//   POST /designs/{id}/status
class ForecastApi {
 public:
  // `drafts` may be null, which disables the design endpoints.
  ForecastApi(const Workspace& workspace, DraftStore* drafts);

  ApiResponse Handle(const ApiRequest& request) const;

 private:
  ApiResponse Products(const ApiRequest& request) const;
  ApiResponse Product(const std::string& id, const ApiRequest& request) const;
  ApiResponse Summary(const ApiRequest& request) const;
  ApiResponse Forecast(const nlohmann::json& body) const;
  ApiResponse WhatIf(const nlohmann::json& body) const;
  ApiResponse Counterfactual(const nlohmann::json& body) const;
  ApiResponse Importance(const ApiRequest& request) const;
  ApiResponse Pdp(const ApiRequest& request) const;
  ApiResponse Designs(const ApiRequest& request,
                      const std::vector<std::string>& parts) const;

  absl::StatusOr<explain::ImportanceReport> CachedImportance(
      explain::ImportanceMethod method) const;

  const Workspace& ws_;
  DraftStore* drafts_;

  struct ImportanceCache {
    std::once_flag once;
    absl::StatusOr<explain::ImportanceReport> report =
        absl::UnknownError("not computed");
  };
  mutable ImportanceCache gain_cache_;
  mutable ImportanceCache shap_cache_;
};

}  // namespace strstudio::service

#endif  // STRSTUDIO_SERVICE_API_H_
