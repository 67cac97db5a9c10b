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

#ifndef STRSTUDIO_SERVICE_REPORT_H_
#define STRSTUDIO_SERVICE_REPORT_H_

#include <string>
#include <vector>

#include "absl/status/status.h"
#include "strstudio/service/workspace.h"

namespace strstudio::service {

struct BarDatum {
  std::string label;
  double value = 0.0;
};

// Horizontal bars; negative values extend left of the zero line.
std::string BarChartSvg(const std::string& title,
                        const std::vector<BarDatum>& bars);

// Polyline through (x, y). `tick_labels`, when non-empty, names each x.
std::string LineChartSvg(const std::string& title, const std::string& x_label,
                         const std::vector<double>& xs,
                         const std::vector<double>& ys,
                         const std::vector<std::string>& tick_labels = {});

std::string ScatterSvg(const std::string& title, const std::string& x_label,
                       const std::vector<double>& xs,
                       const std::vector<double>& ys);

struct ReportOptions {
  std::vector<std::string> product_ids;  // Local explanations to include.
  int top_features = 5;                  // Features that get PDP curves.
  int pdp_points = 20;
};

// Writes report.md with importance tables, PDP curves, SHAP dependence
// plots and per-product explanations, plus the SVG and CSV files it links.
absl::Status ExportReport(const Workspace& workspace,
                          const std::string& out_dir,
                          const ReportOptions& options);

}  // namespace strstudio::service

#endif  // STRSTUDIO_SERVICE_REPORT_H_
