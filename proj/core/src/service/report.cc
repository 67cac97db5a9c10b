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

#include "strstudio/service/report.h"

#include <algorithm>
#include <cmath>

#include "fmt/format.h"
#include "strstudio/counterfactual/diff.h"
#include "strstudio/explain/importance.h"
#include "strstudio/explain/partial_dependence.h"
#include "strstudio/explain/tree_shap.h"
#include "strstudio/util/files.h"
#include "strstudio/util/status_macros.h"
#include "strstudio/util/strings.h"

namespace strstudio::service {
namespace {

constexpr int kWidth = 640;
constexpr int kPlotLeft = 70, kPlotRight = 620, kPlotTop = 40, kPlotBottom = 300;

std::string Escape(std::string_view text) {
  std::string out;
  for (const char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string Header(int height, const std::string& title) {
  return fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" "
      "viewBox=\"0 0 {0} {1}\" font-family=\"sans-serif\" font-size=\"11\">\n"
      "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      "<text x=\"{2}\" y=\"22\" font-size=\"14\" text-anchor=\"middle\">{3}</text>\n",
      kWidth, height, kWidth / 2, Escape(title));
}

std::string Num(double v) { return fmt::format("{:.4g}", v); }

struct Range {
  double lo, hi;
  double Map(double v, double a, double b) const {
    return hi > lo ? a + (v - lo) / (hi - lo) * (b - a) : (a + b) / 2;
  }
};

Range RangeOf(const std::vector<double>& v) {
  Range r{0.0, 0.0};
  bool first = true;
  for (const double x : v) {
    if (!std::isfinite(x)) continue;
    if (first) {
      r = {x, x};
      first = false;
    }
    r.lo = std::min(r.lo, x);
    r.hi = std::max(r.hi, x);
  }
  if (r.hi == r.lo) {
    r.lo -= 0.5;
    r.hi += 0.5;
  }
  return r;
}

std::string Axes(const std::string& x_label, Range xr, Range yr) {
  std::string out = fmt::format(
      "<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"black\"/>\n"
      "<line x1=\"{0}\" y1=\"{3}\" x2=\"{0}\" y2=\"{1}\" stroke=\"black\"/>\n"
      "<text x=\"{4}\" y=\"{5}\" text-anchor=\"middle\">{6}</text>\n",
      kPlotLeft, kPlotBottom, kPlotRight, kPlotTop, (kPlotLeft + kPlotRight) / 2,
      kPlotBottom + 32, Escape(x_label));
  for (int k = 0; k <= 4; ++k) {
    const double yv = yr.lo + (yr.hi - yr.lo) * k / 4;
    const double y = yr.Map(yv, kPlotBottom, kPlotTop);
    out += fmt::format("<text x=\"{}\" y=\"{:.1f}\" text-anchor=\"end\">{}</text>\n",
                       kPlotLeft - 4, y + 4, Num(yv));
  }
  out += fmt::format("<text x=\"{}\" y=\"{}\">{}</text>\n", kPlotLeft, kPlotBottom + 14,
                     Num(xr.lo));
  out += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>\n", kPlotRight,
                     kPlotBottom + 14, Num(xr.hi));
  return out;
}

std::string Slug(std::string_view name) {
  std::string out;
  for (const char c : name) out += std::isalnum(static_cast<unsigned char>(c)) ? c : '_';
  return out;
}

}  // namespace

std::string BarChartSvg(const std::string& title, const std::vector<BarDatum>& bars) {
  const int row = 18;
  const int height = 50 + row * static_cast<int>(bars.size());
  const int left = 200, right = kWidth - 70;
  double lo = 0.0, hi = 0.0;
  for (const auto& b : bars) {
    lo = std::min(lo, b.value);
    hi = std::max(hi, b.value);
  }
  if (hi == lo) hi = lo + 1.0;
  auto x = [&](double v) { return left + (v - lo) / (hi - lo) * (right - left); };
  std::string out = Header(height, title);
  out += fmt::format("<line x1=\"{0:.1f}\" y1=\"34\" x2=\"{0:.1f}\" y2=\"{1}\" stroke=\"#888\"/>\n",
                     x(0.0), height - 8);
  for (size_t i = 0; i < bars.size(); ++i) {
    const double y = 38 + row * static_cast<double>(i);
    const double x0 = x(std::min(0.0, bars[i].value)), x1 = x(std::max(0.0, bars[i].value));
    out += fmt::format(
        "<text x=\"{}\" y=\"{:.1f}\" text-anchor=\"end\">{}</text>\n"
        "<rect x=\"{:.1f}\" y=\"{:.1f}\" width=\"{:.1f}\" height=\"{}\" fill=\"{}\"/>\n"
        "<text x=\"{:.1f}\" y=\"{:.1f}\">{}</text>\n",
        left - 6, y + 11, Escape(bars[i].label), x0, y, std::max(0.5, x1 - x0), row - 4,
        bars[i].value < 0 ? "#c0504d" : "#4f81bd", x1 + 4, y + 11, Num(bars[i].value));
  }
  return out + "</svg>\n";
}

std::string LineChartSvg(const std::string& title, const std::string& x_label,
                         const std::vector<double>& xs, const std::vector<double>& ys,
                         const std::vector<std::string>& tick_labels) {
  const Range xr = RangeOf(xs), yr = RangeOf(ys);
  std::string out = Header(340, title) + Axes(x_label, xr, yr);
  std::string points;
  for (size_t i = 0; i < xs.size() && i < ys.size(); ++i) {
    points += fmt::format("{:.1f},{:.1f} ", xr.Map(xs[i], kPlotLeft, kPlotRight),
                          yr.Map(ys[i], kPlotBottom, kPlotTop));
  }
  out += fmt::format("<polyline fill=\"none\" stroke=\"#4f81bd\" stroke-width=\"2\" points=\"{}\"/>\n",
                     points);
  for (size_t i = 0; i < tick_labels.size() && i < xs.size(); ++i) {
    out += fmt::format(
        "<text x=\"{:.1f}\" y=\"{}\" text-anchor=\"middle\" font-size=\"9\">{}</text>\n",
        xr.Map(xs[i], kPlotLeft, kPlotRight), kPlotBottom + 24, Escape(tick_labels[i]));
  }
  return out + "</svg>\n";
}

std::string ScatterSvg(const std::string& title, const std::string& x_label,
                       const std::vector<double>& xs, const std::vector<double>& ys) {
  const Range xr = RangeOf(xs), yr = RangeOf(ys);
  std::string out = Header(340, title) + Axes(x_label, xr, yr);
  for (size_t i = 0; i < xs.size() && i < ys.size(); ++i) {
    out += fmt::format("<circle cx=\"{:.1f}\" cy=\"{:.1f}\" r=\"2\" fill=\"#4f81bd\" "
                       "fill-opacity=\"0.5\"/>\n",
                       xr.Map(xs[i], kPlotLeft, kPlotRight), yr.Map(ys[i], kPlotBottom, kPlotTop));
  }
  return out + "</svg>\n";
}

absl::Status ExportReport(const Workspace& ws, const std::string& out_dir,
                          const ReportOptions& options) {
  RETURN_IF_ERROR(utils::EnsureDirectory(out_dir));
  const auto& schema = ws.schema();
  const auto& model = ws.estimator().base_model;
  auto write = [&](const std::string& name, const std::string& content) {
    return utils::WriteFile(utils::JoinPath(out_dir, name), content);
  };
  std::string md = "# Sell-through report\n\n";
  md += fmt::format("{} products in the dataset, {} features, {} trees.\n\n", ws.dataset().size(),
                    schema.size(), model.trees.size());

  md += "## Feature importance\n\n";
  std::vector<int> top;
  for (const auto method : {explain::ImportanceMethod::kGain, explain::ImportanceMethod::kMeanAbsShap}) {
    const std::string tag(explain::ImportanceMethodName(method));
    auto report = method == explain::ImportanceMethod::kGain
                      ? explain::GainImportance(model)
                      : explain::GlobalShapImportance(model, ws.dataset());
    if (!report.ok()) {
      md += fmt::format("{} importance unavailable: {}\n\n", tag, StatusMessage(report.status()));
      continue;
    }
    std::vector<BarDatum> bars;
    md += fmt::format("### {}\n\n| Rank | Feature | Score |\n|---|---|---|\n", tag);
    int rank = 1;
    for (const int i : report->Ranking()) {
      bars.push_back({schema.feature(i).name, report->scores[i]});
      md += fmt::format("| {} | {} | {:.4f} |\n", rank++, schema.feature(i).name, report->scores[i]);
    }
    RETURN_IF_ERROR(write("importance_" + tag + ".csv", report->ToCsv(schema)));
    RETURN_IF_ERROR(write("importance_" + tag + ".svg",
                          BarChartSvg(tag + " importance", bars)));
    md += fmt::format("\n![{0}](importance_{0}.svg)\n\n", tag);
    if (method == explain::ImportanceMethod::kMeanAbsShap) {
      const auto ranking = report->Ranking();
      top.assign(ranking.begin(),
                 ranking.begin() + std::min<size_t>(ranking.size(), std::max(0, options.top_features)));
    }
  }

  if (!top.empty()) md += "## Partial dependence\n\n";
  for (const int f : top) {
    const std::string& name = schema.feature(f).name;
    ASSIGN_OR_RETURN(const auto grid, explain::DefaultPdpGrid(ws.dataset(), f, options.pdp_points));
    ASSIGN_OR_RETURN(const auto curve, explain::PartialDependence(model, ws.dataset(), f, grid));
    std::vector<std::string> ticks;
    if (schema.feature(f).categorical()) {
      for (const double v : curve.grid) ticks.push_back(schema.FormatValue(f, v));
    }
    RETURN_IF_ERROR(write("pdp_" + Slug(name) + ".csv", curve.ToCsv(schema)));
    RETURN_IF_ERROR(write("pdp_" + Slug(name) + ".svg",
                          LineChartSvg("Partial dependence: " + name, name, curve.grid,
                                       curve.averaged_predictions, ticks)));
    ASSIGN_OR_RETURN(const auto dep, explain::ComputeShapDependence(model, ws.dataset(), f));
    std::vector<double> xs, ys;
    for (const auto& p : dep.points) {
      xs.push_back(p.value);
      ys.push_back(p.contribution);
    }
    RETURN_IF_ERROR(write("shap_dependence_" + Slug(name) + ".csv", dep.ToCsv(schema, ws.dataset())));
    RETURN_IF_ERROR(write("shap_dependence_" + Slug(name) + ".svg",
                          ScatterSvg("SHAP dependence: " + name, name, xs, ys)));
    md += fmt::format("### {0}\n\n![pdp](pdp_{1}.svg)\n![dependence](shap_dependence_{1}.svg)\n\n",
                      name, Slug(name));
  }

  if (!options.product_ids.empty()) md += "## Product explanations\n\n";
  for (const std::string& id : options.product_ids) {
    const auto instance = ws.InstanceOf(id);
    if (!instance) return absl::NotFoundError(StrCat("unknown product '", id, "'"));
    ASSIGN_OR_RETURN(const auto dist, ws.estimator().Predict(instance->values));
    ASSIGN_OR_RETURN(const auto attribution,
                     explain::ShapValues(model, instance->values, &ws.dataset()));
    std::vector<int> order(schema.size());
    for (int i = 0; i < schema.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return std::fabs(attribution.contributions[a]) > std::fabs(attribution.contributions[b]);
    });
    std::vector<BarDatum> bars;
    md += fmt::format("### {}\n\nForecast STR {} (average {}).\n\n| Feature | Value | Contribution |\n|---|---|---|\n",
                      id, counterfactual::FormatPercent(attribution.predicted),
                      counterfactual::FormatPercent(attribution.base_value));
    for (const int i : order) {
      const std::string label =
          schema.feature(i).name + " = " + schema.FormatValue(i, instance->values[i]);
      bars.push_back({label, attribution.contributions[i]});
      md += fmt::format("| {} | {} | {:+.4f} |\n", schema.feature(i).name,
                        schema.FormatValue(i, instance->values[i]), attribution.contributions[i]);
    }
    md += fmt::format("\nStandard deviation {:.4f}.\n\n![explanation](explain_{}.svg)\n\n",
                      dist.std_dev, Slug(id));
    RETURN_IF_ERROR(write("explain_" + Slug(id) + ".json", attribution.ToJson(schema).dump(2) + "\n"));
    RETURN_IF_ERROR(write("explain_" + Slug(id) + ".svg",
                          BarChartSvg("Contributions for " + id, bars)));
  }
  return write("report.md", md);
}

}  // namespace strstudio::service
