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

#include "strstudio/service/api.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <optional>
#include <set>

#include "strstudio/counterfactual/diff.h"
#include "strstudio/counterfactual/genetic_search.h"
#include "strstudio/counterfactual/json_io.h"
#include "strstudio/counterfactual/what_if.h"
#include "strstudio/explain/partial_dependence.h"
#include "strstudio/explain/tree_shap.h"
#include "strstudio/uncertainty/normal_quantile.h"
#include "strstudio/util/files.h"
#include "strstudio/util/status_macros.h"
#include "strstudio/util/strings.h"

namespace strstudio::service {

using catalog::ProductRecord;
using nlohmann::json;

int HistogramBin(double str) {
  const int bin = static_cast<int>(std::floor(str * kHistogramBins));
  return std::clamp(bin, 0, kHistogramBins - 1);
}

namespace {

ApiResponse Error(int status, std::string_view code, std::string_view message,
                  std::string_view field = {}) {
  json body = {{"code", code}, {"message", message}};
  if (!field.empty()) body["field"] = field;
  return {status, std::move(body)};
}

ApiResponse FromStatus(const absl::Status& s, std::string_view field = {}) {
  const std::string message = StatusMessage(s);
  switch (s.code()) {
    case absl::StatusCode::kInvalidArgument:
    case absl::StatusCode::kOutOfRange:
      return Error(400, "invalid_argument", message, field);
    case absl::StatusCode::kNotFound:
      return Error(404, "not_found", message, field);
    case absl::StatusCode::kFailedPrecondition:
      return Error(409, "conflict", message, field);
    case absl::StatusCode::kUnavailable:
      return Error(503, "unavailable", message, field);
    default:
      return Error(500, "internal", message, field);
  }
}

ApiResponse BadField(std::string_view field, std::string_view message) {
  return Error(400, "invalid_argument", message, field);
}

std::string Lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

json AttributeJson(const catalog::AttributeValue& v) {
  if (std::holds_alternative<double>(v)) return std::get<double>(v);
  if (std::holds_alternative<std::string>(v)) return std::get<std::string>(v);
  return nullptr;
}

std::string AttributeText(const catalog::AttributeValue& v) {
  if (std::holds_alternative<double>(v)) return utils::FormatDouble(std::get<double>(v));
  if (std::holds_alternative<std::string>(v)) return std::get<std::string>(v);
  return "MISSING";
}

json NullableNumber(std::optional<double> v) {
  return v && !catalog::IsMissing(*v) ? json(*v) : json(nullptr);
}

json ProductJson(const ProductRecord& p, const Workspace& ws) {
  json attributes = json::object();
  for (const auto& [name, value] : p.attributes) attributes[name] = AttributeJson(value);
  json j = {{"product_id", p.product_id},
            {"category", p.category},
            {"list_price", p.list_price},
            {"launch_week", p.launch_week},
            {"attributes", std::move(attributes)},
            {"str", NullableNumber(ws.StrOf(p.product_id))}};
  if (p.carry_weeks) j["carry_weeks"] = *p.carry_weeks;
  return j;
}

absl::StatusOr<json> ParseBody(const std::string& body) {
  if (body.empty()) return json::object();
  json j = json::parse(body, nullptr, false);
  if (j.is_discarded()) return absl::InvalidArgumentError("body is not valid JSON");
  if (!j.is_object()) return absl::InvalidArgumentError("body must be a JSON object");
  return j;
}

// Filters shared by /products and /summary.
struct ProductFilter {
  std::optional<std::string> category;
  std::optional<std::string> text;
  std::vector<std::pair<std::string, std::string>> attributes;
  std::optional<double> str_min, str_max;

  bool Matches(const ProductRecord& p, std::optional<double> str) const {
    if (category && p.category != *category) return false;
    for (const auto& [name, want] : attributes) {
      auto it = p.attributes.find(name);
      const std::string have =
          it == p.attributes.end() ? "MISSING" : AttributeText(it->second);
      if (have != want) return false;
    }
    if ((str_min || str_max) && !str) return false;
    if (str_min && *str < *str_min) return false;
    if (str_max && *str > *str_max) return false;
    if (text) {
      std::string haystack = Lower(p.product_id) + "\n" + Lower(p.category);
      for (const auto& [name, v] : p.attributes) {
        if (std::holds_alternative<std::string>(v)) {
          haystack += "\n" + Lower(std::get<std::string>(v));
        }
      }
      if (haystack.find(*text) == std::string::npos) return false;
    }
    return true;
  }
};

// Parses filter keys from `query`, leaving the rest in `rest`.
std::optional<ApiResponse> ParseFilter(const std::map<std::string, std::string>& query,
                                       ProductFilter& filter,
                                       std::map<std::string, std::string>& rest) {
  for (const auto& [key, value] : query) {
    if (key == "category") {
      filter.category = value;
    } else if (key == "q") {
      filter.text = Lower(value);
    } else if (key == "str_min" || key == "str_max") {
      auto v = utils::ParseDouble(value);
      if (!v.ok()) return BadField(key, StrCat("'", key, "' must be a number"));
      (key == "str_min" ? filter.str_min : filter.str_max) = *v;
    } else if (key.starts_with(catalog::kAttributePrefix)) {
      filter.attributes.emplace_back(key.substr(std::string_view(catalog::kAttributePrefix).size()),
                                     value);
    } else {
      rest[key] = value;
    }
  }
  return std::nullopt;
}

std::optional<ApiResponse> RejectUnknown(const std::map<std::string, std::string>& rest,
                                         std::initializer_list<std::string_view> allowed) {
  for (const auto& [key, value] : rest) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      return BadField(key, StrCat("unknown query parameter '", key, "'"));
    }
  }
  return std::nullopt;
}

absl::StatusOr<int> ParsePositive(const std::map<std::string, std::string>& q,
                                  const std::string& key, int fallback, int max) {
  auto it = q.find(key);
  if (it == q.end()) return fallback;
  auto v = utils::ParseInt(it->second);
  if (!v.ok() || *v < 1 || *v > max) {
    return absl::InvalidArgumentError(StrCat("'", key, "' must be an integer in 1..", max));
  }
  return static_cast<int>(*v);
}

struct Entry {
  const ProductRecord* product;
  std::optional<double> str;
};

bool ByStrDesc(const Entry& a, const Entry& b) {
  if (a.str.has_value() != b.str.has_value()) return a.str.has_value();
  if (a.str && *a.str != *b.str) return *a.str > *b.str;
  return a.product->product_id < b.product->product_id;
}

bool ByStrAsc(const Entry& a, const Entry& b) {
  if (a.str.has_value() != b.str.has_value()) return a.str.has_value();
  if (a.str && *a.str != *b.str) return *a.str < *b.str;
  return a.product->product_id < b.product->product_id;
}

json SellerList(std::vector<Entry> entries, bool best) {
  std::sort(entries.begin(), entries.end(), best ? ByStrDesc : ByStrAsc);
  json out = json::array();
  for (size_t i = 0; i < entries.size() && i < static_cast<size_t>(kSellerListSize); ++i) {
    out.push_back({{"product_id", entries[i].product->product_id},
                   {"category", entries[i].product->category},
                   {"str", *entries[i].str}});
  }
  return out;
}

// Feature map for the forecast-style bodies: "attributes" plus the top-level
// list_price and launch_week.
absl::StatusOr<catalog::EncodedInstance> InstanceFromBody(const Workspace& ws, const json& body,
                                                          std::string* field) {
  const catalog::EncodedInstance* base = nullptr;
  std::optional<catalog::EncodedInstance> product_instance;
  if (body.contains("product_id")) {
    if (!body["product_id"].is_string()) {
      *field = "product_id";
      return absl::InvalidArgumentError("'product_id' must be a string");
    }
    product_instance = ws.InstanceOf(body["product_id"].get<std::string>());
    if (!product_instance) {
      *field = "product_id";
      return absl::NotFoundError(
          StrCat("unknown product '", body["product_id"].get<std::string>(), "'"));
    }
    base = &*product_instance;
  }
  json features = json::object();
  if (body.contains("attributes")) {
    if (!body["attributes"].is_object()) {
      *field = "attributes";
      return absl::InvalidArgumentError("'attributes' must be an object");
    }
    features = body["attributes"];
  }
  for (const char* key : {catalog::kListPriceFeature, catalog::kLaunchWeekFeature}) {
    if (body.contains(key) && ws.schema().FindFeature(key)) features[key] = body[key];
  }
  return counterfactual::InstanceFromJson(ws.schema(), features, base, field);
}

std::optional<ApiResponse> CheckKeys(const json& body, std::initializer_list<std::string_view> keys) {
  for (const auto& [key, value] : body.items()) {
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      return BadField(key, StrCat("unknown field '", key, "'"));
    }
  }
  return std::nullopt;
}

absl::StatusOr<double> CoverageOf(const json& body) {
  if (!body.contains("coverage")) return kDefaultCoverage;
  if (!body["coverage"].is_number()) return absl::InvalidArgumentError("'coverage' must be a number");
  const double c = body["coverage"].get<double>();
  if (!(c > 0.0 && c < 1.0)) return absl::InvalidArgumentError("'coverage' must be in (0, 1)");
  return c;
}

std::vector<std::string> SplitPath(std::string_view path) {
  std::vector<std::string> parts;
  size_t pos = 0;
  while (pos <= path.size()) {
    const size_t end = path.find('/', pos);
    const std::string_view part = path.substr(pos, end == std::string_view::npos ? end : end - pos);
    if (!part.empty()) parts.emplace_back(part);
    if (end == std::string_view::npos) break;
    pos = end + 1;
  }
  return parts;
}

}  // namespace

ForecastApi::ForecastApi(const Workspace& workspace, DraftStore* drafts)
    : ws_(workspace), drafts_(drafts) {}

ApiResponse ForecastApi::Handle(const ApiRequest& request) const {
  const std::vector<std::string> parts = SplitPath(request.path);
  const bool get = request.method == "GET";
  const bool post = request.method == "POST";
  if (!get && !post) return Error(405, "method_not_allowed", "only GET and POST are served");
  auto method_error = [&] {
    return Error(405, "method_not_allowed",
                 StrCat(request.method, " is not supported on ", request.path));
  };
  if (parts.empty()) return Error(404, "not_found", "no such endpoint");
  const std::string& head = parts[0];

  if (head == "designs") return Designs(request, parts);

  if (parts.size() == 1 && (head == "forecast" || head == "whatif" || head == "counterfactual")) {
    if (!post) return method_error();
    auto body = ParseBody(request.body);
    if (!body.ok()) return FromStatus(body.status(), "body");
    if (head == "forecast") return Forecast(*body);
    if (head == "whatif") return WhatIf(*body);
    return Counterfactual(*body);
  }
  if (!get) {
    if (head == "health" || head == "schema" || head == "products" || head == "summary" ||
        head == "importance" || head == "pdp") {
      return method_error();
    }
    return Error(404, "not_found", "no such endpoint");
  }
  if (parts.size() == 1) {
    if (head == "health") {
      return {200, {{"status", "ok"},
                    {"products", ws_.catalog().products.size()},
                    {"rows", ws_.dataset().size()},
                    {"schema_fingerprint", ws_.schema().fingerprint()}}};
    }
    if (head == "schema") return {200, ws_.schema().ToJson()};
    if (head == "products") return Products(request);
    if (head == "summary") return Summary(request);
    if (head == "importance") return Importance(request);
    if (head == "pdp") return Pdp(request);
  }
  if (parts.size() == 2 && head == "products") return Product(parts[1], request);
  return Error(404, "not_found", StrCat("no such endpoint ", request.path));
}

ApiResponse ForecastApi::Products(const ApiRequest& request) const {
  ProductFilter filter;
  std::map<std::string, std::string> rest;
  if (auto e = ParseFilter(request.query, filter, rest)) return *e;
  if (auto e = RejectUnknown(rest, {"sort", "page", "page_size"})) return *e;
  const std::string sort = rest.contains("sort") ? rest["sort"] : "id";
  if (sort != "id" && sort != "str_desc" && sort != "str_asc") {
    return BadField("sort", "sort must be id, str_desc or str_asc");
  }
  auto page = ParsePositive(rest, "page", 1, 1 << 30);
  if (!page.ok()) return FromStatus(page.status(), "page");
  auto page_size = ParsePositive(rest, "page_size", 50, 1000);
  if (!page_size.ok()) return FromStatus(page_size.status(), "page_size");

  std::vector<Entry> entries;
  for (const auto& p : ws_.catalog().products) {
    const auto str = ws_.StrOf(p.product_id);
    if (filter.Matches(p, str)) entries.push_back({&p, str});
  }
  if (sort == "str_desc") std::stable_sort(entries.begin(), entries.end(), ByStrDesc);
  if (sort == "str_asc") std::stable_sort(entries.begin(), entries.end(), ByStrAsc);
  json items = json::array();
  const size_t begin = static_cast<size_t>(*page - 1) * *page_size;
  for (size_t i = begin; i < entries.size() && i < begin + *page_size; ++i) {
    items.push_back(ProductJson(*entries[i].product, ws_));
  }
  return {200, {{"total", entries.size()},
                {"page", *page},
                {"page_size", *page_size},
                {"sort", sort},
                {"items", std::move(items)}}};
}

ApiResponse ForecastApi::Product(const std::string& id, const ApiRequest& request) const {
  std::map<std::string, std::string> rest = request.query;
  if (auto e = RejectUnknown(rest, {"weeks"})) return *e;
  auto weeks = ParsePositive(rest, "weeks", std::max(8, ws_.options().horizon_weeks), 104);
  if (!weeks.ok()) return FromStatus(weeks.status(), "weeks");
  const ProductRecord* product = ws_.FindProduct(id);
  if (product == nullptr) return Error(404, "not_found", StrCat("unknown product '", id, "'"));

  json view = ProductJson(*product, ws_);
  const ProductSeries series = ws_.Series(*product, *weeks);
  json average_price = json::array();
  for (const double v : series.average_price) average_price.push_back(NullableNumber(v));
  json week_index = json::array();
  for (int w = 0; w < *weeks; ++w) week_index.push_back(w);
  view["series"] = {{"week", std::move(week_index)},
                    {"sold", series.sold},
                    {"received", series.received},
                    {"inventory_end", series.inventory_end},
                    {"revenue", series.revenue},
                    {"average_price", std::move(average_price)}};
  view["horizon_weeks"] = ws_.options().horizon_weeks;
  if (const auto st = ws_.SellThroughOf(*product)) {
    view["units_sold"] = st->units_sold;
    view["units_received"] = st->units_received;
  }
  const auto instance = ws_.InstanceOf(id);
  const auto& est = ws_.estimator();
  auto dist = est.Predict(instance->values);
  if (!dist.ok()) return FromStatus(dist.status());
  auto interval = uncertainty::IntervalFor(*dist, kDefaultCoverage, est.clamp_intervals);
  if (!interval.ok()) return FromStatus(interval.status());
  view["forecast"] = {{"mean", dist->mean},
                      {"std_dev", dist->std_dev},
                      {"coverage", kDefaultCoverage},
                      {"interval", {{"lo", interval->lo}, {"hi", interval->hi}}}};
  auto attribution = explain::ShapValues(est.base_model, instance->values, &ws_.dataset());
  if (!attribution.ok()) return FromStatus(attribution.status());
  view["attribution"] = attribution->ToJson(ws_.schema());
  view["instance"] = counterfactual::InstanceToJson(ws_.schema(), instance->values);
  return {200, std::move(view)};
}

ApiResponse ForecastApi::Summary(const ApiRequest& request) const {
  ProductFilter filter;
  std::map<std::string, std::string> rest;
  if (auto e = ParseFilter(request.query, filter, rest)) return *e;
  if (auto e = RejectUnknown(rest, {"group_by"})) return *e;
  const std::string group_by = rest.contains("group_by") ? rest["group_by"] : "";
  if (!group_by.empty() && group_by != "category") {
    bool known = false;
    for (const auto& p : ws_.catalog().products) {
      if (p.attributes.contains(group_by)) {
        known = true;
        break;
      }
    }
    if (!known) return BadField("group_by", StrCat("unknown grouping '", group_by, "'"));
  }
  struct Group {
    std::vector<Entry> with_str;
    int64_t excluded = 0;
  };
  std::map<std::string, Group> groups;
  for (const auto& p : ws_.catalog().products) {
    const auto str = ws_.StrOf(p.product_id);
    if (!filter.Matches(p, str)) continue;
    std::string key = "all";
    if (group_by == "category") {
      key = p.category;
    } else if (!group_by.empty()) {
      auto it = p.attributes.find(group_by);
      key = it == p.attributes.end() ? "MISSING" : AttributeText(it->second);
    }
    Group& g = groups[key];
    if (str) {
      g.with_str.push_back({&p, str});
    } else {
      ++g.excluded;
    }
  }
  json edges = json::array();
  for (int k = 0; k <= kHistogramBins; ++k) edges.push_back(static_cast<double>(k) / kHistogramBins);
  json out = json::array();
  int64_t total = 0;
  for (const auto& [key, g] : groups) {
    std::vector<int64_t> histogram(kHistogramBins, 0);
    std::vector<double> values;
    for (const auto& e : g.with_str) {
      ++histogram[HistogramBin(*e.str)];
      values.push_back(*e.str);
    }
    std::sort(values.begin(), values.end());
    double sum = 0.0;
    for (const double v : values) sum += v;
    const size_t n = values.size();
    json mean = nullptr, median = nullptr;
    if (n > 0) {
      mean = sum / static_cast<double>(n);
      median = n % 2 == 1 ? values[n / 2] : (values[n / 2 - 1] + values[n / 2]) / 2.0;
    }
    total += static_cast<int64_t>(n);
    out.push_back({{"key", key},
                   {"count", n},
                   {"excluded", g.excluded},
                   {"mean_str", mean},
                   {"median_str", median},
                   {"histogram", histogram},
                   {"best", SellerList(g.with_str, true)},
                   {"worst", SellerList(g.with_str, false)}});
  }
  return {200, {{"group_by", group_by.empty() ? json(nullptr) : json(group_by)},
                {"bin_edges", std::move(edges)},
                {"count", total},
                {"groups", std::move(out)}}};
}

ApiResponse ForecastApi::Forecast(const json& body) const {
  if (auto e = CheckKeys(body, {"product_id", "attributes", "list_price", "launch_week",
                                "category", "coverage"})) {
    return *e;
  }
  auto coverage = CoverageOf(body);
  if (!coverage.ok()) return FromStatus(coverage.status(), "coverage");
  std::string field;
  auto instance = InstanceFromBody(ws_, body, &field);
  if (!instance.ok()) return FromStatus(instance.status(), field);
  const auto& est = ws_.estimator();
  auto dist = est.Predict(instance->values);
  if (!dist.ok()) return FromStatus(dist.status());
  auto interval = uncertainty::IntervalFor(*dist, *coverage, est.clamp_intervals);
  if (!interval.ok()) return FromStatus(interval.status(), "coverage");
  auto attribution = explain::ShapValues(est.base_model, instance->values, &ws_.dataset());
  if (!attribution.ok()) return FromStatus(attribution.status());
  return {200, {{"mean", dist->mean},
                {"std_dev", dist->std_dev},
                {"coverage", *coverage},
                {"interval", {{"lo", interval->lo}, {"hi", interval->hi}}},
                {"attribution", attribution->ToJson(ws_.schema())},
                {"instance", counterfactual::InstanceToJson(ws_.schema(), instance->values)}}};
}

ApiResponse ForecastApi::WhatIf(const json& body) const {
  if (auto e = CheckKeys(body, {"product_id", "attributes", "list_price", "launch_week",
                                "category", "coverage", "feature", "values"})) {
    return *e;
  }
  auto coverage = CoverageOf(body);
  if (!coverage.ok()) return FromStatus(coverage.status(), "coverage");
  if (!body.contains("feature") || !body["feature"].is_string()) {
    return BadField("feature", "'feature' must name a feature");
  }
  const auto feature = ws_.schema().FindFeature(body["feature"].get<std::string>());
  if (!feature) {
    return BadField("feature", StrCat("unknown feature '", body["feature"].get<std::string>(), "'"));
  }
  std::string field;
  auto instance = InstanceFromBody(ws_, body, &field);
  if (!instance.ok()) return FromStatus(instance.status(), field);
  std::vector<double> values;
  if (body.contains("values")) {
    if (!body["values"].is_array()) return BadField("values", "'values' must be a list");
    const std::string& name = ws_.schema().feature(*feature).name;
    for (const auto& v : body["values"]) {
      auto one = counterfactual::InstanceFromJson(ws_.schema(), json{{name, v}});
      if (!one.ok() || catalog::IsMissing(one->values[*feature])) {
        return BadField("values", StrCat("bad value ", v.dump(), " for '", name, "'"));
      }
      values.push_back(one->values[*feature]);
    }
  } else {
    values = counterfactual::DefaultSweepValues(ws_.schema(), *feature);
  }
  auto points = counterfactual::WhatIfSweep(ws_.estimator(), ws_.schema(), instance->values,
                                            *feature, values, *coverage);
  if (!points.ok()) return FromStatus(points.status(), "values");
  json out = counterfactual::WhatIfToJson(ws_.schema(), *feature, *points);
  out["coverage"] = *coverage;
  return {200, std::move(out)};
}

ApiResponse ForecastApi::Counterfactual(const json& body) const {
  std::optional<catalog::EncodedInstance> base;
  if (body.contains("product_id")) {
    if (!body["product_id"].is_string()) return BadField("product_id", "'product_id' must be a string");
    base = ws_.InstanceOf(body["product_id"].get<std::string>());
    if (!base) {
      return Error(404, "not_found",
                   StrCat("unknown product '", body["product_id"].get<std::string>(), "'"),
                   "product_id");
    }
  }
  std::string field;
  auto request = counterfactual::CfRequestFromJson(ws_.schema(), body, base ? &*base : nullptr,
                                                   &ws_.dataset(), &field);
  if (!request.ok()) return FromStatus(request.status(), field);
  auto result = counterfactual::SolveCounterfactual(ws_.estimator().base_model, ws_.schema(),
                                                    *request);
  if (!result.ok()) return FromStatus(result.status());
  json out = counterfactual::ResultToJson(ws_.schema(), *result);
  out["markdown"] = counterfactual::DiffMarkdown(result->diffs, result->original_prediction,
                                                 result->predicted);
  return {200, std::move(out)};
}

absl::StatusOr<explain::ImportanceReport> ForecastApi::CachedImportance(
    explain::ImportanceMethod method) const {
  ImportanceCache& cache =
      method == explain::ImportanceMethod::kGain ? gain_cache_ : shap_cache_;
  std::call_once(cache.once, [&] {
    const auto& model = ws_.estimator().base_model;
    cache.report = method == explain::ImportanceMethod::kGain
                       ? explain::GainImportance(model)
                       : explain::GlobalShapImportance(model, ws_.dataset());
  });
  return cache.report;
}

ApiResponse ForecastApi::Importance(const ApiRequest& request) const {
  std::map<std::string, std::string> rest = request.query;
  if (auto e = RejectUnknown(rest, {"method"})) return *e;
  auto method = explain::ParseImportanceMethod(rest.contains("method") ? rest["method"] : "gain");
  if (!method.ok()) return FromStatus(method.status(), "method");
  auto report = CachedImportance(*method);
  if (!report.ok()) return FromStatus(report.status());
  return {200, report->ToJson(ws_.schema())};
}

ApiResponse ForecastApi::Pdp(const ApiRequest& request) const {
  std::map<std::string, std::string> rest = request.query;
  if (auto e = RejectUnknown(rest, {"feature", "points"})) return *e;
  if (!rest.contains("feature")) return BadField("feature", "'feature' is required");
  const auto feature = ws_.schema().FindFeature(rest["feature"]);
  if (!feature) return BadField("feature", StrCat("unknown feature '", rest["feature"], "'"));
  auto points = ParsePositive(rest, "points", explain::kDefaultPdpPoints, 200);
  if (!points.ok()) return FromStatus(points.status(), "points");
  auto grid = explain::DefaultPdpGrid(ws_.dataset(), *feature, *points);
  if (!grid.ok()) return FromStatus(grid.status(), "feature");
  auto curve = explain::PartialDependence(ws_.estimator().base_model, ws_.dataset(), *feature, *grid);
  if (!curve.ok()) return FromStatus(curve.status());
  return {200, curve->ToJson(ws_.schema())};
}

ApiResponse ForecastApi::Designs(const ApiRequest& request,
                                 const std::vector<std::string>& parts) const {
  if (drafts_ == nullptr) return Error(503, "unavailable", "design store is not configured");
  const bool get = request.method == "GET";
  auto draft_json = [](const absl::StatusOr<DesignDraft>& d, int ok_status = 200) {
    if (!d.ok()) return FromStatus(d.status());
    return ApiResponse{ok_status, d->ToJson()};
  };
  if (parts.size() == 1) {
    if (get) {
      std::map<std::string, std::string> rest = request.query;
      if (auto e = RejectUnknown(rest, {"status"})) return *e;
      std::optional<DraftStatus> status;
      if (rest.contains("status")) {
        status = ParseDraftStatus(rest["status"]);
        if (!status) return BadField("status", StrCat("unknown status '", rest["status"], "'"));
      }
      json items = json::array();
      for (const auto& d : drafts_->List(status)) items.push_back(d.ToJson());
      return {200, {{"total", items.size()}, {"items", std::move(items)}}};
    }
    auto body = ParseBody(request.body);
    if (!body.ok()) return FromStatus(body.status(), "body");
    if (auto e = CheckKeys(*body, {"name", "category", "attributes", "images"})) return *e;
    NewDraft draft;
    for (const char* key : {"name", "category"}) {
      if (body->contains(key)) {
        if (!(*body)[key].is_string()) return BadField(key, StrCat("'", key, "' must be a string"));
        (std::string(key) == "name" ? draft.name : draft.category) = (*body)[key].get<std::string>();
      }
    }
    if (body->contains("attributes")) {
      const json& attrs = (*body)["attributes"];
      std::string field;
      auto check = counterfactual::InstanceFromJson(ws_.schema(), attrs, nullptr, &field);
      if (!check.ok()) return FromStatus(check.status(), field.empty() ? "attributes" : field);
      draft.attributes = attrs;
    }
    if (body->contains("images")) {
      const json& images = (*body)["images"];
      if (!images.is_array()) return BadField("images", "'images' must be a list of strings");
      for (const auto& i : images) {
        if (!i.is_string()) return BadField("images", "'images' must be a list of strings");
        draft.images.push_back(i.get<std::string>());
      }
    }
    return draft_json(drafts_->Create(draft), 201);
  }
  const std::string& id = parts[1];
  if (parts.size() == 2) {
    if (!get) return Error(405, "method_not_allowed", "use GET on a design");
    const auto d = drafts_->Get(id);
    if (!d) return Error(404, "not_found", StrCat("unknown draft '", id, "'"));
    return {200, d->ToJson()};
  }
  if (parts.size() != 3) return Error(404, "not_found", "no such endpoint");
  if (get) return Error(405, "method_not_allowed", "use POST");
  auto body = ParseBody(request.body);
  if (!body.ok()) return FromStatus(body.status(), "body");
  const std::string& action = parts[2];
  if (action == "like") {
    if (auto e = CheckKeys(*body, {})) return *e;
    return draft_json(drafts_->Like(id));
  }
  if (action == "feedback") {
    if (auto e = CheckKeys(*body, {"author", "text"})) return *e;
    if (!body->contains("text") || !(*body)["text"].is_string() ||
        (*body)["text"].get<std::string>().empty()) {
      return BadField("text", "'text' must be a non-empty string");
    }
    std::string author = "anonymous";
    if (body->contains("author")) {
      if (!(*body)["author"].is_string()) return BadField("author", "'author' must be a string");
      author = (*body)["author"].get<std::string>();
    }
    return draft_json(drafts_->AddFeedback(id, author, (*body)["text"].get<std::string>()));
  }
  if (action == "status") {
    if (auto e = CheckKeys(*body, {"status"})) return *e;
    if (!body->contains("status") || !(*body)["status"].is_string()) {
      return BadField("status", "'status' must be a string");
    }
    const auto status = ParseDraftStatus((*body)["status"].get<std::string>());
    if (!status) return BadField("status", "status must be docket, sample, ordered or rejected");
    return draft_json(drafts_->SetStatus(id, *status));
  }
  return Error(404, "not_found", "no such endpoint");
}

}  // namespace strstudio::service
