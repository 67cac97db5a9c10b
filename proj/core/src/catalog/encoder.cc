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

#include "strstudio/catalog/encoder.h"

#include <algorithm>
#include <map>
#include <set>

#include "strstudio/util/strings.h"
#include "spdlog/spdlog.h"
#include "strstudio/util/files.h"

namespace strstudio::catalog {
namespace {

const char* KindName(FeatureKind kind) {
  return kind == FeatureKind::kCategorical ? "categorical" : "numeric";
}

const char* SourceName(FeatureSource source) {
  switch (source) {
    case FeatureSource::kListPrice:
      return "list_price";
    case FeatureSource::kLaunchWeek:
      return "launch_week";
    case FeatureSource::kAttribute:
      break;
  }
  return "attribute";
}

}  // namespace

FeatureSchema::FeatureSchema(std::vector<FeatureSpec> features)
    : features_(std::move(features)) {
  ComputeFingerprint();
}

FeatureSchema FeatureSchema::Numeric(int d, double lo, double hi) {
  std::vector<FeatureSpec> features(d);
  for (int i = 0; i < d; ++i) {
    features[i].name = StrCat("f", i);
    features[i].min = lo;
    features[i].max = hi;
  }
  return FeatureSchema(std::move(features));
}

std::optional<int> FeatureSchema::FindFeature(std::string_view name) const {
  for (int i = 0; i < size(); ++i) {
    if (features_[i].name == name) return i;
  }
  return std::nullopt;
}

std::optional<int> FeatureSchema::CodeOf(int i, std::string_view label) const {
  const auto& labels = features_[i].labels;
  const auto it = std::lower_bound(labels.begin(), labels.end(), label);
  if (it == labels.end() || *it != label) return std::nullopt;
  return static_cast<int>(it - labels.begin()) + 1;
}

std::optional<std::string> FeatureSchema::LabelOf(int i, double code) const {
  if (IsMissing(code)) return std::nullopt;
  const auto& labels = features_[i].labels;
  const double rounded = std::round(code);
  if (rounded != code || rounded < 1 ||
      rounded > static_cast<double>(labels.size())) {
    return std::nullopt;
  }
  return labels[static_cast<size_t>(rounded) - 1];
}

std::string FeatureSchema::FormatValue(int i, double value) const {
  if (IsMissing(value)) return "MISSING";
  if (features_[i].categorical()) {
    auto label = LabelOf(i, value);
    return label ? *label : StrCat("code ", utils::FormatDouble(value));
  }
  return fmt::format("{:.4g}", value);
}

void FeatureSchema::ComputeFingerprint() {
  nlohmann::json identity = nlohmann::json::array();
  for (const auto& f : features_) {
    identity.push_back({f.name, KindName(f.kind), f.labels});
  }
  fingerprint_ = fmt::format("{:08x}", utils::Crc32(identity.dump()));
}

nlohmann::json FeatureSchema::ToJson() const {
  nlohmann::json features = nlohmann::json::array();
  for (const auto& f : features_) {
    nlohmann::json j = {{"name", f.name},
                        {"kind", KindName(f.kind)},
                        {"source", SourceName(f.source)}};
    if (f.categorical()) {
      nlohmann::json table = nlohmann::json::array();
      for (size_t k = 0; k < f.labels.size(); ++k) {
        table.push_back({{"label", f.labels[k]}, {"code", k + 1}});
      }
      j["encoder"] = std::move(table);
    } else {
      j["min"] = f.min;
      j["max"] = f.max;
    }
    features.push_back(std::move(j));
  }
  return {{"fingerprint", fingerprint_},
          {"num_features", size()},
          {"features", std::move(features)}};
}

absl::StatusOr<FeatureSchema> FeatureSchema::FromJson(
    const nlohmann::json& json) {
  try {
    std::vector<FeatureSpec> features;
    for (const auto& j : json.at("features")) {
      FeatureSpec f;
      f.name = j.at("name").get<std::string>();
      const std::string kind = j.at("kind").get<std::string>();
      if (kind == "categorical") {
        f.kind = FeatureKind::kCategorical;
      } else if (kind == "numeric") {
        f.kind = FeatureKind::kNumeric;
      } else {
        return absl::InvalidArgumentError(
            StrCat("unknown feature kind '", kind, "'"));
      }
      const std::string source = j.value("source", "attribute");
      f.source = source == "list_price"    ? FeatureSource::kListPrice
                 : source == "launch_week" ? FeatureSource::kLaunchWeek
                                           : FeatureSource::kAttribute;
      if (f.categorical()) {
        const auto& table = j.at("encoder");
        f.labels.resize(table.size());
        for (const auto& entry : table) {
          const int code = entry.at("code").get<int>();
          if (code < 1 || code > static_cast<int>(table.size())) {
            return absl::InvalidArgumentError(
                StrCat("feature ", f.name, ": code out of range"));
          }
          f.labels[code - 1] = entry.at("label").get<std::string>();
        }
        if (!std::is_sorted(f.labels.begin(), f.labels.end()) ||
            std::adjacent_find(f.labels.begin(), f.labels.end()) !=
                f.labels.end()) {
          return absl::InvalidArgumentError(StrCat(
              "feature ", f.name, ": encoder table is not a sorted bijection"));
        }
      } else {
        f.min = j.at("min").get<double>();
        f.max = j.at("max").get<double>();
      }
      features.push_back(std::move(f));
    }
    FeatureSchema schema(std::move(features));
    if (json.contains("fingerprint") &&
        json["fingerprint"].get<std::string>() != schema.fingerprint()) {
      return absl::DataLossError("schema fingerprint does not match content");
    }
    return schema;
  } catch (const nlohmann::json::exception& e) {
    return absl::InvalidArgumentError(
        StrCat("malformed schema JSON: ", e.what()));
  }
}

absl::StatusOr<FeatureSchema> FitEncoder(
    std::span<const ProductRecord> products, bool include_launch_week) {
  if (products.empty()) {
    return absl::InvalidArgumentError("FitEncoder needs at least one product");
  }
  struct Observed {
    std::set<std::string> labels;
    bool any_numeric = false;
    bool any_label = false;
    double min = 0.0;
    double max = 0.0;
  };
  std::map<std::string, Observed> observed;
  for (const auto& p : products) {
    for (const auto& [name, value] : p.attributes) {
      auto& o = observed[name];
      if (const double* d = std::get_if<double>(&value)) {
        if (!o.any_numeric) {
          o.min = o.max = *d;
        } else {
          o.min = std::min(o.min, *d);
          o.max = std::max(o.max, *d);
        }
        o.any_numeric = true;
      } else if (const auto* s = std::get_if<std::string>(&value)) {
        o.labels.insert(*s);
        o.any_label = true;
      }
    }
  }

  std::vector<FeatureSpec> features;
  for (const auto& [name, o] : observed) {
    if (name == kListPriceFeature || name == kLaunchWeekFeature) {
      spdlog::warn("attribute '{}' shadows a built-in feature; dropped", name);
      continue;
    }
    if (!o.any_numeric && !o.any_label) {
      spdlog::warn("attribute '{}' has no non-missing values; dropped", name);
      continue;
    }
    FeatureSpec f;
    f.name = name;
    if (o.any_label) {
      // Mixed columns are treated as categorical; numbers become labels.
      std::set<std::string> labels = o.labels;
      if (o.any_numeric) {
        for (const auto& p : products) {
          const auto it = p.attributes.find(name);
          if (it == p.attributes.end()) continue;
          if (const double* d = std::get_if<double>(&it->second)) {
            labels.insert(utils::FormatDouble(*d));
          }
        }
      }
      f.kind = FeatureKind::kCategorical;
      f.labels.assign(labels.begin(), labels.end());
    } else {
      f.kind = FeatureKind::kNumeric;
      f.min = o.min;
      f.max = o.max;
    }
    features.push_back(std::move(f));
  }

  FeatureSpec price;
  price.name = kListPriceFeature;
  price.source = FeatureSource::kListPrice;
  price.min = price.max = products.front().list_price;
  for (const auto& p : products) {
    price.min = std::min(price.min, p.list_price);
    price.max = std::max(price.max, p.list_price);
  }
  features.push_back(std::move(price));

  if (include_launch_week) {
    FeatureSpec week;
    week.name = kLaunchWeekFeature;
    week.source = FeatureSource::kLaunchWeek;
    week.min = week.max = products.front().launch_week;
    for (const auto& p : products) {
      week.min = std::min<double>(week.min, p.launch_week);
      week.max = std::max<double>(week.max, p.launch_week);
    }
    features.push_back(std::move(week));
  }
  return FeatureSchema(std::move(features));
}

EncodedInstance Encode(const ProductRecord& product,
                       const FeatureSchema& schema) {
  EncodedInstance out;
  out.product_id = product.product_id;
  out.values.assign(schema.size(), kMissing);
  for (int i = 0; i < schema.size(); ++i) {
    const FeatureSpec& f = schema.feature(i);
    switch (f.source) {
      case FeatureSource::kListPrice:
        out.values[i] = product.list_price;
        continue;
      case FeatureSource::kLaunchWeek:
        out.values[i] = product.launch_week;
        continue;
      case FeatureSource::kAttribute:
        break;
    }
    const auto it = product.attributes.find(f.name);
    if (it == product.attributes.end() || IsMissingValue(it->second)) continue;
    if (f.categorical()) {
      std::string label;
      if (const auto* s = std::get_if<std::string>(&it->second)) {
        label = *s;
      } else {
        label = utils::FormatDouble(std::get<double>(it->second));
      }
      if (const auto code = schema.CodeOf(i, label)) {
        out.values[i] = *code;
      } else {
        spdlog::info("product {}: unseen label '{}' for '{}' encoded as missing",
                     product.product_id, label, f.name);
      }
    } else if (const double* d = std::get_if<double>(&it->second)) {
      out.values[i] = *d;
    } else {
      spdlog::info("product {}: non-numeric value for '{}' encoded as missing",
                   product.product_id, f.name);
    }
  }
  return out;
}

ProductRecord Decode(const EncodedInstance& instance,
                     const FeatureSchema& schema) {
  ProductRecord p;
  p.product_id = instance.product_id;
  for (int i = 0; i < schema.size(); ++i) {
    const FeatureSpec& f = schema.feature(i);
    const double v = instance.values[i];
    switch (f.source) {
      case FeatureSource::kListPrice:
        p.list_price = IsMissing(v) ? 0.0 : v;
        continue;
      case FeatureSource::kLaunchWeek:
        p.launch_week = IsMissing(v) ? 1 : static_cast<int>(std::lround(v));
        continue;
      case FeatureSource::kAttribute:
        break;
    }
    if (IsMissing(v)) {
      p.attributes[f.name] = std::monostate{};
    } else if (f.categorical()) {
      const auto label = schema.LabelOf(i, v);
      p.attributes[f.name] = label ? AttributeValue(*label)
                                   : AttributeValue(std::monostate{});
    } else {
      p.attributes[f.name] = v;
    }
  }
  return p;
}

}  // namespace strstudio::catalog
