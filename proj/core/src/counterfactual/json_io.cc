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

#include "strstudio/counterfactual/json_io.h"

#include <cmath>
#include <set>

#include "strstudio/util/status_macros.h"
#include "strstudio/util/strings.h"

namespace strstudio::counterfactual {

using nlohmann::json;

namespace {

absl::Status FieldError(std::string* bad_field, const std::string& field,
                        std::string message) {
  if (bad_field != nullptr) *bad_field = field;
  return absl::InvalidArgumentError(std::move(message));
}

std::vector<std::string> StringList(const json& j) {
  std::vector<std::string> out;
  for (const auto& v : j) out.push_back(v.get<std::string>());
  return out;
}

bool IsStringList(const json& j) {
  if (!j.is_array()) return false;
  for (const auto& v : j) {
    if (!v.is_string()) return false;
  }
  return true;
}

}  // namespace

absl::StatusOr<catalog::EncodedInstance> InstanceFromJson(
    const catalog::FeatureSchema& schema, const json& j,
    const catalog::EncodedInstance* base, std::string* bad_field) {
  catalog::EncodedInstance out;
  if (base != nullptr) {
    out = *base;
  } else {
    out.values.assign(schema.size(), catalog::kMissing);
  }
  if (static_cast<int>(out.values.size()) != schema.size()) {
    return absl::InvalidArgumentError("base instance does not match the schema");
  }
  if (j.is_null()) return out;
  if (!j.is_object()) {
    return FieldError(bad_field, "instance", "instance must be an object");
  }
  for (const auto& [name, value] : j.items()) {
    const auto index = schema.FindFeature(name);
    if (!index) {
      return FieldError(bad_field, name, StrCat("unknown feature '", name, "'"));
    }
    const auto& spec = schema.feature(*index);
    double& slot = out.values[*index];
    if (value.is_null()) {
      slot = catalog::kMissing;
    } else if (spec.categorical()) {
      if (value.is_string()) {
        const auto code = schema.CodeOf(*index, value.get<std::string>());
        if (!code) {
          return FieldError(bad_field, name,
                            StrCat("unknown label '", value.get<std::string>(),
                                   "' for feature '", name, "'"));
        }
        slot = *code;
      } else if (value.is_number_integer() && value.get<int64_t>() >= 1 &&
                 value.get<int64_t>() <= spec.num_codes()) {
        slot = static_cast<double>(value.get<int64_t>());
      } else {
        return FieldError(bad_field, name,
                          StrCat("feature '", name, "' expects a label"));
      }
    } else {
      if (!value.is_number() || !std::isfinite(value.get<double>())) {
        return FieldError(bad_field, name,
                          StrCat("feature '", name, "' expects a number"));
      }
      slot = value.get<double>();
    }
  }
  return out;
}

json InstanceToJson(const catalog::FeatureSchema& schema,
                    std::span<const double> values) {
  json out = json::object();
  for (int i = 0; i < schema.size(); ++i) {
    const double v = values[i];
    if (catalog::IsMissing(v)) {
      out[schema.feature(i).name] = nullptr;
    } else if (schema.feature(i).categorical()) {
      const auto label = schema.LabelOf(i, v);
      out[schema.feature(i).name] = label ? json(*label) : json(v);
    } else {
      out[schema.feature(i).name] = v;
    }
  }
  return out;
}

json GaConfigToJson(const GaConfig& c) {
  return {{"population_size", c.population_size},
          {"generations", c.generations},
          {"crossover_rate", c.crossover_rate},
          {"mutation_rate", c.mutation_rate},
          {"elite_count", c.elite_count},
          {"tournament_size", c.tournament_size},
          {"lambda0", c.lambda0},
          {"lambda_multiplier", c.lambda_multiplier},
          {"lambda_max_steps", c.lambda_max_steps},
          {"seed", c.seed}};
}

absl::StatusOr<GaConfig> GaConfigFromJson(const json& j) {
  if (!j.is_object()) return absl::InvalidArgumentError("ga config must be an object");
  GaConfig c;
  for (const auto& [key, value] : j.items()) {
    auto need_int = [&](int& field) -> absl::Status {
      if (!value.is_number_integer()) {
        return absl::InvalidArgumentError(StrCat("ga '", key, "' must be an integer"));
      }
      field = value.get<int>();
      return absl::OkStatus();
    };
    auto need_real = [&](double& field) -> absl::Status {
      if (!value.is_number()) {
        return absl::InvalidArgumentError(StrCat("ga '", key, "' must be a number"));
      }
      field = value.get<double>();
      return absl::OkStatus();
    };
    if (key == "population_size") {
      RETURN_IF_ERROR(need_int(c.population_size));
    } else if (key == "generations") {
      RETURN_IF_ERROR(need_int(c.generations));
    } else if (key == "elite_count") {
      RETURN_IF_ERROR(need_int(c.elite_count));
    } else if (key == "tournament_size") {
      RETURN_IF_ERROR(need_int(c.tournament_size));
    } else if (key == "lambda_max_steps") {
      RETURN_IF_ERROR(need_int(c.lambda_max_steps));
    } else if (key == "crossover_rate") {
      RETURN_IF_ERROR(need_real(c.crossover_rate));
    } else if (key == "mutation_rate") {
      RETURN_IF_ERROR(need_real(c.mutation_rate));
    } else if (key == "lambda0") {
      RETURN_IF_ERROR(need_real(c.lambda0));
    } else if (key == "lambda_multiplier") {
      RETURN_IF_ERROR(need_real(c.lambda_multiplier));
    } else if (key == "seed") {
      if (!value.is_number_integer() || value.get<int64_t>() < 0) {
        return absl::InvalidArgumentError("ga 'seed' must be a non-negative integer");
      }
      c.seed = value.get<uint64_t>();
    } else {
      return absl::InvalidArgumentError(StrCat("unknown ga key '", key, "'"));
    }
  }
  RETURN_IF_ERROR(c.Validate());
  return c;
}

absl::StatusOr<CfRequest> CfRequestFromJson(const catalog::FeatureSchema& schema,
                                            const json& j,
                                            const catalog::EncodedInstance* base,
                                            const catalog::Dataset* background,
                                            std::string* bad_field) {
  if (!j.is_object()) return absl::InvalidArgumentError("request must be an object");
  static const std::set<std::string> kKeys = {
      "product_id", "instance", "target", "mutable", "freeze",
      "tolerance",  "distance", "ga"};
  for (const auto& [key, value] : j.items()) {
    if (!kKeys.contains(key)) {
      return FieldError(bad_field, key, StrCat("unknown field '", key, "'"));
    }
  }
  CfRequest request;
  ASSIGN_OR_RETURN(request.instance,
                   InstanceFromJson(schema, j.value("instance", json(nullptr)), base,
                                    bad_field));
  if (!j.contains("target") || !j["target"].is_number()) {
    return FieldError(bad_field, "target", "'target' must be a number");
  }
  request.target = j["target"].get<double>();

  if (j.contains("mutable") && j.contains("freeze")) {
    return FieldError(bad_field, "freeze", "give either 'mutable' or 'freeze'");
  }
  for (const char* key : {"mutable", "freeze"}) {
    if (j.contains(key) && !IsStringList(j[key])) {
      return FieldError(bad_field, key, StrCat("'", key, "' must be a list of names"));
    }
  }
  absl::StatusOr<std::vector<int>> mutable_features =
      j.contains("mutable") ? MatchFeatures(schema, StringList(j["mutable"]))
                            : MutableExcept(schema, j.contains("freeze")
                                                        ? StringList(j["freeze"])
                                                        : std::vector<std::string>{});
  if (!mutable_features.ok()) {
    return FieldError(bad_field, j.contains("mutable") ? "mutable" : "freeze",
                      std::string(mutable_features.status().message()));
  }
  request.mutable_features = std::move(*mutable_features);

  if (j.contains("tolerance")) {
    if (!j["tolerance"].is_number() || !(j["tolerance"].get<double>() > 0.0)) {
      return FieldError(bad_field, "tolerance", "'tolerance' must be positive");
    }
    request.tolerance = j["tolerance"].get<double>();
  }

  request.distance = DistanceSpec::FromSchema(schema);
  if (j.contains("distance")) {
    const json& d = j["distance"];
    if (!d.is_object()) return FieldError(bad_field, "distance", "'distance' must be an object");
    for (const auto& [key, value] : d.items()) {
      if (key == "scale") {
        if (value == "mad") {
          if (background == nullptr) {
            return FieldError(bad_field, "distance", "MAD scales need a dataset");
          }
          auto weights = request.distance.weight;
          ASSIGN_OR_RETURN(request.distance, DistanceSpec::FromMad(*background));
          request.distance.weight = weights;
        } else if (value != "range") {
          return FieldError(bad_field, "distance", "scale must be 'range' or 'mad'");
        }
      } else if (key == "categorical_cost") {
        if (!value.is_number() || value.get<double>() < 0) {
          return FieldError(bad_field, "distance", "bad categorical_cost");
        }
        request.distance.categorical_cost = value.get<double>();
      } else if (key == "weights") {
        if (!value.is_object()) return FieldError(bad_field, "distance", "bad weights");
        for (const auto& [name, w] : value.items()) {
          const auto index = schema.FindFeature(name);
          if (!index) {
            return FieldError(bad_field, name, StrCat("unknown feature '", name, "'"));
          }
          if (!w.is_number() || w.get<double>() < 0) {
            return FieldError(bad_field, name, "weights must be non-negative numbers");
          }
          request.distance.weight[*index] = w.get<double>();
        }
      } else {
        return FieldError(bad_field, "distance", StrCat("unknown distance key '", key, "'"));
      }
    }
  }
  if (j.contains("ga")) {
    auto ga = GaConfigFromJson(j["ga"]);
    if (!ga.ok()) return FieldError(bad_field, "ga", std::string(ga.status().message()));
    request.ga = *ga;
  }
  return request;
}

json ResultToJson(const catalog::FeatureSchema& schema, const CounterfactualResult& r) {
  json changes = json::array();
  auto number = [](double v) { return catalog::IsMissing(v) ? json(nullptr) : json(v); };
  for (const auto& c : r.diffs) {
    changes.push_back({{"feature", c.name},
                       {"from", c.from_text},
                       {"to", c.to_text},
                       {"from_value", number(c.from)},
                       {"to_value", number(c.to)},
                       {"negligible", c.negligible}});
  }
  return {{"product_id", r.counterfactual.product_id},
          {"target", r.target},
          {"original_prediction", r.original_prediction},
          {"predicted", r.predicted},
          {"distance", r.distance},
          {"feasible", r.feasible},
          {"final_lambda", r.final_lambda},
          {"counterfactual", InstanceToJson(schema, r.counterfactual.values)},
          {"changes", std::move(changes)}};
}

}  // namespace strstudio::counterfactual
