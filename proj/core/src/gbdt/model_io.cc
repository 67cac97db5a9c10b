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

#include "strstudio/gbdt/model_io.h"

#include <cmath>
#include <set>

#include "fmt/format.h"
#include "strstudio/util/files.h"
#include "strstudio/util/status_macros.h"
#include "strstudio/util/strings.h"

namespace strstudio::gbdt {
namespace {

using nlohmann::json;

constexpr std::string_view kFooterPrefix = "crc32 ";

json NodeToJson(const TreeNode& node) {
  json j;
  if (node.is_leaf()) {
    j["leaf"] = node.value;
  } else {
    j["feature"] = node.feature;
    j["threshold"] = node.threshold;
    j["default_left"] = node.default_left;
    j["left"] = node.left;
    j["right"] = node.right;
    if (!std::isnan(node.gain)) j["gain"] = node.gain;
  }
  if (!std::isnan(node.cover)) j["cover"] = node.cover;
  return j;
}

absl::StatusOr<double> GetNumber(const json& j, const char* key,
                                 std::string_view where) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_number()) {
    return absl::DataLossError(StrCat(where, ": missing number '", key, "'"));
  }
  return it->get<double>();
}

absl::StatusOr<int64_t> GetInt(const json& j, const char* key,
                               std::string_view where) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_number_integer()) {
    return absl::DataLossError(StrCat(where, ": missing integer '", key, "'"));
  }
  return it->get<int64_t>();
}

absl::StatusOr<TreeNode> NodeFromJson(const json& j, std::string_view where) {
  if (!j.is_object()) return absl::DataLossError(StrCat(where, ": not an object"));
  TreeNode node;
  if (j.contains("leaf")) {
    ASSIGN_OR_RETURN(node.value, GetNumber(j, "leaf", where));
  } else {
    ASSIGN_OR_RETURN(int64_t feature, GetInt(j, "feature", where));
    ASSIGN_OR_RETURN(node.threshold, GetNumber(j, "threshold", where));
    ASSIGN_OR_RETURN(int64_t left, GetInt(j, "left", where));
    ASSIGN_OR_RETURN(int64_t right, GetInt(j, "right", where));
    auto dl = j.find("default_left");
    if (dl == j.end() || !dl->is_boolean()) {
      return absl::DataLossError(StrCat(where, ": missing 'default_left'"));
    }
    node.feature = static_cast<int32_t>(feature);
    node.left = static_cast<int32_t>(left);
    node.right = static_cast<int32_t>(right);
    node.default_left = dl->get<bool>();
    if (j.contains("gain")) {
      ASSIGN_OR_RETURN(node.gain, GetNumber(j, "gain", where));
    }
  }
  if (j.contains("cover")) {
    ASSIGN_OR_RETURN(node.cover, GetNumber(j, "cover", where));
  }
  return node;
}

absl::Status ValidateTree(const Tree& tree, int num_features, size_t t) {
  if (tree.nodes.empty()) return absl::DataLossError(StrCat("tree ", t, " is empty"));
  std::set<int> referenced;
  const int n = static_cast<int>(tree.nodes.size());
  for (int k = 0; k < n; ++k) {
    const TreeNode& node = tree.nodes[k];
    if (node.is_leaf()) {
      if (node.right >= 0) {
        return absl::DataLossError(StrCat("tree ", t, " node ", k, ": half split"));
      }
      continue;
    }
    if (node.feature < 0 || node.feature >= num_features) {
      return absl::DataLossError(
          StrCat("tree ", t, " node ", k, ": feature index out of range"));
    }
    for (const int child : {node.left, node.right}) {
      // Children after their parent rules out cycles.
      if (child <= k || child >= n || !referenced.insert(child).second) {
        return absl::DataLossError(
            StrCat("tree ", t, " node ", k, ": bad child index ", child));
      }
    }
  }
  if (static_cast<int>(referenced.size()) != n - 1) {
    return absl::DataLossError(StrCat("tree ", t, " has unreachable nodes"));
  }
  return absl::OkStatus();
}

}  // namespace

json TrainConfigToJson(const TrainConfig& c) {
  return json{{"n_rounds", c.n_rounds},
              {"max_depth", c.max_depth},
              {"learning_rate", c.learning_rate},
              {"l2_leaf_reg", c.l2_leaf_reg},
              {"min_split_gain", c.min_split_gain},
              {"min_child_weight", c.min_child_weight},
              {"row_subsample", c.row_subsample},
              {"seed", c.seed}};
}

absl::StatusOr<TrainConfig> TrainConfigFromJson(const json& j) {
  if (!j.is_object()) return absl::InvalidArgumentError("train config must be an object");
  TrainConfig c;
  for (const auto& [key, value] : j.items()) {
    const bool integer_key =
        key == "n_rounds" || key == "max_depth" || key == "seed";
    if (integer_key ? !value.is_number_integer() : !value.is_number()) {
      return absl::InvalidArgumentError(
          StrCat("train config '", key, "' has the wrong type"));
    }
    if (key == "n_rounds") {
      c.n_rounds = value.get<int>();
    } else if (key == "max_depth") {
      c.max_depth = value.get<int>();
    } else if (key == "learning_rate") {
      c.learning_rate = value.get<double>();
    } else if (key == "l2_leaf_reg") {
      c.l2_leaf_reg = value.get<double>();
    } else if (key == "min_split_gain") {
      c.min_split_gain = value.get<double>();
    } else if (key == "min_child_weight") {
      c.min_child_weight = value.get<double>();
    } else if (key == "row_subsample") {
      c.row_subsample = value.get<double>();
    } else if (key == "seed") {
      if (value.is_number_unsigned()) {
        c.seed = value.get<uint64_t>();
      } else if (value.get<int64_t>() >= 0) {
        c.seed = static_cast<uint64_t>(value.get<int64_t>());
      } else {
        return absl::InvalidArgumentError("train config 'seed' must be >= 0");
      }
    } else {
      return absl::InvalidArgumentError(StrCat("unknown train config key '", key, "'"));
    }
  }
  RETURN_IF_ERROR(c.Validate());
  return c;
}

std::string WithChecksumFooter(std::string_view document) {
  std::string out(document);
  if (out.empty() || out.back() != '\n') out += '\n';
  const std::string_view body(out);
  return StrCat(out, kFooterPrefix,
                fmt::format("{:08x}", utils::Crc32(body)), "\n");
}

absl::StatusOr<std::string_view> StripChecksumFooter(std::string_view text) {
  if (text.empty() || text.back() != '\n') {
    return absl::DataLossError("missing checksum footer");
  }
  const size_t start = text.rfind('\n', text.size() - 2);
  const size_t footer_begin = start == std::string_view::npos ? 0 : start + 1;
  std::string_view footer = text.substr(footer_begin);
  footer.remove_suffix(1);
  if (!footer.starts_with(kFooterPrefix) ||
      footer.size() != kFooterPrefix.size() + 8) {
    return absl::DataLossError("missing checksum footer");
  }
  const std::string_view body = text.substr(0, footer_begin);
  const std::string expected = fmt::format("{:08x}", utils::Crc32(body));
  if (footer.substr(kFooterPrefix.size()) != expected) {
    return absl::DataLossError("checksum mismatch");
  }
  return body;
}

std::string SerializeModel(const TreeEnsemble& e) {
  json trees = json::array();
  for (const Tree& tree : e.trees) {
    json nodes = json::array();
    for (const TreeNode& node : tree.nodes) nodes.push_back(NodeToJson(node));
    trees.push_back(json{{"nodes", std::move(nodes)}});
  }
  json doc = {{"version", kModelFormatVersion},
              {"schema_fingerprint", e.schema_fingerprint},
              {"num_features", e.num_features},
              {"base_score", e.base_score},
              {"learning_rate", e.learning_rate},
              {"train_config", TrainConfigToJson(e.train_config)},
              {"trees", std::move(trees)}};
  return WithChecksumFooter(doc.dump(1));
}

absl::StatusOr<TreeEnsemble> ParseModel(std::string_view text) {
  ASSIGN_OR_RETURN(std::string_view body, StripChecksumFooter(text));
  json doc = json::parse(body, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    return absl::DataLossError("model file is not valid JSON");
  }
  ASSIGN_OR_RETURN(int64_t version, GetInt(doc, "version", "model"));
  if (version != kModelFormatVersion) {
    return absl::FailedPreconditionError(
        StrCat("unsupported model version ", version, ", expected ",
               kModelFormatVersion));
  }
  TreeEnsemble e;
  ASSIGN_OR_RETURN(e.base_score, GetNumber(doc, "base_score", "model"));
  ASSIGN_OR_RETURN(e.learning_rate, GetNumber(doc, "learning_rate", "model"));
  ASSIGN_OR_RETURN(int64_t num_features, GetInt(doc, "num_features", "model"));
  e.num_features = static_cast<int>(num_features);
  auto fp = doc.find("schema_fingerprint");
  if (fp == doc.end() || !fp->is_string()) {
    return absl::DataLossError("model: missing 'schema_fingerprint'");
  }
  e.schema_fingerprint = fp->get<std::string>();
  if (auto tc = doc.find("train_config"); tc != doc.end()) {
    auto config = TrainConfigFromJson(*tc);
    if (!config.ok()) return absl::DataLossError(config.status().message());
    e.train_config = *config;
  }
  auto trees = doc.find("trees");
  if (trees == doc.end() || !trees->is_array()) {
    return absl::DataLossError("model: missing 'trees'");
  }
  for (size_t t = 0; t < trees->size(); ++t) {
    const json& jt = (*trees)[t];
    if (!jt.is_object() || !jt.contains("nodes") || !jt["nodes"].is_array()) {
      return absl::DataLossError(StrCat("tree ", t, ": missing 'nodes'"));
    }
    Tree tree;
    for (size_t k = 0; k < jt["nodes"].size(); ++k) {
      ASSIGN_OR_RETURN(TreeNode node,
                       NodeFromJson(jt["nodes"][k], StrCat("tree ", t, " node ", k)));
      tree.nodes.push_back(node);
    }
    RETURN_IF_ERROR(ValidateTree(tree, e.num_features, t));
    e.trees.push_back(std::move(tree));
  }
  return e;
}

absl::Status SaveModel(const TreeEnsemble& ensemble, const std::string& path) {
  return utils::WriteFile(path, SerializeModel(ensemble));
}

absl::StatusOr<TreeEnsemble> LoadModel(const std::string& path) {
  ASSIGN_OR_RETURN(std::string text, utils::ReadFile(path));
  auto model = ParseModel(text);
  if (!model.ok()) {
    return absl::Status(model.status().code(),
                        StrCat(path, ": ", model.status().message()));
  }
  return model;
}

}  // namespace strstudio::gbdt
