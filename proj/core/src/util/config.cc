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

#include "strstudio/util/config.h"

#include <cctype>
#include <vector>

#include "strstudio/util/files.h"
#include "strstudio/util/status_macros.h"
#include "strstudio/util/strings.h"

namespace strstudio::utils {
namespace {

std::string_view Trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> Split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  size_t start = 0;
  while (true) {
    const size_t end = s.find(sep, start);
    out.push_back(s.substr(start, end == std::string_view::npos ? end : end - start));
    if (end == std::string_view::npos) return out;
    start = end + 1;
  }
}

bool IsBareKey(std::string_view key) {
  if (key.empty()) return false;
  for (const char c : key) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-') return false;
  }
  return true;
}

// Drops a trailing comment that is not inside a string.
std::string_view StripComment(std::string_view line) {
  bool in_string = false;
  for (size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"' && (i == 0 || line[i - 1] != '\\')) in_string = !in_string;
    if (line[i] == '#' && !in_string) return line.substr(0, i);
  }
  return line;
}

class ValueParser {
 public:
  explicit ValueParser(std::string_view text) : text_(text) {}

  absl::StatusOr<nlohmann::json> ParseAll() {
    ASSIGN_OR_RETURN(nlohmann::json value, Parse());
    SkipSpace();
    if (pos_ != text_.size()) return Error("trailing characters");
    return value;
  }

 private:
  absl::Status Error(std::string_view what) const {
    return absl::InvalidArgumentError(StrCat(what, " at column ", pos_ + 1));
  }

  void SkipSpace() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  absl::StatusOr<nlohmann::json> Parse() {
    SkipSpace();
    if (pos_ >= text_.size()) return Error("missing value");
    const char c = text_[pos_];
    if (c == '"') return ParseString();
    if (c == '[') return ParseArray();
    size_t end = pos_;
    while (end < text_.size() && text_[end] != ',' && text_[end] != ']' &&
           !std::isspace(static_cast<unsigned char>(text_[end]))) {
      ++end;
    }
    std::string token(text_.substr(pos_, end - pos_));
    pos_ = end;
    if (token == "true") return nlohmann::json(true);
    if (token == "false") return nlohmann::json(false);
    std::erase(token, '_');
    if (token.find_first_of(".eE") == std::string::npos ||
        token.starts_with("0x")) {
      if (auto i = ParseInt(token); i.ok()) return nlohmann::json(*i);
    }
    if (auto d = ParseDouble(token); d.ok()) return nlohmann::json(*d);
    return Error(StrCat("unrecognized value '", token, "'"));
  }

  absl::StatusOr<nlohmann::json> ParseString() {
    ++pos_;
    std::string out;
    while (pos_ < text_.size() && text_[pos_] != '"') {
      char c = text_[pos_++];
      if (c == '\\') {
        if (pos_ >= text_.size()) break;
        const char e = text_[pos_++];
        switch (e) {
          case 'n': c = '\n'; break;
          case 't': c = '\t'; break;
          case '"': c = '"'; break;
          case '\\': c = '\\'; break;
          default: return Error(StrCat("unsupported escape '\\", std::string(1, e), "'"));
        }
      }
      out += c;
    }
    if (pos_ >= text_.size()) return Error("unterminated string");
    ++pos_;
    return nlohmann::json(out);
  }

  absl::StatusOr<nlohmann::json> ParseArray() {
    ++pos_;
    nlohmann::json out = nlohmann::json::array();
    SkipSpace();
    if (pos_ < text_.size() && text_[pos_] == ']') {
      ++pos_;
      return out;
    }
    while (true) {
      ASSIGN_OR_RETURN(nlohmann::json item, Parse());
      out.push_back(std::move(item));
      SkipSpace();
      if (pos_ >= text_.size()) return Error("unterminated array");
      if (text_[pos_] == ']') {
        ++pos_;
        return out;
      }
      if (text_[pos_] != ',') return Error("expected ',' or ']'");
      ++pos_;
      SkipSpace();
      if (pos_ < text_.size() && text_[pos_] == ']') {
        ++pos_;
        return out;
      }
    }
  }

  std::string_view text_;
  size_t pos_ = 0;
};

}  // namespace

absl::StatusOr<nlohmann::json> ParseToml(std::string_view text) {
  nlohmann::json root = nlohmann::json::object();
  nlohmann::json* table = &root;
  int line_number = 0;
  for (std::string_view raw : Split(text, '\n')) {
    ++line_number;
    const std::string_view line = Trim(StripComment(raw));
    if (line.empty()) continue;
    auto fail = [&](std::string_view what) {
      return absl::InvalidArgumentError(StrCat("line ", line_number, ": ", what));
    };
    if (line.front() == '[') {
      if (line.back() != ']' || line.starts_with("[[")) return fail("malformed table header");
      table = &root;
      for (std::string_view part : Split(line.substr(1, line.size() - 2), '.')) {
        part = Trim(part);
        if (!IsBareKey(part)) return fail(StrCat("invalid table name '", part, "'"));
        nlohmann::json& next = (*table)[std::string(part)];
        if (next.is_null()) next = nlohmann::json::object();
        if (!next.is_object()) return fail(StrCat("'", part, "' is not a table"));
        table = &next;
      }
      continue;
    }
    const size_t eq = line.find('=');
    if (eq == std::string_view::npos) return fail("expected key = value");
    const std::string key(Trim(line.substr(0, eq)));
    if (!IsBareKey(key)) return fail(StrCat("invalid key '", key, "'"));
    if (table->contains(key)) return fail(StrCat("duplicate key '", key, "'"));
    auto value = ValueParser(line.substr(eq + 1)).ParseAll();
    if (!value.ok()) return fail(StatusMessage(value.status()));
    (*table)[key] = *std::move(value);
  }
  return root;
}

absl::StatusOr<nlohmann::json> LoadConfigFile(const std::string& path) {
  ASSIGN_OR_RETURN(const std::string text, ReadFile(path));
  const std::string_view body = Trim(text);
  absl::StatusOr<nlohmann::json> parsed;
  if (path.ends_with(".json") || body.starts_with('{')) {
    auto json = nlohmann::json::parse(text, nullptr, false);
    if (json.is_discarded()) return absl::InvalidArgumentError(StrCat(path, ": not valid JSON"));
    parsed = std::move(json);
  } else {
    parsed = ParseToml(text);
  }
  if (!parsed.ok()) return absl::InvalidArgumentError(StrCat(path, ": ", StatusMessage(parsed.status())));
  if (!parsed->is_object()) return absl::InvalidArgumentError(StrCat(path, ": top level must be a table"));
  return parsed;
}

}  // namespace strstudio::utils
