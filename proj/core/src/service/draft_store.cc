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

#include "strstudio/service/draft_store.h"

#include <chrono>
#include <fstream>

#include "fmt/format.h"
#include "spdlog/spdlog.h"
#include "strstudio/util/files.h"
#include "strstudio/util/status_macros.h"
#include "strstudio/util/strings.h"

namespace strstudio::service {

using nlohmann::json;

std::string_view DraftStatusName(DraftStatus status) {
  switch (status) {
    case DraftStatus::kDocket:
      return "docket";
    case DraftStatus::kSample:
      return "sample";
    case DraftStatus::kOrdered:
      return "ordered";
    case DraftStatus::kRejected:
      return "rejected";
  }
  return "docket";
}

std::optional<DraftStatus> ParseDraftStatus(std::string_view name) {
  for (const auto s : {DraftStatus::kDocket, DraftStatus::kSample,
                       DraftStatus::kOrdered, DraftStatus::kRejected}) {
    if (DraftStatusName(s) == name) return s;
  }
  return std::nullopt;
}

bool IsLegalTransition(DraftStatus from, DraftStatus to) {
  if (from == DraftStatus::kRejected) return false;
  if (to == DraftStatus::kRejected) return true;
  return static_cast<int>(to) > static_cast<int>(from);
}

json DesignDraft::ToJson() const {
  json fb = json::array();
  for (const auto& f : feedback) {
    fb.push_back({{"author", f.author}, {"text", f.text}, {"timestamp", f.timestamp}});
  }
  return {{"draft_id", draft_id},
          {"name", name},
          {"category", category},
          {"attributes", attributes},
          {"images", images},
          {"status", DraftStatusName(status)},
          {"likes", likes},
          {"feedback", std::move(fb)},
          {"created_at", created_at}};
}

std::string DraftStore::SystemClock() {
  const auto now = std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now());
  const auto day = std::chrono::floor<std::chrono::days>(now);
  const std::chrono::year_month_day ymd(day);
  const std::chrono::hh_mm_ss hms(now - day);
  return fmt::format("{:04}-{:02}-{:02}T{:02}:{:02}:{:02}Z", static_cast<int>(ymd.year()),
                     static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                     hms.hours().count(), hms.minutes().count(), hms.seconds().count());
}

absl::StatusOr<std::unique_ptr<DraftStore>> DraftStore::Open(const std::string& log_path,
                                                             Clock clock) {
  if (!clock) clock = &DraftStore::SystemClock;
  std::unique_ptr<DraftStore> store(new DraftStore(log_path, std::move(clock)));
  if (!log_path.empty() && utils::FileExists(log_path)) RETURN_IF_ERROR(store->Replay());
  return store;
}

absl::Status DraftStore::Replay() {
  ASSIGN_OR_RETURN(const std::string text, utils::ReadFile(log_path_));
  size_t pos = 0;
  int line = 0;
  while (pos < text.size()) {
    const size_t end = text.find('\n', pos);
    ++line;
    if (end == std::string::npos) {
      spdlog::warn("{}: ignoring incomplete last line {}", log_path_, line);
      break;
    }
    const std::string_view record(text.data() + pos, end - pos);
    pos = end + 1;
    if (record.empty()) continue;
    const json event = json::parse(record, nullptr, false);
    if (event.is_discarded()) {
      return absl::DataLossError(StrCat(log_path_, ":", line, ": not valid JSON"));
    }
    if (auto s = Apply(event); !s.ok()) {
      return absl::DataLossError(StrCat(log_path_, ":", line, ": ", s.message()));
    }
  }
  return absl::OkStatus();
}

absl::Status DraftStore::Apply(const json& event) {
  const std::string op = event.value("op", "");
  const std::string id = event.value("id", "");
  if (op == "create") {
    DesignDraft d;
    d.draft_id = id;
    d.name = event.value("name", "");
    d.category = event.value("category", "");
    d.attributes = event.value("attributes", json::object());
    d.images = event.value("images", std::vector<std::string>{});
    d.created_at = event.value("timestamp", "");
    if (id.empty() || drafts_.contains(id)) {
      return absl::InvalidArgumentError(StrCat("bad draft id '", id, "'"));
    }
    drafts_[id] = std::move(d);
    int64_t n = 0;
    if (id.size() > 1 && utils::ParseInt(std::string_view(id).substr(1)).ok()) {
      n = *utils::ParseInt(std::string_view(id).substr(1));
    }
    next_id_ = std::max(next_id_, n + 1);
    return absl::OkStatus();
  }
  auto it = drafts_.find(id);
  if (it == drafts_.end()) return absl::NotFoundError(StrCat("unknown draft '", id, "'"));
  DesignDraft& d = it->second;
  if (op == "feedback") {
    d.feedback.push_back(
        {event.value("author", ""), event.value("text", ""), event.value("timestamp", "")});
  } else if (op == "like") {
    ++d.likes;
  } else if (op == "status") {
    const auto status = ParseDraftStatus(event.value("status", ""));
    if (!status) return absl::InvalidArgumentError("bad status");
    if (!IsLegalTransition(d.status, *status)) {
      return absl::FailedPreconditionError(
          StrCat("cannot move draft ", id, " from ", DraftStatusName(d.status), " to ",
                 DraftStatusName(*status)));
    }
    d.status = *status;
  } else {
    return absl::InvalidArgumentError(StrCat("unknown op '", op, "'"));
  }
  return absl::OkStatus();
}

absl::Status DraftStore::Append(const json& event) {
  if (log_path_.empty()) return absl::OkStatus();
  std::ofstream out(log_path_, std::ios::app | std::ios::binary);
  if (!out) return absl::UnavailableError(StrCat("cannot open ", log_path_));
  out << event.dump() << '\n';
  out.flush();
  if (!out) return absl::DataLossError(StrCat("write to ", log_path_, " failed"));
  return absl::OkStatus();
}

absl::StatusOr<DesignDraft> DraftStore::Commit(const json& event, const std::string& id) {
  const auto saved_next = next_id_;
  auto it = drafts_.find(id);
  std::optional<DesignDraft> before;
  if (it != drafts_.end()) before = it->second;
  RETURN_IF_ERROR(Apply(event));
  if (auto s = Append(event); !s.ok()) {
    if (before) {
      drafts_[id] = *before;
    } else {
      drafts_.erase(id);
    }
    next_id_ = saved_next;
    return s;
  }
  return drafts_.at(id);
}

absl::StatusOr<DesignDraft> DraftStore::Create(const NewDraft& draft) {
  if (!draft.attributes.is_object()) {
    return absl::InvalidArgumentError("attributes must be an object");
  }
  std::lock_guard lock(mu_);
  const std::string id = fmt::format("D{:06}", next_id_);
  const json event = {{"op", "create"},         {"id", id},
                      {"name", draft.name},     {"category", draft.category},
                      {"attributes", draft.attributes}, {"images", draft.images},
                      {"timestamp", clock_()}};
  return Commit(event, id);
}

absl::StatusOr<DesignDraft> DraftStore::AddFeedback(const std::string& id,
                                                    const std::string& author,
                                                    const std::string& text) {
  std::lock_guard lock(mu_);
  if (!drafts_.contains(id)) return absl::NotFoundError(StrCat("unknown draft '", id, "'"));
  return Commit({{"op", "feedback"},
                 {"id", id},
                 {"author", author},
                 {"text", text},
                 {"timestamp", clock_()}},
                id);
}

absl::StatusOr<DesignDraft> DraftStore::Like(const std::string& id) {
  std::lock_guard lock(mu_);
  if (!drafts_.contains(id)) return absl::NotFoundError(StrCat("unknown draft '", id, "'"));
  return Commit({{"op", "like"}, {"id", id}}, id);
}

absl::StatusOr<DesignDraft> DraftStore::SetStatus(const std::string& id, DraftStatus status) {
  std::lock_guard lock(mu_);
  if (!drafts_.contains(id)) return absl::NotFoundError(StrCat("unknown draft '", id, "'"));
  return Commit({{"op", "status"}, {"id", id}, {"status", DraftStatusName(status)}}, id);
}

std::optional<DesignDraft> DraftStore::Get(const std::string& id) const {
  std::lock_guard lock(mu_);
  auto it = drafts_.find(id);
  if (it == drafts_.end()) return std::nullopt;
  return it->second;
}

std::vector<DesignDraft> DraftStore::List(std::optional<DraftStatus> status) const {
  std::lock_guard lock(mu_);
  std::vector<DesignDraft> out;
  for (const auto& [id, d] : drafts_) {
    if (!status || d.status == *status) out.push_back(d);
  }
  return out;
}

}  // namespace strstudio::service
