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

#ifndef STRSTUDIO_SERVICE_DRAFT_STORE_H_
#define STRSTUDIO_SERVICE_DRAFT_STORE_H_

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "nlohmann/json.hpp"

namespace strstudio::service {

enum class DraftStatus { kDocket, kSample, kOrdered, kRejected };

std::string_view DraftStatusName(DraftStatus status);
std::optional<DraftStatus> ParseDraftStatus(std::string_view name);
// Forward along docket -> sample -> ordered, or to rejected from any status
// other than rejected.
bool IsLegalTransition(DraftStatus from, DraftStatus to);

struct DraftFeedback {
  std::string author;
  std::string text;
  std::string timestamp;
};

struct DesignDraft {
  std::string draft_id;
  std::string name;
  std::string category;
  nlohmann::json attributes = nlohmann::json::object();  // Raw labels.
  std::vector<std::string> images;  // Opaque references.
  DraftStatus status = DraftStatus::kDocket;
  int64_t likes = 0;
  std::vector<DraftFeedback> feedback;
  std::string created_at;

  nlohmann::json ToJson() const;
};

struct NewDraft {
  std::string name;
  std::string category;
  nlohmann::json attributes = nlohmann::json::object();
  std::vector<std::string> images;
};

// Design drafts backed by an append-only JSON-lines log. Every mutation is
// appended and flushed before it is applied in memory; opening the store
// replays the log. Writers are serialized; readers get copies.
class DraftStore {
 public:
  using Clock = std::function<std::string()>;

  // An empty path keeps the store in memory only.
  static absl::StatusOr<std::unique_ptr<DraftStore>> Open(
      const std::string& log_path, Clock clock = nullptr);

  absl::StatusOr<DesignDraft> Create(const NewDraft& draft);
  absl::StatusOr<DesignDraft> AddFeedback(const std::string& id,
                                          const std::string& author,
                                          const std::string& text);
  absl::StatusOr<DesignDraft> Like(const std::string& id);
  // FAILED_PRECONDITION on an illegal transition.
  absl::StatusOr<DesignDraft> SetStatus(const std::string& id,
                                        DraftStatus status);

  std::optional<DesignDraft> Get(const std::string& id) const;
  // Ordered by draft id.
  std::vector<DesignDraft> List(
      std::optional<DraftStatus> status = std::nullopt) const;

  // UTC "YYYY-MM-DDTHH:MM:SSZ".
  static std::string SystemClock();

 private:
  DraftStore(std::string log_path, Clock clock)
      : log_path_(std::move(log_path)), clock_(std::move(clock)) {}

  absl::Status Replay();
  absl::Status Apply(const nlohmann::json& event);
  absl::Status Append(const nlohmann::json& event);
  absl::StatusOr<DesignDraft> Commit(const nlohmann::json& event,
                                     const std::string& id);

  std::string log_path_;
  Clock clock_;
  mutable std::mutex mu_;
  std::map<std::string, DesignDraft> drafts_;
  int64_t next_id_ = 1;
};

}  // namespace strstudio::service

#endif  // STRSTUDIO_SERVICE_DRAFT_STORE_H_
