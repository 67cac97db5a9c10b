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

#ifndef STRSTUDIO_CATALOG_CALENDAR_H_
#define STRSTUDIO_CATALOG_CALENDAR_H_

#include <chrono>
#include <cstdint>
#include <string>
#include <string_view>

#include "absl/status/statusor.h"

namespace strstudio::catalog {

using Date = std::chrono::sys_days;

// Parses a YYYY-MM-DD calendar day.
absl::StatusOr<Date> ParseIsoDate(std::string_view text);
std::string FormatIsoDate(Date date);

struct IsoWeek {
  int year = 0;
  int week = 0;  // 1..53
};

IsoWeek ToIsoWeek(Date date);

// Monday of ISO week `week` of `iso_year`. Weeks past the end of the year
// continue into the next one, so week 53 of a 52-week year is week 1 of the
// following year.
Date IsoWeekMonday(int iso_year, int week);

// Index of the Monday-based week containing `date`, counted from the week of
// 1970-01-01. Consecutive weeks have consecutive ordinals.
int64_t WeekOrdinal(Date date);

// Resolves launch-week indices (1..53) of a single selling season onto
// absolute week ordinals.
class SeasonCalendar {
 public:
  explicit SeasonCalendar(int season_year) : season_year_(season_year) {}

  int season_year() const { return season_year_; }

  int64_t LaunchOrdinal(int launch_week) const {
    return WeekOrdinal(IsoWeekMonday(season_year_, launch_week));
  }

 private:
  int season_year_;
};

}  // namespace strstudio::catalog

#endif  // STRSTUDIO_CATALOG_CALENDAR_H_
