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

#include "strstudio/catalog/calendar.h"

#include "strstudio/util/strings.h"

namespace strstudio::catalog {

using std::chrono::days;
using std::chrono::year_month_day;

absl::StatusOr<Date> ParseIsoDate(std::string_view text) {
  auto bad = [&] {
    return absl::InvalidArgumentError(
        StrCat("invalid ISO-8601 date '", text, "'"));
  };
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return bad();
  int parts[3] = {0, 0, 0};
  const size_t starts[3] = {0, 5, 8};
  const size_t lengths[3] = {4, 2, 2};
  for (int p = 0; p < 3; ++p) {
    for (size_t i = starts[p]; i < starts[p] + lengths[p]; ++i) {
      if (text[i] < '0' || text[i] > '9') return bad();
      parts[p] = parts[p] * 10 + (text[i] - '0');
    }
  }
  const year_month_day ymd{std::chrono::year(parts[0]),
                           std::chrono::month(static_cast<unsigned>(parts[1])),
                           std::chrono::day(static_cast<unsigned>(parts[2]))};
  if (!ymd.ok()) return bad();
  return Date(ymd);
}

std::string FormatIsoDate(Date date) {
  const year_month_day ymd(date);
  return fmt::format("{:04d}-{:02d}-{:02d}", static_cast<int>(ymd.year()),
                         static_cast<unsigned>(ymd.month()),
                         static_cast<unsigned>(ymd.day()));
}

namespace {

// ISO weekday, Monday = 1 .. Sunday = 7.
unsigned IsoWeekday(Date date) {
  return std::chrono::weekday(date).iso_encoding();
}

Date Week1Monday(int iso_year) {
  const Date jan4 = Date(year_month_day{std::chrono::year(iso_year),
                                        std::chrono::January,
                                        std::chrono::day(4)});
  return jan4 - days(IsoWeekday(jan4) - 1);
}

}  // namespace

IsoWeek ToIsoWeek(Date date) {
  const Date thursday = date + days(4 - static_cast<int>(IsoWeekday(date)));
  const int iso_year = static_cast<int>(year_month_day(thursday).year());
  const auto offset = (date - Week1Monday(iso_year)).count();
  return IsoWeek{iso_year, static_cast<int>(offset / 7) + 1};
}

Date IsoWeekMonday(int iso_year, int week) {
  return Week1Monday(iso_year) + days(7 * (week - 1));
}

int64_t WeekOrdinal(Date date) {
  // 1970-01-01 is a Thursday; the Monday of its week is three days earlier.
  const int64_t shifted = date.time_since_epoch().count() + 3;
  return shifted >= 0 ? shifted / 7 : -((-shifted + 6) / 7);
}

}  // namespace strstudio::catalog
