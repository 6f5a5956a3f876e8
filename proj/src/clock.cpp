/*
 * Copyright 2026 The Moodsense Authors.
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

#include "moodsense/clock.hpp"

#include <cstdio>

namespace moodsense {

CivilTime ToCivil(EpochMs t) {
  using namespace std::chrono;
  const sys_time<milliseconds> tp{milliseconds{t}};
  const auto day_point = floor<days>(tp);
  const year_month_day ymd{day_point};
  const auto since_midnight = tp - day_point;
  const auto ms = since_midnight.count();

  CivilTime c;
  c.year = static_cast<int>(ymd.year());
  c.month = static_cast<int>(static_cast<unsigned>(ymd.month()));
  c.day = static_cast<int>(static_cast<unsigned>(ymd.day()));
  c.hour = static_cast<int>(ms / 3'600'000);
  c.minute = static_cast<int>((ms / 60'000) % 60);
  c.second = static_cast<int>((ms / 1000) % 60);
  c.millis = static_cast<int>(ms % 1000);
  return c;
}

EpochMs FromCivil(const CivilTime& c) {
  using namespace std::chrono;
  const year_month_day ymd{year{c.year}, month{static_cast<unsigned>(c.month)},
                           day{static_cast<unsigned>(c.day)}};
  const sys_days d{ymd};
  const auto ms = duration_cast<milliseconds>(d.time_since_epoch()).count();
  return ms + c.hour * 3'600'000LL + c.minute * 60'000LL + c.second * 1000LL +
         c.millis;
}

std::string FormatDate(EpochMs t) {
  const CivilTime c = ToCivil(t);
  char buf[16];
  std::snprintf(buf, sizeof buf, "%02d/%02d/%04d", c.month, c.day, c.year);
  return buf;
}

std::string FormatTime(EpochMs t) {
  const CivilTime c = ToCivil(t);
  char buf[16];
  std::snprintf(buf, sizeof buf, "%02d:%02d:%02d", c.hour, c.minute, c.second);
  return buf;
}

std::string FormatIso8601(EpochMs t) {
  const CivilTime c = ToCivil(t);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", c.year,
                c.month, c.day, c.hour, c.minute, c.second, c.millis);
  return buf;
}

}  // namespace moodsense
