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

#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <string>

namespace moodsense {

using EpochMs = std::int64_t;

// Injectable wall clock. Components that flush or time out take one so tests
// can advance time without sleeping.
using ClockFn = std::function<EpochMs()>;

inline EpochMs NowMs() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

inline ClockFn SystemClock() { return [] { return NowMs(); }; }

struct CivilTime {
  int year = 1970;
  int month = 1;
  int day = 1;
  int hour = 0;
  int minute = 0;
  int second = 0;
  int millis = 0;
};

// UTC breakdown of an epoch-millisecond timestamp.
CivilTime ToCivil(EpochMs t);
EpochMs FromCivil(const CivilTime& c);

// "MM/DD/YYYY" and "HH:MM:SS", the record timestamp rendering.
std::string FormatDate(EpochMs t);
std::string FormatTime(EpochMs t);
// "YYYY-MM-DDTHH:MM:SS.mmmZ"
std::string FormatIso8601(EpochMs t);

}  // namespace moodsense
