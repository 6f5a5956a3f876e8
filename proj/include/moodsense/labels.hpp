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

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace moodsense {

inline constexpr int kNumClasses = 3;

// Class index <-> label mapping shared by the simulator, the learner and the
// inference path. The order is fixed: 0 Angry, 1 Happy, 2 Sad.
inline constexpr std::array<std::string_view, kNumClasses> kLabelMap = {
    "Angry", "Happy", "Sad"};

inline std::optional<int> LabelIndex(std::string_view label) {
  for (int i = 0; i < kNumClasses; ++i) {
    if (kLabelMap[i] == label) return i;
  }
  return std::nullopt;
}

inline std::string LabelName(int index) {
  return std::string(kLabelMap.at(static_cast<std::size_t>(index)));
}

}  // namespace moodsense
