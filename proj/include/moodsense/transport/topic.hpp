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

#include <string>
#include <string_view>
#include <vector>

namespace moodsense::transport {

std::vector<std::string> SplitTopic(std::string_view topic);

// Published topics: non-empty, '/'-separated non-empty segments, no '+'/'#'.
// Throws ParseError otherwise.
void ValidateTopic(std::string_view topic);
bool IsValidTopic(std::string_view topic) noexcept;

// MQTT-style subscription pattern. '+' matches exactly one level, a terminal
// '#' matches zero or more trailing levels. Malformed patterns are rejected
// here so matching itself never fails.
class TopicFilter {
 public:
  static TopicFilter Parse(std::string_view pattern);

  bool Matches(std::string_view topic) const;
  bool Matches(const std::vector<std::string>& topic_segments) const;

  // True iff every topic this filter can match is also matched by `self`.
  bool Covers(const TopicFilter& other) const;

  const std::string& str() const { return pattern_; }
  const std::vector<std::string>& segments() const { return segments_; }

  bool operator==(const TopicFilter& o) const { return pattern_ == o.pattern_; }

 private:
  TopicFilter(std::string pattern, std::vector<std::string> segments)
      : pattern_(std::move(pattern)), segments_(std::move(segments)) {}

  std::string pattern_;
  std::vector<std::string> segments_;
};

inline bool TopicMatches(const TopicFilter& filter, std::string_view topic) {
  return filter.Matches(topic);
}

}  // namespace moodsense::transport
