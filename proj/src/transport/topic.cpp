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

#include "moodsense/transport/topic.hpp"

#include "moodsense/error.hpp"

namespace moodsense::transport {

std::vector<std::string> SplitTopic(std::string_view topic) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto slash = topic.find('/', start);
    if (slash == std::string_view::npos) {
      out.emplace_back(topic.substr(start));
      return out;
    }
    out.emplace_back(topic.substr(start, slash - start));
    start = slash + 1;
  }
}

bool IsValidTopic(std::string_view topic) noexcept {
  if (topic.empty()) return false;
  if (topic.find_first_of("+#") != std::string_view::npos) return false;
  if (topic.front() == '/' || topic.back() == '/') return false;
  return topic.find("//") == std::string_view::npos;
}

void ValidateTopic(std::string_view topic) {
  if (!IsValidTopic(topic)) {
    throw ParseError("invalid topic \"" + std::string(topic) + "\"");
  }
}

TopicFilter TopicFilter::Parse(std::string_view pattern) {
  if (pattern.empty()) throw ParseError("empty topic filter");
  auto segments = SplitTopic(pattern);
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const std::string& s = segments[i];
    if (s.empty()) {
      throw ParseError("empty segment in filter \"" + std::string(pattern) + "\"");
    }
    const bool wildcard = s == "+" || s == "#";
    if (!wildcard && s.find_first_of("+#") != std::string::npos) {
      throw ParseError("wildcard must occupy a whole segment in \"" +
                       std::string(pattern) + "\"");
    }
    if (s == "#" && i + 1 != segments.size()) {
      throw ParseError("'#' must be the last segment in \"" +
                       std::string(pattern) + "\"");
    }
  }
  return TopicFilter(std::string(pattern), std::move(segments));
}

bool TopicFilter::Matches(std::string_view topic) const {
  if (!IsValidTopic(topic)) return false;
  return Matches(SplitTopic(topic));
}

bool TopicFilter::Matches(const std::vector<std::string>& topic) const {
  std::size_t i = 0;
  for (; i < segments_.size(); ++i) {
    if (segments_[i] == "#") return true;
    if (i >= topic.size()) return false;
    if (segments_[i] != "+" && segments_[i] != topic[i]) return false;
  }
  return i == topic.size();
}

bool TopicFilter::Covers(const TopicFilter& other) const {
  const auto& mine = segments_;
  const auto& theirs = other.segments_;
  for (std::size_t i = 0; i < mine.size(); ++i) {
    if (mine[i] == "#") return true;
    if (i >= theirs.size()) return false;
    if (theirs[i] == "#") return false;
    if (mine[i] == "+") continue;
    if (theirs[i] == "+" || theirs[i] != mine[i]) return false;
  }
  return mine.size() == theirs.size();
}

}  // namespace moodsense::transport
