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

#include "moodsense/inference/recommend.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "moodsense/error.hpp"
#include "moodsense/labels.hpp"

namespace moodsense::inference {

Recommender::Recommender(std::map<std::string, std::string, std::less<>> table)
    : table_(std::move(table)) {
  for (const auto& [label, text] : table_) {
    if (!LabelIndex(label)) {
      throw ConfigError("recommendation for unknown label \"" + label + "\"");
    }
    if (text.empty()) throw ConfigError("empty recommendation for \"" + label + "\"");
  }
  for (const auto& label : kLabelMap) {
    if (!table_.count(label)) {
      throw ConfigError("no recommendation configured for \"" + std::string(label) + "\"");
    }
  }
}

Recommender Recommender::Default() {
  return Recommender({{"Angry", "soothing ambient music, cool soft blue lighting"},
                      {"Happy", "upbeat pop playlist, bright warm lighting"},
                      {"Sad", "calming music, warm dim lighting"}});
}

const std::string& Recommender::Recommend(std::string_view label) const {
  auto it = table_.find(label);
  if (it == table_.end()) {
    throw InputError("no recommendation for label \"" + std::string(label) + "\"");
  }
  return it->second;
}

LatencyStats ComputeLatencyStats(std::span<const double> elapsed_ms) {
  if (elapsed_ms.empty()) throw InputError("latency stats need at least one session");
  std::vector<double> v(elapsed_ms.begin(), elapsed_ms.end());
  std::sort(v.begin(), v.end());
  auto percentile = [&](double q) {
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
  };
  LatencyStats s;
  s.count = v.size();
  s.mean_ms = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  s.p50_ms = percentile(0.50);
  s.p95_ms = percentile(0.95);
  return s;
}

}  // namespace moodsense::inference
