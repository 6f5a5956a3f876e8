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

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace moodsense::inference {

// label -> music/lighting suggestion. The table must name exactly the three
// labels; anything else is rejected when the table is built.
class Recommender {
 public:
  explicit Recommender(std::map<std::string, std::string, std::less<>> table);

  static Recommender Default();

  // Throws InputError for a label outside the label map.
  const std::string& Recommend(std::string_view label) const;
  const std::map<std::string, std::string, std::less<>>& table() const { return table_; }

 private:
  std::map<std::string, std::string, std::less<>> table_;
};

struct LatencyStats {
  double mean_ms = 0.0;
  double p50_ms = 0.0;
  double p95_ms = 0.0;
  std::size_t count = 0;
};

// Percentiles interpolate linearly between order statistics. Throws
// InputError for an empty input.
LatencyStats ComputeLatencyStats(std::span<const double> elapsed_ms);

}  // namespace moodsense::inference
