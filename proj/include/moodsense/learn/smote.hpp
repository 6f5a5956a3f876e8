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

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "moodsense/learn/dataset.hpp"

namespace moodsense::learn {

// Provenance of one synthetic row: x = base + delta * (neighbor - base).
struct SyntheticOrigin {
  std::size_t row = 0;       // index in the balanced output
  std::size_t base = 0;      // index in the input
  std::size_t neighbor = 0;  // index in the input
  double delta = 0.0;        // in [0, 1]
};

struct SmoteResult {
  std::vector<FeatureRow> features;  // input rows first, then synthetics
  std::vector<int> labels;
  std::vector<SyntheticOrigin> synthetic;
  std::vector<std::string> warnings;  // per-class k reductions
};

// Oversamples every present class up to the majority count. Synthetic points
// interpolate between a random member and one of its k nearest same-class
// neighbours (Euclidean, brute force). A class with fewer than k+1 members
// uses k = members-1 and records a warning; a class that needs synthesis but
// has a single member throws CannotSynthesizeError. Balanced input is
// returned unchanged.
SmoteResult SmoteBalance(std::span<const FeatureRow> features,
                         std::span<const int> labels, int k, std::uint64_t seed);

}  // namespace moodsense::learn
