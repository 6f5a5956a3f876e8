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

#include "moodsense/learn/smote.hpp"

#include <algorithm>
#include <map>
#include <random>

#include <spdlog/spdlog.h>

#include "moodsense/error.hpp"

namespace moodsense::learn {
namespace {

double SquaredDistance(const FeatureRow& a, const FeatureRow& b) {
  double d = 0.0;
  for (int f = 0; f < kNumFeatures; ++f) d += (a[f] - b[f]) * (a[f] - b[f]);
  return d;
}

// Indices (into `features`) of the k nearest members to `self`, self excluded.
std::vector<std::size_t> NearestNeighbours(std::span<const FeatureRow> features,
                                           const std::vector<std::size_t>& members,
                                           std::size_t self, std::size_t k) {
  std::vector<std::pair<double, std::size_t>> d;
  d.reserve(members.size());
  for (auto m : members) {
    if (m != self) d.emplace_back(SquaredDistance(features[self], features[m]), m);
  }
  k = std::min(k, d.size());
  std::partial_sort(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(k), d.end());
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < k; ++i) out.push_back(d[i].second);
  return out;
}

}  // namespace

SmoteResult SmoteBalance(std::span<const FeatureRow> features,
                         std::span<const int> labels, int k, std::uint64_t seed) {
  if (features.size() != labels.size()) {
    throw InputError("features and labels differ in length");
  }
  if (k < 1) throw RangeError("SMOTE k must be >= 1");

  std::map<int, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < labels.size(); ++i) members[labels[i]].push_back(i);

  SmoteResult out;
  out.features.assign(features.begin(), features.end());
  out.labels.assign(labels.begin(), labels.end());

  std::size_t majority = 0;
  for (const auto& [label, idx] : members) majority = std::max(majority, idx.size());

  std::mt19937_64 rng(seed);
  for (const auto& [label, idx] : members) {
    const std::size_t needed = majority - idx.size();
    if (needed == 0) continue;
    if (idx.size() < 2) {
      throw CannotSynthesizeError(label, "needs at least 2 members to interpolate");
    }
    std::size_t k_eff = static_cast<std::size_t>(k);
    if (idx.size() < k_eff + 1) {
      k_eff = idx.size() - 1;
      out.warnings.push_back("class " + std::to_string(label) + ": k reduced to " +
                             std::to_string(k_eff));
      spdlog::warn("smote: {}", out.warnings.back());
    }

    std::map<std::size_t, std::vector<std::size_t>> knn_cache;
    std::uniform_int_distribution<std::size_t> pick_base(0, idx.size() - 1);
    std::uniform_int_distribution<std::size_t> pick_nn(0, k_eff - 1);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::size_t s = 0; s < needed; ++s) {
      const std::size_t base = idx[pick_base(rng)];
      auto it = knn_cache.find(base);
      if (it == knn_cache.end()) {
        it = knn_cache.emplace(base, NearestNeighbours(features, idx, base, k_eff)).first;
      }
      const std::size_t nn = it->second[pick_nn(rng)];
      const double delta = unit(rng);
      FeatureRow x;
      for (int f = 0; f < kNumFeatures; ++f) {
        x[f] = features[base][f] + delta * (features[nn][f] - features[base][f]);
      }
      out.synthetic.push_back({out.features.size(), base, nn, delta});
      out.features.push_back(x);
      out.labels.push_back(label);
    }
  }
  return out;
}

}  // namespace moodsense::learn
