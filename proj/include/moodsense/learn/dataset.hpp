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
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "moodsense/etl/object_store.hpp"

namespace moodsense::learn {

inline constexpr int kNumFeatures = 2;  // (gsr reading, bpm)
using FeatureRow = std::array<double, kNumFeatures>;

struct Dataset {
  std::string participant_id;
  std::vector<FeatureRow> features;
  std::vector<int> labels;  // class indices, see kLabelMap
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
  std::size_t skipped_unlabeled = 0;

  std::vector<FeatureRow> TrainFeatures() const;
  std::vector<int> TrainLabels() const;
  std::vector<FeatureRow> TestFeatures() const;
  std::vector<int> TestLabels() const;
};

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

// Per-class shuffle, then round(test_fraction * class_count) rows of each
// class go to test. Both index lists come back sorted.
Split StratifiedSplit(std::span<const int> labels, double test_fraction,
                      std::uint64_t seed);

// Rows with GSR/BPM numbers and a known Mood become samples; rows missing any
// of them are counted in skipped_unlabeled. Throws EmptyDatasetError when no
// labeled row remains.
Dataset DatasetFromRows(const std::string& participant_id,
                        std::span<const nlohmann::ordered_json> rows,
                        double test_fraction, std::uint64_t seed);

// Loads every stored ERB object of the participant's stream, keeps rows whose
// Participant field (when present) matches, then splits.
Dataset AssembleDataset(const etl::ObjectStore& store, std::string_view bucket,
                        const std::string& participant_id, double test_fraction,
                        std::uint64_t seed);

}  // namespace moodsense::learn
