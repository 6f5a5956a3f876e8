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

#include "moodsense/learn/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <spdlog/spdlog.h>

#include "moodsense/error.hpp"
#include "moodsense/etl/firehose.hpp"
#include "moodsense/labels.hpp"

namespace moodsense::learn {
namespace {

template <typename T>
std::vector<T> Gather(const std::vector<T>& v, const std::vector<std::size_t>& idx) {
  std::vector<T> out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(v[i]);
  return out;
}

}  // namespace

std::vector<FeatureRow> Dataset::TrainFeatures() const { return Gather(features, train); }
std::vector<int> Dataset::TrainLabels() const { return Gather(labels, train); }
std::vector<FeatureRow> Dataset::TestFeatures() const { return Gather(features, test); }
std::vector<int> Dataset::TestLabels() const { return Gather(labels, test); }

Split StratifiedSplit(std::span<const int> labels, double test_fraction,
                      std::uint64_t seed) {
  if (!(test_fraction >= 0.0 && test_fraction < 1.0)) {
    throw RangeError("test_fraction must be in [0, 1)");
  }
  std::mt19937_64 rng(seed);
  Split split;
  for (int c = 0; c < kNumClasses; ++c) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] == c) members.push_back(i);
    }
    std::shuffle(members.begin(), members.end(), rng);
    const auto n_test = static_cast<std::size_t>(
        std::llround(test_fraction * static_cast<double>(members.size())));
    split.test.insert(split.test.end(), members.begin(), members.begin() + n_test);
    split.train.insert(split.train.end(), members.begin() + n_test, members.end());
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
  if (test_fraction == 0.0) spdlog::warn("test_fraction is 0: empty test set");
  return split;
}

Dataset DatasetFromRows(const std::string& participant_id,
                        std::span<const nlohmann::ordered_json> rows,
                        double test_fraction, std::uint64_t seed) {
  Dataset ds;
  ds.participant_id = participant_id;
  for (const auto& row : rows) {
    auto gsr = row.find("GSR");
    auto bpm = row.find("BPM");
    auto mood = row.find("Mood");
    const bool usable = gsr != row.end() && gsr->is_number() && bpm != row.end() &&
                        bpm->is_number() && mood != row.end() && mood->is_string();
    const auto label = usable ? LabelIndex(mood->get<std::string>()) : std::nullopt;
    if (!label || !std::isfinite(gsr->get<double>()) || !std::isfinite(bpm->get<double>())) {
      ++ds.skipped_unlabeled;
      continue;
    }
    ds.features.push_back({gsr->get<double>(), bpm->get<double>()});
    ds.labels.push_back(*label);
  }
  if (ds.skipped_unlabeled > 0) {
    spdlog::warn("dataset {}: skipped {} unlabeled rows", participant_id,
                 ds.skipped_unlabeled);
  }
  if (ds.features.empty()) {
    throw EmptyDatasetError("no labeled rows for participant \"" + participant_id + "\"");
  }
  auto split = StratifiedSplit(ds.labels, test_fraction, seed);
  ds.train = std::move(split.train);
  ds.test = std::move(split.test);
  return ds;
}

Dataset AssembleDataset(const etl::ObjectStore& store, std::string_view bucket,
                        const std::string& participant_id, double test_fraction,
                        std::uint64_t seed) {
  const auto stream = etl::StreamNameFor(participant_id);
  std::vector<nlohmann::ordered_json> rows;
  for (auto& row : etl::ReadStream(store, bucket, stream)) {
    auto p = row.find("Participant");
    if (p != row.end() && p->is_string() && p->get<std::string>() != participant_id) {
      continue;
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) {
    throw EmptyDatasetError("no stored batches for participant \"" + participant_id + "\"");
  }
  return DatasetFromRows(participant_id, rows, test_fraction, seed);
}

}  // namespace moodsense::learn
