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
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"

#include "moodsense/clock.hpp"
#include "moodsense/sensorsim/signal.hpp"

namespace moodsense::sensorsim {

struct EmotionRegime {
  std::string label;  // Angry | Happy | Sad
  double gsr_mean = 0.0;
  double gsr_std = 1.0;
  double bpm_mean = 60.0;
  double bpm_std = 1.0;

  // Throws RangeError on non-positive stds, bpm_mean outside [30, 240] or an
  // unknown label.
  void Validate() const;
};

// Angry, Happy, Sad in class-index order.
std::array<EmotionRegime, 3> DefaultRegimes();

// One 1 Hz observation, rendered as the flat JSON object
// {"GSR", "BPM", "Mood"?, "Date", "Time", "Participant"}.
struct SensorRecord {
  std::string participant_id;
  double gsr = 0.0;
  double bpm = 0.0;
  std::optional<std::string> mood;
  EpochMs timestamp_ms = 0;

  std::string date() const { return FormatDate(timestamp_ms); }
  std::string time() const { return FormatTime(timestamp_ms); }

  nlohmann::ordered_json ToJson() const;
  // Accepts objects produced by ToJson (numbers may be rounded). Throws
  // ParseError on missing or mistyped fields.
  static SensorRecord FromJson(const nlohmann::ordered_json& j);

  bool operator==(const SensorRecord&) const = default;
};

struct SimulatorOptions {
  GsrCalibration calibration;
  double pulse_sample_rate_hz = 100.0;
  double pulse_noise_std = 10.0;
  int gsr_adc_noise_std = 1;  // counts
  std::int64_t pulse_window_ms = 6000;
  // 12/10/2021 23:23:00 UTC
  EpochMs start_ms = 1639178580000;
};

// Draws records one at a time from a regime through the raw sensor chain:
// target reading -> 12-bit GSR count -> GsrReading, and target rate ->
// synthetic pulse window -> ExtractBpm. Used both for labeled sessions and for
// the live (unlabeled) feed of the inference demo.
class RecordSimulator {
 public:
  RecordSimulator(EmotionRegime regime, std::string participant_id,
                  std::uint64_t seed, SimulatorOptions options = {});

  // Next record at `timestamp_ms`. The mood is attached only when `labeled`.
  SensorRecord Next(EpochMs timestamp_ms, bool labeled);

  const EmotionRegime& regime() const { return regime_; }

 private:
  EmotionRegime regime_;
  std::string participant_id_;
  SimulatorOptions options_;
  std::mt19937_64 rng_;
};

struct SessionResult {
  std::vector<SensorRecord> records;  // post-warmup, labeled
  std::size_t discarded = 0;          // warm-up records marked anomalous
};

// One stimulus session at 1 record/second. duration_s must be in [30, 300]
// and warmup_s < duration_s; otherwise RangeError.
SessionResult SimulateSession(const EmotionRegime& regime,
                              const std::string& participant_id, int duration_s,
                              int warmup_s, std::uint64_t seed,
                              const SimulatorOptions& options = {});

struct CorpusOptions {
  int session_duration_s = 300;
  int warmup_s = 5;
  std::uint64_t seed = 42;
  SimulatorOptions simulator;
};

// per_class labeled records for each regime, built from back-to-back sessions
// and shuffled deterministically by the seed.
std::vector<SensorRecord> GenerateCorpus(const std::array<EmotionRegime, 3>& regimes,
                                         const std::string& participant_id,
                                         int per_class,
                                         const CorpusOptions& options = {});

void WriteNdjson(std::ostream& out, const std::vector<SensorRecord>& records);
// Throws ParseError naming the 1-based line on malformed input.
std::vector<nlohmann::ordered_json> ReadNdjson(std::istream& in);

}  // namespace moodsense::sensorsim
