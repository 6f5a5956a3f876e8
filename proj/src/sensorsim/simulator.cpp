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

#include "moodsense/sensorsim/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>

#include "moodsense/error.hpp"
#include "moodsense/labels.hpp"

namespace moodsense::sensorsim {
namespace {

using Json = nlohmann::ordered_json;

EpochMs ParseTimestamp(const std::string& date, const std::string& time) {
  CivilTime c;
  char tail = 0;
  if (std::sscanf(date.c_str(), "%2d/%2d/%4d%c", &c.month, &c.day, &c.year,
                  &tail) != 3 ||
      std::sscanf(time.c_str(), "%2d:%2d:%2d%c", &c.hour, &c.minute, &c.second,
                  &tail) != 3) {
    throw ParseError("bad Date/Time \"" + date + " " + time + "\"");
  }
  if (c.month < 1 || c.month > 12 || c.day < 1 || c.day > 31 || c.hour > 23 ||
      c.minute > 59 || c.second > 60) {
    throw ParseError("Date/Time out of range \"" + date + " " + time + "\"");
  }
  return FromCivil(c);
}

}  // namespace

void EmotionRegime::Validate() const {
  if (!LabelIndex(label)) {
    throw RangeError("unknown regime label \"" + label + "\"");
  }
  if (!(gsr_std > 0.0) || !(bpm_std > 0.0)) {
    throw RangeError("regime " + label + ": standard deviations must be > 0");
  }
  if (!(bpm_mean >= kMinBpm && bpm_mean <= kMaxBpm)) {
    throw RangeError("regime " + label + ": bpm_mean outside [30, 240]");
  }
}

std::array<EmotionRegime, 3> DefaultRegimes() {
  return {EmotionRegime{"Angry", 2700.0, 150.0, 110.0, 6.0},
          EmotionRegime{"Happy", 1400.0, 150.0, 85.0, 6.0},
          EmotionRegime{"Sad", 2000.0, 150.0, 72.0, 6.0}};
}

Json SensorRecord::ToJson() const {
  Json j;
  j["GSR"] = gsr;
  j["BPM"] = bpm;
  if (mood) j["Mood"] = *mood;
  j["Date"] = date();
  j["Time"] = time();
  j["Participant"] = participant_id;
  return j;
}

SensorRecord SensorRecord::FromJson(const Json& j) {
  if (!j.is_object()) throw ParseError("record is not a JSON object");
  auto number = [&](const char* key) {
    auto it = j.find(key);
    if (it == j.end() || !it->is_number()) {
      throw ParseError(std::string("record field \"") + key +
                       "\" missing or not a number");
    }
    return it->get<double>();
  };
  auto string = [&](const char* key) {
    auto it = j.find(key);
    if (it == j.end() || !it->is_string()) {
      throw ParseError(std::string("record field \"") + key +
                       "\" missing or not a string");
    }
    return it->get<std::string>();
  };

  SensorRecord r;
  r.gsr = number("GSR");
  r.bpm = number("BPM");
  if (auto it = j.find("Mood"); it != j.end() && !it->is_null()) {
    r.mood = string("Mood");
  }
  r.timestamp_ms = ParseTimestamp(string("Date"), string("Time"));
  if (auto it = j.find("Participant"); it != j.end() && it->is_string()) {
    r.participant_id = it->get<std::string>();
  }
  return r;
}

RecordSimulator::RecordSimulator(EmotionRegime regime, std::string participant_id,
                                 std::uint64_t seed, SimulatorOptions options)
    : regime_(std::move(regime)),
      participant_id_(std::move(participant_id)),
      options_(std::move(options)),
      rng_(seed) {
  regime_.Validate();
}

SensorRecord RecordSimulator::Next(EpochMs timestamp_ms, bool labeled) {
  const GsrCalibration& cal = options_.calibration;

  std::normal_distribution<double> gsr_dist(regime_.gsr_mean, regime_.gsr_std);
  const double target_gsr =
      std::clamp(gsr_dist(rng_), cal.reading_min, cal.reading_max);
  int adc = GsrAdcForReading(target_gsr, cal);
  if (options_.gsr_adc_noise_std > 0) {
    std::normal_distribution<double> adc_noise(0.0, options_.gsr_adc_noise_std);
    adc = std::clamp(adc + static_cast<int>(std::lround(adc_noise(rng_))), 0,
                     kAdcMax);
  }

  std::normal_distribution<double> bpm_dist(regime_.bpm_mean, regime_.bpm_std);
  const double target_bpm = std::clamp(bpm_dist(rng_), kMinBpm + 2.0, kMaxBpm - 10.0);
  const double period_ms = 60000.0 / target_bpm;
  const auto window_ms = std::max<std::int64_t>(
      options_.pulse_window_ms, static_cast<std::int64_t>(std::ceil(4.0 * period_ms)));
  const auto wave = GeneratePulseWave(target_bpm, window_ms,
                                      options_.pulse_sample_rate_hz,
                                      options_.pulse_noise_std, rng_());

  SensorRecord r;
  r.participant_id = participant_id_;
  r.gsr = GsrReading(GsrSample{timestamp_ms, adc}, cal);
  r.bpm = ExtractBpm(wave);
  if (labeled) r.mood = regime_.label;
  r.timestamp_ms = timestamp_ms;
  return r;
}

SessionResult SimulateSession(const EmotionRegime& regime,
                              const std::string& participant_id, int duration_s,
                              int warmup_s, std::uint64_t seed,
                              const SimulatorOptions& options) {
  if (duration_s < 30 || duration_s > 300) {
    throw RangeError("session duration " + std::to_string(duration_s) +
                     " s outside [30, 300]");
  }
  if (warmup_s < 0 || warmup_s >= duration_s) {
    throw RangeError("warmup must be in [0, duration)");
  }
  RecordSimulator sim(regime, participant_id, seed, options);
  SessionResult result;
  result.records.reserve(static_cast<std::size_t>(duration_s - warmup_s));
  for (int i = 0; i < duration_s; ++i) {
    SensorRecord r = sim.Next(options.start_ms + EpochMs{i} * 1000, true);
    if (i < warmup_s) {
      ++result.discarded;
      continue;
    }
    result.records.push_back(std::move(r));
  }
  return result;
}

std::vector<SensorRecord> GenerateCorpus(const std::array<EmotionRegime, 3>& regimes,
                                         const std::string& participant_id,
                                         int per_class,
                                         const CorpusOptions& options) {
  if (per_class < 1) throw RangeError("per_class must be >= 1");

  std::vector<SensorRecord> corpus;
  corpus.reserve(static_cast<std::size_t>(per_class) * regimes.size());
  EpochMs cursor = options.simulator.start_ms;
  const EpochMs gap_ms = 60'000;

  for (std::size_t c = 0; c < regimes.size(); ++c) {
    int produced = 0;
    for (std::uint64_t session = 0; produced < per_class; ++session) {
      std::seed_seq seq{options.seed, std::uint64_t{c}, session};
      std::array<std::uint32_t, 2> words{};
      seq.generate(words.begin(), words.end());
      const std::uint64_t session_seed =
          (std::uint64_t{words[0]} << 32) | words[1];

      SimulatorOptions sim = options.simulator;
      sim.start_ms = cursor;
      auto result = SimulateSession(regimes[c], participant_id,
                                    options.session_duration_s, options.warmup_s,
                                    session_seed, sim);
      cursor += EpochMs{options.session_duration_s} * 1000 + gap_ms;
      for (auto& r : result.records) {
        if (produced == per_class) break;
        corpus.push_back(std::move(r));
        ++produced;
      }
    }
  }

  std::mt19937_64 shuffle_rng(options.seed);
  std::shuffle(corpus.begin(), corpus.end(), shuffle_rng);
  return corpus;
}

void WriteNdjson(std::ostream& out, const std::vector<SensorRecord>& records) {
  for (const auto& r : records) out << r.ToJson().dump() << '\n';
}

std::vector<Json> ReadNdjson(std::istream& in) {
  std::vector<Json> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      rows.push_back(Json::parse(line));
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return rows;
}

}  // namespace moodsense::sensorsim
