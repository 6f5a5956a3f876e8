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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "moodsense/error.hpp"
#include "moodsense/sensorsim/signal.hpp"
#include "moodsense/sensorsim/simulator.hpp"

namespace moodsense::sensorsim {
namespace {

// Independent evaluation of the divider at adc=2048 with the default
// calibration: 2e8 / (1e5 * (3.3 - v) / v), v = 2048/4095 * 3.3.
constexpr double kReadingAt2048 = 2000.977039570103;

TEST(GsrReading, MidScaleMatchesHandEvaluation) {
  EXPECT_NEAR(GsrReading({0, 2048}), kReadingAt2048, 1e-9);
}

TEST(GsrReading, SaturatesAtRangeBounds) {
  const GsrCalibration cal;
  EXPECT_EQ(GsrReading({0, 0}), cal.reading_min);
  EXPECT_EQ(GsrReading({0, kAdcMax}), cal.reading_max);
}

TEST(GsrReading, RejectsCountsOutsideTwelveBits) {
  EXPECT_THROW(GsrReading({0, -1}), RangeError);
  EXPECT_THROW(GsrReading({0, 4096}), RangeError);
}

TEST(GsrReading, MonotoneInAdcCount) {
  double prev = GsrReading({0, 0});
  for (int adc = 1; adc <= kAdcMax; ++adc) {
    const double r = GsrReading({0, adc});
    ASSERT_GE(r, prev) << "adc " << adc;
    prev = r;
  }
}

TEST(GsrReading, InverseLandsOnNearbyReading) {
  for (double target : {500.0, 1400.0, 2000.0, 2700.0, 6000.0}) {
    const int adc = GsrAdcForReading(target);
    const double back = GsrReading({0, adc});
    const double step = GsrReading({0, adc + 1}) - GsrReading({0, adc - 1});
    EXPECT_LE(std::abs(back - target), step) << target;
  }
}

class BpmAccuracy : public ::testing::TestWithParam<std::tuple<double, double>> {};

TEST_P(BpmAccuracy, WithinTwoBeatsPerMinute) {
  const auto [bpm, noise] = GetParam();
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto wave = GeneratePulseWave(bpm, 10'000, 100.0, noise, seed);
    EXPECT_NEAR(ExtractBpm(wave), bpm, 2.0) << "seed " << seed;
  }
}

INSTANTIATE_TEST_SUITE_P(Rates, BpmAccuracy,
                         ::testing::Combine(::testing::Values(40.0, 60.0, 90.0, 120.0, 180.0),
                                            ::testing::Values(0.0, 10.0, 20.0)));

TEST(ExtractBpm, FlatLineIsAnError) {
  std::vector<PulseSample> flat;
  for (int i = 0; i < 1000; ++i) flat.push_back({i * 10, 2048});
  EXPECT_THROW(ExtractBpm(flat), InsufficientSignalError);
}

TEST(ExtractBpm, NoiseOnlyIsAnError) {
  // Zero-amplitude pulse: the generator cannot produce that, so build it.
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(2048.0, 5.0);
  std::vector<PulseSample> noise;
  for (int i = 0; i < 1000; ++i) noise.push_back({i * 10, static_cast<int>(n(rng))});
  EXPECT_THROW(ExtractBpm(noise), InsufficientSignalError);
}

TEST(ExtractBpm, TooShortIsAnError) {
  const auto wave = GeneratePulseWave(60.0, 1500, 100.0, 0.0);
  EXPECT_THROW(ExtractBpm(wave), InsufficientSignalError);
}

TEST(GeneratePulseWave, RejectsOutOfRangeInputs) {
  EXPECT_THROW(GeneratePulseWave(29.0, 1000, 100.0, 0.0), RangeError);
  EXPECT_THROW(GeneratePulseWave(241.0, 1000, 100.0, 0.0), RangeError);
  EXPECT_THROW(GeneratePulseWave(60.0, 1000, 20.0, 0.0), RangeError);
}

TEST(DetectBeats, BeatsAreOrderedAndSpacedByTheRefractoryPeriod) {
  const auto wave = GeneratePulseWave(150.0, 8000, 100.0, 20.0, 9);
  const auto beats = DetectBeats(wave);
  ASSERT_GE(beats.size(), 3u);
  for (std::size_t i = 1; i < beats.size(); ++i) {
    EXPECT_GE(beats[i] - beats[i - 1], BeatDetectorOptions{}.refractory_ms);
  }
}

TEST(SimulateSession, LengthIsDurationMinusWarmup) {
  for (int duration : {30, 45, 120}) {
    for (int warmup : {0, 5, 29}) {
      const auto s = SimulateSession(DefaultRegimes()[0], "p1", duration, warmup, 11);
      EXPECT_EQ(s.records.size(), static_cast<std::size_t>(duration - warmup));
      EXPECT_EQ(s.discarded, static_cast<std::size_t>(warmup));
    }
  }
}

TEST(SimulateSession, RejectsBadDurations) {
  const auto r = DefaultRegimes()[1];
  EXPECT_THROW(SimulateSession(r, "p", 29, 0, 1), RangeError);
  EXPECT_THROW(SimulateSession(r, "p", 301, 0, 1), RangeError);
  EXPECT_THROW(SimulateSession(r, "p", 60, 60, 1), RangeError);
  EXPECT_THROW(SimulateSession(r, "p", 60, -1, 1), RangeError);
}

TEST(SimulateSession, OneRecordPerSecondWithRegimeLabel) {
  const auto s = SimulateSession(DefaultRegimes()[2], "p1", 40, 5, 4);
  for (std::size_t i = 1; i < s.records.size(); ++i) {
    EXPECT_EQ(s.records[i].timestamp_ms - s.records[i - 1].timestamp_ms, 1000);
  }
  for (const auto& r : s.records) {
    ASSERT_TRUE(r.mood.has_value());
    EXPECT_EQ(*r.mood, "Sad");
    EXPECT_EQ(r.participant_id, "p1");
    EXPECT_GE(r.bpm, kMinBpm);
    EXPECT_LE(r.bpm, kMaxBpm);
  }
}

TEST(SimulateSession, MeansTrackTheRegime) {
  for (const auto& regime : DefaultRegimes()) {
    const auto s = SimulateSession(regime, "p", 300, 0, 21);
    double gsr = 0, bpm = 0;
    for (const auto& r : s.records) {
      gsr += r.gsr;
      bpm += r.bpm;
    }
    gsr /= static_cast<double>(s.records.size());
    bpm /= static_cast<double>(s.records.size());
    EXPECT_NEAR(gsr, regime.gsr_mean, 4 * regime.gsr_std / std::sqrt(300.0) + 5) << regime.label;
    EXPECT_NEAR(bpm, regime.bpm_mean, 2.0) << regime.label;
  }
}

TEST(SensorRecord, JsonFieldOrderMatchesTheDeviceFormat) {
  SensorRecord r{"participant-1", 2700.5, 110.25, "Angry", 1639178580000};
  EXPECT_EQ(r.ToJson().dump(),
            R"({"GSR":2700.5,"BPM":110.25,"Mood":"Angry","Date":"12/10/2021",)"
            R"("Time":"23:23:00","Participant":"participant-1"})");
  EXPECT_EQ(SensorRecord::FromJson(r.ToJson()), r);
}

TEST(SensorRecord, UnlabeledRecordsOmitMood) {
  SensorRecord r{"p", 1.5, 60.0, std::nullopt, 1639178580000};
  EXPECT_FALSE(r.ToJson().contains("Mood"));
  EXPECT_EQ(SensorRecord::FromJson(r.ToJson()), r);
}

TEST(SensorRecord, MalformedJsonIsAParseError) {
  auto j = SensorRecord{"p", 1.5, 60.0, "Sad", 1639178580000}.ToJson();
  j["Date"] = "2021-12-10";
  EXPECT_THROW(SensorRecord::FromJson(j), ParseError);
  j = SensorRecord{"p", 1.5, 60.0, "Sad", 1639178580000}.ToJson();
  j.erase("GSR");
  EXPECT_THROW(SensorRecord::FromJson(j), ParseError);
}

TEST(GenerateCorpus, PerClassCountsAndDeterminism) {
  const auto a = GenerateCorpus(DefaultRegimes(), "p", 40);
  const auto b = GenerateCorpus(DefaultRegimes(), "p", 40);
  ASSERT_EQ(a.size(), 120u);
  EXPECT_EQ(a, b);
  std::map<std::string, int> counts;
  for (const auto& r : a) ++counts[*r.mood];
  EXPECT_EQ(counts["Angry"], 40);
  EXPECT_EQ(counts["Happy"], 40);
  EXPECT_EQ(counts["Sad"], 40);

  CorpusOptions other;
  other.seed = 43;
  EXPECT_NE(GenerateCorpus(DefaultRegimes(), "p", 40, other), a);
}

TEST(GenerateCorpus, NdjsonRoundTripsByteForByte) {
  const auto corpus = GenerateCorpus(DefaultRegimes(), "p", 10);
  std::stringstream first;
  WriteNdjson(first, corpus);
  std::stringstream in(first.str());
  std::vector<SensorRecord> back;
  for (const auto& j : ReadNdjson(in)) back.push_back(SensorRecord::FromJson(j));
  EXPECT_EQ(back, corpus);
  std::stringstream second;
  WriteNdjson(second, back);
  EXPECT_EQ(first.str(), second.str());
}

TEST(GenerateCorpus, RejectsNonPositiveCounts) {
  EXPECT_THROW(GenerateCorpus(DefaultRegimes(), "p", 0), RangeError);
}

TEST(EmotionRegime, ValidateRejectsBadParameters) {
  EmotionRegime r = DefaultRegimes()[0];
  r.gsr_std = 0;
  EXPECT_THROW(r.Validate(), RangeError);
  r = DefaultRegimes()[0];
  r.bpm_mean = 10;
  EXPECT_THROW(r.Validate(), RangeError);
  r = DefaultRegimes()[0];
  r.label = "Bored";
  EXPECT_THROW(r.Validate(), RangeError);
}

}  // namespace
}  // namespace moodsense::sensorsim
