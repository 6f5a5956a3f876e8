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

#include "moodsense/sensorsim/signal.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <random>
#include <string>

#include "moodsense/error.hpp"

namespace moodsense::sensorsim {
namespace {

constexpr double kBaseline = 1200.0;
constexpr double kSystolicAmplitude = 1800.0;
constexpr double kSystolicPhase = 0.20;
constexpr double kSystolicWidth = 0.06;  // fraction of the period
constexpr double kDicroticAmplitude = 450.0;
constexpr double kDicroticPhase = 0.45;
constexpr double kDicroticWidth = 0.05;

double Bump(double phase, double center, double width) {
  const double d = (phase - center) / width;
  return std::exp(-0.5 * d * d);
}

void CheckBpm(double bpm) {
  if (!(bpm >= kMinBpm && bpm <= kMaxBpm)) {
    throw RangeError("bpm " + std::to_string(bpm) + " outside [30, 240]");
  }
}

// Trailing-window extremum with a monotonic deque.
class WindowExtremum {
 public:
  WindowExtremum(std::int64_t window_ms, bool track_max)
      : window_ms_(window_ms), max_(track_max) {}

  void Push(std::int64_t t, int v) {
    while (!q_.empty() && (max_ ? q_.back().second <= v : q_.back().second >= v)) {
      q_.pop_back();
    }
    q_.emplace_back(t, v);
    while (q_.front().first <= t - window_ms_) q_.pop_front();
  }

  int Value() const { return q_.front().second; }

 private:
  std::int64_t window_ms_;
  bool max_;
  std::deque<std::pair<std::int64_t, int>> q_;
};

}  // namespace

std::vector<PulseSample> GeneratePulseWave(double bpm, std::int64_t duration_ms,
                                           double sample_rate_hz,
                                           double noise_std,
                                           std::uint64_t seed) {
  CheckBpm(bpm);
  if (sample_rate_hz < 50.0) {
    throw RangeError("sample rate must be >= 50 Hz");
  }
  if (duration_ms < 0 || noise_std < 0.0) {
    throw RangeError("duration and noise must be non-negative");
  }

  const double period_ms = 60000.0 / bpm;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, noise_std > 0 ? noise_std : 1.0);

  std::vector<PulseSample> out;
  const auto n = static_cast<std::int64_t>(
      std::floor(static_cast<double>(duration_ms) * sample_rate_hz / 1000.0));
  out.reserve(static_cast<std::size_t>(n));
  std::int64_t last_t = -1;
  for (std::int64_t k = 0; k < n; ++k) {
    const auto t = static_cast<std::int64_t>(
        std::llround(static_cast<double>(k) * 1000.0 / sample_rate_hz));
    if (t <= last_t) continue;  // keep timestamps strictly increasing
    last_t = t;
    const double phase = std::fmod(static_cast<double>(t), period_ms) / period_ms;
    double v = kBaseline +
               kSystolicAmplitude * Bump(phase, kSystolicPhase, kSystolicWidth) +
               kDicroticAmplitude * Bump(phase, kDicroticPhase, kDicroticWidth);
    if (noise_std > 0.0) v += noise(rng);
    const int amp = static_cast<int>(std::clamp(std::lround(v), 0L, long{kAdcMax}));
    out.push_back({t, amp});
  }
  return out;
}

std::vector<std::int64_t> DetectBeats(std::span<const PulseSample> samples,
                                      const BeatDetectorOptions& options) {
  WindowExtremum lo(options.window_ms, false);
  WindowExtremum hi(options.window_ms, true);

  std::vector<std::int64_t> beats;
  int last_beat_value = 0;
  bool above = false;
  std::int64_t peak_t = 0;
  int peak_v = 0;

  auto finalize = [&] {
    if (!beats.empty() && peak_t - beats.back() < options.refractory_ms) {
      if (peak_v > last_beat_value) {
        beats.back() = peak_t;
        last_beat_value = peak_v;
      }
      return;
    }
    beats.push_back(peak_t);
    last_beat_value = peak_v;
  };

  for (const PulseSample& s : samples) {
    lo.Push(s.t_ms, s.amplitude);
    hi.Push(s.t_ms, s.amplitude);
    const int swing = hi.Value() - lo.Value();
    const double threshold = 0.5 * (hi.Value() + lo.Value());
    if (swing >= options.min_swing && s.amplitude > threshold) {
      if (!above || s.amplitude > peak_v) {
        peak_t = s.t_ms;
        peak_v = s.amplitude;
      }
      above = true;
    } else if (above) {
      finalize();
      above = false;
    }
  }
  // An excursion still open at the end of the window is incomplete; drop it.
  return beats;
}

double ExtractBpm(std::span<const PulseSample> samples,
                  const BeatDetectorOptions& options) {
  const auto beats = DetectBeats(samples, options);
  if (beats.size() < 3) {
    throw InsufficientSignalError("detected " + std::to_string(beats.size()) +
                                  " beats, need at least 3");
  }
  const double mean_ibi = static_cast<double>(beats.back() - beats.front()) /
                          static_cast<double>(beats.size() - 1);
  const double bpm = 60000.0 / mean_ibi;
  if (bpm < kMinBpm || bpm > kMaxBpm) {
    throw RangeError("computed bpm " + std::to_string(bpm) +
                     " outside [30, 240]; sensor fault?");
  }
  return bpm;
}

double GsrReading(const GsrSample& sample, const GsrCalibration& cal) {
  if (sample.adc < 0 || sample.adc > kAdcMax) {
    throw RangeError("adc " + std::to_string(sample.adc) + " outside [0, 4095]");
  }
  const double v = static_cast<double>(sample.adc) / kAdcMax * cal.vcc_volts;
  if (v <= 0.0) return cal.reading_min;
  if (v >= cal.vcc_volts) return cal.reading_max;
  const double skin_ohm = cal.divider_r_ohm * (cal.vcc_volts - v) / v;
  return std::clamp(cal.scale / skin_ohm, cal.reading_min, cal.reading_max);
}

int GsrAdcForReading(double reading, const GsrCalibration& cal) {
  if (reading <= cal.reading_min) return 0;
  // reading = k * x / (1 - x) with x = adc / 4095 and k = scale / R_fixed.
  const double k = cal.scale / cal.divider_r_ohm;
  const double x = reading / (k + reading);
  return static_cast<int>(
      std::clamp(std::lround(x * kAdcMax), 0L, long{kAdcMax}));
}

}  // namespace moodsense::sensorsim
