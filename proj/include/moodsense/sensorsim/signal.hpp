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
#include <vector>

namespace moodsense::sensorsim {

inline constexpr int kAdcMax = 4095;  // 12-bit converter full scale
inline constexpr double kMinBpm = 30.0;
inline constexpr double kMaxBpm = 240.0;

struct PulseSample {
  std::int64_t t_ms = 0;
  int amplitude = 0;  // raw ADC count, [0, kAdcMax]
};

struct GsrSample {
  std::int64_t t_ms = 0;
  int adc = 0;  // raw ADC count, [0, kAdcMax]
};

// Synthetic ear-clip pulse waveform. Each beat is a systolic bump at 20% of
// the period followed by a small dicrotic bump, on a mid-scale baseline.
// Gaussian noise is added per sample and amplitudes are clamped to 12 bits.
// Throws RangeError for bpm outside [30, 240] or sample_rate_hz < 50.
std::vector<PulseSample> GeneratePulseWave(double bpm, std::int64_t duration_ms,
                                           double sample_rate_hz,
                                           double noise_std,
                                           std::uint64_t seed = 0);

struct BeatDetectorOptions {
  std::int64_t window_ms = 2000;      // running min/max window
  std::int64_t refractory_ms = 250;   // minimum spacing between beats
  int min_swing = 100;                // max-min below this is treated as flat
};

// Beat timestamps (ms) found by an adaptive midpoint threshold over a trailing
// min/max window. Each beat is the argmax of one above-threshold excursion;
// excursions closer than the refractory period to the previous beat are
// merged into it.
std::vector<std::int64_t> DetectBeats(std::span<const PulseSample> samples,
                                      const BeatDetectorOptions& options = {});

// 60000 / mean inter-beat interval. Throws InsufficientSignalError with fewer
// than 3 beats, RangeError if the result falls outside [30, 240].
double ExtractBpm(std::span<const PulseSample> samples,
                  const BeatDetectorOptions& options = {});

// Series voltage divider: the converter reads the voltage across a fixed
// resistor with the skin in series to Vcc. Conductance grows with the reading.
struct GsrCalibration {
  double divider_r_ohm = 100'000.0;
  double vcc_volts = 3.3;
  double scale = 2.0e8;  // reading = scale / skin_resistance_ohm
  double reading_min = 0.0;
  double reading_max = 20'000.0;
};

// Conductance-proportional reading for one sample; saturates to the range
// bounds at the divider singularities instead of failing.
double GsrReading(const GsrSample& sample, const GsrCalibration& cal = {});

// Nearest ADC count whose reading approximates `reading` (used by the
// simulator to go reading -> raw count -> reading).
int GsrAdcForReading(double reading, const GsrCalibration& cal = {});

}  // namespace moodsense::sensorsim
