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
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "moodsense/etl/firehose.hpp"
#include "moodsense/inference/sinks.hpp"
#include "moodsense/learn/model.hpp"
#include "moodsense/sensorsim/simulator.hpp"

namespace moodsense {

// Everything the CLI and the runtime read from the INI file. Every field has
// a default, so an empty file is valid.
//
//   seed = 42
//   store = moodsense-store
//   window_s = 10
//   participant = participant-1
//   [bus]            workers, tcp_port (0 = no TCP front-end), host
//   [http]           host, port
//   [gsr]            divider_r_ohm, vcc_volts, scale, reading_min, reading_max
//   [regime.Angry]   gsr_mean, gsr_std, bpm_mean, bpm_std   (also Happy, Sad)
//   [hyperparams]    learning_rate, epochs, l2_lambda, batch_size, loss
//   [training]       test_fraction, smote_k
//   [flush]          rows, interval_s
//   [sink.<name>]    kind = webhook|file|console, target
//   [recommendations] Angry = ..., Happy = ..., Sad = ...
struct Config {
  std::uint64_t seed = 42;
  std::filesystem::path store_root = "moodsense-store";
  int window_s = 10;
  std::string participant = "participant-1";

  std::size_t bus_workers = 2;
  std::string bus_host = "127.0.0.1";
  int bus_tcp_port = 0;
  std::string http_host = "127.0.0.1";
  int http_port = 8080;

  sensorsim::GsrCalibration gsr;
  std::array<sensorsim::EmotionRegime, 3> regimes = sensorsim::DefaultRegimes();
  learn::Hyperparams hyperparams;
  double test_fraction = 0.2;
  int smote_k = 5;
  etl::FlushPolicy flush;
  std::vector<inference::SinkConfig> sinks{inference::SinkConfig{}};
  std::map<std::string, std::string, std::less<>> recommendations;

  // Throws ConfigError naming the offending field.
  void Validate() const;
};

// Throws ConfigError with "<path>:<line>: ..." for syntax errors and
// "<path>: <section.key>: ..." for bad values or unknown keys.
Config LoadConfig(const std::filesystem::path& path);
Config ParseConfig(const std::string& text, const std::string& source = "<config>");

}  // namespace moodsense
