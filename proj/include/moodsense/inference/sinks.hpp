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

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "moodsense/clock.hpp"

namespace moodsense::inference {

enum class SinkKind { kWebhook, kFile, kConsole };

std::string_view ToString(SinkKind kind);
// Throws ConfigError for an unknown kind.
SinkKind ParseSinkKind(std::string_view s);

struct SinkConfig {
  SinkKind kind = SinkKind::kConsole;
  std::string target;  // URL for webhooks, path for files, ignored for console
  std::string topic_name = "emotion-results";

  // Throws ConfigError: webhooks need an http(s) URL, files a path.
  void Validate() const;
  nlohmann::ordered_json ToJson() const;
  static SinkConfig FromJson(const nlohmann::ordered_json& j);
};

struct Notification {
  std::string label;
  std::string participant;
  EpochMs timestamp = 0;
};

// "Prediction result for {participant}: You are {label}!"
std::string RenderMessage(const Notification& n);

struct SinkResult {
  SinkKind kind = SinkKind::kConsole;
  std::string target;
  bool ok = false;
  std::string error;
};

struct DeliveryReport {
  std::vector<SinkResult> results;

  std::size_t ok() const;
  std::size_t failed() const;
  nlohmann::ordered_json ToJson() const;
};

struct FanoutOptions {
  std::ostream* console = nullptr;  // defaults to std::cout
  int webhook_timeout_ms = 2000;
};

// Delivers the rendered message to every sink in order. Per-sink failures are
// recorded in the report; this never throws.
//   webhook: POST application/json {"message","label","participant","timestamp"},
//            any non-2xx status is a failure
//   file:    appends "<ISO-8601 timestamp> <message>\n"
//   console: writes "[<topic_name>] <message>\n"
DeliveryReport Fanout(const Notification& n, std::span<const SinkConfig> sinks,
                      const FanoutOptions& options = {}) noexcept;

}  // namespace moodsense::inference
