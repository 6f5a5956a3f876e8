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

#include "moodsense/inference/sinks.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <regex>

#include <spdlog/spdlog.h>

#include "httplib.h"
#include "moodsense/error.hpp"

namespace moodsense::inference {
namespace {

// scheme://host[:port], path
const std::regex& UrlPattern() {
  static const std::regex re(R"(^(https?://[A-Za-z0-9.\-]+(?::[0-9]{1,5})?)(/[^\s]*)?$)");
  return re;
}

std::mutex& FileMutex() {
  static std::mutex mu;
  return mu;
}

void DeliverWebhook(const SinkConfig& sink, const Notification& n, const std::string& msg,
                    int timeout_ms) {
  std::smatch m;
  if (!std::regex_match(sink.target, m, UrlPattern())) {
    throw ConfigError("bad webhook URL " + sink.target);
  }
  httplib::Client client(m[1].str());
  const auto timeout = std::chrono::milliseconds(timeout_ms);
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);
  const nlohmann::ordered_json body = {{"message", msg},
                                       {"label", n.label},
                                       {"participant", n.participant},
                                       {"timestamp", FormatIso8601(n.timestamp)}};
  const std::string path = m[2].matched ? m[2].str() : "/";
  auto res = client.Post(path, body.dump(), "application/json");
  if (!res) throw IoError("webhook " + sink.target + ": " + httplib::to_string(res.error()));
  if (res->status < 200 || res->status >= 300) {
    throw IoError("webhook " + sink.target + " returned HTTP " + std::to_string(res->status));
  }
}

void DeliverFile(const SinkConfig& sink, const Notification& n, const std::string& msg) {
  std::lock_guard lock(FileMutex());
  const std::filesystem::path path(sink.target);
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::app);
  out << FormatIso8601(n.timestamp) << ' ' << msg << '\n';
  out.flush();
  if (!out) throw IoError("cannot append to " + sink.target);
}

}  // namespace

std::string_view ToString(SinkKind kind) {
  switch (kind) {
    case SinkKind::kWebhook: return "webhook";
    case SinkKind::kFile: return "file";
    case SinkKind::kConsole: return "console";
  }
  return "console";
}

SinkKind ParseSinkKind(std::string_view s) {
  if (s == "webhook") return SinkKind::kWebhook;
  if (s == "file") return SinkKind::kFile;
  if (s == "console") return SinkKind::kConsole;
  throw ConfigError("unknown sink kind \"" + std::string(s) + "\"");
}

void SinkConfig::Validate() const {
  if (kind == SinkKind::kWebhook && !std::regex_match(target, UrlPattern())) {
    throw ConfigError("webhook target is not an http(s) URL: \"" + target + "\"");
  }
  if (kind == SinkKind::kFile && target.empty()) {
    throw ConfigError("file sink needs a target path");
  }
}

nlohmann::ordered_json SinkConfig::ToJson() const {
  return {{"kind", ToString(kind)}, {"target", target}, {"topic_name", topic_name}};
}

SinkConfig SinkConfig::FromJson(const nlohmann::ordered_json& j) {
  SinkConfig s;
  try {
    s.kind = ParseSinkKind(j.at("kind").get<std::string>());
    s.target = j.value("target", "");
    s.topic_name = j.value("topic_name", s.topic_name);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("sink: ") + e.what());
  }
  s.Validate();
  return s;
}

std::string RenderMessage(const Notification& n) {
  return "Prediction result for " + n.participant + ": You are " + n.label + "!";
}

std::size_t DeliveryReport::ok() const {
  std::size_t k = 0;
  for (const auto& r : results) k += r.ok ? 1 : 0;
  return k;
}

std::size_t DeliveryReport::failed() const { return results.size() - ok(); }

nlohmann::ordered_json DeliveryReport::ToJson() const {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& r : results) {
    nlohmann::ordered_json e = {{"kind", ToString(r.kind)}, {"target", r.target}, {"ok", r.ok}};
    if (!r.ok) e["error"] = r.error;
    arr.push_back(std::move(e));
  }
  return {{"ok", ok()}, {"failed", failed()}, {"results", std::move(arr)}};
}

DeliveryReport Fanout(const Notification& n, std::span<const SinkConfig> sinks,
                      const FanoutOptions& options) noexcept {
  DeliveryReport report;
  std::string msg;
  try {
    msg = RenderMessage(n);
  } catch (...) {
    return report;
  }
  for (const auto& sink : sinks) {
    SinkResult r;
    r.kind = sink.kind;
    try {
      r.target = sink.target;
      switch (sink.kind) {
        case SinkKind::kWebhook:
          DeliverWebhook(sink, n, msg, options.webhook_timeout_ms);
          break;
        case SinkKind::kFile:
          DeliverFile(sink, n, msg);
          break;
        case SinkKind::kConsole: {
          std::ostream& out = options.console ? *options.console : std::cout;
          out << '[' << sink.topic_name << "] " << msg << '\n';
          out.flush();
          break;
        }
      }
      r.ok = true;
    } catch (const std::exception& e) {
      r.error = e.what();
      spdlog::warn("fanout: {} sink {} failed: {}", ToString(sink.kind), sink.target, e.what());
    } catch (...) {
      r.error = "unknown error";
    }
    try {
      report.results.push_back(std::move(r));
    } catch (...) {
    }
  }
  return report;
}

}  // namespace moodsense::inference
