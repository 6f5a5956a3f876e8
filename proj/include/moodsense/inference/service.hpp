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

#include <atomic>
#include <chrono>
#include <cstdint>
#include <functional>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "moodsense/clock.hpp"
#include "moodsense/etl/object_store.hpp"
#include "moodsense/inference/recommend.hpp"
#include "moodsense/inference/sinks.hpp"
#include "moodsense/learn/endpoint.hpp"
#include "moodsense/sensorsim/simulator.hpp"
#include "moodsense/transport/bus.hpp"

namespace moodsense::inference {

enum class SessionStatus { kPending, kDone, kFailed };
std::string_view ToString(SessionStatus s);

struct InferenceSession {
  std::string session_id;
  std::string participant_id;
  int window_s = 0;
  SessionStatus status = SessionStatus::kPending;
  std::optional<double> mean_gsr;
  std::optional<double> mean_bpm;
  std::optional<std::string> predicted;
  std::optional<learn::ClassVector> probabilities;
  std::string recommendation;
  std::string error;
  EpochMs t_trigger = 0;
  EpochMs t_window_end = 0;
  EpochMs t_result = 0;

  std::int64_t elapsed_ms() const { return t_result - t_trigger; }
  // Time spent after the sensing window closed.
  std::int64_t processing_ms() const { return t_result - t_window_end; }
  nlohmann::ordered_json ToJson() const;
};

// One unlabeled reading for the participant, taken at the given time.
using RecordFeed = std::function<sensorsim::SensorRecord(EpochMs)>;
// Builds a feed for a session; `regime` pins the simulated emotion when set.
using FeedFactory = std::function<RecordFeed(const std::string& participant,
                                             const std::optional<std::string>& regime)>;

// Simulated live sensors. Without a pinned regime each session picks one at
// random (seeded).
FeedFactory DemoFeedFactory(std::array<sensorsim::EmotionRegime, 3> regimes,
                            sensorsim::SimulatorOptions options, std::uint64_t seed);

struct InferenceOptions {
  std::chrono::milliseconds result_timeout{10000};
  bool realtime = true;  // pace the window at 1 Hz on the wall clock
  std::string device_id = "raspberry_pi";
  std::string service_device_id = "iot-core";
  std::string request_bucket = "inference-requests";
  std::size_t max_history = 200;
  FanoutOptions fanout;
};

struct SinkStats {
  std::size_t delivered = 0;
  std::size_t failed = 0;
};

// The detection runtime. Install() registers the trigger-inference action and
// the 'infer' rule on the bus; sessions publish their window means to
// iotsensors/infer and wait for the correlated message on
// iotsensors/infer/result.
class InferenceService {
 public:
  InferenceService(transport::Bus& bus, learn::EndpointRegistry& registry,
                   etl::ObjectStore* store, FeedFactory feeds, Recommender recommender,
                   std::vector<SinkConfig> sinks, InferenceOptions options = {});
  ~InferenceService();
  InferenceService(const InferenceService&) = delete;
  InferenceService& operator=(const InferenceService&) = delete;

  void Install();

  // Blocking session. Throws NotFoundError without an endpoint for the
  // participant, RangeError for window_s outside [1, 300] and TimeoutError if
  // no result arrives in time (the session is then marked failed).
  InferenceSession RunSession(const std::string& participant, int window_s,
                              const std::optional<std::string>& regime = std::nullopt);

  // Validates like RunSession, registers a pending session and runs it on a
  // background thread. Returns the session id.
  std::string StartSession(const std::string& participant, int window_s,
                           const std::optional<std::string>& regime = std::nullopt);

  std::optional<InferenceSession> GetSession(const std::string& id) const;
  // Newest first by t_trigger.
  std::vector<InferenceSession> Sessions(std::size_t limit = 50) const;
  SinkStats sink_stats() const;

  // The trigger-inference rule action: persist the raw request, invoke the
  // endpoint, publish the result, then fan out.
  void HandleInferRequest(const transport::Message& m);

  // Stops accepting sessions and joins background work.
  void Shutdown();

 private:
  InferenceSession CreateSession(const std::string& participant, int window_s);
  void Execute(const std::string& id, const std::optional<std::string>& regime);
  void Update(const std::string& id, const std::function<void(InferenceSession&)>& fn);
  void ListenLoop();
  void PublishResult(const nlohmann::ordered_json& result);

  transport::Bus& bus_;
  learn::EndpointRegistry& registry_;
  etl::ObjectStore* store_;
  FeedFactory feeds_;
  Recommender recommender_;
  std::vector<SinkConfig> sinks_;
  InferenceOptions options_;

  mutable std::mutex mu_;
  std::map<std::string, InferenceSession> sessions_;
  std::map<std::string, std::promise<nlohmann::ordered_json>> waiters_;
  std::vector<std::thread> workers_;
  std::atomic<std::uint64_t> counter_{0};

  std::shared_ptr<transport::Subscription> results_;
  std::thread listener_;
  std::atomic<bool> stopping_{false};

  std::atomic<std::size_t> sink_ok_{0};
  std::atomic<std::size_t> sink_failed_{0};
};

}  // namespace moodsense::inference
