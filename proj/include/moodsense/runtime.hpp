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
#include <memory>
#include <optional>
#include <string>
#include <thread>

#include "json.hpp"
#include "moodsense/config.hpp"
#include "moodsense/etl/firehose.hpp"
#include "moodsense/etl/object_store.hpp"
#include "moodsense/inference/http_api.hpp"
#include "moodsense/inference/service.hpp"
#include "moodsense/learn/endpoint.hpp"
#include "moodsense/learn/training_job.hpp"
#include "moodsense/transport/bus.hpp"
#include "moodsense/transport/tcp_frontend.hpp"

namespace moodsense {

inline constexpr std::string_view kSensorDevice = "raspberry_pi";
inline constexpr std::string_view kServiceDevice = "iot-core";

struct RuntimeOptions {
  bool realtime = true;           // 1 Hz pacing of inference windows
  bool background_ticker = false; // periodic firehose interval flushes
  std::chrono::milliseconds result_timeout{10000};
  std::uint64_t feed_seed = 7;
  inference::FanoutOptions fanout;
};

// The assembled system: bus with device policies and topic rules, firehose
// ETL into the object store, endpoint registry and the inference service.
//
// Rules:
//   train: SELECT * FROM 'iotsensors/train' -> round-and-forward-to-etl
//   infer: SELECT * FROM 'iotsensors/infer' -> trigger-inference
// Records that cannot be transformed go to iotsensors/deadletter.
class Runtime {
 public:
  explicit Runtime(Config config, RuntimeOptions options = {});
  ~Runtime();
  Runtime(const Runtime&) = delete;
  Runtime& operator=(const Runtime&) = delete;

  const Config& config() const { return config_; }
  transport::Bus& bus() { return *bus_; }
  etl::ObjectStore& store() { return *store_; }
  etl::FirehoseRouter& firehose() { return *firehose_; }
  learn::EndpointRegistry& registry() { return registry_; }
  inference::InferenceService& inference() { return *inference_; }

  // Publishes one record to iotsensors/train as the sensor device.
  void PublishTraining(const nlohmann::ordered_json& record);
  // Waits for the bus to drain, then flushes every delivery stream.
  void Drain();

  // Registers every model persisted in the store. Returns how many.
  std::size_t LoadStoredModels();
  learn::TrainingReport Train(const std::string& participant,
                              const learn::Hyperparams& hp);
  // Held-out EvalReport of the latest training log (training-set report when
  // the held-out split was empty). Throws NotFoundError without a log.
  nlohmann::ordered_json Metrics(const std::string& participant) const;

  int StartHttp(int port, const std::string& host);
  std::uint16_t StartTcp(std::uint16_t port, const std::string& host);

  std::size_t dead_letters() const { return dead_letters_.load(); }

 private:
  void RoundAndForward(const transport::Message& m);
  void DeadLetter(const transport::Message& m, const std::string& reason);

  Config config_;
  RuntimeOptions options_;
  std::unique_ptr<etl::ObjectStore> store_;
  std::unique_ptr<etl::FirehoseRouter> firehose_;
  learn::EndpointRegistry registry_;
  std::unique_ptr<transport::Bus> bus_;
  std::unique_ptr<inference::InferenceService> inference_;
  std::unique_ptr<inference::HttpApi> http_;
  std::unique_ptr<transport::TcpFrontend> tcp_;
  std::atomic<std::size_t> dead_letters_{0};

  std::atomic<bool> stop_{false};
  std::thread ticker_;
};

}  // namespace moodsense
