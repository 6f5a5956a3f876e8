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

#include "moodsense/runtime.hpp"

#include <spdlog/spdlog.h>

#include "moodsense/error.hpp"
#include "moodsense/learn/model_io.hpp"
#include "moodsense/transport/round.hpp"

namespace moodsense {

Runtime::Runtime(Config config, RuntimeOptions options)
    : config_(std::move(config)), options_(std::move(options)) {
  config_.Validate();
  std::filesystem::create_directories(config_.store_root);
  store_ = std::make_unique<etl::ObjectStore>(config_.store_root);

  etl::DeliveryStreamOptions stream_opts;
  stream_opts.flush = config_.flush;
  firehose_ = std::make_unique<etl::FirehoseRouter>(*store_, stream_opts);

  transport::BusOptions bus_opts;
  bus_opts.worker_threads = config_.bus_workers;
  bus_ = std::make_unique<transport::Bus>(bus_opts);
  bus_->SetPolicy({std::string(kSensorDevice), transport::TopicFilter::Parse("iotsensors/#")});
  bus_->SetPolicy({std::string(kServiceDevice), transport::TopicFilter::Parse("#")});

  bus_->RegisterAction("round-and-forward-to-etl",
                       [this](const transport::Message& m) { RoundAndForward(m); });
  bus_->AddRule({"train", "SELECT * FROM '" + std::string(transport::kTrainTopic) + "'",
                 {"round-and-forward-to-etl"}});

  sensorsim::SimulatorOptions sim;
  sim.calibration = config_.gsr;
  inference::InferenceOptions inf;
  inf.realtime = options_.realtime;
  inf.result_timeout = options_.result_timeout;
  inf.device_id = std::string(kSensorDevice);
  inf.service_device_id = std::string(kServiceDevice);
  inf.fanout = options_.fanout;
  auto recommender = config_.recommendations.empty()
                         ? inference::Recommender::Default()
                         : inference::Recommender(config_.recommendations);
  inference_ = std::make_unique<inference::InferenceService>(
      *bus_, registry_, store_.get(),
      inference::DemoFeedFactory(config_.regimes, sim, options_.feed_seed),
      std::move(recommender), config_.sinks, inf);
  inference_->Install();

  if (options_.background_ticker) {
    ticker_ = std::thread([this] {
      while (!stop_) {
        std::this_thread::sleep_for(std::chrono::milliseconds(250));
        try {
          firehose_->TickAll();
        } catch (const std::exception& e) {
          spdlog::warn("firehose tick: {}", e.what());
        }
      }
    });
  }
}

Runtime::~Runtime() {
  stop_ = true;
  if (ticker_.joinable()) ticker_.join();
  if (http_) http_->Stop();
  if (tcp_) tcp_->Stop();
  inference_->Shutdown();
  try {
    Drain();
  } catch (const std::exception& e) {
    spdlog::error("final flush failed: {}", e.what());
  }
  inference_.reset();
  bus_.reset();
}

void Runtime::DeadLetter(const transport::Message& m, const std::string& reason) {
  ++dead_letters_;
  spdlog::warn("dead letter from {}: {}", m.topic, reason);
  const nlohmann::ordered_json dead = {
      {"reason", reason}, {"topic", m.topic}, {"payload", m.payload}};
  bus_->Publish(kServiceDevice, std::string(transport::kDeadLetterTopic), dead.dump());
}

void Runtime::RoundAndForward(const transport::Message& m) {
  nlohmann::ordered_json record;
  try {
    record = nlohmann::ordered_json::parse(transport::RoundTransformPayload(m.payload));
  } catch (const TransformError& e) {
    DeadLetter(m, e.what());
    return;
  }
  const auto p = record.find("Participant");
  const std::string participant =
      p != record.end() && p->is_string() ? p->get<std::string>() : "unknown";
  try {
    firehose_->Put(etl::StreamNameFor(participant), record);
  } catch (const Error& e) {
    DeadLetter(m, e.what());
  }
}

void Runtime::PublishTraining(const nlohmann::ordered_json& record) {
  bus_->Publish(kSensorDevice, std::string(transport::kTrainTopic), record.dump());
}

void Runtime::Drain() {
  bus_->WaitIdle();
  firehose_->FlushAll();
}

std::size_t Runtime::LoadStoredModels() {
  std::size_t n = 0;
  for (const auto& key : store_->List(learn::kModelBucket, "models/")) {
    try {
      auto model = learn::ModelFromText(store_->GetText(learn::kModelBucket, key));
      const std::string name = model.participant_id;
      registry_.Register(name, std::move(model));
      ++n;
    } catch (const Error& e) {
      spdlog::warn("skipping stored model {}: {}", key, e.what());
    }
  }
  return n;
}

learn::TrainingReport Runtime::Train(const std::string& participant,
                                     const learn::Hyperparams& hp) {
  learn::TrainingJobOptions opts;
  opts.participant_id = participant;
  opts.test_fraction = config_.test_fraction;
  opts.split_seed = config_.seed;
  opts.smote_seed = config_.seed;
  opts.smote_k = config_.smote_k;
  opts.hyperparams = hp;
  return learn::RunTrainingJob(*store_, registry_, opts);
}

nlohmann::ordered_json Runtime::Metrics(const std::string& participant) const {
  const auto log = learn::LoadLatestTrainingLog(*store_, participant);
  if (log.contains("test_eval") && !log["test_eval"].is_null()) return log["test_eval"];
  return log.at("train_eval");
}

int Runtime::StartHttp(int port, const std::string& host) {
  inference::HttpApiHooks hooks;
  hooks.train = [this](const std::string& p, const learn::Hyperparams& hp) {
    Drain();
    return Train(p, hp).ToJson();
  };
  hooks.metrics = [this](const std::string& p) { return Metrics(p); };
  http_ = std::make_unique<inference::HttpApi>(*inference_, std::move(hooks));
  return http_->Start(port, host);
}

std::uint16_t Runtime::StartTcp(std::uint16_t port, const std::string& host) {
  tcp_ = std::make_unique<transport::TcpFrontend>(*bus_, std::string(kSensorDevice));
  return tcp_->Start(port, host);
}

}  // namespace moodsense
