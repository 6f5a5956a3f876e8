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

#include "moodsense/inference/service.hpp"

#include <algorithm>
#include <cctype>
#include <random>

#include <spdlog/spdlog.h>

#include "moodsense/error.hpp"

namespace moodsense::inference {
namespace {

constexpr int kMaxWindowS = 300;

}  // namespace

std::string_view ToString(SessionStatus s) {
  switch (s) {
    case SessionStatus::kPending: return "pending";
    case SessionStatus::kDone: return "done";
    case SessionStatus::kFailed: return "failed";
  }
  return "pending";
}

nlohmann::ordered_json InferenceSession::ToJson() const {
  using J = nlohmann::ordered_json;
  J j;
  j["session_id"] = session_id;
  j["participant_id"] = participant_id;
  j["window_s"] = window_s;
  j["status"] = ToString(status);
  j["mean_gsr"] = mean_gsr ? J(*mean_gsr) : J(nullptr);
  j["mean_bpm"] = mean_bpm ? J(*mean_bpm) : J(nullptr);
  j["predicted"] = predicted ? J(*predicted) : J(nullptr);
  j["probabilities"] = probabilities ? J(*probabilities) : J(nullptr);
  j["recommendation"] = recommendation.empty() ? J(nullptr) : J(recommendation);
  if (!error.empty()) j["error"] = error;
  j["t_trigger"] = t_trigger;
  j["t_window_end"] = t_window_end ? J(t_window_end) : J(nullptr);
  j["t_result"] = t_result ? J(t_result) : J(nullptr);
  j["elapsed_ms"] = t_result ? J(elapsed_ms()) : J(nullptr);
  return j;
}

FeedFactory DemoFeedFactory(std::array<sensorsim::EmotionRegime, 3> regimes,
                            sensorsim::SimulatorOptions options, std::uint64_t seed) {
  auto rng = std::make_shared<std::mt19937_64>(seed);
  auto rng_mu = std::make_shared<std::mutex>();
  return [regimes, options, rng, rng_mu](const std::string& participant,
                                         const std::optional<std::string>& regime) {
    std::uint64_t session_seed = 0;
    std::size_t pick = 0;
    {
      std::lock_guard lock(*rng_mu);
      session_seed = (*rng)();
      pick = static_cast<std::size_t>((*rng)() % regimes.size());
    }
    if (regime) {
      auto lower = [](std::string s) {
        for (auto& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
        return s;
      };
      auto it = std::find_if(regimes.begin(), regimes.end(), [&](const auto& r) {
        return lower(r.label) == lower(*regime);
      });
      if (it == regimes.end()) throw InputError("unknown regime \"" + *regime + "\"");
      pick = static_cast<std::size_t>(it - regimes.begin());
    }
    auto sim = std::make_shared<sensorsim::RecordSimulator>(regimes[pick], participant,
                                                           session_seed, options);
    return RecordFeed([sim](EpochMs t) { return sim->Next(t, false); });
  };
}

InferenceService::InferenceService(transport::Bus& bus, learn::EndpointRegistry& registry,
                                   etl::ObjectStore* store, FeedFactory feeds,
                                   Recommender recommender, std::vector<SinkConfig> sinks,
                                   InferenceOptions options)
    : bus_(bus),
      registry_(registry),
      store_(store),
      feeds_(std::move(feeds)),
      recommender_(std::move(recommender)),
      sinks_(std::move(sinks)),
      options_(std::move(options)) {
  for (const auto& s : sinks_) s.Validate();
  results_ = bus_.Subscribe(options_.service_device_id, transport::kInferResultTopic);
  listener_ = std::thread([this] { ListenLoop(); });
}

InferenceService::~InferenceService() {
  Shutdown();
  stopping_ = true;
  results_->Unsubscribe();
  if (listener_.joinable()) listener_.join();
}

void InferenceService::Install() {
  bus_.RegisterAction("trigger-inference",
                      [this](const transport::Message& m) { HandleInferRequest(m); });
  bus_.AddRule({"infer", "SELECT * FROM '" + std::string(transport::kInferTopic) + "'",
                {"trigger-inference"}});
}

void InferenceService::Shutdown() {
  std::vector<std::thread> workers;
  {
    std::lock_guard lock(mu_);
    workers.swap(workers_);
  }
  for (auto& t : workers) {
    if (t.joinable()) t.join();
  }
  bus_.WaitIdle();
}

void InferenceService::ListenLoop() {
  while (!stopping_) {
    auto m = results_->Next(std::chrono::milliseconds(50));
    if (!m) continue;
    nlohmann::ordered_json j;
    try {
      j = nlohmann::ordered_json::parse(m->payload);
    } catch (const nlohmann::json::exception&) {
      spdlog::warn("inference: unparseable result message dropped");
      continue;
    }
    const std::string id = j.value("session_id", "");
    std::lock_guard lock(mu_);
    auto it = waiters_.find(id);
    if (it == waiters_.end()) continue;
    it->second.set_value(std::move(j));
    waiters_.erase(it);
  }
}

InferenceSession InferenceService::CreateSession(const std::string& participant,
                                                 int window_s) {
  if (window_s < 1 || window_s > kMaxWindowS) {
    throw RangeError("window_s must be in [1, " + std::to_string(kMaxWindowS) + "]");
  }
  if (!registry_.Contains(participant)) {
    throw NotFoundError("no model endpoint for participant \"" + participant + "\"");
  }
  InferenceSession s;
  s.participant_id = participant;
  s.window_s = window_s;
  s.t_trigger = NowMs();
  s.session_id = "s" + std::to_string(s.t_trigger) + "-" + std::to_string(++counter_);
  std::lock_guard lock(mu_);
  sessions_[s.session_id] = s;
  if (sessions_.size() > options_.max_history) {
    auto oldest = std::min_element(sessions_.begin(), sessions_.end(), [](auto& a, auto& b) {
      return a.second.t_trigger < b.second.t_trigger;
    });
    if (oldest->second.status != SessionStatus::kPending) sessions_.erase(oldest);
  }
  return s;
}

void InferenceService::Update(const std::string& id,
                              const std::function<void(InferenceSession&)>& fn) {
  std::lock_guard lock(mu_);
  auto it = sessions_.find(id);
  if (it != sessions_.end()) fn(it->second);
}

void InferenceService::Execute(const std::string& id,
                               const std::optional<std::string>& regime) {
  InferenceSession s = *GetSession(id);
  auto fail = [&](const std::string& why) {
    Update(id, [&](InferenceSession& x) {
      x.status = SessionStatus::kFailed;
      x.error = why;
      x.t_result = NowMs();
    });
  };
  try {
    const RecordFeed feed = feeds_(s.participant_id, regime);
    const auto start = std::chrono::steady_clock::now();
    double sum_gsr = 0.0;
    double sum_bpm = 0.0;
    for (int i = 1; i <= s.window_s; ++i) {
      if (options_.realtime) std::this_thread::sleep_until(start + std::chrono::seconds(i));
      const auto rec = feed(s.t_trigger + static_cast<EpochMs>(i) * 1000);
      sum_gsr += rec.gsr;
      sum_bpm += rec.bpm;
    }
    const double mean_gsr = sum_gsr / s.window_s;
    const double mean_bpm = sum_bpm / s.window_s;
    const EpochMs window_end = NowMs();
    Update(id, [&](InferenceSession& x) {
      x.mean_gsr = mean_gsr;
      x.mean_bpm = mean_bpm;
      x.t_window_end = window_end;
    });

    std::future<nlohmann::ordered_json> result;
    {
      std::lock_guard lock(mu_);
      result = waiters_[id].get_future();
    }
    const nlohmann::ordered_json request = {{"session_id", id},
                                            {"participant", s.participant_id},
                                            {"mean_gsr", mean_gsr},
                                            {"mean_bpm", mean_bpm}};
    bus_.Publish(options_.device_id, std::string(transport::kInferTopic), request.dump());

    if (result.wait_for(options_.result_timeout) != std::future_status::ready) {
      {
        std::lock_guard lock(mu_);
        waiters_.erase(id);
      }
      throw TimeoutError("no result for session " + id + " within " +
                         std::to_string(options_.result_timeout.count()) + " ms");
    }
    const auto r = result.get();
    const EpochMs t_result = NowMs();
    if (r.contains("error")) {
      Update(id, [&](InferenceSession& x) {
        x.status = SessionStatus::kFailed;
        x.error = r["error"].is_string() ? r["error"].get<std::string>() : r["error"].dump();
        x.t_result = t_result;
      });
      return;
    }
    const auto label = r.at("label").get<std::string>();
    const auto probs = r.at("probabilities").get<learn::ClassVector>();
    const std::string rec = recommender_.Recommend(label);
    Update(id, [&](InferenceSession& x) {
      x.status = SessionStatus::kDone;
      x.predicted = label;
      x.probabilities = probs;
      x.recommendation = rec;
      x.t_result = t_result;
    });
  } catch (const std::exception& e) {
    fail(e.what());
    throw;
  }
}

InferenceSession InferenceService::RunSession(const std::string& participant, int window_s,
                                              const std::optional<std::string>& regime) {
  const auto s = CreateSession(participant, window_s);
  Execute(s.session_id, regime);
  return *GetSession(s.session_id);
}

std::string InferenceService::StartSession(const std::string& participant, int window_s,
                                           const std::optional<std::string>& regime) {
  const auto s = CreateSession(participant, window_s);
  std::lock_guard lock(mu_);
  workers_.emplace_back([this, id = s.session_id, regime] {
    try {
      Execute(id, regime);
    } catch (const std::exception& e) {
      spdlog::warn("session {} failed: {}", id, e.what());
    }
  });
  return s.session_id;
}

std::optional<InferenceSession> InferenceService::GetSession(const std::string& id) const {
  std::lock_guard lock(mu_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) return std::nullopt;
  return it->second;
}

std::vector<InferenceSession> InferenceService::Sessions(std::size_t limit) const {
  std::vector<InferenceSession> out;
  {
    std::lock_guard lock(mu_);
    for (const auto& [id, s] : sessions_) out.push_back(s);
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.t_trigger != b.t_trigger ? a.t_trigger > b.t_trigger
                                      : a.session_id > b.session_id;
  });
  if (out.size() > limit) out.resize(limit);
  return out;
}

SinkStats InferenceService::sink_stats() const { return {sink_ok_.load(), sink_failed_.load()}; }

void InferenceService::PublishResult(const nlohmann::ordered_json& result) {
  bus_.Publish(options_.service_device_id, std::string(transport::kInferResultTopic),
               result.dump());
}

void InferenceService::HandleInferRequest(const transport::Message& m) {
  nlohmann::ordered_json req;
  std::string id;
  try {
    req = nlohmann::ordered_json::parse(m.payload);
    id = req.at("session_id").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    const nlohmann::ordered_json dead = {{"reason", std::string("bad infer request: ") + e.what()},
                                         {"topic", m.topic},
                                         {"payload", m.payload}};
    bus_.Publish(options_.service_device_id, std::string(transport::kDeadLetterTopic),
                 dead.dump());
    return;
  }

  nlohmann::ordered_json result = {{"session_id", id}};
  Notification note;
  bool ok = false;
  try {
    note.participant = req.at("participant").get<std::string>();
    const double gsr = req.at("mean_gsr").get<double>();
    const double bpm = req.at("mean_bpm").get<double>();
    if (store_) {
      try {
        store_->Put(options_.request_bucket,
                    etl::StreamNameFor(note.participant) + "/" + id + ".json", m.payload);
      } catch (const std::exception& e) {
        spdlog::warn("inference: could not persist request {}: {}", id, e.what());
      }
    }
    const auto p = registry_.Invoke(note.participant, gsr, bpm);
    result["label"] = p.label;
    result["probabilities"] = p.probabilities;
    note.label = p.label;
    ok = true;
  } catch (const std::exception& e) {
    result["label"] = nullptr;
    result["probabilities"] = nullptr;
    result["error"] = e.what();
  }
  PublishResult(result);

  if (ok) {
    note.timestamp = NowMs();
    const auto report = Fanout(note, sinks_, options_.fanout);
    sink_ok_ += report.ok();
    sink_failed_ += report.failed();
  }
}

}  // namespace moodsense::inference
