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

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>

#include "json.hpp"
#include "moodsense/inference/service.hpp"
#include "moodsense/learn/model.hpp"

namespace httplib {
class Server;
}

namespace moodsense::inference {

struct HttpApiHooks {
  // Runs one training job and returns its report JSON. Called on a background
  // thread.
  std::function<nlohmann::ordered_json(const std::string& participant,
                                       const learn::Hyperparams& hp)>
      train;
  // EvalReport JSON of the latest model; throws NotFoundError if none.
  std::function<nlohmann::ordered_json(const std::string& participant)> metrics;
};

// JSON API:
//   POST /api/sessions {participant_id, window_s, regime?} -> 202 {session_id}
//   GET  /api/sessions/{id}                               -> session | 404
//   GET  /api/sessions                                    -> newest first
//   GET  /api/model/{participant}/metrics                 -> EvalReport | 404
//   POST /api/train {participant_id, hyperparams?}        -> 202 {job_id}
//   GET  /api/train/{job_id}                              -> job status | 404
//   GET  /api/healthz                                     -> 200
// Validation failures answer 400 {"error", "fields": {name: reason}}.
class HttpApi {
 public:
  HttpApi(InferenceService& service, HttpApiHooks hooks);
  ~HttpApi();
  HttpApi(const HttpApi&) = delete;
  HttpApi& operator=(const HttpApi&) = delete;

  // Binds and serves on a background thread; port 0 picks a free port.
  // Returns the bound port. Throws IoError if binding fails.
  int Start(int port = 0, const std::string& host = "127.0.0.1");
  void Stop();

 private:
  struct Job {
    std::string status = "pending";  // pending | done | failed
    nlohmann::ordered_json result;
    std::string error;
  };
  void Routes();

  InferenceService& service_;
  HttpApiHooks hooks_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;

  std::mutex jobs_mu_;
  std::map<std::string, Job> jobs_;
  std::vector<std::thread> job_threads_;
  std::uint64_t next_job_ = 0;
};

}  // namespace moodsense::inference
