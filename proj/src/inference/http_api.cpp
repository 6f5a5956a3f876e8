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

#include "moodsense/inference/http_api.hpp"

#include <algorithm>
#include <cctype>

#include <spdlog/spdlog.h>

#include "httplib.h"
#include "moodsense/error.hpp"
#include "moodsense/labels.hpp"

namespace moodsense::inference {
namespace {

using J = nlohmann::ordered_json;

bool KnownRegime(std::string_view name) {
  return std::any_of(kLabelMap.begin(), kLabelMap.end(), [&](std::string_view label) {
    return label.size() == name.size() &&
           std::equal(label.begin(), label.end(), name.begin(), [](char a, char b) {
             return std::tolower(static_cast<unsigned char>(a)) ==
                    std::tolower(static_cast<unsigned char>(b));
           });
  });
}

void Reply(httplib::Response& res, int status, const J& body) {
  res.status = status;
  res.set_header("Access-Control-Allow-Origin", "*");
  res.set_content(body.dump(), "application/json");
}

void ReplyError(httplib::Response& res, const Error& e) {
  int status = 500;
  switch (e.code()) {
    case ErrorCode::kNotFound: status = 404; break;
    case ErrorCode::kRange:
    case ErrorCode::kInput:
    case ErrorCode::kParse: status = 400; break;
    default: break;
  }
  Reply(res, status, {{"error", ToString(e.code())}, {"message", e.what()}});
}

// Parses the body as an object or answers 400.
std::optional<J> BodyObject(const httplib::Request& req, httplib::Response& res) {
  try {
    auto j = J::parse(req.body);
    if (j.is_object()) return j;
  } catch (const J::exception&) {
  }
  Reply(res, 400, {{"error", "validation_error"}, {"fields", {{"body", "must be a JSON object"}}}});
  return std::nullopt;
}

}  // namespace

HttpApi::HttpApi(InferenceService& service, HttpApiHooks hooks)
    : service_(service), hooks_(std::move(hooks)), server_(std::make_unique<httplib::Server>()) {
  Routes();
}

HttpApi::~HttpApi() { Stop(); }

void HttpApi::Routes() {
  auto& s = *server_;

  s.Get("/api/healthz", [](const httplib::Request&, httplib::Response& res) {
    Reply(res, 200, {{"status", "ok"}});
  });

  s.Post("/api/sessions", [this](const httplib::Request& req, httplib::Response& res) {
    auto body = BodyObject(req, res);
    if (!body) return;
    J fields = J::object();
    const auto pid = body->find("participant_id");
    if (pid == body->end() || !pid->is_string() || pid->get<std::string>().empty()) {
      fields["participant_id"] = "required non-empty string";
    }
    int window = 10;
    if (auto w = body->find("window_s"); w != body->end()) {
      if (!w->is_number_integer() || w->get<long long>() < 1 || w->get<long long>() > 300) {
        fields["window_s"] = "must be an integer in [1, 300]";
      } else {
        window = w->get<int>();
      }
    }
    std::optional<std::string> regime;
    if (auto r = body->find("regime"); r != body->end() && !r->is_null()) {
      if (!r->is_string() || !KnownRegime(r->get<std::string>())) {
        fields["regime"] = "must be one of Angry, Happy, Sad";
      } else {
        regime = r->get<std::string>();
      }
    }
    if (!fields.empty()) {
      Reply(res, 400, {{"error", "validation_error"}, {"fields", fields}});
      return;
    }
    try {
      const auto id = service_.StartSession(pid->get<std::string>(), window, regime);
      Reply(res, 202, {{"session_id", id}, {"status", "pending"}});
    } catch (const Error& e) {
      ReplyError(res, e);
    }
  });

  s.Get(R"(/api/sessions/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
    const auto session = service_.GetSession(req.matches[1].str());
    if (!session) {
      Reply(res, 404, {{"error", "not_found"}, {"message", "unknown session"}});
      return;
    }
    Reply(res, 200, session->ToJson());
  });

  s.Get("/api/sessions", [this](const httplib::Request& req, httplib::Response& res) {
    std::size_t limit = 50;
    if (req.has_param("limit")) {
      try {
        limit = std::stoul(req.get_param_value("limit"));
      } catch (const std::exception&) {
        Reply(res, 400, {{"error", "validation_error"}, {"fields", {{"limit", "must be an integer"}}}});
        return;
      }
    }
    J arr = J::array();
    for (const auto& session : service_.Sessions(limit)) arr.push_back(session.ToJson());
    Reply(res, 200, {{"sessions", arr}});
  });

  s.Get(R"(/api/model/([^/]+)/metrics)",
        [this](const httplib::Request& req, httplib::Response& res) {
          try {
            if (!hooks_.metrics) throw NotFoundError("metrics unavailable");
            Reply(res, 200, hooks_.metrics(req.matches[1].str()));
          } catch (const Error& e) {
            ReplyError(res, e);
          }
        });

  s.Post("/api/train", [this](const httplib::Request& req, httplib::Response& res) {
    auto body = BodyObject(req, res);
    if (!body) return;
    const auto pid = body->find("participant_id");
    if (pid == body->end() || !pid->is_string() || pid->get<std::string>().empty()) {
      Reply(res, 400, {{"error", "validation_error"},
                       {"fields", {{"participant_id", "required non-empty string"}}}});
      return;
    }
    learn::Hyperparams hp;
    if (auto h = body->find("hyperparams"); h != body->end() && !h->is_null()) {
      try {
        hp = learn::Hyperparams::FromJson(*h);
        hp.Validate();
      } catch (const Error& e) {
        Reply(res, 400, {{"error", "validation_error"}, {"fields", {{"hyperparams", e.what()}}}});
        return;
      }
    }
    if (!hooks_.train) {
      Reply(res, 503, {{"error", "training unavailable"}});
      return;
    }
    std::lock_guard lock(jobs_mu_);
    const std::string id = "job-" + std::to_string(++next_job_);
    jobs_[id] = Job{};
    job_threads_.emplace_back([this, id, participant = pid->get<std::string>(), hp] {
      Job done;
      try {
        done.result = hooks_.train(participant, hp);
        done.status = "done";
      } catch (const std::exception& e) {
        done.status = "failed";
        done.error = e.what();
      }
      std::lock_guard lock(jobs_mu_);
      jobs_[id] = std::move(done);
    });
    Reply(res, 202, {{"job_id", id}, {"status", "pending"}});
  });

  s.Get(R"(/api/train/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
    std::lock_guard lock(jobs_mu_);
    auto it = jobs_.find(req.matches[1].str());
    if (it == jobs_.end()) {
      Reply(res, 404, {{"error", "not_found"}, {"message", "unknown job"}});
      return;
    }
    J j = {{"job_id", it->first}, {"status", it->second.status}};
    if (it->second.status == "done") j["result"] = it->second.result;
    if (it->second.status == "failed") j["error"] = it->second.error;
    Reply(res, 200, j);
  });
}

int HttpApi::Start(int port, const std::string& host) {
  int bound = port;
  if (port == 0) {
    bound = server_->bind_to_any_port(host);
  } else if (!server_->bind_to_port(host, port)) {
    bound = -1;
  }
  if (bound < 0) throw IoError("cannot bind HTTP API to " + host + ":" + std::to_string(port));
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  spdlog::info("http api listening on {}:{}", host, bound);
  return bound;
}

void HttpApi::Stop() {
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
  std::vector<std::thread> jobs;
  {
    std::lock_guard lock(jobs_mu_);
    jobs.swap(job_threads_);
  }
  for (auto& t : jobs) {
    if (t.joinable()) t.join();
  }
}

}  // namespace moodsense::inference
