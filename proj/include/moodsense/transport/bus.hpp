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
#include <condition_variable>
#include <cstddef>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "moodsense/clock.hpp"
#include "moodsense/transport/topic.hpp"

namespace boost::asio {
class thread_pool;
}

namespace moodsense::transport {

inline constexpr std::string_view kTrainTopic = "iotsensors/train";
inline constexpr std::string_view kInferTopic = "iotsensors/infer";
inline constexpr std::string_view kInferResultTopic = "iotsensors/infer/result";
inline constexpr std::string_view kDeadLetterTopic = "iotsensors/deadletter";

struct Message {
  std::string topic;
  std::string payload;  // JSON document by convention
  EpochMs published_at = 0;
};

struct DevicePolicy {
  std::string device_id;
  TopicFilter allowed_filter;
};

// Parses "SELECT * FROM '<topic filter>'" (keywords case-insensitive).
TopicFilter ParseRuleQuery(std::string_view query);

struct TopicRule {
  std::string name;
  std::string query;
  std::vector<std::string> actions;

  TopicFilter filter() const { return ParseRuleQuery(query); }
};

struct AuditEntry {
  EpochMs at = 0;
  std::string device_id;
  std::string operation;  // publish | subscribe
  std::string topic;
  bool allowed = false;
};

// Subscriber-side queue. Messages arrive in publish order; Next() blocks up to
// the timeout. After Unsubscribe() nothing further is queued.
class Subscription {
 public:
  explicit Subscription(TopicFilter filter) : filter_(std::move(filter)) {}

  std::optional<Message> Next(std::chrono::milliseconds timeout);
  std::optional<Message> TryNext();
  void Unsubscribe();

  bool active() const { return active_.load(); }
  const TopicFilter& filter() const { return filter_; }
  std::size_t pending() const;

 private:
  friend class Bus;
  void Deliver(const Message& m);

  TopicFilter filter_;
  std::atomic<bool> active_{true};
  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::deque<Message> queue_;
};

using RuleAction = std::function<void(const Message&)>;

struct BusOptions {
  std::size_t worker_threads = 2;
  ClockFn clock = SystemClock();
};

// In-process pub/sub broker with per-device topic policies and a rules
// engine. QoS 0, nothing retained. Rule actions run on a worker pool, each
// matching rule exactly once per published message.
class Bus {
 public:
  explicit Bus(BusOptions options = {});
  ~Bus();

  Bus(const Bus&) = delete;
  Bus& operator=(const Bus&) = delete;

  void SetPolicy(DevicePolicy policy);
  void RegisterAction(std::string id, RuleAction action);
  // Throws ParseError for a bad query, ConfigError for an empty or unknown
  // action list.
  void AddRule(TopicRule rule);

  // Returns the number of subscriptions the message was delivered to.
  // Throws ParseError for an invalid topic and AuthorizationError when the
  // device policy does not allow it; denied messages reach nobody.
  std::size_t Publish(std::string_view device_id, std::string topic,
                      std::string payload);

  std::shared_ptr<Subscription> Subscribe(std::string_view device_id,
                                          std::string_view filter);

  // Blocks until every queued rule action (including ones triggered by
  // actions) has finished.
  void WaitIdle();

  std::vector<AuditEntry> AuditLog() const;

  struct Stats {
    std::size_t published = 0;
    std::size_t denied = 0;
    std::size_t rule_fires = 0;
    std::size_t action_errors = 0;
  };
  Stats stats() const;

 private:
  bool Allowed(std::string_view device_id, const TopicFilter& requested);
  void Audit(std::string_view device, std::string_view op, std::string_view topic,
             bool allowed);
  void Fire(const std::string& rule_name, std::vector<RuleAction> actions,
            const Message& m);

  BusOptions options_;
  std::unique_ptr<boost::asio::thread_pool> pool_;

  mutable std::shared_mutex mu_;
  std::map<std::string, DevicePolicy, std::less<>> policies_;
  std::map<std::string, RuleAction, std::less<>> actions_;
  std::vector<std::pair<TopicRule, TopicFilter>> rules_;
  std::vector<std::shared_ptr<Subscription>> subscriptions_;

  mutable std::mutex audit_mu_;
  std::vector<AuditEntry> audit_;

  std::mutex idle_mu_;
  std::condition_variable idle_cv_;
  std::size_t in_flight_ = 0;

  std::atomic<std::size_t> published_{0};
  std::atomic<std::size_t> denied_{0};
  std::atomic<std::size_t> rule_fires_{0};
  std::atomic<std::size_t> action_errors_{0};
};

}  // namespace moodsense::transport
