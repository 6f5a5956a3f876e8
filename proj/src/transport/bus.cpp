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

#include "moodsense/transport/bus.hpp"

#include <algorithm>
#include <regex>

#include <boost/asio/post.hpp>
#include <boost/asio/thread_pool.hpp>
#include <spdlog/spdlog.h>

#include "moodsense/error.hpp"

namespace moodsense::transport {

TopicFilter ParseRuleQuery(std::string_view query) {
  static const std::regex kQuery(R"(^\s*SELECT\s+\*\s+FROM\s+'([^']+)'\s*$)",
                                 std::regex::icase);
  std::match_results<std::string_view::const_iterator> m;
  if (!std::regex_match(query.begin(), query.end(), m, kQuery)) {
    throw ParseError("rule query must be SELECT * FROM '<topic>': \"" +
                     std::string(query) + "\"");
  }
  return TopicFilter::Parse(m[1].str());
}

std::optional<Message> Subscription::Next(std::chrono::milliseconds timeout) {
  std::unique_lock lock(mu_);
  cv_.wait_for(lock, timeout, [&] { return !queue_.empty() || !active_; });
  if (queue_.empty()) return std::nullopt;
  Message m = std::move(queue_.front());
  queue_.pop_front();
  return m;
}

std::optional<Message> Subscription::TryNext() {
  std::lock_guard lock(mu_);
  if (queue_.empty()) return std::nullopt;
  Message m = std::move(queue_.front());
  queue_.pop_front();
  return m;
}

void Subscription::Unsubscribe() {
  {
    std::lock_guard lock(mu_);
    active_ = false;
    queue_.clear();
  }
  cv_.notify_all();
}

std::size_t Subscription::pending() const {
  std::lock_guard lock(mu_);
  return queue_.size();
}

void Subscription::Deliver(const Message& m) {
  {
    std::lock_guard lock(mu_);
    if (!active_) return;
    queue_.push_back(m);
  }
  cv_.notify_one();
}

Bus::Bus(BusOptions options)
    : options_(std::move(options)),
      pool_(std::make_unique<boost::asio::thread_pool>(
          std::max<std::size_t>(1, options_.worker_threads))) {}

Bus::~Bus() {
  WaitIdle();
  pool_->join();
}

void Bus::SetPolicy(DevicePolicy policy) {
  std::unique_lock lock(mu_);
  std::string id = policy.device_id;
  policies_.insert_or_assign(std::move(id), std::move(policy));
}

void Bus::RegisterAction(std::string id, RuleAction action) {
  std::unique_lock lock(mu_);
  actions_.insert_or_assign(std::move(id), std::move(action));
}

void Bus::AddRule(TopicRule rule) {
  TopicFilter filter = rule.filter();
  if (rule.actions.empty()) {
    throw ConfigError("rule \"" + rule.name + "\" has no actions");
  }
  std::unique_lock lock(mu_);
  for (const auto& a : rule.actions) {
    if (!actions_.contains(a)) {
      throw ConfigError("rule \"" + rule.name + "\" references unknown action \"" +
                        a + "\"");
    }
  }
  rules_.emplace_back(std::move(rule), std::move(filter));
}

bool Bus::Allowed(std::string_view device_id, const TopicFilter& requested) {
  std::shared_lock lock(mu_);
  auto it = policies_.find(device_id);
  return it != policies_.end() && it->second.allowed_filter.Covers(requested);
}

void Bus::Audit(std::string_view device, std::string_view op,
                std::string_view topic, bool allowed) {
  std::lock_guard lock(audit_mu_);
  audit_.push_back(AuditEntry{options_.clock(), std::string(device),
                              std::string(op), std::string(topic), allowed});
}

std::size_t Bus::Publish(std::string_view device_id, std::string topic,
                         std::string payload) {
  ValidateTopic(topic);
  // A valid published topic is also a valid literal filter.
  if (!Allowed(device_id, TopicFilter::Parse(topic))) {
    Audit(device_id, "publish", topic, false);
    ++denied_;
    spdlog::warn("bus: denied publish by '{}' to '{}'", device_id, topic);
    throw AuthorizationError("device '" + std::string(device_id) +
                             "' may not publish to '" + topic + "'");
  }
  Audit(device_id, "publish", topic, true);
  ++published_;

  Message m{std::move(topic), std::move(payload), options_.clock()};
  const auto segments = SplitTopic(m.topic);

  std::size_t delivered = 0;
  std::vector<std::pair<std::string, std::vector<RuleAction>>> fired;
  {
    std::shared_lock lock(mu_);
    for (const auto& sub : subscriptions_) {
      if (sub->active() && sub->filter().Matches(segments)) {
        sub->Deliver(m);
        ++delivered;
      }
    }
    for (const auto& [rule, filter] : rules_) {
      if (!filter.Matches(segments)) continue;
      std::vector<RuleAction> actions;
      for (const auto& id : rule.actions) actions.push_back(actions_.at(id));
      fired.emplace_back(rule.name, std::move(actions));
    }
  }
  for (auto& [name, actions] : fired) Fire(name, std::move(actions), m);
  return delivered;
}

void Bus::Fire(const std::string& rule_name, std::vector<RuleAction> actions,
               const Message& m) {
  ++rule_fires_;
  {
    std::lock_guard lock(idle_mu_);
    ++in_flight_;
  }
  boost::asio::post(*pool_, [this, name = rule_name, actions = std::move(actions),
                             m] {
    for (const auto& action : actions) {
      try {
        action(m);
      } catch (const std::exception& e) {
        ++action_errors_;
        spdlog::error("bus: rule '{}' action failed on '{}': {}", name, m.topic,
                      e.what());
      }
    }
    std::lock_guard lock(idle_mu_);
    if (--in_flight_ == 0) idle_cv_.notify_all();
  });
}

std::shared_ptr<Subscription> Bus::Subscribe(std::string_view device_id,
                                             std::string_view filter) {
  TopicFilter parsed = TopicFilter::Parse(filter);
  if (!Allowed(device_id, parsed)) {
    Audit(device_id, "subscribe", filter, false);
    ++denied_;
    throw AuthorizationError("device '" + std::string(device_id) +
                             "' may not subscribe to '" + std::string(filter) + "'");
  }
  Audit(device_id, "subscribe", filter, true);
  auto sub = std::make_shared<Subscription>(std::move(parsed));
  std::unique_lock lock(mu_);
  std::erase_if(subscriptions_, [](const auto& s) { return !s->active(); });
  subscriptions_.push_back(sub);
  return sub;
}

void Bus::WaitIdle() {
  std::unique_lock lock(idle_mu_);
  idle_cv_.wait(lock, [&] { return in_flight_ == 0; });
}

std::vector<AuditEntry> Bus::AuditLog() const {
  std::lock_guard lock(audit_mu_);
  return audit_;
}

Bus::Stats Bus::stats() const {
  return Stats{published_.load(), denied_.load(), rule_fires_.load(),
               action_errors_.load()};
}

}  // namespace moodsense::transport
