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

#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <map>
#include <random>

#include <boost/asio.hpp>

#include "moodsense/error.hpp"
#include "moodsense/transport/bus.hpp"
#include "moodsense/transport/round.hpp"
#include "moodsense/transport/tcp_frontend.hpp"
#include "moodsense/transport/topic.hpp"
#include "oracles.hpp"

namespace moodsense::transport {
namespace {

using nlohmann::ordered_json;

using oracles::RegexTopicMatches;

std::string Join(const std::vector<std::string>& parts) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? "/" : "") + parts[i];
  return out;
}

std::vector<std::string> RandomFilter(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> len(1, 4), pick(0, 4);
  std::vector<std::string> f;
  const int n = len(rng);
  for (int i = 0; i < n; ++i) {
    const int p = pick(rng);
    if (p == 4 && i == n - 1) {
      f.push_back("#");
    } else {
      f.push_back(p >= 3 ? "+" : std::string(1, static_cast<char>('a' + p)));
    }
  }
  return f;
}

std::string RandomTopic(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> len(1, 5), pick(0, 2);
  std::vector<std::string> t;
  const int n = len(rng);
  for (int i = 0; i < n; ++i) t.push_back(std::string(1, static_cast<char>('a' + pick(rng))));
  return Join(t);
}

TEST(TopicFilter, AgreesWithRegexOracleOnRandomCases) {
  std::mt19937_64 rng(2024);
  int matched = 0;
  for (int i = 0; i < 10'000; ++i) {
    const auto f = RandomFilter(rng);
    const auto t = RandomTopic(rng);
    const bool expect = RegexTopicMatches(f, t);
    matched += expect ? 1 : 0;
    ASSERT_EQ(TopicFilter::Parse(Join(f)).Matches(t), expect) << Join(f) << " vs " << t;
  }
  EXPECT_GT(matched, 500);  // the generator exercises both outcomes
}

TEST(TopicFilter, HashMatchesZeroOrMoreLevels) {
  const auto f = TopicFilter::Parse("iotsensors/#");
  EXPECT_TRUE(f.Matches("iotsensors"));
  EXPECT_TRUE(f.Matches("iotsensors/train"));
  EXPECT_TRUE(f.Matches("iotsensors/infer/result"));
  EXPECT_FALSE(f.Matches("other/train"));
  EXPECT_FALSE(f.Matches("iotsensorsx/train"));
}

TEST(TopicFilter, PlusMatchesExactlyOneLevel) {
  const auto f = TopicFilter::Parse("iotsensors/+");
  EXPECT_TRUE(f.Matches("iotsensors/train"));
  EXPECT_FALSE(f.Matches("iotsensors"));
  EXPECT_FALSE(f.Matches("iotsensors/infer/result"));
}

TEST(TopicFilter, RejectsMalformedPatterns) {
  for (const char* bad : {"", "a//b", "a/#/b", "a/b#", "a/+b", "/", "a/"}) {
    EXPECT_THROW(TopicFilter::Parse(bad), ParseError) << bad;
  }
}

TEST(Topic, ValidateRejectsWildcardsAndEmptyLevels) {
  EXPECT_NO_THROW(ValidateTopic("iotsensors/train"));
  for (const char* bad : {"", "a/+", "a/#", "a//b", "/a"}) {
    EXPECT_THROW(ValidateTopic(bad), ParseError) << bad;
    EXPECT_FALSE(IsValidTopic(bad));
  }
}

TEST(TopicFilter, CoversAgreesWithEnumeration) {
  // Every topic of depth <= 5 over {a, b, c}; filters use only a and b, so c
  // stands for "any other level".
  std::vector<std::string> universe;
  std::vector<std::string> level{"a", "b", "c"};
  std::vector<std::vector<std::string>> frontier{{}};
  for (int depth = 1; depth <= 5; ++depth) {
    std::vector<std::vector<std::string>> next;
    for (const auto& p : frontier) {
      for (const auto& l : level) {
        auto q = p;
        q.push_back(l);
        universe.push_back(Join(q));
        next.push_back(std::move(q));
      }
    }
    frontier = std::move(next);
  }
  std::mt19937_64 rng(5);
  for (int i = 0; i < 400; ++i) {
    auto fa = RandomFilter(rng);
    auto fb = RandomFilter(rng);
    if (fa.size() > 3 || fb.size() > 3) continue;
    const auto a = TopicFilter::Parse(Join(fa));
    const auto b = TopicFilter::Parse(Join(fb));
    bool implied = true;
    for (const auto& t : universe) {
      if (b.Matches(t) && !a.Matches(t)) {
        implied = false;
        break;
      }
    }
    EXPECT_EQ(a.Covers(b), implied) << a.str() << " covers " << b.str();
  }
}

TEST(RoundDecimal, HalfAwayFromZeroOnTheDecimalString) {
  EXPECT_EQ(RoundDecimal(1.0005), 1.001);
  EXPECT_EQ(RoundDecimal(-1.0005), -1.001);
  EXPECT_EQ(RoundDecimal(2.0004), 2.0);
  EXPECT_EQ(RoundDecimal(119.34900542495478), 119.349);
  EXPECT_EQ(RoundDecimal(0.0), 0.0);
  EXPECT_EQ(RoundDecimal(1234.5), 1234.5);
}

TEST(RoundDecimal, IdempotentAndWithinHalfAUnit) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-5000.0, 5000.0);
  for (int i = 0; i < 20'000; ++i) {
    const double x = u(rng);
    const double r = RoundDecimal(x);
    ASSERT_EQ(RoundDecimal(r), r) << x;
    ASSERT_LE(std::abs(r - x), 0.0005 + 1e-9) << x;
  }
}

TEST(RoundDecimal, AgreesWithDecimalArithmetic) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-20000.0, 20000.0);
  for (int i = 0; i < 20'000; ++i) {
    // Mix in values sitting exactly on a printed half step.
    const double x = i % 4 == 0 ? std::round(u(rng) * 10000) / 10000 : u(rng);
    ASSERT_EQ(RoundDecimal(x), oracles::DecimalRound(x)) << x;
  }
}

TEST(RoundTransform, RoundsFloatsAndLeavesEverythingElse) {
  const auto in = ordered_json::parse(
      R"({"GSR":2624.5059288537545,"BPM":119.34900542495478,"Mood":"Angry","n":7,)"
      R"("nested":{"x":[1.23456,2]},"flag":true,"none":null})");
  const auto out = RoundTransform(in);
  EXPECT_EQ(out.dump(),
            R"({"GSR":2624.506,"BPM":119.349,"Mood":"Angry","n":7,)"
            R"("nested":{"x":[1.235,2]},"flag":true,"none":null})");
  EXPECT_EQ(RoundTransform(out), out);
}

TEST(RoundTransform, NonObjectPayloadsAreTransformErrors) {
  EXPECT_THROW(RoundTransformPayload("not json"), TransformError);
  EXPECT_THROW(RoundTransformPayload("[1.23456]"), TransformError);
  EXPECT_THROW(RoundTransformPayload("42"), TransformError);
  EXPECT_EQ(RoundTransformPayload(R"({"a":1.00049})"), R"({"a":1.0})");
}

TEST(ParseRuleQuery, AcceptsSelectStarFromQuotedFilter) {
  EXPECT_EQ(ParseRuleQuery("SELECT * FROM 'iotsensors/train'").str(), "iotsensors/train");
  EXPECT_EQ(ParseRuleQuery("select * from 'iotsensors/#'").str(), "iotsensors/#");
  EXPECT_THROW(ParseRuleQuery("SELECT GSR FROM 'x'"), ParseError);
  EXPECT_THROW(ParseRuleQuery("SELECT * FROM iotsensors"), ParseError);
  EXPECT_THROW(ParseRuleQuery("SELECT * FROM 'a/#/b'"), ParseError);
}

class BusTest : public ::testing::Test {
 protected:
  BusTest() {
    bus.SetPolicy({"raspberry_pi", TopicFilter::Parse("iotsensors/#")});
    bus.SetPolicy({"iot-core", TopicFilter::Parse("#")});
  }
  Bus bus;
};

TEST_F(BusTest, PublishOutsideThePolicyIsRejectedAndAudited) {
  auto sub = bus.Subscribe("iot-core", "#");
  EXPECT_THROW(bus.Publish("raspberry_pi", "other/data", "{}"), AuthorizationError);
  EXPECT_THROW(bus.Publish("unknown-device", "iotsensors/train", "{}"), AuthorizationError);
  EXPECT_FALSE(sub->TryNext().has_value());
  const auto log = bus.AuditLog();
  ASSERT_EQ(log.size(), 3u);  // the subscribe plus two denials
  EXPECT_FALSE(log[1].allowed);
  EXPECT_EQ(log[1].topic, "other/data");
  EXPECT_EQ(bus.stats().denied, 2u);
}

TEST_F(BusTest, SubscribeOutsideThePolicyIsRejected) {
  EXPECT_THROW(bus.Subscribe("raspberry_pi", "#"), AuthorizationError);
  EXPECT_THROW(bus.Subscribe("raspberry_pi", "other/+"), AuthorizationError);
  EXPECT_NO_THROW(bus.Subscribe("raspberry_pi", "iotsensors/+"));
}

TEST_F(BusTest, SubscribersSeeMatchingMessagesInOrder) {
  auto train = bus.Subscribe("iot-core", "iotsensors/train");
  auto all = bus.Subscribe("iot-core", "iotsensors/#");
  EXPECT_EQ(bus.Publish("raspberry_pi", "iotsensors/train", "1"), 2u);
  EXPECT_EQ(bus.Publish("raspberry_pi", "iotsensors/infer", "2"), 1u);
  EXPECT_EQ(bus.Publish("raspberry_pi", "iotsensors/train", "3"), 2u);
  EXPECT_EQ(train->TryNext()->payload, "1");
  EXPECT_EQ(train->TryNext()->payload, "3");
  EXPECT_FALSE(train->TryNext());
  EXPECT_EQ(all->pending(), 3u);
  all->Unsubscribe();
  EXPECT_EQ(bus.Publish("raspberry_pi", "iotsensors/train", "4"), 1u);
  EXPECT_EQ(all->pending(), 0u);
}

TEST_F(BusTest, EachMatchingRuleFiresExactlyOncePerMessage) {
  std::mutex mu;
  std::map<std::string, std::map<std::string, int>> fired;  // rule -> payload -> n
  auto counter = [&](std::string rule) {
    return [&, rule](const Message& m) {
      std::lock_guard lock(mu);
      ++fired[rule][m.payload];
    };
  };
  bus.RegisterAction("count-train", counter("train"));
  bus.RegisterAction("count-all", counter("all"));
  bus.RegisterAction("count-plus", counter("plus"));
  bus.AddRule({"train", "SELECT * FROM 'iotsensors/train'", {"count-train"}});
  bus.AddRule({"all", "SELECT * FROM 'iotsensors/#'", {"count-all"}});
  bus.AddRule({"plus", "SELECT * FROM 'iotsensors/+/result'", {"count-plus"}});

  const std::vector<std::string> topics{"iotsensors/train", "iotsensors/infer",
                                        "iotsensors/infer/result", "iotsensors"};
  std::map<std::string, std::map<std::string, int>> expected;
  std::mt19937_64 rng(8);
  for (int i = 0; i < 500; ++i) {
    const auto& topic = topics[rng() % topics.size()];
    const std::string payload = std::to_string(i);
    bus.Publish("raspberry_pi", topic, payload);
    for (const auto& [rule, filter] :
         {std::pair{"train", "iotsensors/train"}, std::pair{"all", "iotsensors/#"},
          std::pair{"plus", "iotsensors/+/result"}}) {
      if (RegexTopicMatches(TopicFilter::Parse(filter).segments(), topic)) {
        ++expected[rule][payload];
      }
    }
  }
  bus.WaitIdle();
  EXPECT_EQ(fired, expected);
  std::size_t total = 0;
  for (const auto& [rule, m] : expected) total += m.size();
  EXPECT_EQ(bus.stats().rule_fires, total);
}

TEST_F(BusTest, RulesWithBadQueriesOrActionsAreRejected) {
  bus.RegisterAction("noop", [](const Message&) {});
  EXPECT_THROW(bus.AddRule({"r", "SELECT * FROM 'a/#/b'", {"noop"}}), ParseError);
  EXPECT_THROW(bus.AddRule({"r", "SELECT * FROM 'a'", {}}), ConfigError);
  EXPECT_THROW(bus.AddRule({"r", "SELECT * FROM 'a'", {"missing"}}), ConfigError);
}

TEST_F(BusTest, ThrowingActionsAreCountedAndDoNotStopOthers) {
  std::atomic<int> ok{0};
  bus.RegisterAction("boom", [](const Message&) { throw std::runtime_error("boom"); });
  bus.RegisterAction("ok", [&](const Message&) { ++ok; });
  bus.AddRule({"r1", "SELECT * FROM 'iotsensors/train'", {"boom", "ok"}});
  for (int i = 0; i < 10; ++i) bus.Publish("raspberry_pi", "iotsensors/train", "{}");
  bus.WaitIdle();
  EXPECT_EQ(bus.stats().action_errors, 10u);
  EXPECT_EQ(ok.load(), 10);
}

TEST_F(BusTest, WaitIdleCoversMessagesPublishedByActions) {
  std::atomic<int> results{0};
  bus.RegisterAction("forward", [&](const Message& m) {
    bus.Publish("iot-core", "iotsensors/infer/result", m.payload);
  });
  bus.RegisterAction("count", [&](const Message&) { ++results; });
  bus.AddRule({"fwd", "SELECT * FROM 'iotsensors/infer'", {"forward"}});
  bus.AddRule({"res", "SELECT * FROM 'iotsensors/infer/result'", {"count"}});
  for (int i = 0; i < 50; ++i) bus.Publish("raspberry_pi", "iotsensors/infer", "{}");
  bus.WaitIdle();
  EXPECT_EQ(results.load(), 50);
}

TEST_F(BusTest, InvalidTopicsAreParseErrors) {
  EXPECT_THROW(bus.Publish("iot-core", "a/+", "{}"), ParseError);
  EXPECT_THROW(bus.Publish("iot-core", "", "{}"), ParseError);
}

class Line {
 public:
  explicit Line(std::uint16_t port) : socket_(io_) {
    socket_.connect({boost::asio::ip::make_address("127.0.0.1"), port});
  }
  void Send(const ordered_json& j) { boost::asio::write(socket_, boost::asio::buffer(j.dump() + "\n")); }
  ordered_json Read() {
    const auto n = boost::asio::read_until(socket_, buf_, '\n');
    std::string line(boost::asio::buffers_begin(buf_.data()),
                     boost::asio::buffers_begin(buf_.data()) + static_cast<std::ptrdiff_t>(n));
    buf_.consume(n);
    return ordered_json::parse(line);
  }

 private:
  boost::asio::io_context io_;
  boost::asio::ip::tcp::socket socket_;
  boost::asio::streambuf buf_;
};

TEST_F(BusTest, TcpFrontEndPublishesAndSubscribes) {
  TcpFrontend front(bus, "raspberry_pi");
  const auto port = front.Start();
  auto local = bus.Subscribe("iot-core", "iotsensors/train");

  Line client(port);
  client.Send({{"op", "pub"}, {"topic", "iotsensors/train"}, {"payload", {{"GSR", 1.5}}}});
  EXPECT_EQ(client.Read()["op"], "ack");
  auto m = local->Next(std::chrono::seconds(2));
  ASSERT_TRUE(m);
  EXPECT_EQ(ordered_json::parse(m->payload)["GSR"], 1.5);

  client.Send({{"op", "pub"}, {"topic", "other/x"}, {"payload", 1}});
  const auto err = client.Read();
  EXPECT_EQ(err["op"], "error");
  EXPECT_EQ(err["code"], "authorization_error");

  client.Send({{"op", "sub"}, {"topic", "iotsensors/infer/result"}});
  EXPECT_EQ(client.Read()["op"], "ack");
  bus.Publish("iot-core", "iotsensors/infer/result", R"({"label":"Sad"})");
  const auto msg = client.Read();
  EXPECT_EQ(msg["op"], "msg");
  EXPECT_EQ(msg["payload"]["label"], "Sad");

  client.Send({{"op", "connect"}, {"device", "iot-core"}});
  EXPECT_EQ(client.Read()["op"], "ack");
  client.Send({{"op", "pub"}, {"topic", "other/x"}, {"payload", 1}});
  EXPECT_EQ(client.Read()["op"], "ack");

  boost::asio::io_context io;
  boost::asio::ip::tcp::socket raw(io);
  raw.connect({boost::asio::ip::make_address("127.0.0.1"), port});
  boost::asio::write(raw, boost::asio::buffer(std::string("garbage\n")));
  boost::asio::streambuf buf;
  boost::asio::read_until(raw, buf, '\n');
  std::string reply(boost::asio::buffers_begin(buf.data()), boost::asio::buffers_end(buf.data()));
  EXPECT_EQ(ordered_json::parse(reply)["op"], "error");
  front.Stop();
}

}  // namespace
}  // namespace moodsense::transport
