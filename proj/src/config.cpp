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

#include "moodsense/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "moodsense/error.hpp"
#include "moodsense/inference/recommend.hpp"
#include "moodsense/labels.hpp"

namespace moodsense {
namespace {

namespace pt = boost::property_tree;

class Reader {
 public:
  Reader(const pt::ptree& tree, std::string source) : tree_(tree), source_(std::move(source)) {}

  template <typename T>
  void Get(const std::string& section, const std::string& key, T& out) {
    const pt::ptree* node = &tree_;
    if (!section.empty()) {
      auto it = tree_.find(section);
      if (it == tree_.not_found()) return;
      node = &it->second;
    }
    auto v = node->get_optional<std::string>(key);
    if (!v) return;
    try {
      std::istringstream in(*v);
      T parsed{};
      in >> std::noskipws >> parsed;
      if (!in || in.peek() != std::char_traits<char>::eof()) throw std::invalid_argument("bad");
      out = parsed;
    } catch (const std::exception&) {
      Fail(section, key, "cannot parse \"" + *v + "\"");
    }
  }

  void Fail(const std::string& section, const std::string& key, const std::string& why) const {
    throw ConfigError(source_ + ": " + (section.empty() ? key : section + "." + key) + ": " +
                      why);
  }

 private:
  const pt::ptree& tree_;
  std::string source_;
};

template <>
void Reader::Get<std::string>(const std::string& section, const std::string& key,
                              std::string& out) {
  const pt::ptree* node = &tree_;
  if (!section.empty()) {
    auto it = tree_.find(section);
    if (it == tree_.not_found()) return;
    node = &it->second;
  }
  if (auto v = node->get_optional<std::string>(key)) out = *v;
}

void CheckKeys(const Reader& r, const pt::ptree& node, const std::string& section,
               const std::set<std::string>& allowed) {
  for (const auto& [key, child] : node) {
    if (!allowed.count(key)) r.Fail(section, key, "unknown key");
  }
}

}  // namespace

void Config::Validate() const {
  auto fail = [](const std::string& field, const std::string& why) {
    throw ConfigError(field + ": " + why);
  };
  if (store_root.empty()) fail("store", "must not be empty");
  if (window_s < 1 || window_s > 300) fail("window_s", "must be in [1, 300]");
  if (participant.empty()) fail("participant", "must not be empty");
  if (bus_workers < 1) fail("bus.workers", "must be >= 1");
  if (bus_tcp_port < 0 || bus_tcp_port > 65535) fail("bus.tcp_port", "must be in [0, 65535]");
  if (http_port < 0 || http_port > 65535) fail("http.port", "must be in [0, 65535]");
  if (!(gsr.divider_r_ohm > 0) || !(gsr.vcc_volts > 0) || !(gsr.scale > 0)) {
    fail("gsr", "divider_r_ohm, vcc_volts and scale must be positive");
  }
  if (!(gsr.reading_min < gsr.reading_max)) fail("gsr", "reading_min must be < reading_max");
  for (const auto& r : regimes) {
    try {
      r.Validate();
    } catch (const Error& e) {
      fail("regime." + r.label, e.what());
    }
  }
  try {
    hyperparams.Validate();
  } catch (const Error& e) {
    fail("hyperparams", e.what());
  }
  if (hyperparams.epochs < 1) fail("hyperparams.epochs", "must be >= 1");
  if (!(test_fraction >= 0 && test_fraction < 1)) fail("training.test_fraction", "must be in [0, 1)");
  if (smote_k < 1) fail("training.smote_k", "must be >= 1");
  if (flush.flush_rows < 1) fail("flush.rows", "must be >= 1");
  if (flush.flush_interval_s < 1) fail("flush.interval_s", "must be >= 1");
  for (const auto& s : sinks) {
    try {
      s.Validate();
    } catch (const Error& e) {
      fail("sink." + s.topic_name, e.what());
    }
  }
  if (!recommendations.empty()) {
    try {
      inference::Recommender check(recommendations);
    } catch (const Error& e) {
      fail("recommendations", e.what());
    }
  }
}

Config ParseConfig(const std::string& text, const std::string& source) {
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(source + ":" + std::to_string(e.line()) + ": " + e.message());
  }

  Config c;
  Reader r(tree, source);
  const std::set<std::string> known_sections = {"bus", "http", "gsr", "hyperparams",
                                                "training", "flush", "recommendations"};
  for (const auto& [name, node] : tree) {
    if (node.empty()) {
      if (!std::set<std::string>{"seed", "store", "window_s", "participant"}.count(name)) {
        r.Fail("", name, "unknown key");
      }
      continue;
    }
    if (known_sections.count(name) || name.rfind("regime.", 0) == 0 ||
        name.rfind("sink.", 0) == 0) {
      continue;
    }
    r.Fail(name, "*", "unknown section");
  }

  std::string store = c.store_root.string();
  r.Get("", "seed", c.seed);
  r.Get("", "store", store);
  c.store_root = store;
  r.Get("", "window_s", c.window_s);
  r.Get("", "participant", c.participant);

  if (auto it = tree.find("bus"); it != tree.not_found()) {
    CheckKeys(r, it->second, "bus", {"workers", "tcp_port", "host"});
  }
  r.Get("bus", "workers", c.bus_workers);
  r.Get("bus", "tcp_port", c.bus_tcp_port);
  r.Get("bus", "host", c.bus_host);
  if (auto it = tree.find("http"); it != tree.not_found()) {
    CheckKeys(r, it->second, "http", {"host", "port"});
  }
  r.Get("http", "host", c.http_host);
  r.Get("http", "port", c.http_port);

  if (auto it = tree.find("gsr"); it != tree.not_found()) {
    CheckKeys(r, it->second, "gsr",
              {"divider_r_ohm", "vcc_volts", "scale", "reading_min", "reading_max"});
  }
  r.Get("gsr", "divider_r_ohm", c.gsr.divider_r_ohm);
  r.Get("gsr", "vcc_volts", c.gsr.vcc_volts);
  r.Get("gsr", "scale", c.gsr.scale);
  r.Get("gsr", "reading_min", c.gsr.reading_min);
  r.Get("gsr", "reading_max", c.gsr.reading_max);

  for (auto& regime : c.regimes) {
    const std::string sec = "regime." + regime.label;
    if (auto it = tree.find(sec); it != tree.not_found()) {
      CheckKeys(r, it->second, sec, {"gsr_mean", "gsr_std", "bpm_mean", "bpm_std"});
    }
    r.Get(sec, "gsr_mean", regime.gsr_mean);
    r.Get(sec, "gsr_std", regime.gsr_std);
    r.Get(sec, "bpm_mean", regime.bpm_mean);
    r.Get(sec, "bpm_std", regime.bpm_std);
  }
  for (const auto& [name, node] : tree) {
    if (name.rfind("regime.", 0) == 0 && !LabelIndex(name.substr(7))) {
      r.Fail(name, "*", "unknown regime label");
    }
  }

  if (auto it = tree.find("hyperparams"); it != tree.not_found()) {
    CheckKeys(r, it->second, "hyperparams",
              {"learning_rate", "epochs", "l2_lambda", "batch_size", "loss"});
  }
  r.Get("hyperparams", "learning_rate", c.hyperparams.learning_rate);
  r.Get("hyperparams", "epochs", c.hyperparams.epochs);
  r.Get("hyperparams", "l2_lambda", c.hyperparams.l2_lambda);
  r.Get("hyperparams", "batch_size", c.hyperparams.batch_size);
  r.Get("hyperparams", "loss", c.hyperparams.loss);
  c.hyperparams.seed = c.seed;

  if (auto it = tree.find("training"); it != tree.not_found()) {
    CheckKeys(r, it->second, "training", {"test_fraction", "smote_k"});
  }
  r.Get("training", "test_fraction", c.test_fraction);
  r.Get("training", "smote_k", c.smote_k);

  if (auto it = tree.find("flush"); it != tree.not_found()) {
    CheckKeys(r, it->second, "flush", {"rows", "interval_s"});
  }
  r.Get("flush", "rows", c.flush.flush_rows);
  r.Get("flush", "interval_s", c.flush.flush_interval_s);

  bool sinks_seen = false;
  for (const auto& [name, node] : tree) {
    if (name.rfind("sink.", 0) != 0) continue;
    if (!sinks_seen) c.sinks.clear();
    sinks_seen = true;
    CheckKeys(r, node, name, {"kind", "target"});
    inference::SinkConfig s;
    s.topic_name = name.substr(5);
    std::string kind = "console";
    r.Get(name, "kind", kind);
    r.Get(name, "target", s.target);
    try {
      s.kind = inference::ParseSinkKind(kind);
      s.Validate();
    } catch (const Error& e) {
      r.Fail(name, "kind", e.what());
    }
    c.sinks.push_back(std::move(s));
  }

  if (auto it = tree.find("recommendations"); it != tree.not_found()) {
    for (const auto& [label, node] : it->second) {
      c.recommendations[label] = node.get_value<std::string>();
    }
  }

  try {
    c.Validate();
  } catch (const ConfigError& e) {
    throw ConfigError(source + ": " + e.what());
  }
  return c;
}

Config LoadConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open config file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ParseConfig(ss.str(), path.string());
}

}  // namespace moodsense
