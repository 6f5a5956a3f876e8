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

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "moodsense/config.hpp"
#include "moodsense/learn/metrics.hpp"
#include "moodsense/learn/training_job.hpp"

namespace moodsense::cli {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;  // bad flags or bad config

// Flags shared by every subcommand; set values override the config file.
struct CommonFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> store;
};

// Config file (if any) with flag overrides applied. Throws ConfigError.
Config ResolveConfig(const CommonFlags& flags);

struct GenerateArgs {
  std::optional<std::string> participant;
  int per_class = 3500;
  std::string out = "-";  // "-" = stdout
  bool publish = false;   // also push through the bus into the store
};
int CmdGenerate(const Config& cfg, const GenerateArgs& args, std::ostream& out,
                std::ostream& err);

struct IngestArgs {
  std::string in = "-";
};
int CmdIngest(const Config& cfg, const IngestArgs& args, std::istream& in, std::ostream& out,
              std::ostream& err);

struct TrainArgs {
  std::optional<std::string> participant;
  std::optional<double> learning_rate;
  std::optional<int> epochs;
  std::optional<double> l2_lambda;
  std::optional<int> batch_size;
  std::optional<double> test_fraction;
};
int CmdTrain(const Config& cfg, const TrainArgs& args, std::ostream& out, std::ostream& err);

struct EvalArgs {
  std::string matrix_path;
};
int CmdEval(const EvalArgs& args, std::ostream& out, std::ostream& err);

struct ServeArgs {
  std::optional<int> port;
  std::optional<int> tcp_port;
};
int CmdServe(const Config& cfg, const ServeArgs& args, std::ostream& out, std::ostream& err);

struct DemoArgs {
  std::optional<std::string> participant;
  std::optional<std::string> regime;
  std::optional<int> window_s;
  int sessions = 1;
  bool fast = false;  // no 1 Hz pacing of the sensing window
};

struct DemoSummary {
  std::vector<std::string> labels;
  std::vector<double> elapsed_ms;     // trigger -> result
  std::vector<double> processing_ms;  // window end -> result
};
// Runs the sessions against the stored model and returns per-session data.
DemoSummary RunDemo(const Config& cfg, const DemoArgs& args, std::ostream& out);
int CmdDemo(const Config& cfg, const DemoArgs& args, std::ostream& out, std::ostream& err);

// Labelled confusion table followed by per-class metrics.
void PrintEvalReport(const learn::EvalReport& report, std::ostream& out);

// Full command line: parses argv with CLI11 and dispatches. --help output and
// usage errors go to `out` / `err`.
int RunCli(int argc, const char* const* argv, std::istream& in, std::ostream& out,
           std::ostream& err);

}  // namespace moodsense::cli
