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

#include <fstream>
#include <sstream>

#include "commands.hpp"
#include "moodsense/config.hpp"
#include "moodsense/error.hpp"
#include "test_support.hpp"

namespace moodsense::cli {
namespace {

const std::filesystem::path kSourceDir = MOODSENSE_SOURCE_DIR;

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run Cli(std::vector<std::string> args, const std::string& stdin_text = "") {
  args.insert(args.begin(), "moodsense");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::istringstream in(stdin_text);
  std::ostringstream out, err;
  Run r;
  r.code = RunCli(static_cast<int>(argv.size()), argv.data(), in, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string Slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST(Eval, PublishedMatrixMatchesGolden) {
  const auto r = Cli({"eval", (kSourceDir / "tests/data/reference_confusion.json").string()});
  EXPECT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("accuracy 0.9246"), std::string::npos);
  EXPECT_EQ(r.out, Slurp(kSourceDir / "tests/golden/eval_reference.txt"));
}

TEST(Eval, BadInputs) {
  EXPECT_EQ(Cli({"eval", "/nonexistent/m.json"}).code, kExitFailure);
  testing::TempDir dir;
  std::ofstream(dir.path() / "bad.json") << "[[1,2],[3,4]]";
  const auto r = Cli({"eval", (dir.path() / "bad.json").string()});
  EXPECT_EQ(r.code, kExitFailure);
  EXPECT_NE(r.err.find("error: "), std::string::npos);
  EXPECT_EQ(Cli({"eval"}).code, kExitUsage);
}

class HelpGolden : public ::testing::TestWithParam<std::string> {};

TEST_P(HelpGolden, MatchesFrozenText) {
  const std::string name = GetParam();
  std::vector<std::string> args;
  if (name != "root") args.push_back(name);
  args.push_back("--help");
  const auto r = Cli(args);
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_EQ(r.out, Slurp(kSourceDir / "tests/golden" / ("help_" + name + ".txt")));
}

INSTANTIATE_TEST_SUITE_P(Subcommands, HelpGolden,
                         ::testing::Values("root", "generate", "ingest", "train", "eval",
                                           "serve", "demo"));

TEST(Usage, UnknownFlagsAndSubcommandsExitTwo) {
  EXPECT_EQ(Cli({}).code, kExitUsage);
  EXPECT_EQ(Cli({"frobnicate"}).code, kExitUsage);
  EXPECT_EQ(Cli({"generate", "--per-class", "0"}).code, kExitUsage);
  EXPECT_EQ(Cli({"train", "--no-such-flag"}).code, kExitUsage);
}

TEST(Generate, SmallCorpusIsDeterministic) {
  const auto a = Cli({"generate", "--per-class", "1", "--seed", "5"});
  const auto b = Cli({"generate", "--per-class", "1", "--seed", "5"});
  const auto c = Cli({"generate", "--per-class", "1", "--seed", "6"});
  ASSERT_EQ(a.code, kExitOk) << a.err;
  EXPECT_EQ(std::count(a.out.begin(), a.out.end(), '\n'), 3);
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(a.out, c.out);
}

TEST(Config, BadFileExitsTwo) {
  testing::TempDir dir;
  const auto path = dir.path() / "bad.ini";
  std::ofstream(path) << "[hyperparams]\nepochs = many\n";
  const auto r = Cli({"generate", "--per-class", "1", "--config", path.string()});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_NE(r.err.find("config_error"), std::string::npos);
  EXPECT_NE(r.err.find("hyperparams.epochs"), std::string::npos);
  EXPECT_EQ(Cli({"generate", "--config", (dir.path() / "missing.ini").string()}).code, kExitUsage);
}

TEST(Config, ExampleFileHoldsTheDefaults) {
  const auto c = LoadConfig(kSourceDir / "tools/moodsense/example.ini");
  const Config d;
  EXPECT_EQ(c.seed, d.seed);
  EXPECT_EQ(c.window_s, d.window_s);
  EXPECT_EQ(c.hyperparams, d.hyperparams);
  EXPECT_EQ(c.flush.flush_rows, d.flush.flush_rows);
  EXPECT_EQ(c.regimes[0].gsr_mean, d.regimes[0].gsr_mean);
  EXPECT_EQ(c.recommendations.size(), 3u);
  ASSERT_EQ(c.sinks.size(), 1u);
}

TEST(Config, ErrorsNameTheLocation) {
  try {
    ParseConfig("seed = 1\n[bus\n", "x.ini");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(std::string(e.what()).rfind("x.ini:2:", 0), 0u) << e.what();
  }
  try {
    ParseConfig("[http]\nprot = 1\n", "x.ini");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("http.prot"), std::string::npos) << e.what();
  }
  EXPECT_THROW(ParseConfig("[regime.Bored]\ngsr_mean = 1\n", "x.ini"), ConfigError);
  EXPECT_THROW(ParseConfig("window_s = 0\n", "x.ini"), ConfigError);
  EXPECT_THROW(ParseConfig("[sink.x]\nkind = webhook\ntarget = nope\n", "x.ini"), ConfigError);
}

TEST(EndToEnd, GenerateTrainDemo) {
  testing::TempDir dir;
  const std::string store = (dir.path() / "store").string();
  auto r = Cli({"generate", "--per-class", "300", "--publish", "--store", store, "--out",
                (dir.path() / "corpus.ndjson").string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;

  r = Cli({"demo", "--store", store, "--fast"});
  EXPECT_EQ(r.code, kExitFailure);  // no model yet
  EXPECT_NE(r.err.find("not_found"), std::string::npos) << r.err;

  r = Cli({"train", "--store", store});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto at = r.out.find("held-out accuracy ");
  ASSERT_NE(at, std::string::npos) << r.out;
  EXPECT_GE(std::stod(r.out.substr(at + 18)), 0.9) << r.out;
  EXPECT_NE(r.out.find("Actual    Prediction"), std::string::npos);

  r = Cli({"demo", "--store", store, "--regime", "angry", "--window", "2", "--sessions", "2",
           "--fast"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find(" Angry elapsed_ms "), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("latency excl. window"), std::string::npos);

  // Re-ingesting the written corpus adds the same rows again.
  r = Cli({"ingest", "--store", store, "--in", (dir.path() / "corpus.ndjson").string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("ingested 900 of 900"), std::string::npos) << r.out;
}

TEST(Ingest, MalformedLinesAreDeadLettered) {
  testing::TempDir dir;
  const auto r = Cli({"ingest", "--store", (dir.path() / "s").string()},
                     "{\"GSR\":1.0,\"BPM\":60.0,\"Mood\":\"Sad\"}\nnot json\n[1,2]\n");
  EXPECT_EQ(r.code, kExitFailure);
  EXPECT_NE(r.out.find("ingested 1 of 3"), std::string::npos) << r.out;
}

}  // namespace
}  // namespace moodsense::cli
