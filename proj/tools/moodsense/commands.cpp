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

#include "commands.hpp"

#include <atomic>
#include <chrono>
#include <csignal>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <thread>

#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "moodsense/error.hpp"
#include "moodsense/inference/recommend.hpp"
#include "moodsense/runtime.hpp"
#include "moodsense/sensorsim/simulator.hpp"

namespace moodsense::cli {
namespace {

std::atomic<bool> g_stop{false};

void OnSignal(int) { g_stop = true; }

sensorsim::CorpusOptions CorpusOptionsFor(const Config& cfg) {
  sensorsim::CorpusOptions opts;
  opts.seed = cfg.seed;
  opts.simulator.calibration = cfg.gsr;
  return opts;
}

std::string Fixed(double v, int digits) {
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(digits) << v;
  return ss.str();
}

std::string OptionalFixed(const std::optional<double>& v) { return v ? Fixed(*v, 4) : "-"; }

}  // namespace

Config ResolveConfig(const CommonFlags& flags) {
  Config cfg = flags.config_path.empty() ? Config{} : LoadConfig(flags.config_path);
  if (flags.seed) {
    cfg.seed = *flags.seed;
    cfg.hyperparams.seed = *flags.seed;
  }
  if (flags.store) cfg.store_root = *flags.store;
  cfg.Validate();
  return cfg;
}

void PrintEvalReport(const learn::EvalReport& r, std::ostream& out) {
  out << std::left << std::setw(10) << "Actual" << "Prediction\n";
  out << std::setw(10) << "";
  for (const auto& name : kLabelMap) out << std::right << std::setw(8) << name;
  out << '\n';
  for (int a = 0; a < kNumClasses; ++a) {
    out << std::left << std::setw(10) << kLabelMap[a];
    for (int p = 0; p < kNumClasses; ++p) out << std::right << std::setw(8) << r.confusion[a][p];
    out << '\n';
  }
  out << "\naccuracy " << Fixed(r.accuracy, 4) << '\n';
  out << std::left << std::setw(10) << "class" << std::right << std::setw(11) << "precision"
      << std::setw(9) << "recall" << std::setw(9) << "f1" << std::setw(9) << "auc" << '\n';
  for (int c = 0; c < kNumClasses; ++c) {
    out << std::left << std::setw(10) << kLabelMap[c] << std::right << std::setw(11)
        << OptionalFixed(r.precision[c]) << std::setw(9) << OptionalFixed(r.recall[c])
        << std::setw(9) << OptionalFixed(r.f1[c]) << std::setw(9) << OptionalFixed(r.auc[c])
        << '\n';
  }
}

int CmdGenerate(const Config& cfg, const GenerateArgs& args, std::ostream& out,
                std::ostream& err) {
  const std::string participant = args.participant.value_or(cfg.participant);
  const auto records =
      sensorsim::GenerateCorpus(cfg.regimes, participant, args.per_class, CorpusOptionsFor(cfg));
  if (args.out == "-") {
    sensorsim::WriteNdjson(out, records);
  } else {
    std::ofstream file(args.out, std::ios::binary | std::ios::trunc);
    if (!file) throw IoError("cannot write " + args.out);
    sensorsim::WriteNdjson(file, records);
    err << "wrote " << records.size() << " records to " << args.out << '\n';
  }
  if (args.publish) {
    RuntimeOptions ro;
    ro.realtime = false;
    Runtime rt(cfg, ro);
    for (const auto& r : records) rt.PublishTraining(r.ToJson());
    rt.Drain();
    err << "published " << records.size() << " records to " << transport::kTrainTopic << '\n';
  }
  return kExitOk;
}

int CmdIngest(const Config& cfg, const IngestArgs& args, std::istream& in, std::ostream& out,
              std::ostream&) {
  std::ifstream file;
  std::istream* src = &in;
  if (args.in != "-") {
    file.open(args.in, std::ios::binary);
    if (!file) throw NotFoundError("cannot open " + args.in);
    src = &file;
  }
  RuntimeOptions ro;
  ro.realtime = false;
  Runtime rt(cfg, ro);
  std::size_t published = 0;
  std::string line;
  while (std::getline(*src, line)) {
    if (line.empty()) continue;
    rt.bus().Publish(kSensorDevice, std::string(transport::kTrainTopic), line);
    ++published;
  }
  rt.Drain();
  out << "ingested " << published - rt.dead_letters() << " of " << published
      << " records into " << cfg.store_root.string() << " (dead letters: " << rt.dead_letters()
      << ")\n";
  return rt.dead_letters() == 0 ? kExitOk : kExitFailure;
}

int CmdTrain(const Config& cfg, const TrainArgs& args, std::ostream& out, std::ostream&) {
  Config c = cfg;
  if (args.test_fraction) c.test_fraction = *args.test_fraction;
  learn::Hyperparams hp = c.hyperparams;
  if (args.learning_rate) hp.learning_rate = *args.learning_rate;
  if (args.epochs) hp.epochs = *args.epochs;
  if (args.l2_lambda) hp.l2_lambda = *args.l2_lambda;
  if (args.batch_size) hp.batch_size = *args.batch_size;
  c.Validate();
  hp.Validate();

  RuntimeOptions ro;
  ro.realtime = false;
  Runtime rt(c, ro);
  const std::string participant = args.participant.value_or(c.participant);
  const auto report = rt.Train(participant, hp);

  out << "participant " << participant << ": " << report.rows << " rows (" << report.train_rows
      << " train, " << report.test_rows << " held-out, " << report.synthetic_rows
      << " synthetic)\n";
  out << "loss " << Fixed(report.initial_loss, 4) << " -> "
      << Fixed(report.epoch_loss.empty() ? report.initial_loss : report.epoch_loss.back(), 4)
      << " over " << report.epoch_loss.size() << " epochs\n";
  out << "train accuracy " << Fixed(report.train_eval.accuracy, 4) << '\n';
  if (report.test_eval) {
    out << "held-out accuracy " << Fixed(report.test_eval->accuracy, 4) << "\n\n";
    PrintEvalReport(*report.test_eval, out);
  } else {
    out << "held-out accuracy n/a (empty test split)\n\n";
    PrintEvalReport(report.train_eval, out);
  }
  out << "\nendpoint " << participant << " v" << report.endpoint_version << "; log "
      << report.log_key << '\n';
  return kExitOk;
}

int CmdEval(const EvalArgs& args, std::ostream& out, std::ostream&) {
  std::ifstream in(args.matrix_path);
  if (!in) throw NotFoundError("cannot open " + args.matrix_path);
  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(args.matrix_path + ": " + e.what());
  }
  PrintEvalReport(learn::MetricsFromConfusion(learn::ConfusionFromJson(j)), out);
  return kExitOk;
}

int CmdServe(const Config& cfg, const ServeArgs& args, std::ostream& out, std::ostream&) {
  RuntimeOptions ro;
  ro.realtime = true;
  ro.background_ticker = true;
  Runtime rt(cfg, ro);
  const auto models = rt.LoadStoredModels();
  const int port = rt.StartHttp(args.port.value_or(cfg.http_port), cfg.http_host);
  out << "http api on http://" << cfg.http_host << ':' << port << " (" << models
      << " models loaded)\n";
  const int tcp = args.tcp_port.value_or(cfg.bus_tcp_port);
  if (tcp > 0) {
    out << "bus tcp front-end on " << cfg.bus_host << ':'
        << rt.StartTcp(static_cast<std::uint16_t>(tcp), cfg.bus_host) << '\n';
  }
  out.flush();
  g_stop = false;
  std::signal(SIGINT, OnSignal);
  std::signal(SIGTERM, OnSignal);
  while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(200));
  out << "shutting down\n";
  return kExitOk;
}

DemoSummary RunDemo(const Config& cfg, const DemoArgs& args, std::ostream& out) {
  if (args.sessions < 1) throw RangeError("--sessions must be >= 1");
  RuntimeOptions ro;
  ro.realtime = !args.fast;
  ro.fanout.console = &out;
  Runtime rt(cfg, ro);
  rt.LoadStoredModels();
  const std::string participant = args.participant.value_or(cfg.participant);
  if (!rt.registry().Contains(participant)) {
    throw NotFoundError("no trained model for \"" + participant +
                        "\"; run `moodsense train` first");
  }
  const int window = args.window_s.value_or(cfg.window_s);
  DemoSummary summary;
  for (int i = 0; i < args.sessions; ++i) {
    const auto s = rt.inference().RunSession(participant, window, args.regime);
    rt.bus().WaitIdle();  // console fanout shares `out`
    if (s.status != inference::SessionStatus::kDone) {
      throw Error(ErrorCode::kInput, "session " + s.session_id + " failed: " + s.error);
    }
    summary.labels.push_back(*s.predicted);
    summary.elapsed_ms.push_back(static_cast<double>(s.elapsed_ms()));
    summary.processing_ms.push_back(static_cast<double>(s.processing_ms()));
    out << s.session_id << ' ' << *s.predicted << " elapsed_ms " << s.elapsed_ms()
        << " after_window_ms " << s.processing_ms() << " | " << s.recommendation << '\n';
  }
  const auto with = inference::ComputeLatencyStats(summary.elapsed_ms);
  const auto without = inference::ComputeLatencyStats(summary.processing_ms);
  out << "latency incl. window: mean " << Fixed(with.mean_ms, 1) << " ms, p50 "
      << Fixed(with.p50_ms, 1) << ", p95 " << Fixed(with.p95_ms, 1) << " (n=" << with.count
      << ")\n";
  out << "latency excl. window: mean " << Fixed(without.mean_ms, 1) << " ms, p50 "
      << Fixed(without.p50_ms, 1) << ", p95 " << Fixed(without.p95_ms, 1) << " (n="
      << without.count << ")\n";
  return summary;
}

int CmdDemo(const Config& cfg, const DemoArgs& args, std::ostream& out, std::ostream&) {
  RunDemo(cfg, args, out);
  return kExitOk;
}

int RunCli(int argc, const char* const* argv, std::istream& in, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"IoT emotion detection pipeline: simulate, ingest, train, evaluate, serve."};
  app.name("moodsense");
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  CommonFlags common;
  std::uint64_t seed = 0;
  std::string store;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config_path, "INI config file");
    sub->add_option("--seed", seed, "Seed for every random draw (overrides config)");
    sub->add_option("--store", store, "Object store root directory (overrides config)");
  };

  GenerateArgs gen;
  std::string participant;
  auto* g = app.add_subcommand("generate", "Write a labeled synthetic corpus as NDJSON");
  add_common(g);
  g->add_option("--participant", participant, "Participant id");
  g->add_option("--per-class", gen.per_class, "Records per emotion class")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  g->add_option("--out", gen.out, "Output file, - for stdout")->capture_default_str();
  g->add_flag("--publish", gen.publish, "Also publish to iotsensors/train and store batches");

  IngestArgs ing;
  auto* i = app.add_subcommand("ingest", "Replay NDJSON through bus, rounding and ETL");
  add_common(i);
  i->add_option("--in", ing.in, "Input NDJSON file, - for stdin")->capture_default_str();

  TrainArgs tr;
  double lr = 0, l2 = 0, frac = 0;
  int epochs = 0, batch = 0;
  auto* t = app.add_subcommand("train", "Train, evaluate and register a participant model");
  add_common(t);
  t->add_option("--participant", participant, "Participant id");
  auto* o_lr = t->add_option("--learning-rate", lr, "SGD learning rate");
  auto* o_ep = t->add_option("--epochs", epochs, "Training epochs");
  auto* o_l2 = t->add_option("--l2", l2, "L2 regularization factor");
  auto* o_bs = t->add_option("--batch-size", batch, "Mini-batch size");
  auto* o_tf = t->add_option("--test-fraction", frac, "Held-out fraction in [0, 1)");

  EvalArgs ev;
  auto* e = app.add_subcommand("eval", "Metrics from a confusion matrix JSON file");
  e->add_option("matrix", ev.matrix_path, "JSON file: [[...],[...],[...]] or {\"confusion\": ...}")
      ->required();

  ServeArgs sv;
  int port = 0, tcp_port = 0;
  auto* s = app.add_subcommand("serve", "Run bus, ETL, endpoints and the HTTP API");
  add_common(s);
  auto* o_port = s->add_option("--port", port, "HTTP port (0 picks a free one)");
  auto* o_tcp = s->add_option("--tcp-port", tcp_port, "Bus TCP front-end port (0 disables)");

  DemoArgs dm;
  std::string regime;
  int window = 0;
  auto* d = app.add_subcommand("demo", "Run detection sessions against the trained model");
  add_common(d);
  d->add_option("--participant", participant, "Participant id");
  auto* o_regime = d->add_option("--regime", regime, "Pin the simulated emotion (angry|happy|sad)");
  auto* o_window = d->add_option("--window", window, "Sensing window in seconds");
  d->add_option("--sessions", dm.sessions, "Number of sessions")->capture_default_str();
  d->add_flag("--fast", dm.fast, "Do not pace the window at 1 Hz");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& ex) {
    const int code = app.exit(ex, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  auto seed_opt = [&](CLI::App* sub) {
    if (sub->count("--seed")) common.seed = seed;
    if (sub->count("--store")) common.store = store;
  };
  auto opt_participant = [&](CLI::App* sub) -> std::optional<std::string> {
    if (sub->count("--participant")) return participant;
    return std::nullopt;
  };

  try {
    if (e->parsed()) return CmdEval(ev, out, err);
    CLI::App* sub = app.get_subcommands().front();
    seed_opt(sub);
    Config cfg;
    try {
      cfg = ResolveConfig(common);
    } catch (const ConfigError& ex) {
      err << "error: config_error: " << ex.what() << '\n';
      return kExitUsage;
    }
    if (g->parsed()) {
      gen.participant = opt_participant(g);
      return CmdGenerate(cfg, gen, out, err);
    }
    if (i->parsed()) return CmdIngest(cfg, ing, in, out, err);
    if (t->parsed()) {
      tr.participant = opt_participant(t);
      if (o_lr->count()) tr.learning_rate = lr;
      if (o_ep->count()) tr.epochs = epochs;
      if (o_l2->count()) tr.l2_lambda = l2;
      if (o_bs->count()) tr.batch_size = batch;
      if (o_tf->count()) tr.test_fraction = frac;
      return CmdTrain(cfg, tr, out, err);
    }
    if (s->parsed()) {
      if (o_port->count()) sv.port = port;
      if (o_tcp->count()) sv.tcp_port = tcp_port;
      return CmdServe(cfg, sv, out, err);
    }
    if (d->parsed()) {
      dm.participant = opt_participant(d);
      if (o_regime->count()) dm.regime = regime;
      if (o_window->count()) dm.window_s = window;
      return CmdDemo(cfg, dm, out, err);
    }
  } catch (const ConfigError& ex) {
    err << "error: config_error: " << ex.what() << '\n';
    return kExitUsage;
  } catch (const Error& ex) {
    err << "error: " << ToString(ex.code()) << ": " << ex.what() << '\n';
    return kExitFailure;
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace moodsense::cli
