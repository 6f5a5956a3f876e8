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
#include <numeric>
#include <random>
#include <thread>

#include "moodsense/error.hpp"
#include "moodsense/etl/firehose.hpp"
#include "moodsense/learn/dataset.hpp"
#include "moodsense/learn/endpoint.hpp"
#include "moodsense/learn/metrics.hpp"
#include "moodsense/learn/model.hpp"
#include "moodsense/learn/model_io.hpp"
#include "moodsense/learn/smote.hpp"
#include "moodsense/learn/training_job.hpp"
#include "moodsense/sensorsim/simulator.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

namespace moodsense::learn {
namespace {

using nlohmann::ordered_json;

struct Problem {
  Weights w{};
  ClassVector b{};
  std::vector<FeatureRow> x;
  std::vector<int> y;
  double l2 = 0.0;
};

Problem RandomProblem(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_int_distribution<int> rows(1, 20), cls(0, 2);
  Problem p;
  for (auto& row : p.w) {
    for (auto& v : row) v = n(rng);
  }
  for (auto& v : p.b) v = n(rng);
  const int m = rows(rng);
  for (int i = 0; i < m; ++i) {
    p.x.push_back({n(rng) * 2, n(rng) * 2});
    p.y.push_back(cls(rng));
  }
  p.l2 = std::uniform_real_distribution<double>(0.0, 0.1)(rng);
  return p;
}

TEST(SoftmaxLossAndGradient, MatchesCentralDifferences) {
  std::mt19937_64 rng(123);
  for (int iter = 0; iter < 100; ++iter) {
    const auto p = RandomProblem(rng);
    const auto lg = SoftmaxLossAndGradient(p.w, p.b, p.x, p.y, p.l2);
    EXPECT_NEAR(lg.loss, oracles::Objective(p.w, p.b, p.x, p.y, p.l2), 1e-12);
    const auto num = oracles::CentralDifference(p.w, p.b, p.x, p.y, p.l2);
    for (int k = 0; k < 3; ++k) {
      for (int j = 0; j < 2; ++j) {
        EXPECT_LE(oracles::RelativeError(lg.grad_w[k][j], num.grad_w[k][j]), 1e-4)
            << "iter " << iter << " w[" << k << "][" << j << "]";
      }
      EXPECT_LE(oracles::RelativeError(lg.grad_b[k], num.grad_b[k]), 1e-4)
          << "iter " << iter << " b[" << k << "]";
    }
  }
}

TEST(SoftmaxLossAndGradient, ZeroWeightsGiveLogThree) {
  const std::vector<FeatureRow> x{{1, 2}, {3, 4}};
  const std::vector<int> y{0, 2};
  EXPECT_NEAR(SoftmaxLossAndGradient({}, {}, x, y, 0.5).loss, std::log(3.0), 1e-15);
}

// Three well separated clusters, ten points each.
void ToySet(std::vector<FeatureRow>& x, std::vector<int>& y) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n(0.0, 0.3);
  const FeatureRow centers[3] = {{2600, 110}, {1400, 75}, {2000, 62}};
  for (int c = 0; c < 3; ++c) {
    for (int i = 0; i < 10; ++i) {
      x.push_back({centers[c][0] + n(rng) * 50, centers[c][1] + n(rng) * 3});
      y.push_back(c);
    }
  }
}

TEST(Train, SeparableToySetIsLearned) {
  std::vector<FeatureRow> x;
  std::vector<int> y;
  ToySet(x, y);
  Hyperparams hp;
  hp.epochs = 200;
  hp.batch_size = 8;
  const auto r = Train(x, y, hp, "toy");
  int correct = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    correct += PredictClass(r.model, x[i][0], x[i][1]) == y[i] ? 1 : 0;
  }
  EXPECT_GE(correct, 29);
  EXPECT_NEAR(r.initial_loss, std::log(3.0), 1e-12);
  EXPECT_LT(r.epoch_loss.back(), r.initial_loss);
  EXPECT_EQ(r.epoch_loss.size(), 200u);
  EXPECT_EQ(r.model.participant_id, "toy");
}

TEST(Train, ZeroEpochsPredictsUniform) {
  std::vector<FeatureRow> x;
  std::vector<int> y;
  ToySet(x, y);
  Hyperparams hp;
  hp.epochs = 0;
  const auto r = Train(x, y, hp);
  for (double p : PredictProba(r.model, 2000, 80)) EXPECT_NEAR(p, 1.0 / 3, 1e-15);
  EXPECT_TRUE(r.epoch_loss.empty());
}

TEST(Train, DeterministicForAFixedSeed) {
  std::vector<FeatureRow> x;
  std::vector<int> y;
  ToySet(x, y);
  const auto a = Train(x, y, Hyperparams{});
  const auto b = Train(x, y, Hyperparams{});
  EXPECT_EQ(a.model.weights, b.model.weights);
  EXPECT_EQ(a.epoch_loss, b.epoch_loss);
}

TEST(Train, InvariantToAffineFeatureRescaling) {
  std::vector<FeatureRow> x;
  std::vector<int> y;
  ToySet(x, y);
  std::vector<FeatureRow> scaled;
  for (const auto& r : x) scaled.push_back({r[0] * 0.001 + 7, r[1] * 50 - 3});
  const auto a = Train(x, y, Hyperparams{});
  const auto b = Train(scaled, y, Hyperparams{});
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto pa = PredictProba(a.model, x[i][0], x[i][1]);
    const auto pb = PredictProba(b.model, scaled[i][0], scaled[i][1]);
    for (int k = 0; k < 3; ++k) EXPECT_NEAR(pa[k], pb[k], 1e-9);
  }
}

TEST(Train, RejectsBadInput) {
  std::vector<FeatureRow> x{{1, 2}, {3, 4}};
  std::vector<int> y{0, 1};
  EXPECT_THROW(Train(x, y, Hyperparams{}), MissingClassError);
  y = {0, 1};
  x.pop_back();
  EXPECT_THROW(Train(x, y, Hyperparams{}), InputError);
  Hyperparams hp;
  hp.learning_rate = 0;
  EXPECT_THROW(hp.Validate(), RangeError);
  hp = {};
  hp.loss = "hinge";
  EXPECT_THROW(hp.Validate(), RangeError);
  hp = {};
  hp.epochs = -1;
  EXPECT_THROW(hp.Validate(), RangeError);
}

TEST(Train, HugeLearningRateDiverges) {
  std::vector<FeatureRow> x;
  std::vector<int> y;
  ToySet(x, y);
  Hyperparams hp;
  hp.learning_rate = 1e300;
  hp.l2_lambda = 1.0;
  EXPECT_THROW(Train(x, y, hp), DivergenceError);
}

TEST(PredictProba, AlwaysOnTheSimplex) {
  std::mt19937_64 rng(77);
  std::normal_distribution<double> n(0.0, 30.0);
  std::uniform_real_distribution<double> in(-1e5, 1e5);
  for (int iter = 0; iter < 10'000; ++iter) {
    ModelParams m;
    for (auto& row : m.weights) {
      for (auto& v : row) v = n(rng);
    }
    for (auto& v : m.bias) v = n(rng);
    const auto p = PredictProba(m, in(rng), in(rng));
    ASSERT_NEAR(p[0] + p[1] + p[2], 1.0, 1e-12);
    for (double v : p) ASSERT_GT(v, 0.0);
  }
}

TEST(PredictProba, NonFiniteInputIsRejected) {
  ModelParams m;
  EXPECT_THROW(PredictProba(m, std::nan(""), 60), InputError);
  EXPECT_THROW(PredictProba(m, 1, INFINITY), InputError);
}

TEST(PredictClass, TiesGoToTheLowestIndexAndLabelsMap) {
  ModelParams m;
  EXPECT_EQ(PredictClass(m, 1, 1), 0);
  m.bias = {0, 5, 5};
  EXPECT_EQ(PredictClass(m, 1, 1), 1);
  EXPECT_EQ(PredictLabel(m, 1, 1), "Happy");
}

Confusion ReferenceConfusion() {
  Confusion c{};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) c[i][j] = oracles::kReferenceConfusion[i][j];
  }
  return c;
}

TEST(MetricsFromConfusion, PublishedMatrix) {
  const auto r = MetricsFromConfusion(ReferenceConfusion());
  EXPECT_NEAR(r.accuracy, oracles::kReferenceAccuracy, 1e-12);
  for (int c = 0; c < 3; ++c) {
    EXPECT_NEAR(*r.precision[c], oracles::kReferencePrecision[c], 1e-12);
    EXPECT_NEAR(*r.recall[c], oracles::kReferenceRecall[c], 1e-12);
    EXPECT_NEAR(*r.f1[c], oracles::kReferenceF1[c], 1e-12);
  }
}

TEST(MetricsFromConfusion, UndefinedRatiosAreNull) {
  Confusion c{};
  c[0][0] = 5;
  c[1][0] = 5;  // nothing predicted as 1 or 2, nothing actually 2
  const auto r = MetricsFromConfusion(c);
  EXPECT_DOUBLE_EQ(r.accuracy, 0.5);
  EXPECT_FALSE(r.precision[1].has_value());
  EXPECT_EQ(*r.recall[1], 0.0);
  EXPECT_FALSE(r.f1[1].has_value());
  EXPECT_FALSE(r.precision[2].has_value());
  EXPECT_FALSE(r.recall[2].has_value());
  c[1][0] = -1;
  EXPECT_THROW(MetricsFromConfusion(c), InputError);
  EXPECT_THROW(MetricsFromConfusion(Confusion{}), InputError);
}

TEST(MetricsFromConfusion, BothZeroGivesZeroF1) {
  Confusion c{};
  c[0][1] = 3;
  c[1][0] = 3;
  const auto r = MetricsFromConfusion(c);
  EXPECT_EQ(*r.f1[0], 0.0);
}

TEST(ConfusionFromJson, AcceptsBothShapes) {
  const auto bare = ordered_json::parse("[[760,0,0],[2,713,84],[24,58,587]]");
  EXPECT_EQ(ConfusionFromJson(bare), ReferenceConfusion());
  EXPECT_EQ(ConfusionFromJson(ordered_json{{"confusion", bare}}), ReferenceConfusion());
  EXPECT_THROW(ConfusionFromJson(ordered_json::parse("[[1,2],[3,4]]")), ParseError);
}

TEST(Evaluate, AgreesWithABruteForceRecount) {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int iter = 0; iter < 20; ++iter) {
    ModelParams m;
    for (auto& row : m.weights) {
      for (auto& v : row) v = n(rng);
    }
    std::vector<FeatureRow> x;
    std::vector<int> y;
    for (int i = 0; i < 300; ++i) {
      x.push_back({n(rng), n(rng)});
      y.push_back(static_cast<int>(rng() % 3));
    }
    const auto r = Evaluate(m, x, y);
    std::vector<int> pred;
    for (const auto& row : x) pred.push_back(PredictClass(m, row[0], row[1]));
    int correct = 0;
    for (std::size_t i = 0; i < y.size(); ++i) correct += pred[i] == y[i];
    EXPECT_DOUBLE_EQ(r.accuracy, correct / 300.0);
    for (int c = 0; c < 3; ++c) {
      int tp = 0, predicted = 0, actual = 0;
      for (std::size_t i = 0; i < y.size(); ++i) {
        tp += pred[i] == c && y[i] == c;
        predicted += pred[i] == c;
        actual += y[i] == c;
      }
      if (predicted > 0) {
        EXPECT_DOUBLE_EQ(*r.precision[c], static_cast<double>(tp) / predicted);
      } else {
        EXPECT_FALSE(r.precision[c].has_value());
      }
      EXPECT_DOUBLE_EQ(*r.recall[c], static_cast<double>(tp) / actual);
      ASSERT_TRUE(r.auc[c].has_value());
      EXPECT_GE(*r.auc[c], 0.0);
      EXPECT_LE(*r.auc[c], 1.0);
    }
  }
}

TEST(ComputeRoc, PermutedScoresGiveChanceAuc) {
  std::mt19937_64 rng(12);
  std::vector<double> scores(2000);
  for (auto& s : scores) s = std::uniform_real_distribution<double>(0, 1)(rng);
  std::unique_ptr<bool[]> pos(new bool[2000]);
  for (int i = 0; i < 2000; ++i) pos[i] = i % 2 == 0;
  const auto curve = ComputeRoc(scores, std::span<const bool>(pos.get(), 2000));
  EXPECT_NEAR(Auc(curve), 0.5, 0.05);
  EXPECT_EQ(curve.front(), (RocPoint{0, 0}));
  EXPECT_EQ(curve.back(), (RocPoint{1, 1}));
  for (std::size_t i = 1; i < curve.size(); ++i) {
    EXPECT_GE(curve[i].fpr, curve[i - 1].fpr);
    EXPECT_GE(curve[i].tpr, curve[i - 1].tpr);
  }
}

TEST(ComputeRoc, PerfectSeparationAndDegenerateCases) {
  const std::vector<double> scores{0.9, 0.8, 0.3, 0.1};
  const bool pos[] = {true, true, false, false};
  EXPECT_DOUBLE_EQ(Auc(ComputeRoc(scores, pos)), 1.0);
  const bool inverted[] = {false, false, true, true};
  EXPECT_DOUBLE_EQ(Auc(ComputeRoc(scores, inverted)), 0.0);
  const bool none[] = {false, false, false, false};
  EXPECT_TRUE(ComputeRoc(scores, none).empty());
  // All scores tied: a single diagonal step.
  const std::vector<double> tied{0.5, 0.5, 0.5, 0.5};
  const auto curve = ComputeRoc(tied, pos);
  EXPECT_EQ(curve, (RocCurve{{0, 0}, {1, 1}}));
  EXPECT_DOUBLE_EQ(Auc(curve), 0.5);
}

TEST(EvalReport, JsonRoundTrip) {
  auto r = MetricsFromConfusion(ReferenceConfusion());
  r.roc[0] = {{0, 0}, {0.5, 1}, {1, 1}};
  r.auc[0] = 0.75;
  const auto back = EvalReport::FromJson(r.ToJson());
  EXPECT_EQ(back.confusion, r.confusion);
  EXPECT_EQ(back.precision, r.precision);
  EXPECT_EQ(back.roc[0], r.roc[0]);
  EXPECT_EQ(back.auc, r.auc);
  EXPECT_EQ(r.ToJson()["labels"], ordered_json::parse(R"(["Angry","Happy","Sad"])"));
}

// Index of the k nearest same-class neighbours of `base`, by brute force.
std::vector<std::size_t> Nearest(const std::vector<FeatureRow>& x, const std::vector<int>& y,
                                 std::size_t base, int k) {
  std::vector<std::pair<double, std::size_t>> d;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i == base || y[i] != y[base]) continue;
    d.push_back({std::hypot(x[i][0] - x[base][0], x[i][1] - x[base][1]), i});
  }
  std::sort(d.begin(), d.end());
  std::vector<std::size_t> out;
  for (int i = 0; i < k && i < static_cast<int>(d.size()); ++i) out.push_back(d[i].second);
  return out;
}

TEST(SmoteBalance, EqualizesCountsWithCollinearSynthetics) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<FeatureRow> x;
  std::vector<int> y;
  for (auto [cls, count] : {std::pair{0, 100}, {1, 100}, {2, 60}}) {
    for (int i = 0; i < count; ++i) {
      x.push_back({1000 * cls + 100 * n(rng), 60 + 10 * cls + 5 * n(rng)});
      y.push_back(cls);
    }
  }
  const auto r = SmoteBalance(x, y, 5, 42);
  ASSERT_EQ(r.features.size(), 300u);
  std::map<int, int> counts;
  for (int l : r.labels) ++counts[l];
  EXPECT_EQ(counts, (std::map<int, int>{{0, 100}, {1, 100}, {2, 100}}));
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_EQ(r.features[i], x[i]);
  ASSERT_EQ(r.synthetic.size(), 40u);
  for (const auto& s : r.synthetic) {
    const auto& p = r.features[s.row];
    const auto& a = x[s.base];
    const auto& b = x[s.neighbor];
    EXPECT_EQ(r.labels[s.row], 2);
    EXPECT_EQ(y[s.base], 2);
    EXPECT_EQ(y[s.neighbor], 2);
    EXPECT_GE(s.delta, 0.0);
    EXPECT_LE(s.delta, 1.0);
    // Collinear and between the parents.
    const double cross = (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]);
    const double scale = std::hypot(b[0] - a[0], b[1] - a[1]);
    EXPECT_LE(std::abs(cross) / std::max(scale, 1.0), 1e-9);
    for (int j = 0; j < 2; ++j) {
      EXPECT_GE(p[j], std::min(a[j], b[j]) - 1e-9);
      EXPECT_LE(p[j], std::max(a[j], b[j]) + 1e-9);
    }
    const auto nn = Nearest(x, y, s.base, 5);
    EXPECT_NE(std::find(nn.begin(), nn.end(), s.neighbor), nn.end());
  }
  EXPECT_TRUE(r.warnings.empty());
}

TEST(SmoteBalance, BalancedInputIsReturnedUnchanged) {
  const std::vector<FeatureRow> x{{1, 1}, {2, 2}, {3, 3}, {4, 4}, {5, 5}, {6, 6}};
  const std::vector<int> y{0, 1, 2, 2, 1, 0};
  const auto r = SmoteBalance(x, y, 5, 1);
  EXPECT_EQ(r.features, x);
  EXPECT_EQ(r.labels, y);
  EXPECT_TRUE(r.synthetic.empty());
}

TEST(SmoteBalance, SmallClassesReduceKOrFail) {
  const std::vector<FeatureRow> x{{0, 0}, {1, 0}, {2, 0}, {3, 0}, {9, 9}, {8, 8}, {5, 5}};
  std::vector<int> y{0, 0, 0, 0, 1, 1, 2};
  EXPECT_THROW(SmoteBalance(x, y, 5, 1), CannotSynthesizeError);
  y = {0, 0, 0, 0, 1, 1, 1};
  const auto r = SmoteBalance(x, y, 5, 1);
  EXPECT_FALSE(r.warnings.empty());
  EXPECT_EQ(r.features.size(), 8u);
}

TEST(StratifiedSplit, PerClassProportionsAndDisjointness) {
  std::vector<int> labels;
  for (int c = 0; c < 3; ++c) labels.insert(labels.end(), 50 + 10 * c, c);
  const auto s = StratifiedSplit(labels, 0.2, 42);
  std::map<int, int> test_counts;
  for (auto i : s.test) ++test_counts[labels[i]];
  EXPECT_EQ(test_counts, (std::map<int, int>{{0, 10}, {1, 12}, {2, 14}}));
  std::vector<std::size_t> all = s.train;
  all.insert(all.end(), s.test.begin(), s.test.end());
  std::sort(all.begin(), all.end());
  std::vector<std::size_t> expect(labels.size());
  std::iota(expect.begin(), expect.end(), 0);
  EXPECT_EQ(all, expect);
  EXPECT_TRUE(std::is_sorted(s.train.begin(), s.train.end()));
  EXPECT_TRUE(StratifiedSplit(labels, 0.0, 42).test.empty());
  EXPECT_EQ(StratifiedSplit(labels, 0.2, 42).test, s.test);
  EXPECT_NE(StratifiedSplit(labels, 0.2, 43).test, s.test);
}

TEST(DatasetFromRows, SkipsUnlabeledAndEmpty) {
  const std::vector<ordered_json> rows{
      ordered_json::parse(R"({"GSR":1.0,"BPM":60.0,"Mood":"Sad"})"),
      ordered_json::parse(R"({"GSR":1.0,"BPM":60.0})"),
      ordered_json::parse(R"({"GSR":1.0,"BPM":60.0,"Mood":"Bored"})"),
      ordered_json::parse(R"({"BPM":60.0,"Mood":"Happy"})")};
  const auto d = DatasetFromRows("p", rows, 0.0, 1);
  EXPECT_EQ(d.features.size(), 1u);
  EXPECT_EQ(d.labels, std::vector<int>{2});
  EXPECT_EQ(d.skipped_unlabeled, 3u);
  EXPECT_THROW(DatasetFromRows("p", std::span(rows).subspan(1), 0.0, 1), EmptyDatasetError);
}

ModelParams SampleModel() {
  ModelParams m;
  m.weights = {{{1.5, -2.25}, {0.1, 1e-300}, {-3, 4}}};
  m.bias = {0.5, -0.5, 0.125};
  m.feature_means = {2000.5, 80.25};
  m.feature_stds = {500, 12.5};
  m.participant_id = "participant-1";
  m.trained_at = "2021-12-10T23:23:00.000Z";
  m.hyperparams.epochs = 7;
  return m;
}

TEST(ModelIo, JsonRoundTripIsExact) {
  const auto m = SampleModel();
  EXPECT_EQ(ModelFromJson(ModelToJson(m)), m);
  EXPECT_EQ(ModelFromText(ModelToJson(m).dump()), m);
  EXPECT_EQ(ModelToJson(m)["label_map"], ordered_json::parse(R"({"0":"Angry","1":"Happy","2":"Sad"})"));
}

TEST(ModelIo, MalformedDocumentsAreFormatErrors) {
  const std::string text = ModelToJson(SampleModel()).dump();
  for (std::size_t cut : {std::size_t{0}, std::size_t{1}, text.size() / 2, text.size() - 1}) {
    EXPECT_THROW(ModelFromText(text.substr(0, cut)), FormatError) << cut;
  }
  auto j = ModelToJson(SampleModel());
  j["schema_version"] = 2;
  EXPECT_THROW(ModelFromJson(j), FormatError);
  j = ModelToJson(SampleModel());
  j["label_map"]["0"] = "Sad";
  EXPECT_THROW(ModelFromJson(j), FormatError);
  j = ModelToJson(SampleModel());
  j["weights"][0] = ordered_json::array({1});
  EXPECT_THROW(ModelFromJson(j), FormatError);
  j = ModelToJson(SampleModel());
  j["feature_stds"][1] = 0;
  EXPECT_THROW(ModelFromJson(j), FormatError);
}

TEST(ModelIo, FileAndStoreRoundTrip) {
  testing::TempDir dir;
  const auto m = SampleModel();
  SaveModel(m, dir.path() / "m.json");
  EXPECT_EQ(LoadModel(dir.path() / "m.json"), m);
  EXPECT_THROW(LoadModel(dir.path() / "missing.json"), NotFoundError);
  etl::ObjectStore store(dir.path() / "store");
  SaveModel(m, store);
  EXPECT_EQ(ModelKey("participant-1"), "models/participant-1.json");
  EXPECT_EQ(LoadModel(store, "participant-1"), m);
  EXPECT_THROW(LoadModel(store, "nobody"), NotFoundError);
}

ModelParams Biased(int cls) {
  ModelParams m;
  m.bias[cls] = 10;
  return m;
}

TEST(EndpointRegistry, ConcurrentSwapAnswersWithOneWholeModel) {
  EndpointRegistry reg;
  EXPECT_THROW(reg.Invoke("p", 1, 1), NotFoundError);
  EXPECT_EQ(reg.Register("p", Biased(0)), 1u);
  std::atomic<bool> go{true};
  std::atomic<int> bad{0}, seen_v2{0};
  std::vector<std::thread> readers;
  for (int t = 0; t < 4; ++t) {
    readers.emplace_back([&] {
      while (go) {
        const auto p = reg.Invoke("p", 1, 1);
        const bool ok = (p.version == 1 && p.label == "Angry") ||
                        (p.version == 2 && p.label == "Sad");
        bad += ok ? 0 : 1;
        seen_v2 += p.version == 2;
      }
    });
  }
  std::this_thread::sleep_for(std::chrono::milliseconds(20));
  EXPECT_EQ(reg.Register("p", Biased(2)), 2u);
  std::this_thread::sleep_for(std::chrono::milliseconds(20));
  go = false;
  for (auto& t : readers) t.join();
  EXPECT_EQ(bad.load(), 0);
  EXPECT_GT(seen_v2.load(), 0);
  EXPECT_TRUE(reg.Contains("p"));
  EXPECT_EQ(reg.Names(), std::vector<std::string>{"p"});
}

std::vector<ordered_json> CorpusRows(int per_class) {
  std::vector<ordered_json> rows;
  for (const auto& r :
       sensorsim::GenerateCorpus(sensorsim::DefaultRegimes(), "participant-1", per_class)) {
    rows.push_back(r.ToJson());
  }
  return rows;
}

TEST(TrainAndEvaluate, SyntheticCorpusIsLearnable) {
  const auto rows = CorpusRows(300);
  const auto d = DatasetFromRows("participant-1", rows, 0.2, 42);
  TrainingJobOptions opts;
  opts.participant_id = "participant-1";
  const auto r = TrainAndEvaluate(d, opts);
  EXPECT_EQ(r.rows, 900u);
  EXPECT_EQ(r.test_rows, 180u);
  EXPECT_EQ(r.train_rows, 720u);
  EXPECT_EQ(r.synthetic_rows, 0u);
  ASSERT_TRUE(r.test_eval);
  EXPECT_GE(r.test_eval->accuracy, 0.9);
  EXPECT_EQ(r.epoch_loss.size(), 50u);
}

TEST(RunTrainingJob, StoreToEndpointAndLogs) {
  testing::TempDir dir;
  etl::ObjectStore store(dir.path());
  {
    etl::FirehoseRouter router(store);
    for (const auto& row : CorpusRows(100)) router.Put("participant-1", row);
    router.FlushAll();
  }
  EndpointRegistry reg;
  TrainingJobOptions opts;
  opts.participant_id = "participant-1";
  const auto r = RunTrainingJob(store, reg, opts);
  EXPECT_EQ(r.endpoint_version, 1u);
  EXPECT_EQ(r.rows, 300u);
  EXPECT_FALSE(r.log_key.empty());
  EXPECT_EQ(LoadModel(store, "participant-1"), r.model);
  const auto log = LoadLatestTrainingLog(store, "participant-1");
  EXPECT_EQ(log["test_eval"]["accuracy"], r.test_eval->accuracy);
  EXPECT_THROW(LoadLatestTrainingLog(store, "nobody"), NotFoundError);
  opts.participant_id = "nobody";
  EXPECT_THROW(RunTrainingJob(store, reg, opts), EmptyDatasetError);
}

}  // namespace
}  // namespace moodsense::learn
