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

#include "moodsense/learn/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "moodsense/clock.hpp"
#include "moodsense/error.hpp"

namespace moodsense::learn {
namespace {

// Numerically stable softmax of the logits for one standardized row.
ClassVector Softmax(const Weights& w, const ClassVector& b, const FeatureRow& x) {
  ClassVector z{};
  for (int c = 0; c < kNumClasses; ++c) {
    z[c] = b[c];
    for (int f = 0; f < kNumFeatures; ++f) z[c] += w[c][f] * x[f];
  }
  const double zmax = *std::max_element(z.begin(), z.end());
  double sum = 0.0;
  for (auto& v : z) {
    v = std::exp(v - zmax);
    sum += v;
  }
  for (auto& v : z) v /= sum;
  return z;
}

FeatureRow Standardize(const ModelParams& m, double gsr, double bpm) {
  return {(gsr - m.feature_means[0]) / m.feature_stds[0],
          (bpm - m.feature_means[1]) / m.feature_stds[1]};
}

}  // namespace

void Hyperparams::Validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw RangeError("learning_rate must be positive");
  }
  if (epochs < 0) throw RangeError("epochs must be >= 0");
  if (!(l2_lambda >= 0.0)) throw RangeError("l2_lambda must be >= 0");
  if (batch_size < 1) throw RangeError("batch_size must be >= 1");
  if (loss != "softmax_cross_entropy") {
    throw RangeError("unsupported loss \"" + loss + "\"");
  }
}

nlohmann::ordered_json Hyperparams::ToJson() const {
  return {{"learning_rate", learning_rate}, {"epochs", epochs},
          {"l2_lambda", l2_lambda},         {"loss", loss},
          {"batch_size", batch_size},       {"seed", seed}};
}

Hyperparams Hyperparams::FromJson(const nlohmann::ordered_json& j) {
  if (!j.is_object()) throw ParseError("hyperparams must be a JSON object");
  Hyperparams hp;
  try {
    hp.learning_rate = j.value("learning_rate", hp.learning_rate);
    hp.epochs = j.value("epochs", hp.epochs);
    hp.l2_lambda = j.value("l2_lambda", hp.l2_lambda);
    hp.loss = j.value("loss", hp.loss);
    hp.batch_size = j.value("batch_size", hp.batch_size);
    hp.seed = j.value("seed", hp.seed);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("hyperparams: ") + e.what());
  }
  return hp;
}

LossGradient SoftmaxLossAndGradient(const Weights& w, const ClassVector& b,
                                    std::span<const FeatureRow> x,
                                    std::span<const int> y, double l2_lambda) {
  LossGradient g;
  const auto n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const ClassVector p = Softmax(w, b, x[i]);
    g.loss -= std::log(std::max(p[y[i]], std::numeric_limits<double>::min()));
    for (int c = 0; c < kNumClasses; ++c) {
      const double err = p[c] - (c == y[i] ? 1.0 : 0.0);
      g.grad_b[c] += err;
      for (int f = 0; f < kNumFeatures; ++f) g.grad_w[c][f] += err * x[i][f];
    }
  }
  double w_norm2 = 0.0;
  for (int c = 0; c < kNumClasses; ++c) {
    g.grad_b[c] /= n;
    for (int f = 0; f < kNumFeatures; ++f) {
      g.grad_w[c][f] = g.grad_w[c][f] / n + l2_lambda * w[c][f];
      w_norm2 += w[c][f] * w[c][f];
    }
  }
  g.loss = g.loss / n + 0.5 * l2_lambda * w_norm2;
  return g;
}

TrainResult Train(std::span<const FeatureRow> features, std::span<const int> labels,
                  const Hyperparams& hp, const std::string& participant_id) {
  hp.Validate();
  if (features.size() != labels.size()) {
    throw InputError("features and labels differ in length");
  }
  std::array<std::size_t, kNumClasses> counts{};
  for (int y : labels) {
    if (y < 0 || y >= kNumClasses) throw InputError("label out of range");
    ++counts[y];
  }
  for (int c = 0; c < kNumClasses; ++c) {
    if (counts[c] == 0) {
      throw MissingClassError("class " + LabelName(c) + " absent from training split");
    }
  }

  TrainResult result;
  ModelParams& m = result.model;
  m.participant_id = participant_id;
  m.hyperparams = hp;
  m.trained_at = FormatIso8601(NowMs());

  const auto n = features.size();
  for (int f = 0; f < kNumFeatures; ++f) {
    double mean = 0.0;
    for (const auto& row : features) mean += row[f];
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (const auto& row : features) var += (row[f] - mean) * (row[f] - mean);
    const double sd = std::sqrt(var / static_cast<double>(n));
    m.feature_means[f] = mean;
    m.feature_stds[f] = sd > 0.0 && std::isfinite(sd) ? sd : 1.0;
  }

  std::vector<FeatureRow> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = Standardize(m, features[i][0], features[i][1]);
  }

  result.initial_loss =
      SoftmaxLossAndGradient(m.weights, m.bias, x, labels, hp.l2_lambda).loss;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(hp.seed);
  std::vector<FeatureRow> bx;
  std::vector<int> by;
  const auto batch = static_cast<std::size_t>(hp.batch_size);

  for (int epoch = 0; epoch < hp.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < n; start += batch) {
      const std::size_t end = std::min(n, start + batch);
      bx.clear();
      by.clear();
      for (std::size_t i = start; i < end; ++i) {
        bx.push_back(x[order[i]]);
        by.push_back(labels[order[i]]);
      }
      const auto g = SoftmaxLossAndGradient(m.weights, m.bias, bx, by, hp.l2_lambda);
      for (int c = 0; c < kNumClasses; ++c) {
        m.bias[c] -= hp.learning_rate * g.grad_b[c];
        for (int f = 0; f < kNumFeatures; ++f) {
          m.weights[c][f] -= hp.learning_rate * g.grad_w[c][f];
        }
      }
    }
    const double loss =
        SoftmaxLossAndGradient(m.weights, m.bias, x, labels, hp.l2_lambda).loss;
    if (!std::isfinite(loss)) {
      throw DivergenceError("training loss became non-finite at epoch " +
                            std::to_string(epoch + 1) + "; try a smaller learning_rate");
    }
    result.epoch_loss.push_back(loss);
  }
  return result;
}

ClassVector PredictProba(const ModelParams& model, double gsr, double bpm) {
  if (!std::isfinite(gsr) || !std::isfinite(bpm)) {
    throw InputError("non-finite input to predict");
  }
  ClassVector p = Softmax(model.weights, model.bias, Standardize(model, gsr, bpm));
  // Keep every class strictly positive even when exp() underflows.
  constexpr double kFloor = 1e-300;
  for (auto& v : p) {
    if (!std::isfinite(v)) throw InputError("input too large for the model");
    v = std::max(v, kFloor);
  }
  return p;
}

int PredictClass(const ModelParams& model, double gsr, double bpm) {
  const ClassVector p = PredictProba(model, gsr, bpm);
  int best = 0;
  for (int c = 1; c < kNumClasses; ++c) {
    if (p[c] > p[best]) best = c;
  }
  return best;
}

std::string PredictLabel(const ModelParams& model, double gsr, double bpm) {
  return model.label_map[static_cast<std::size_t>(PredictClass(model, gsr, bpm))];
}

}  // namespace moodsense::learn
