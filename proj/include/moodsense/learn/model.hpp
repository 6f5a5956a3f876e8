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

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "moodsense/labels.hpp"
#include "moodsense/learn/dataset.hpp"

namespace moodsense::learn {

using Weights = std::array<std::array<double, kNumFeatures>, kNumClasses>;
using ClassVector = std::array<double, kNumClasses>;

struct Hyperparams {
  double learning_rate = 0.05;
  int epochs = 50;
  double l2_lambda = 1e-4;
  std::string loss = "softmax_cross_entropy";
  int batch_size = 32;
  std::uint64_t seed = 42;

  // Throws RangeError on non-positive rate/batch, negative epochs/lambda or an
  // unsupported loss.
  void Validate() const;
  nlohmann::ordered_json ToJson() const;
  // Missing keys keep their defaults.
  static Hyperparams FromJson(const nlohmann::ordered_json& j);

  bool operator==(const Hyperparams&) const = default;
};

// Multinomial logistic regression over standardized (gsr, bpm).
struct ModelParams {
  Weights weights{};
  ClassVector bias{};
  FeatureRow feature_means{0.0, 0.0};
  FeatureRow feature_stds{1.0, 1.0};
  std::array<std::string, kNumClasses> label_map{"Angry", "Happy", "Sad"};
  std::string participant_id;
  std::string trained_at;  // ISO-8601
  Hyperparams hyperparams;

  bool operator==(const ModelParams&) const = default;
};

struct LossGradient {
  double loss = 0.0;
  Weights grad_w{};
  ClassVector grad_b{};
};

// Mean softmax cross-entropy over the rows plus (l2 / 2) * ||W||^2 (the bias
// is not regularized), with its analytic gradient. `x` is already
// standardized.
LossGradient SoftmaxLossAndGradient(const Weights& w, const ClassVector& b,
                                    std::span<const FeatureRow> x,
                                    std::span<const int> y, double l2_lambda);

struct TrainResult {
  ModelParams model;
  double initial_loss = 0.0;
  std::vector<double> epoch_loss;  // full training objective after each epoch
};

// Mini-batch SGD from zero weights. Throws MissingClassError if a class has no
// training rows and DivergenceError if the objective stops being finite.
TrainResult Train(std::span<const FeatureRow> features, std::span<const int> labels,
                  const Hyperparams& hp, const std::string& participant_id = "");

// Throws InputError on non-finite inputs. Components are > 0 and sum to 1.
ClassVector PredictProba(const ModelParams& model, double gsr, double bpm);

// Argmax with ties going to the lowest class index.
int PredictClass(const ModelParams& model, double gsr, double bpm);
std::string PredictLabel(const ModelParams& model, double gsr, double bpm);

}  // namespace moodsense::learn
