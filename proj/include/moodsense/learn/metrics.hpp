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
#include <optional>
#include <span>
#include <vector>

#include "json.hpp"
#include "moodsense/labels.hpp"
#include "moodsense/learn/model.hpp"

namespace moodsense::learn {

// rows = actual, cols = predicted
using Confusion = std::array<std::array<long long, kNumClasses>, kNumClasses>;
using OptionalClassVector = std::array<std::optional<double>, kNumClasses>;

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
  bool operator==(const RocPoint&) const = default;
};
using RocCurve = std::vector<RocPoint>;

struct EvalReport {
  double accuracy = 0.0;
  OptionalClassVector precision;
  OptionalClassVector recall;
  OptionalClassVector f1;
  Confusion confusion{};
  std::array<RocCurve, kNumClasses> roc;  // empty when undefined
  OptionalClassVector auc;

  nlohmann::ordered_json ToJson() const;
  static EvalReport FromJson(const nlohmann::ordered_json& j);
};

// Accuracy, precision, recall and F1 from the matrix. ROC and AUC stay empty.
// Throws InputError on a negative entry or an all-zero matrix.
EvalReport MetricsFromConfusion(const Confusion& confusion);

// Reads {"confusion": [[...],[...],[...]]} or a bare 3x3 array.
Confusion ConfusionFromJson(const nlohmann::ordered_json& j);

// Thresholds the scores at every distinct value, high to low. Tied scores move
// as one step. Returns an empty curve when there are no positives or no
// negatives.
RocCurve ComputeRoc(std::span<const double> scores, std::span<const bool> positive);

// Trapezoid rule over the curve.
double Auc(const RocCurve& curve);

// Confusion, class metrics and one-vs-rest ROC over the probabilities.
// Throws InputError if the test set is empty.
EvalReport Evaluate(const ModelParams& model, std::span<const FeatureRow> features,
                    std::span<const int> labels);

}  // namespace moodsense::learn
