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

#include "moodsense/learn/metrics.hpp"

#include <algorithm>
#include <memory>
#include <numeric>

#include "moodsense/error.hpp"

namespace moodsense::learn {
namespace {

nlohmann::ordered_json OptionalsToJson(const OptionalClassVector& v) {
  auto out = nlohmann::ordered_json::array();
  for (const auto& x : v) {
    if (x) {
      out.push_back(*x);
    } else {
      out.push_back(nullptr);
    }
  }
  return out;
}

OptionalClassVector OptionalsFromJson(const nlohmann::ordered_json& j) {
  if (!j.is_array() || j.size() != kNumClasses) {
    throw ParseError("expected a 3-element array");
  }
  OptionalClassVector v;
  for (int c = 0; c < kNumClasses; ++c) {
    if (!j[c].is_null()) v[c] = j[c].get<double>();
  }
  return v;
}

}  // namespace

nlohmann::ordered_json EvalReport::ToJson() const {
  nlohmann::ordered_json j;
  j["accuracy"] = accuracy;
  j["labels"] = kLabelMap;
  j["precision"] = OptionalsToJson(precision);
  j["recall"] = OptionalsToJson(recall);
  j["f1"] = OptionalsToJson(f1);
  j["confusion"] = confusion;
  auto roc_json = nlohmann::ordered_json::array();
  for (const auto& curve : roc) {
    auto pts = nlohmann::ordered_json::array();
    for (const auto& p : curve) pts.push_back({p.fpr, p.tpr});
    roc_json.push_back(std::move(pts));
  }
  j["roc"] = std::move(roc_json);
  j["auc"] = OptionalsToJson(auc);
  return j;
}

EvalReport EvalReport::FromJson(const nlohmann::ordered_json& j) {
  EvalReport r;
  try {
    r.accuracy = j.at("accuracy").get<double>();
    r.precision = OptionalsFromJson(j.at("precision"));
    r.recall = OptionalsFromJson(j.at("recall"));
    r.f1 = OptionalsFromJson(j.at("f1"));
    r.confusion = ConfusionFromJson(j.at("confusion"));
    const auto& roc = j.at("roc");
    if (!roc.is_array() || roc.size() != kNumClasses) throw ParseError("bad roc");
    for (int c = 0; c < kNumClasses; ++c) {
      for (const auto& p : roc[c]) {
        r.roc[c].push_back({p.at(0).get<double>(), p.at(1).get<double>()});
      }
    }
    r.auc = OptionalsFromJson(j.at("auc"));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("eval report: ") + e.what());
  }
  return r;
}

Confusion ConfusionFromJson(const nlohmann::ordered_json& j) {
  const auto& m = j.is_object() && j.contains("confusion") ? j.at("confusion") : j;
  if (!m.is_array() || m.size() != kNumClasses) {
    throw ParseError("confusion matrix must be a 3x3 array");
  }
  Confusion out{};
  for (int r = 0; r < kNumClasses; ++r) {
    if (!m[r].is_array() || m[r].size() != kNumClasses) {
      throw ParseError("confusion row " + std::to_string(r) + " must have 3 entries");
    }
    for (int c = 0; c < kNumClasses; ++c) {
      if (!m[r][c].is_number_integer()) {
        throw ParseError("confusion entries must be integers");
      }
      out[r][c] = m[r][c].get<long long>();
    }
  }
  return out;
}

EvalReport MetricsFromConfusion(const Confusion& confusion) {
  EvalReport r;
  r.confusion = confusion;
  long long total = 0;
  long long trace = 0;
  std::array<long long, kNumClasses> row{};
  std::array<long long, kNumClasses> col{};
  for (int a = 0; a < kNumClasses; ++a) {
    for (int p = 0; p < kNumClasses; ++p) {
      const long long v = confusion[a][p];
      if (v < 0) throw InputError("confusion entries must be non-negative");
      total += v;
      row[a] += v;
      col[p] += v;
      if (a == p) trace += v;
    }
  }
  if (total == 0) throw InputError("confusion matrix is empty");
  r.accuracy = static_cast<double>(trace) / static_cast<double>(total);
  for (int c = 0; c < kNumClasses; ++c) {
    const auto tp = static_cast<double>(confusion[c][c]);
    if (col[c] > 0) r.precision[c] = tp / static_cast<double>(col[c]);
    if (row[c] > 0) r.recall[c] = tp / static_cast<double>(row[c]);
    if (r.precision[c] && r.recall[c]) {
      const double s = *r.precision[c] + *r.recall[c];
      r.f1[c] = s > 0.0 ? 2.0 * *r.precision[c] * *r.recall[c] / s : 0.0;
    }
  }
  return r;
}

RocCurve ComputeRoc(std::span<const double> scores, std::span<const bool> positive) {
  if (scores.size() != positive.size()) {
    throw InputError("scores and labels differ in length");
  }
  const auto pos = static_cast<std::size_t>(std::count(positive.begin(), positive.end(), true));
  const std::size_t neg = positive.size() - pos;
  if (pos == 0 || neg == 0) return {};

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  RocCurve curve{{0.0, 0.0}};
  std::size_t tp = 0;
  std::size_t fp = 0;
  for (std::size_t i = 0; i < order.size();) {
    const double s = scores[order[i]];
    while (i < order.size() && scores[order[i]] == s) {
      positive[order[i]] ? ++tp : ++fp;
      ++i;
    }
    curve.push_back({static_cast<double>(fp) / static_cast<double>(neg),
                     static_cast<double>(tp) / static_cast<double>(pos)});
  }
  return curve;
}

double Auc(const RocCurve& curve) {
  double area = 0.0;
  for (std::size_t i = 1; i < curve.size(); ++i) {
    area += (curve[i].fpr - curve[i - 1].fpr) * (curve[i].tpr + curve[i - 1].tpr) / 2.0;
  }
  return area;
}

EvalReport Evaluate(const ModelParams& model, std::span<const FeatureRow> features,
                    std::span<const int> labels) {
  if (features.size() != labels.size()) {
    throw InputError("features and labels differ in length");
  }
  if (features.empty()) throw InputError("test split is empty");

  Confusion confusion{};
  std::array<std::vector<double>, kNumClasses> scores;
  for (std::size_t i = 0; i < features.size(); ++i) {
    const auto p = PredictProba(model, features[i][0], features[i][1]);
    int best = 0;
    for (int c = 0; c < kNumClasses; ++c) {
      scores[c].push_back(p[c]);
      if (p[c] > p[best]) best = c;
    }
    ++confusion[labels[i]][best];
  }

  EvalReport r = MetricsFromConfusion(confusion);
  for (int c = 0; c < kNumClasses; ++c) {
    std::unique_ptr<bool[]> is_pos(new bool[labels.size()]);
    for (std::size_t i = 0; i < labels.size(); ++i) is_pos[i] = labels[i] == c;
    r.roc[c] = ComputeRoc(scores[c], std::span<const bool>(is_pos.get(), labels.size()));
    if (!r.roc[c].empty()) r.auc[c] = Auc(r.roc[c]);
  }
  return r;
}

}  // namespace moodsense::learn
