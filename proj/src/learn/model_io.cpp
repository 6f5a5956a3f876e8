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

#include "moodsense/learn/model_io.hpp"

#include <fstream>
#include <sstream>

#include "moodsense/error.hpp"

namespace moodsense::learn {
namespace {

template <std::size_t N>
std::array<double, N> ReadVector(const nlohmann::ordered_json& j, const char* name) {
  const auto& v = j.at(name);
  if (!v.is_array() || v.size() != N) {
    throw FormatError(std::string("model field \"") + name + "\" has the wrong shape", 0);
  }
  std::array<double, N> out{};
  for (std::size_t i = 0; i < N; ++i) out[i] = v[i].get<double>();
  return out;
}

}  // namespace

nlohmann::ordered_json ModelToJson(const ModelParams& model) {
  nlohmann::ordered_json j;
  j["schema_version"] = kModelSchemaVersion;
  j["participant_id"] = model.participant_id;
  j["trained_at"] = model.trained_at;
  nlohmann::ordered_json labels;
  for (int c = 0; c < kNumClasses; ++c) labels[std::to_string(c)] = model.label_map[c];
  j["label_map"] = std::move(labels);
  j["weights"] = model.weights;
  j["bias"] = model.bias;
  j["feature_means"] = model.feature_means;
  j["feature_stds"] = model.feature_stds;
  j["hyperparams"] = model.hyperparams.ToJson();
  return j;
}

ModelParams ModelFromJson(const nlohmann::ordered_json& j) {
  ModelParams m;
  try {
    if (!j.is_object()) throw FormatError("model must be a JSON object", 0);
    const int version = j.at("schema_version").get<int>();
    if (version != kModelSchemaVersion) {
      throw FormatError("unsupported model schema_version " + std::to_string(version), 0);
    }
    m.participant_id = j.at("participant_id").get<std::string>();
    m.trained_at = j.at("trained_at").get<std::string>();
    const auto& labels = j.at("label_map");
    for (int c = 0; c < kNumClasses; ++c) {
      m.label_map[c] = labels.at(std::to_string(c)).get<std::string>();
      if (m.label_map[c] != kLabelMap[c]) {
        throw FormatError("label_map entry " + std::to_string(c) + " is \"" +
                              m.label_map[c] + "\"",
                          0);
      }
    }
    if (labels.size() != kNumClasses) throw FormatError("label_map has extra entries", 0);
    const auto& w = j.at("weights");
    if (!w.is_array() || w.size() != kNumClasses) {
      throw FormatError("model weights must be 3x2", 0);
    }
    for (int c = 0; c < kNumClasses; ++c) {
      if (!w[c].is_array() || w[c].size() != kNumFeatures) {
        throw FormatError("model weights must be 3x2", 0);
      }
      for (int f = 0; f < kNumFeatures; ++f) m.weights[c][f] = w[c][f].get<double>();
    }
    m.bias = ReadVector<kNumClasses>(j, "bias");
    m.feature_means = ReadVector<kNumFeatures>(j, "feature_means");
    m.feature_stds = ReadVector<kNumFeatures>(j, "feature_stds");
    for (double s : m.feature_stds) {
      if (!(s > 0.0)) throw FormatError("feature_stds must be positive", 0);
    }
    m.hyperparams = Hyperparams::FromJson(j.at("hyperparams"));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed model: ") + e.what(), 0);
  } catch (const ParseError& e) {
    throw FormatError(std::string("malformed model: ") + e.what(), 0);
  }
  return m;
}

ModelParams ModelFromText(std::string_view text) {
  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(std::string("model is not valid JSON: ") + e.what(), e.byte);
  }
  return ModelFromJson(j);
}

void SaveModel(const ModelParams& model, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp);
    out << ModelToJson(model).dump(2) << '\n';
    if (!out) throw IoError("cannot write " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

ModelParams LoadModel(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFoundError("no model file at " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ModelFromText(ss.str());
}

std::string ModelKey(std::string_view participant_id) {
  return "models/" + etl::StreamNameFor(participant_id) + ".json";
}

void SaveModel(const ModelParams& model, etl::ObjectStore& store) {
  store.Put(kModelBucket, ModelKey(model.participant_id), ModelToJson(model).dump(2));
}

ModelParams LoadModel(const etl::ObjectStore& store, std::string_view participant_id) {
  return ModelFromText(store.GetText(kModelBucket, ModelKey(participant_id)));
}

}  // namespace moodsense::learn
