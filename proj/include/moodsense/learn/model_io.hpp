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

#include <filesystem>
#include <string>
#include <string_view>

#include "json.hpp"
#include "moodsense/etl/object_store.hpp"
#include "moodsense/learn/model.hpp"

namespace moodsense::learn {

inline constexpr int kModelSchemaVersion = 1;
inline constexpr std::string_view kModelBucket = "ml-artifacts";

nlohmann::ordered_json ModelToJson(const ModelParams& model);
// Throws FormatError for malformed or truncated documents, a schema_version
// other than kModelSchemaVersion, or a label_map that differs from the fixed
// one.
ModelParams ModelFromJson(const nlohmann::ordered_json& j);
ModelParams ModelFromText(std::string_view text);

void SaveModel(const ModelParams& model, const std::filesystem::path& path);
ModelParams LoadModel(const std::filesystem::path& path);

// models/<stream>.json in kModelBucket
std::string ModelKey(std::string_view participant_id);
void SaveModel(const ModelParams& model, etl::ObjectStore& store);
ModelParams LoadModel(const etl::ObjectStore& store, std::string_view participant_id);

}  // namespace moodsense::learn
