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

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace moodsense::etl {

enum class FieldType { kDouble, kInt64, kString };

std::string_view ToString(FieldType t);
// Throws ParseError on unknown names.
FieldType ParseFieldType(std::string_view name);

struct Field {
  std::string name;
  FieldType type = FieldType::kString;

  bool operator==(const Field&) const = default;
};

struct Schema {
  std::vector<Field> fields;

  std::optional<std::size_t> IndexOf(std::string_view name) const;

  // {"fields":[{"name":...,"type":...}, ...]}
  nlohmann::ordered_json ToJson() const;
  // Throws ParseError on malformed documents, duplicate or empty names.
  static Schema FromJson(const nlohmann::ordered_json& j);

  bool operator==(const Schema&) const = default;
};

// Crawler: union of fields in first-seen order. float-typed values make a
// field double, integers alone make it int64, strings make it string;
// integers widen to double. string vs number, or booleans/objects/arrays,
// raise SchemaConflictError naming the field. Throws InputError on an empty
// sample or a non-object element.
Schema InferSchema(std::span<const nlohmann::ordered_json> sample);

// Union of two schemas with the same widening rules; `base` order first.
Schema MergeSchemas(const Schema& base, const Schema& incoming);

}  // namespace moodsense::etl
