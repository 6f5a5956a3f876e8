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

#include "moodsense/etl/schema.hpp"

#include <set>

#include "moodsense/error.hpp"

namespace moodsense::etl {
namespace {

using Json = nlohmann::ordered_json;

// nullopt for null (carries no type information).
std::optional<FieldType> Classify(const std::string& field, const Json& v) {
  if (v.is_null()) return std::nullopt;
  if (v.is_number_float()) return FieldType::kDouble;
  if (v.is_number_integer()) return FieldType::kInt64;
  if (v.is_string()) return FieldType::kString;
  throw SchemaConflictError(field, std::string("unsupported JSON type ") +
                                       v.type_name());
}

FieldType Unify(const std::string& field, FieldType a, FieldType b) {
  if (a == b) return a;
  const bool a_num = a != FieldType::kString;
  const bool b_num = b != FieldType::kString;
  if (a_num && b_num) return FieldType::kDouble;
  throw SchemaConflictError(field, std::string(ToString(a)) + " vs " +
                                       std::string(ToString(b)));
}

// Slot type: nullopt while only nulls have been seen.
struct Slot {
  std::string name;
  std::optional<FieldType> type;
};

void Absorb(std::vector<Slot>& slots, const std::string& name,
            std::optional<FieldType> t) {
  for (auto& s : slots) {
    if (s.name != name) continue;
    if (t) s.type = s.type ? Unify(name, *s.type, *t) : *t;
    return;
  }
  slots.push_back(Slot{name, t});
}

Schema Finish(const std::vector<Slot>& slots) {
  Schema schema;
  for (const auto& s : slots) {
    schema.fields.push_back(Field{s.name, s.type.value_or(FieldType::kString)});
  }
  return schema;
}

}  // namespace

std::string_view ToString(FieldType t) {
  switch (t) {
    case FieldType::kDouble: return "double";
    case FieldType::kInt64: return "int64";
    case FieldType::kString: return "string";
  }
  return "string";
}

FieldType ParseFieldType(std::string_view name) {
  if (name == "double") return FieldType::kDouble;
  if (name == "int64") return FieldType::kInt64;
  if (name == "string") return FieldType::kString;
  throw ParseError("unknown field type \"" + std::string(name) + "\"");
}

std::optional<std::size_t> Schema::IndexOf(std::string_view name) const {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (fields[i].name == name) return i;
  }
  return std::nullopt;
}

Json Schema::ToJson() const {
  Json arr = Json::array();
  for (const auto& f : fields) {
    arr.push_back(Json{{"name", f.name}, {"type", ToString(f.type)}});
  }
  return Json{{"fields", std::move(arr)}};
}

Schema Schema::FromJson(const Json& j) {
  if (!j.is_object() || !j.contains("fields") || !j["fields"].is_array()) {
    throw ParseError("schema document must be {\"fields\": [...]}");
  }
  Schema s;
  std::set<std::string> seen;
  for (const auto& f : j["fields"]) {
    if (!f.is_object() || !f.contains("name") || !f["name"].is_string() ||
        !f.contains("type") || !f["type"].is_string()) {
      throw ParseError("schema field must have string name and type");
    }
    auto name = f["name"].get<std::string>();
    if (name.empty()) throw ParseError("empty field name in schema");
    if (!seen.insert(name).second) {
      throw ParseError("duplicate field \"" + name + "\" in schema");
    }
    s.fields.push_back(Field{std::move(name), ParseFieldType(f["type"].get<std::string>())});
  }
  return s;
}

Schema InferSchema(std::span<const Json> sample) {
  if (sample.empty()) throw InputError("cannot infer a schema from zero samples");
  std::vector<Slot> slots;
  for (const auto& obj : sample) {
    if (!obj.is_object()) throw InputError("schema sample element is not an object");
    for (const auto& [key, value] : obj.items()) {
      if (key.empty()) throw InputError("empty field name in sample");
      Absorb(slots, key, Classify(key, value));
    }
  }
  return Finish(slots);
}

Schema MergeSchemas(const Schema& base, const Schema& incoming) {
  std::vector<Slot> slots;
  for (const auto& f : base.fields) Absorb(slots, f.name, f.type);
  for (const auto& f : incoming.fields) Absorb(slots, f.name, f.type);
  return Finish(slots);
}

}  // namespace moodsense::etl
