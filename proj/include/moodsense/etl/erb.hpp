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

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "moodsense/etl/schema.hpp"

namespace moodsense::etl {

using Bytes = std::vector<std::uint8_t>;

// ERB ("encoded record batch") layout, all integers little-endian:
//
//   "ERB1"                     4 bytes magic
//   u32 schema_len             length of the schema JSON
//   schema JSON                compact Schema::ToJson()
//   u64 row_count
//   per column, schema order:
//     validity bitmap          ceil(rows/8) bytes, LSB-first, 1 = present
//     double / int64           rows * 8 bytes (null cells are 0)
//     string                   (rows+1) u32 offsets, then offsets[rows] bytes
//                              (null cells are empty)
//
// Unused bitmap bits must be 0 and the file must end after the last column, so
// every valid file has exactly one byte representation.
inline constexpr char kErbMagic[4] = {'E', 'R', 'B', '1'};

struct StringColumn {
  std::vector<std::uint32_t> offsets;  // row_count + 1 entries
  std::string bytes;
};

struct Column {
  std::vector<std::uint8_t> validity;
  std::variant<std::vector<double>, std::vector<std::int64_t>, StringColumn> values;

  bool IsValid(std::size_t row) const {
    return (validity[row / 8] >> (row % 8)) & 1U;
  }
};

struct RecordBatch {
  Schema schema;
  std::uint64_t row_count = 0;
  std::vector<Column> columns;
};

// Columnarizes JSON objects under `schema`. Missing fields and explicit nulls
// become null cells. Throws EncodeError (with the row index) for non-objects,
// fields outside the schema, or values of the wrong type.
RecordBatch BuildBatch(const Schema& schema,
                       std::span<const nlohmann::ordered_json> records);

Bytes SerializeBatch(const RecordBatch& batch);

// Throws FormatError with the failing byte offset.
RecordBatch ParseBatch(std::span<const std::uint8_t> bytes);

// Row objects in schema field order; null cells are omitted.
std::vector<nlohmann::ordered_json> BatchRows(const RecordBatch& batch);

inline Bytes EncodeBatch(const Schema& schema,
                         std::span<const nlohmann::ordered_json> records) {
  return SerializeBatch(BuildBatch(schema, records));
}

struct DecodedBatch {
  Schema schema;
  std::vector<nlohmann::ordered_json> rows;
};

inline DecodedBatch DecodeBatch(std::span<const std::uint8_t> bytes) {
  RecordBatch b = ParseBatch(bytes);
  auto rows = BatchRows(b);
  return DecodedBatch{std::move(b.schema), std::move(rows)};
}

}  // namespace moodsense::etl
