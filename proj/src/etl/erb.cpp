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

#include "moodsense/etl/erb.hpp"

#include <bit>
#include <cstring>
#include <limits>

#include "moodsense/error.hpp"

namespace moodsense::etl {
namespace {

using Json = nlohmann::ordered_json;

static_assert(std::endian::native == std::endian::little,
              "ERB writer assumes a little-endian host");

template <typename T>
void Append(Bytes& out, T v) {
  const auto* p = reinterpret_cast<const std::uint8_t*>(&v);
  out.insert(out.end(), p, p + sizeof(T));
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::size_t pos() const { return pos_; }
  std::size_t remaining() const { return bytes_.size() - pos_; }

  void Require(std::size_t n, const char* what) const {
    if (n > remaining()) {
      throw FormatError(std::string("truncated ") + what, pos_);
    }
  }

  template <typename T>
  T Read(const char* what) {
    Require(sizeof(T), what);
    T v;
    std::memcpy(&v, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }

  std::span<const std::uint8_t> Take(std::size_t n, const char* what) {
    Require(n, what);
    auto s = bytes_.subspan(pos_, n);
    pos_ += n;
    return s;
  }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

bool ValidUtf8(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size()) {
    const auto c = static_cast<unsigned char>(s[i]);
    std::size_t len = 0;
    std::uint32_t cp = 0;
    if (c < 0x80) {
      ++i;
      continue;
    } else if ((c & 0xE0) == 0xC0) {
      len = 2;
      cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      len = 3;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      len = 4;
      cp = c & 0x07;
    } else {
      return false;
    }
    if (i + len > s.size()) return false;
    for (std::size_t k = 1; k < len; ++k) {
      const auto cc = static_cast<unsigned char>(s[i + k]);
      if ((cc & 0xC0) != 0x80) return false;
      cp = (cp << 6) | (cc & 0x3F);
    }
    const std::uint32_t min_cp[] = {0, 0, 0x80, 0x800, 0x10000};
    if (cp < min_cp[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
      return false;
    }
    i += len;
  }
  return true;
}

}  // namespace

RecordBatch BuildBatch(const Schema& schema, std::span<const Json> records) {
  const std::size_t rows = records.size();
  if (schema.fields.empty() && rows != 0) {
    throw EncodeError(0, "schema has no fields");
  }
  RecordBatch batch;
  batch.schema = schema;
  batch.row_count = rows;
  batch.columns.resize(schema.fields.size());

  for (std::size_t c = 0; c < schema.fields.size(); ++c) {
    Column& col = batch.columns[c];
    col.validity.assign((rows + 7) / 8, 0);
    switch (schema.fields[c].type) {
      case FieldType::kDouble: col.values = std::vector<double>(rows, 0.0); break;
      case FieldType::kInt64: col.values = std::vector<std::int64_t>(rows, 0); break;
      case FieldType::kString: {
        StringColumn s;
        s.offsets.assign(rows + 1, 0);
        col.values = std::move(s);
        break;
      }
    }
  }

  for (std::size_t r = 0; r < rows; ++r) {
    const Json& rec = records[r];
    if (!rec.is_object()) throw EncodeError(r, "record is not a JSON object");
    for (const auto& [key, value] : rec.items()) {
      if (!schema.IndexOf(key)) {
        throw EncodeError(r, "field \"" + key + "\" not in schema");
      }
    }
    for (std::size_t c = 0; c < schema.fields.size(); ++c) {
      const Field& f = schema.fields[c];
      Column& col = batch.columns[c];
      auto it = rec.find(f.name);
      const bool present = it != rec.end() && !it->is_null();
      auto type_error = [&] {
        return EncodeError(r, "field \"" + f.name + "\" is not " +
                                  std::string(ToString(f.type)));
      };
      if (present) col.validity[r / 8] |= static_cast<std::uint8_t>(1U << (r % 8));

      switch (f.type) {
        case FieldType::kDouble:
          if (present) {
            if (!it->is_number()) throw type_error();
            std::get<std::vector<double>>(col.values)[r] = it->get<double>();
          }
          break;
        case FieldType::kInt64:
          if (present) {
            if (!it->is_number_integer()) throw type_error();
            if (it->is_number_unsigned() &&
                it->get<std::uint64_t>() >
                    static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max())) {
              throw EncodeError(r, "field \"" + f.name + "\" overflows int64");
            }
            std::get<std::vector<std::int64_t>>(col.values)[r] = it->get<std::int64_t>();
          }
          break;
        case FieldType::kString: {
          auto& s = std::get<StringColumn>(col.values);
          if (present) {
            if (!it->is_string()) throw type_error();
            s.bytes += it->get_ref<const std::string&>();
            if (s.bytes.size() > std::numeric_limits<std::uint32_t>::max()) {
              throw EncodeError(r, "string column exceeds 4 GiB");
            }
          }
          s.offsets[r + 1] = static_cast<std::uint32_t>(s.bytes.size());
          break;
        }
      }
    }
  }
  return batch;
}

Bytes SerializeBatch(const RecordBatch& batch) {
  Bytes out;
  out.insert(out.end(), std::begin(kErbMagic), std::end(kErbMagic));
  const std::string schema_json = batch.schema.ToJson().dump();
  Append<std::uint32_t>(out, static_cast<std::uint32_t>(schema_json.size()));
  out.insert(out.end(), schema_json.begin(), schema_json.end());
  Append<std::uint64_t>(out, batch.row_count);

  for (const Column& col : batch.columns) {
    out.insert(out.end(), col.validity.begin(), col.validity.end());
    std::visit(
        [&](const auto& values) {
          using T = std::decay_t<decltype(values)>;
          if constexpr (std::is_same_v<T, StringColumn>) {
            for (auto o : values.offsets) Append<std::uint32_t>(out, o);
            out.insert(out.end(), values.bytes.begin(), values.bytes.end());
          } else {
            for (auto v : values) Append(out, v);
          }
        },
        col.values);
  }
  return out;
}

RecordBatch ParseBatch(std::span<const std::uint8_t> bytes) {
  Reader in(bytes);
  const auto magic = in.Take(4, "magic");
  if (std::memcmp(magic.data(), kErbMagic, 4) != 0) {
    throw FormatError("bad magic", 0);
  }

  const auto schema_len = in.Read<std::uint32_t>("schema length");
  const std::size_t schema_pos = in.pos();
  const auto schema_bytes = in.Take(schema_len, "schema");
  const std::string schema_text(schema_bytes.begin(), schema_bytes.end());
  RecordBatch batch;
  try {
    batch.schema = Schema::FromJson(Json::parse(schema_text));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("schema JSON: ") + e.what(), schema_pos);
  } catch (const Error& e) {
    throw FormatError(std::string("schema: ") + e.what(), schema_pos);
  }
  if (batch.schema.ToJson().dump() != schema_text) {
    throw FormatError("non-canonical schema JSON", schema_pos);
  }

  const std::size_t rows_pos = in.pos();
  const auto rows = in.Read<std::uint64_t>("row count");
  if (batch.schema.fields.empty() && rows != 0) {
    throw FormatError("rows without columns", rows_pos);
  }
  for (const Field& f : batch.schema.fields) {
    Column col;
    const std::uint64_t bitmap_len = rows / 8 + (rows % 8 != 0);
    if (bitmap_len > in.remaining()) {
      throw FormatError("truncated validity bitmap for \"" + f.name + "\"", in.pos());
    }
    const std::size_t bitmap_pos = in.pos();
    const auto bitmap = in.Take(static_cast<std::size_t>(bitmap_len), "bitmap");
    col.validity.assign(bitmap.begin(), bitmap.end());
    if (rows % 8 != 0 && (col.validity.back() >> (rows % 8)) != 0) {
      throw FormatError("non-zero bitmap padding", bitmap_pos + bitmap_len - 1);
    }
    const auto n = static_cast<std::size_t>(rows);

    if (f.type == FieldType::kString) {
      if (rows + 1 > in.remaining() / 4) {
        throw FormatError("truncated offsets for \"" + f.name + "\"", in.pos());
      }
      StringColumn s;
      s.offsets.resize(n + 1);
      for (std::size_t r = 0; r <= n; ++r) {
        const std::size_t at = in.pos();
        s.offsets[r] = in.Read<std::uint32_t>("offset");
        if ((r == 0 && s.offsets[0] != 0) || (r > 0 && s.offsets[r] < s.offsets[r - 1])) {
          throw FormatError("corrupt string offsets", at);
        }
        if (r > 0 && !col.IsValid(r - 1) && s.offsets[r] != s.offsets[r - 1]) {
          throw FormatError("null string cell with data", at);
        }
      }
      const std::size_t data_pos = in.pos();
      const auto data = in.Take(s.offsets[n], "string data");
      s.bytes.assign(data.begin(), data.end());
      if (!ValidUtf8(s.bytes)) throw FormatError("invalid UTF-8", data_pos);
      col.values = std::move(s);
    } else {
      if (rows > in.remaining() / 8) {
        throw FormatError("truncated values for \"" + f.name + "\"", in.pos());
      }
      auto read_values = [&]<typename T>(std::vector<T> values) {
        for (std::size_t r = 0; r < n; ++r) {
          const std::size_t at = in.pos();
          values[r] = in.Read<T>("value");
          if (!col.IsValid(r) && std::bit_cast<std::uint64_t>(values[r]) != 0) {
            throw FormatError("null cell with data", at);
          }
        }
        col.values = std::move(values);
      };
      if (f.type == FieldType::kDouble) {
        read_values(std::vector<double>(n));
      } else {
        read_values(std::vector<std::int64_t>(n));
      }
    }
    batch.columns.push_back(std::move(col));
  }
  if (in.remaining() != 0) throw FormatError("trailing bytes", in.pos());
  batch.row_count = rows;
  return batch;
}

std::vector<Json> BatchRows(const RecordBatch& batch) {
  const auto n = static_cast<std::size_t>(batch.row_count);
  std::vector<Json> rows(n, Json::object());
  for (std::size_t c = 0; c < batch.columns.size(); ++c) {
    const Column& col = batch.columns[c];
    const std::string& name = batch.schema.fields[c].name;
    for (std::size_t r = 0; r < n; ++r) {
      if (!col.IsValid(r)) continue;
      std::visit(
          [&](const auto& values) {
            using T = std::decay_t<decltype(values)>;
            if constexpr (std::is_same_v<T, StringColumn>) {
              rows[r][name] = values.bytes.substr(
                  values.offsets[r], values.offsets[r + 1] - values.offsets[r]);
            } else {
              rows[r][name] = values[r];
            }
          },
          col.values);
    }
  }
  return rows;
}

}  // namespace moodsense::etl
