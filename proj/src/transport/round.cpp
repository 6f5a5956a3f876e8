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

#include "moodsense/transport/round.hpp"

#include <array>
#include <charconv>
#include <cmath>

#include "moodsense/error.hpp"

namespace moodsense::transport {

double RoundDecimal(double x, int decimals) {
  if (!std::isfinite(x) || decimals < 0) return x;

  std::array<char, 400> buf{};
  const auto res =
      std::to_chars(buf.data(), buf.data() + buf.size(), x, std::chars_format::fixed);
  std::string s(buf.data(), res.ptr);

  const bool negative = !s.empty() && s.front() == '-';
  if (negative) s.erase(0, 1);
  const auto dot = s.find('.');
  if (dot == std::string::npos || s.size() - dot - 1 <= static_cast<std::size_t>(decimals)) {
    return x;
  }

  const char next = s[dot + 1 + static_cast<std::size_t>(decimals)];
  std::string digits = s.substr(0, dot) + s.substr(dot + 1, static_cast<std::size_t>(decimals));
  if (next >= '5') {
    int i = static_cast<int>(digits.size()) - 1;
    for (; i >= 0; --i) {
      if (digits[static_cast<std::size_t>(i)] == '9') {
        digits[static_cast<std::size_t>(i)] = '0';
      } else {
        ++digits[static_cast<std::size_t>(i)];
        break;
      }
    }
    if (i < 0) digits.insert(digits.begin(), '1');
  }
  const std::size_t int_len = digits.size() - static_cast<std::size_t>(decimals);
  std::string rounded = (negative ? "-" : "") + digits.substr(0, int_len);
  if (decimals > 0) rounded += "." + digits.substr(int_len);

  double out = 0.0;
  std::from_chars(rounded.data(), rounded.data() + rounded.size(), out);
  return out;
}

nlohmann::ordered_json RoundTransform(const nlohmann::ordered_json& doc,
                                      int decimals) {
  if (doc.is_number_float()) return RoundDecimal(doc.get<double>(), decimals);
  if (doc.is_object()) {
    nlohmann::ordered_json out = nlohmann::ordered_json::object();
    for (const auto& [key, value] : doc.items()) {
      out[key] = RoundTransform(value, decimals);
    }
    return out;
  }
  if (doc.is_array()) {
    nlohmann::ordered_json out = nlohmann::ordered_json::array();
    for (const auto& value : doc) out.push_back(RoundTransform(value, decimals));
    return out;
  }
  return doc;
}

std::string RoundTransformPayload(std::string_view payload, int decimals) {
  nlohmann::ordered_json doc;
  try {
    doc = nlohmann::ordered_json::parse(payload);
  } catch (const nlohmann::json::parse_error& e) {
    throw TransformError(std::string("payload is not JSON: ") + e.what());
  }
  if (!doc.is_object()) throw TransformError("payload is not a JSON object");
  return RoundTransform(doc, decimals).dump();
}

}  // namespace moodsense::transport
