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

#include <string>
#include <string_view>

#include "json.hpp"

namespace moodsense::transport {

// Rounds x half-away-from-zero to `decimals` places, operating on the
// shortest decimal representation of x so that e.g. 1.0005 -> 1.001.
double RoundDecimal(double x, int decimals = 3);

// Rounds every floating-point number in the document (recursively); integers,
// strings, booleans and nulls pass through. Object key order is preserved.
nlohmann::ordered_json RoundTransform(const nlohmann::ordered_json& doc,
                                      int decimals = 3);

// Payload-level form used by the rules engine. Throws TransformError if the
// payload is not a JSON object.
std::string RoundTransformPayload(std::string_view payload, int decimals = 3);

}  // namespace moodsense::transport
