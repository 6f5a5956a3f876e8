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

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace moodsense {

enum class ErrorCode {
  kRange,
  kInsufficientSignal,
  kParse,
  kAuthorization,
  kTransform,
  kNotFound,
  kFormat,
  kSchemaConflict,
  kEncode,
  kEmptyDataset,
  kCannotSynthesize,
  kMissingClass,
  kDivergence,
  kInput,
  kTimeout,
  kConfig,
  kIo,
};

std::string_view ToString(ErrorCode code);

// Base of every exception thrown by the library. Callers that only need the
// category switch on code(); tests catch the concrete subclasses.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

template <ErrorCode C>
class CodedError : public Error {
 public:
  explicit CodedError(const std::string& what) : Error(C, what) {}
};

using RangeError = CodedError<ErrorCode::kRange>;
using InsufficientSignalError = CodedError<ErrorCode::kInsufficientSignal>;
using ParseError = CodedError<ErrorCode::kParse>;
using AuthorizationError = CodedError<ErrorCode::kAuthorization>;
using TransformError = CodedError<ErrorCode::kTransform>;
using NotFoundError = CodedError<ErrorCode::kNotFound>;
using EmptyDatasetError = CodedError<ErrorCode::kEmptyDataset>;
using MissingClassError = CodedError<ErrorCode::kMissingClass>;
using DivergenceError = CodedError<ErrorCode::kDivergence>;
using InputError = CodedError<ErrorCode::kInput>;
using TimeoutError = CodedError<ErrorCode::kTimeout>;
using ConfigError = CodedError<ErrorCode::kConfig>;
using IoError = CodedError<ErrorCode::kIo>;

// Malformed byte stream; position is the offset where decoding gave up.
class FormatError : public Error {
 public:
  FormatError(const std::string& what, std::size_t position)
      : Error(ErrorCode::kFormat,
              what + " (at byte " + std::to_string(position) + ")"),
        position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

class SchemaConflictError : public Error {
 public:
  SchemaConflictError(std::string field, const std::string& detail)
      : Error(ErrorCode::kSchemaConflict,
              "schema conflict on field \"" + field + "\": " + detail),
        field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

class EncodeError : public Error {
 public:
  EncodeError(std::size_t row, const std::string& detail)
      : Error(ErrorCode::kEncode,
              "row " + std::to_string(row) + ": " + detail),
        row_(row) {}

  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

class CannotSynthesizeError : public Error {
 public:
  CannotSynthesizeError(int label, const std::string& detail)
      : Error(ErrorCode::kCannotSynthesize,
              "class " + std::to_string(label) + ": " + detail),
        label_(label) {}

  int label() const noexcept { return label_; }

 private:
  int label_;
};

inline std::string_view ToString(ErrorCode code) {
  switch (code) {
    case ErrorCode::kRange: return "range_error";
    case ErrorCode::kInsufficientSignal: return "insufficient_signal";
    case ErrorCode::kParse: return "parse_error";
    case ErrorCode::kAuthorization: return "authorization_error";
    case ErrorCode::kTransform: return "transform_error";
    case ErrorCode::kNotFound: return "not_found";
    case ErrorCode::kFormat: return "format_error";
    case ErrorCode::kSchemaConflict: return "schema_conflict";
    case ErrorCode::kEncode: return "encode_error";
    case ErrorCode::kEmptyDataset: return "empty_dataset";
    case ErrorCode::kCannotSynthesize: return "cannot_synthesize";
    case ErrorCode::kMissingClass: return "missing_class";
    case ErrorCode::kDivergence: return "divergence";
    case ErrorCode::kInput: return "input_error";
    case ErrorCode::kTimeout: return "timeout";
    case ErrorCode::kConfig: return "config_error";
    case ErrorCode::kIo: return "io_error";
  }
  return "unknown";
}

}  // namespace moodsense
