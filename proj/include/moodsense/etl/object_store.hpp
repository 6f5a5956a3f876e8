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
#include <filesystem>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "moodsense/clock.hpp"
#include "moodsense/etl/erb.hpp"

namespace moodsense::etl {

// Object keys are '/'-separated, relative, with non-empty segments drawn from
// [A-Za-z0-9._=-] and no "." / ".." segments. Throws InputError otherwise.
void ValidateKey(std::string_view key);
void ValidateBucket(std::string_view bucket);

// Filesystem-backed object store: <root>/<bucket>/<key>. Puts are atomic
// (temp file + rename), so concurrent readers never observe partial objects.
class ObjectStore {
 public:
  explicit ObjectStore(std::filesystem::path root);

  void Put(std::string_view bucket, std::string_view key, std::span<const std::uint8_t> bytes);
  void Put(std::string_view bucket, std::string_view key, std::string_view text);
  // Throws NotFoundError for a missing key.
  Bytes Get(std::string_view bucket, std::string_view key) const;
  std::string GetText(std::string_view bucket, std::string_view key) const;
  bool Exists(std::string_view bucket, std::string_view key) const;
  // Keys under `prefix`, lexicographically sorted.
  std::vector<std::string> List(std::string_view bucket, std::string_view prefix = "") const;

  const std::filesystem::path& root() const { return root_; }

  // Test hook: when it returns true for a key, the next Put of that key fails
  // with IoError before touching the filesystem.
  using FaultInjector = std::function<bool(std::string_view bucket, std::string_view key)>;
  void SetFaultInjector(FaultInjector f);

 private:
  std::filesystem::path PathFor(std::string_view bucket, std::string_view key) const;

  std::filesystem::path root_;
  mutable std::mutex fault_mu_;
  FaultInjector fault_;
};

// Firehose-style partitioned key:
//   year=YYYY/month=MM/day=DD/hour=HH/<stream>-<seq, 8 digits>.erb
struct ObjectKey {
  std::string bucket;
  std::string key;

  bool operator==(const ObjectKey&) const = default;
};

struct PartitionedKey {
  std::string stream;
  std::uint64_t seq = 0;
  CivilTime hour;  // year, month, day, hour populated
};

std::string MakePartitionedKey(std::string_view stream, std::uint64_t seq, EpochMs at);
// nullopt when `key` is not a well-formed partitioned key.
std::optional<PartitionedKey> ParsePartitionedKey(std::string_view key);

// Maps an opaque id to a key-safe stream name ([A-Za-z0-9_.-], others -> '_').
std::string StreamNameFor(std::string_view participant_id);

}  // namespace moodsense::etl
