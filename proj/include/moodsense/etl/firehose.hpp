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

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "moodsense/clock.hpp"
#include "moodsense/etl/object_store.hpp"
#include "moodsense/etl/schema.hpp"

namespace moodsense::etl {

inline constexpr std::string_view kSensorBucket = "sensor-data";

// Schema per stream, persisted as <dir>/<stream>.json.
class SchemaRegistry {
 public:
  explicit SchemaRegistry(std::filesystem::path dir);

  std::optional<Schema> Get(const std::string& stream) const;
  void Put(const std::string& stream, const Schema& schema);

 private:
  std::filesystem::path dir_;
  mutable std::mutex mu_;
};

struct FlushPolicy {
  std::size_t flush_rows = 500;
  std::int64_t flush_interval_s = 60;
};

struct RetryPolicy {
  int max_attempts = 3;
  std::chrono::milliseconds base_backoff{2};  // doubled per retry
};

struct DeliveryStreamOptions {
  std::string bucket = std::string(kSensorBucket);
  FlushPolicy flush;
  RetryPolicy retry;
  // Write-ahead log of acknowledged-but-unflushed records, replayed on
  // restart. Dead-letter spill files are always written.
  bool spill_enabled = true;
  std::filesystem::path state_dir;  // defaults to <store root>/_firehose
  ClockFn clock = SystemClock();
};

// Buffers JSON records for one stream and writes them as ERB objects under
// time-partitioned keys once flush_rows or flush_interval_s is reached. Keys
// carry a per-stream monotone sequence number that resumes after a restart.
// Store failures are retried with exponential backoff; batches that still
// fail are spilled to <state_dir>/spill/<stream>-<seq>.ndjson.
//
// Destruction does not flush (models a crash); call Close() for an orderly
// shutdown.
class DeliveryStream {
 public:
  DeliveryStream(std::string name, ObjectStore& store, SchemaRegistry& registry,
                 DeliveryStreamOptions options = {});

  // Returns the key written if this put triggered a flush. Throws InputError
  // for non-objects and SchemaConflictError against the registered schema.
  std::optional<ObjectKey> Put(const nlohmann::ordered_json& record);
  // Flushes if the interval has elapsed since the oldest buffered record.
  std::optional<ObjectKey> Tick();
  std::optional<ObjectKey> Flush();
  void Close() { Flush(); }

  std::size_t buffered() const;
  const std::string& name() const { return name_; }
  std::uint64_t next_seq() const;

  struct Stats {
    std::size_t objects_written = 0;
    std::size_t rows_written = 0;
    std::size_t retries = 0;
    std::size_t spilled_rows = 0;
    std::size_t recovered_rows = 0;
  };
  Stats stats() const;

  std::filesystem::path wal_path() const;
  std::filesystem::path spill_dir() const;

 private:
  std::optional<ObjectKey> FlushLocked();
  void Recover();
  void ResetWal();
  void Spill(std::uint64_t seq, const std::vector<nlohmann::ordered_json>& rows);

  std::string name_;
  ObjectStore& store_;
  SchemaRegistry& registry_;
  DeliveryStreamOptions options_;

  mutable std::mutex mu_;
  std::vector<nlohmann::ordered_json> buffer_;
  std::optional<Schema> pending_schema_;  // registered schema + buffer
  EpochMs oldest_ms_ = 0;
  std::uint64_t next_seq_ = 0;
  std::ofstream wal_;
  Stats stats_;
};

// One DeliveryStream per stream name, created on first use.
class FirehoseRouter {
 public:
  FirehoseRouter(ObjectStore& store, DeliveryStreamOptions options = {});

  DeliveryStream& Stream(const std::string& name);
  std::optional<ObjectKey> Put(const std::string& stream,
                               const nlohmann::ordered_json& record);
  void TickAll();
  void FlushAll();

  SchemaRegistry& registry() { return registry_; }

 private:
  ObjectStore& store_;
  DeliveryStreamOptions options_;
  SchemaRegistry registry_;
  std::mutex mu_;
  std::map<std::string, std::unique_ptr<DeliveryStream>> streams_;
};

// Partitioned keys of one stream, sorted by sequence number, keeping the first
// key seen for any duplicated sequence number.
std::vector<std::string> ListStreamObjects(const ObjectStore& store,
                                           std::string_view bucket,
                                           std::string_view stream);

// Every row stored for a stream (decoded ERB objects, deduplicated by seq).
std::vector<nlohmann::ordered_json> ReadStream(const ObjectStore& store,
                                               std::string_view bucket,
                                               std::string_view stream);

}  // namespace moodsense::etl
