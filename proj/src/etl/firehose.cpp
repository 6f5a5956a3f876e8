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

#include "moodsense/etl/firehose.hpp"

#include <algorithm>
#include <set>
#include <thread>

#include <spdlog/spdlog.h>

#include "moodsense/error.hpp"
#include "moodsense/etl/erb.hpp"

namespace moodsense::etl {
namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

SchemaRegistry::SchemaRegistry(fs::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec) throw IoError("cannot create schema registry " + dir_.string());
}

std::optional<Schema> SchemaRegistry::Get(const std::string& stream) const {
  std::lock_guard lock(mu_);
  std::ifstream in(dir_ / (stream + ".json"));
  if (!in) return std::nullopt;
  try {
    return Schema::FromJson(Json::parse(in));
  } catch (const std::exception& e) {
    throw FormatError("schema registry entry for " + stream + ": " + e.what(), 0);
  }
}

void SchemaRegistry::Put(const std::string& stream, const Schema& schema) {
  std::lock_guard lock(mu_);
  const fs::path tmp = dir_ / (stream + ".json.tmp");
  {
    std::ofstream out(tmp, std::ios::trunc);
    out << schema.ToJson().dump(2) << '\n';
    if (!out) throw IoError("cannot write schema for " + stream);
  }
  fs::rename(tmp, dir_ / (stream + ".json"));
}

DeliveryStream::DeliveryStream(std::string name, ObjectStore& store,
                               SchemaRegistry& registry, DeliveryStreamOptions options)
    : name_(std::move(name)),
      store_(store),
      registry_(registry),
      options_(std::move(options)) {
  if (name_ != StreamNameFor(name_)) {
    throw InputError("stream name \"" + name_ + "\" is not key-safe");
  }
  if (options_.state_dir.empty()) options_.state_dir = store_.root() / "_firehose";
  fs::create_directories(options_.state_dir / "wal");
  fs::create_directories(spill_dir());
  Recover();
}

fs::path DeliveryStream::wal_path() const {
  return options_.state_dir / "wal" / (name_ + ".ndjson");
}

fs::path DeliveryStream::spill_dir() const { return options_.state_dir / "spill"; }

void DeliveryStream::Recover() {
  const auto keys = ListStreamObjects(store_, options_.bucket, name_);
  if (!keys.empty()) next_seq_ = ParsePartitionedKey(keys.back())->seq + 1;

  if (!options_.spill_enabled) return;
  if (std::ifstream in(wal_path()); in) {
    std::string line;
    while (std::getline(in, line)) {
      Json rec = Json::parse(line, nullptr, false);
      if (rec.is_discarded() || !rec.is_object()) continue;  // torn tail write
      buffer_.push_back(std::move(rec));
    }
  }
  if (!buffer_.empty()) {
    oldest_ms_ = options_.clock();
    stats_.recovered_rows = buffer_.size();
    spdlog::info("firehose {}: recovered {} buffered records", name_, buffer_.size());
  }
  wal_.open(wal_path(), std::ios::app);
}

void DeliveryStream::ResetWal() {
  if (!options_.spill_enabled) return;
  wal_.close();
  wal_.open(wal_path(), std::ios::trunc);
}

std::optional<ObjectKey> DeliveryStream::Put(const Json& record) {
  if (!record.is_object()) throw InputError("firehose record is not a JSON object");
  std::lock_guard lock(mu_);

  // Reject records that cannot join the registered schema or the buffer.
  const Schema incoming = InferSchema(std::span<const Json>(&record, 1));
  if (!pending_schema_) pending_schema_ = registry_.Get(name_);
  pending_schema_ = pending_schema_ ? MergeSchemas(*pending_schema_, incoming) : incoming;

  if (options_.spill_enabled) {
    wal_ << record.dump() << '\n';
    wal_.flush();
  }
  if (buffer_.empty()) oldest_ms_ = options_.clock();
  buffer_.push_back(record);

  if (buffer_.size() >= options_.flush.flush_rows ||
      options_.clock() - oldest_ms_ >= options_.flush.flush_interval_s * 1000) {
    return FlushLocked();
  }
  return std::nullopt;
}

std::optional<ObjectKey> DeliveryStream::Tick() {
  std::lock_guard lock(mu_);
  if (buffer_.empty() ||
      options_.clock() - oldest_ms_ < options_.flush.flush_interval_s * 1000) {
    return std::nullopt;
  }
  return FlushLocked();
}

std::optional<ObjectKey> DeliveryStream::Flush() {
  std::lock_guard lock(mu_);
  return FlushLocked();
}

std::optional<ObjectKey> DeliveryStream::FlushLocked() {
  if (buffer_.empty()) return std::nullopt;
  const std::uint64_t seq = next_seq_++;

  Schema schema;
  Bytes bytes;
  try {
    schema = InferSchema(buffer_);
    if (auto registered = registry_.Get(name_)) schema = MergeSchemas(*registered, schema);
    pending_schema_.reset();
    bytes = EncodeBatch(schema, buffer_);
  } catch (const Error& e) {
    spdlog::error("firehose {}: cannot encode batch {}: {}", name_, seq, e.what());
    Spill(seq, buffer_);
    buffer_.clear();
    ResetWal();
    return std::nullopt;
  }

  ObjectKey key{options_.bucket, MakePartitionedKey(name_, seq, options_.clock())};
  auto backoff = options_.retry.base_backoff;
  for (int attempt = 1; attempt <= options_.retry.max_attempts; ++attempt) {
    try {
      store_.Put(key.bucket, key.key, bytes);
      registry_.Put(name_, schema);
      ++stats_.objects_written;
      stats_.rows_written += buffer_.size();
      buffer_.clear();
      ResetWal();
      return key;
    } catch (const IoError& e) {
      spdlog::warn("firehose {}: put {} failed (attempt {}/{}): {}", name_, key.key,
                   attempt, options_.retry.max_attempts, e.what());
      if (attempt == options_.retry.max_attempts) break;
      ++stats_.retries;
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
  }
  Spill(seq, buffer_);
  buffer_.clear();
  ResetWal();
  return std::nullopt;
}

void DeliveryStream::Spill(std::uint64_t seq, const std::vector<Json>& rows) {
  char name[64];
  std::snprintf(name, sizeof name, "-%08llu.ndjson", static_cast<unsigned long long>(seq));
  const fs::path p = spill_dir() / (name_ + name);
  std::ofstream out(p, std::ios::app);
  for (const auto& r : rows) out << r.dump() << '\n';
  out.flush();
  if (!out) throw IoError("dead-letter spill failed: " + p.string());
  stats_.spilled_rows += rows.size();
  spdlog::error("firehose {}: spilled {} records to {}", name_, rows.size(), p.string());
}

std::size_t DeliveryStream::buffered() const {
  std::lock_guard lock(mu_);
  return buffer_.size();
}

std::uint64_t DeliveryStream::next_seq() const {
  std::lock_guard lock(mu_);
  return next_seq_;
}

DeliveryStream::Stats DeliveryStream::stats() const {
  std::lock_guard lock(mu_);
  return stats_;
}

FirehoseRouter::FirehoseRouter(ObjectStore& store, DeliveryStreamOptions options)
    : store_(store),
      options_(std::move(options)),
      registry_((options_.state_dir.empty() ? store.root() / "_firehose"
                                            : options_.state_dir) /
                "schemas") {}

DeliveryStream& FirehoseRouter::Stream(const std::string& name) {
  std::lock_guard lock(mu_);
  auto& slot = streams_[name];
  if (!slot) slot = std::make_unique<DeliveryStream>(name, store_, registry_, options_);
  return *slot;
}

std::optional<ObjectKey> FirehoseRouter::Put(const std::string& stream, const Json& record) {
  return Stream(stream).Put(record);
}

void FirehoseRouter::TickAll() {
  std::lock_guard lock(mu_);
  for (auto& [name, s] : streams_) s->Tick();
}

void FirehoseRouter::FlushAll() {
  std::lock_guard lock(mu_);
  for (auto& [name, s] : streams_) s->Flush();
}

std::vector<std::string> ListStreamObjects(const ObjectStore& store,
                                           std::string_view bucket,
                                           std::string_view stream) {
  std::vector<std::pair<std::uint64_t, std::string>> found;
  for (auto& key : store.List(bucket, "year=")) {
    auto pk = ParsePartitionedKey(key);
    if (pk && pk->stream == stream) found.emplace_back(pk->seq, std::move(key));
  }
  std::stable_sort(found.begin(), found.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<std::string> keys;
  std::set<std::uint64_t> seen;
  for (auto& [seq, key] : found) {
    if (seen.insert(seq).second) keys.push_back(std::move(key));
  }
  return keys;
}

std::vector<Json> ReadStream(const ObjectStore& store, std::string_view bucket,
                             std::string_view stream) {
  std::vector<Json> rows;
  for (const auto& key : ListStreamObjects(store, bucket, stream)) {
    auto decoded = DecodeBatch(store.Get(bucket, key));
    std::move(decoded.rows.begin(), decoded.rows.end(), std::back_inserter(rows));
  }
  return rows;
}

}  // namespace moodsense::etl
