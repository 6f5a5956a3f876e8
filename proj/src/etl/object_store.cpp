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

#include "moodsense/etl/object_store.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <regex>
#include <sstream>
#include <thread>

#include "moodsense/error.hpp"

namespace moodsense::etl {
namespace fs = std::filesystem;

namespace {

constexpr std::string_view kTempPrefix = ".tmp-";

bool KeyChar(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '_' ||
         c == '-' || c == '=';
}

std::string TempSuffix() {
  static std::atomic<std::uint64_t> counter{0};
  std::ostringstream os;
  os << std::hash<std::thread::id>{}(std::this_thread::get_id()) << '-'
     << counter.fetch_add(1);
  return os.str();
}

}  // namespace

void ValidateKey(std::string_view key) {
  auto fail = [&](const char* why) {
    throw InputError("invalid object key \"" + std::string(key) + "\": " + why);
  };
  if (key.empty()) fail("empty");
  std::size_t start = 0;
  while (start <= key.size()) {
    auto slash = key.find('/', start);
    if (slash == std::string_view::npos) slash = key.size();
    const auto seg = key.substr(start, slash - start);
    if (seg.empty()) fail("empty segment");
    if (seg == "." || seg == "..") fail("relative segment");
    if (seg.starts_with(kTempPrefix)) fail("reserved prefix");
    if (!std::all_of(seg.begin(), seg.end(), KeyChar)) fail("illegal character");
    start = slash + 1;
  }
}

void ValidateBucket(std::string_view bucket) {
  if (bucket.empty() || bucket.find('/') != std::string_view::npos) {
    throw InputError("invalid bucket \"" + std::string(bucket) + "\"");
  }
  ValidateKey(bucket);
}

ObjectStore::ObjectStore(fs::path root) : root_(std::move(root)) {
  std::error_code ec;
  fs::create_directories(root_, ec);
  if (ec) throw IoError("cannot create store root " + root_.string() + ": " + ec.message());
}

fs::path ObjectStore::PathFor(std::string_view bucket, std::string_view key) const {
  ValidateBucket(bucket);
  ValidateKey(key);
  return root_ / std::string(bucket) / std::string(key);
}

void ObjectStore::SetFaultInjector(FaultInjector f) {
  std::lock_guard lock(fault_mu_);
  fault_ = std::move(f);
}

void ObjectStore::Put(std::string_view bucket, std::string_view key,
                      std::span<const std::uint8_t> bytes) {
  const fs::path target = PathFor(bucket, key);
  {
    std::lock_guard lock(fault_mu_);
    if (fault_ && fault_(bucket, key)) {
      throw IoError("injected write failure for " + std::string(key));
    }
  }
  std::error_code ec;
  fs::create_directories(target.parent_path(), ec);
  if (ec) throw IoError("mkdir " + target.parent_path().string() + ": " + ec.message());

  const fs::path tmp =
      target.parent_path() / (std::string(kTempPrefix) + TempSuffix());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) {
      fs::remove(tmp, ec);
      throw IoError("write failed for " + target.string());
    }
  }
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("rename failed for " + target.string());
  }
}

void ObjectStore::Put(std::string_view bucket, std::string_view key,
                      std::string_view text) {
  Put(bucket, key,
      std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(text.data()),
                                    text.size()));
}

Bytes ObjectStore::Get(std::string_view bucket, std::string_view key) const {
  const fs::path p = PathFor(bucket, key);
  std::ifstream in(p, std::ios::binary);
  if (!in || !fs::is_regular_file(p)) {
    throw NotFoundError("no object " + std::string(bucket) + "/" + std::string(key));
  }
  return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

std::string ObjectStore::GetText(std::string_view bucket, std::string_view key) const {
  const Bytes b = Get(bucket, key);
  return std::string(b.begin(), b.end());
}

bool ObjectStore::Exists(std::string_view bucket, std::string_view key) const {
  return fs::is_regular_file(PathFor(bucket, key));
}

std::vector<std::string> ObjectStore::List(std::string_view bucket,
                                           std::string_view prefix) const {
  ValidateBucket(bucket);
  const fs::path base = root_ / std::string(bucket);
  std::vector<std::string> keys;
  std::error_code ec;
  if (!fs::is_directory(base, ec)) return keys;
  for (auto it = fs::recursive_directory_iterator(base, ec);
       !ec && it != fs::recursive_directory_iterator(); it.increment(ec)) {
    if (!it->is_regular_file()) continue;
    if (it->path().filename().string().starts_with(kTempPrefix)) continue;
    std::string key = fs::relative(it->path(), base).generic_string();
    if (key.starts_with(prefix)) keys.push_back(std::move(key));
  }
  std::sort(keys.begin(), keys.end());
  return keys;
}

std::string MakePartitionedKey(std::string_view stream, std::uint64_t seq, EpochMs at) {
  const CivilTime c = ToCivil(at);
  char buf[64];
  std::snprintf(buf, sizeof buf, "year=%04d/month=%02d/day=%02d/hour=%02d/", c.year,
                c.month, c.day, c.hour);
  char seq_buf[32];
  std::snprintf(seq_buf, sizeof seq_buf, "-%08llu.erb",
                static_cast<unsigned long long>(seq));
  return std::string(buf) + std::string(stream) + seq_buf;
}

std::optional<PartitionedKey> ParsePartitionedKey(std::string_view key) {
  static const std::regex kPattern(
      R"(^year=(\d{4})/month=(\d{2})/day=(\d{2})/hour=(\d{2})/([A-Za-z0-9_.=-]+)-(\d{8,20})\.erb$)");
  std::match_results<std::string_view::const_iterator> m;
  if (!std::regex_match(key.begin(), key.end(), m, kPattern)) return std::nullopt;
  PartitionedKey pk;
  pk.hour.year = std::stoi(m[1].str());
  pk.hour.month = std::stoi(m[2].str());
  pk.hour.day = std::stoi(m[3].str());
  pk.hour.hour = std::stoi(m[4].str());
  if (pk.hour.month < 1 || pk.hour.month > 12 || pk.hour.day < 1 ||
      pk.hour.day > 31 || pk.hour.hour > 23) {
    return std::nullopt;
  }
  pk.stream = m[5].str();
  try {
    pk.seq = std::stoull(m[6].str());
  } catch (const std::out_of_range&) {
    return std::nullopt;
  }
  return pk;
}

std::string StreamNameFor(std::string_view participant_id) {
  std::string out;
  for (char c : participant_id) {
    const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-';
    out += ok ? c : '_';
  }
  if (out.empty() || out == "." || out == "..") out = "_" + out;
  return out;
}

}  // namespace moodsense::etl
