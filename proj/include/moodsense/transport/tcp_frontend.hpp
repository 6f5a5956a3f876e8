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
#include <list>
#include <memory>
#include <mutex>
#include <string>
#include <thread>

#include "moodsense/transport/bus.hpp"

namespace moodsense::transport {

// Newline-delimited JSON front-end for remote devices.
//
// Client frames:
//   {"op":"connect","device":"<id>"}            (optional, sets the device)
//   {"op":"pub","topic":"...","payload":<json>}
//   {"op":"sub","topic":"<filter>"}
// Server frames:
//   {"op":"ack", ...}  {"op":"error","code":"...","error":"..."}
//   {"op":"msg","topic":"...","payload":<json or string>}
class TcpFrontend {
 public:
  TcpFrontend(Bus& bus, std::string default_device);
  ~TcpFrontend();

  TcpFrontend(const TcpFrontend&) = delete;
  TcpFrontend& operator=(const TcpFrontend&) = delete;

  // Binds 127.0.0.1 (or `host`) and starts accepting; port 0 picks a free
  // port. Returns the bound port.
  std::uint16_t Start(std::uint16_t port = 0, const std::string& host = "127.0.0.1");
  void Stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace moodsense::transport
