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

#include "moodsense/transport/tcp_frontend.hpp"

#include <sys/socket.h>

#include <atomic>
#include <istream>
#include <vector>

#include <boost/asio.hpp>
#include <spdlog/spdlog.h>

#include "json.hpp"
#include "moodsense/error.hpp"

namespace moodsense::transport {

namespace asio = boost::asio;
using tcp = asio::ip::tcp;
using Json = nlohmann::json;

namespace {

struct Connection {
  explicit Connection(tcp::socket s) : socket(std::move(s)) {}

  void Send(const Json& frame) {
    const std::string line = frame.dump() + "\n";
    std::lock_guard lock(write_mu);
    boost::system::error_code ec;
    asio::write(socket, asio::buffer(line), ec);
  }

  void Close() {
    closed = true;
    boost::system::error_code ec;
    socket.shutdown(tcp::socket::shutdown_both, ec);
    std::lock_guard lock(subs_mu);
    for (auto& sub : subs) sub->Unsubscribe();
  }

  tcp::socket socket;
  std::mutex write_mu;
  std::atomic<bool> closed{false};
  std::mutex subs_mu;
  std::vector<std::shared_ptr<Subscription>> subs;
  std::vector<std::thread> pumps;  // joined after the reader exits
  std::thread reader;
};

Json ErrorFrame(std::string_view code, std::string_view what) {
  return Json{{"op", "error"}, {"code", code}, {"error", what}};
}

}  // namespace

struct TcpFrontend::Impl {
  Impl(Bus& b, std::string device) : bus(b), default_device(std::move(device)) {}

  void AcceptLoop() {
    while (running) {
      boost::system::error_code ec;
      tcp::socket socket(io);
      acceptor->accept(socket, ec);
      if (ec || !running) break;
      auto conn = std::make_shared<Connection>(std::move(socket));
      std::lock_guard lock(mu);
      connections.push_back(conn);
      conn->reader = std::thread([this, conn] { Serve(*conn); });
    }
  }

  void Serve(Connection& conn) {
    std::string device = default_device;
    asio::streambuf buf;
    while (!conn.closed) {
      boost::system::error_code ec;
      asio::read_until(conn.socket, buf, '\n', ec);
      if (ec) break;
      std::istream is(&buf);
      std::string line;
      std::getline(is, line);
      if (line.empty()) continue;
      HandleFrame(conn, device, line);
    }
    conn.Close();
  }

  void HandleFrame(Connection& conn, std::string& device, const std::string& line) {
    Json frame;
    try {
      frame = Json::parse(line);
    } catch (const Json::parse_error&) {
      conn.Send(ErrorFrame("parse_error", "frame is not JSON"));
      return;
    }
    const std::string op = frame.value("op", "");
    try {
      if (op == "connect") {
        device = frame.at("device").get<std::string>();
        conn.Send({{"op", "ack"}});
      } else if (op == "pub") {
        const Json& payload = frame.at("payload");
        const std::string bytes =
            payload.is_string() ? payload.get<std::string>() : payload.dump();
        const auto n = bus.Publish(device, frame.at("topic").get<std::string>(), bytes);
        conn.Send({{"op", "ack"}, {"delivered", n}});
      } else if (op == "sub") {
        auto sub = bus.Subscribe(device, frame.at("topic").get<std::string>());
        {
          std::lock_guard lock(conn.subs_mu);
          conn.subs.push_back(sub);
        }
        conn.pumps.emplace_back([&conn, sub] {
          while (sub->active() && !conn.closed) {
            auto m = sub->Next(std::chrono::milliseconds(200));
            if (!m) continue;
            Json payload = Json::parse(m->payload, nullptr, false);
            if (payload.is_discarded()) payload = m->payload;
            conn.Send({{"op", "msg"}, {"topic", m->topic}, {"payload", payload}});
          }
        });
        conn.Send({{"op", "ack"}});
      } else {
        conn.Send(ErrorFrame("parse_error", "unknown op '" + op + "'"));
      }
    } catch (const Error& e) {
      conn.Send(ErrorFrame(ToString(e.code()), e.what()));
    } catch (const Json::exception& e) {
      conn.Send(ErrorFrame("parse_error", e.what()));
    }
  }

  Bus& bus;
  std::string default_device;
  asio::io_context io;
  std::unique_ptr<tcp::acceptor> acceptor;
  std::atomic<bool> running{false};
  std::thread accept_thread;
  std::mutex mu;
  std::list<std::shared_ptr<Connection>> connections;
};

TcpFrontend::TcpFrontend(Bus& bus, std::string default_device)
    : impl_(std::make_unique<Impl>(bus, std::move(default_device))) {}

TcpFrontend::~TcpFrontend() { Stop(); }

std::uint16_t TcpFrontend::Start(std::uint16_t port, const std::string& host) {
  tcp::endpoint ep(asio::ip::make_address(host), port);
  impl_->acceptor = std::make_unique<tcp::acceptor>(impl_->io, ep);
  impl_->running = true;
  impl_->accept_thread = std::thread([this] { impl_->AcceptLoop(); });
  const auto bound = impl_->acceptor->local_endpoint().port();
  spdlog::info("tcp front-end listening on {}:{}", host, bound);
  return bound;
}

void TcpFrontend::Stop() {
  if (!impl_->running.exchange(false)) return;
  // shutdown() wakes the blocking accept().
  ::shutdown(impl_->acceptor->native_handle(), SHUT_RDWR);
  if (impl_->accept_thread.joinable()) impl_->accept_thread.join();
  boost::system::error_code ec;
  impl_->acceptor->close(ec);

  std::list<std::shared_ptr<Connection>> conns;
  {
    std::lock_guard lock(impl_->mu);
    conns.swap(impl_->connections);
  }
  for (auto& c : conns) {
    c->Close();
    if (c->reader.joinable()) c->reader.join();
    for (auto& p : c->pumps) p.join();
  }
}

}  // namespace moodsense::transport
