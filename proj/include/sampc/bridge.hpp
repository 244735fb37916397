// Copyright 2026 The sampc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Websocket bridge between the bus and browser clients.
//
// Outbound: state, plan, traces, stats, schema and error frames as JSON text.
// Inbound: "param" and "command" frames, published on the bus. Malformed
// frames are answered with an error frame and the session stays open.

#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include "sampc/bus.hpp"
#include "sampc/error.hpp"
#include "sampc/messages.hpp"

namespace sampc {

namespace bridge_detail {

namespace beast = boost::beast;
namespace http = boost::beast::http;
namespace websocket = boost::beast::websocket;
namespace net = boost::asio;
using tcp = boost::asio::ip::tcp;

using Frame = std::shared_ptr<const std::string>;

inline Frame make_frame(const json& j) {
  return std::make_shared<const std::string>(j.dump());
}

inline constexpr std::size_t kMaxQueuedFrames = 512;

class Hub;

class Session : public std::enable_shared_from_this<Session> {
 public:
  Session(tcp::socket socket, Hub& hub) : stream_(std::move(socket)), hub_(hub) {}

  void run() { read_request(); }
  void send(Frame frame);
  void close();

 private:
  void read_request();
  void on_request(beast::error_code ec);
  void on_accept(beast::error_code ec);
  void read_frame();
  void on_frame(beast::error_code ec);
  void write_next();
  void handle_text(const std::string& text);

  beast::tcp_stream stream_;
  std::unique_ptr<websocket::stream<beast::tcp_stream>> ws_;
  Hub& hub_;
  beast::flat_buffer buffer_;
  http::request<http::string_body> request_;
  std::shared_ptr<http::response<http::string_body>> response_;
  std::deque<Frame> queue_;
  bool writing_ = false;
  bool open_ = false;
};

// Session bookkeeping; touched only from the io thread.
class Hub {
 public:
  explicit Hub(Bus& bus) : bus_(bus) {}

  Bus& bus() { return bus_; }

  void join(const std::shared_ptr<Session>& s) {
    sessions_[s.get()] = s;
    for (const auto& [_, frame] : last_frames_) s->send(frame);
    ++clients_;
  }
  void leave(Session* s) {
    if (sessions_.erase(s) > 0) --clients_;
  }
  // Sends to every session and remembers the frame under `key` for late
  // joiners.
  void broadcast(const std::string& key, const Frame& frame) {
    last_frames_[key] = frame;
    for (auto& [_, weak] : sessions_) {
      if (auto s = weak.lock()) s->send(frame);
    }
  }
  void close_all() {
    for (auto& [_, weak] : sessions_) {
      if (auto s = weak.lock()) s->close();
    }
    sessions_.clear();
    clients_ = 0;
  }
  std::size_t clients() const { return clients_.load(); }

 private:
  Bus& bus_;
  std::map<Session*, std::weak_ptr<Session>> sessions_;
  std::map<std::string, Frame> last_frames_;
  std::atomic<std::size_t> clients_{0};
};

inline void Session::read_request() {
  stream_.expires_after(std::chrono::seconds(30));
  http::async_read(stream_, buffer_, request_,
                   [self = shared_from_this()](beast::error_code ec, std::size_t) {
                     self->on_request(ec);
                   });
}

inline void Session::on_request(beast::error_code ec) {
  if (ec) return;
  if (websocket::is_upgrade(request_)) {
    stream_.expires_never();
    ws_ = std::make_unique<websocket::stream<beast::tcp_stream>>(std::move(stream_));
    ws_->set_option(
        websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_->text(true);
    ws_->async_accept(request_, [self = shared_from_this()](beast::error_code e) {
      self->on_accept(e);
    });
    return;
  }
  response_ = std::make_shared<http::response<http::string_body>>(
      http::status::ok, request_.version());
  response_->set(http::field::content_type, "text/plain");
  response_->body() =
      "sampc websocket bridge: open a websocket on this host and port.\n";
  response_->prepare_payload();
  response_->keep_alive(false);
  http::async_write(stream_, *response_,
                    [self = shared_from_this()](beast::error_code, std::size_t) {
                      beast::error_code ignored;
                      self->stream_.socket().shutdown(tcp::socket::shutdown_send,
                                                      ignored);
                    });
}

inline void Session::on_accept(beast::error_code ec) {
  if (ec) return;
  open_ = true;
  hub_.join(shared_from_this());
  read_frame();
}

inline void Session::read_frame() {
  buffer_.consume(buffer_.size());
  ws_->async_read(buffer_, [self = shared_from_this()](beast::error_code ec,
                                                       std::size_t) {
    self->on_frame(ec);
  });
}

inline void Session::on_frame(beast::error_code ec) {
  if (ec) {
    open_ = false;
    hub_.leave(this);
    return;
  }
  handle_text(beast::buffers_to_string(buffer_.data()));
  read_frame();
}

inline void Session::handle_text(const std::string& text) {
  try {
    const json j = json::parse(text);
    NodeMessage msg = client_message_from_json(j);
    if (auto* p = std::get_if<ParamUpdateMsg>(&msg)) {
      hub_.bus().params.publish(*p);
    } else if (auto* c = std::get_if<CommandMsg>(&msg)) {
      hub_.bus().commands.publish(*c);
    }
  } catch (const std::exception& e) {
    send(make_frame({{"type", "error"}, {"message", e.what()}}));
  }
}

inline void Session::send(Frame frame) {
  if (!open_) return;
  if (queue_.size() >= kMaxQueuedFrames) queue_.pop_front();
  queue_.push_back(std::move(frame));
  if (!writing_) write_next();
}

inline void Session::write_next() {
  if (queue_.empty() || !open_) {
    writing_ = false;
    return;
  }
  writing_ = true;
  Frame frame = queue_.front();
  queue_.pop_front();
  ws_->async_write(net::buffer(*frame),
                   [self = shared_from_this(), frame](beast::error_code ec,
                                                      std::size_t) {
                     if (ec) {
                       self->open_ = false;
                       self->writing_ = false;
                       return;
                     }
                     self->write_next();
                   });
}

inline void Session::close() {
  if (!ws_ || !open_) return;
  open_ = false;
  beast::error_code ignored;
  beast::get_lowest_layer(*ws_).socket().shutdown(tcp::socket::shutdown_both,
                                                  ignored);
  beast::get_lowest_layer(*ws_).socket().close(ignored);
}

}  // namespace bridge_detail

class WebsocketBridge {
 public:
  // Binds immediately; throws Error if the port cannot be bound. Port 0
  // picks a free port (see port()).
  WebsocketBridge(Bus& bus, unsigned short port,
                  const std::string& address = "0.0.0.0")
      : bus_(bus), hub_(bus), acceptor_(ioc_) {
    namespace net = bridge_detail::net;
    using bridge_detail::tcp;
    try {
      const tcp::endpoint endpoint(net::ip::make_address(address), port);
      acceptor_.open(endpoint.protocol());
      acceptor_.set_option(net::socket_base::reuse_address(true));
      acceptor_.bind(endpoint);
      acceptor_.listen(net::socket_base::max_listen_connections);
    } catch (const boost::system::system_error& e) {
      throw Error("cannot listen on " + address + ":" + std::to_string(port) +
                  ": " + e.what());
    }
    port_ = acceptor_.local_endpoint().port();
  }

  ~WebsocketBridge() { stop(); }

  WebsocketBridge(const WebsocketBridge&) = delete;
  WebsocketBridge& operator=(const WebsocketBridge&) = delete;

  unsigned short port() const { return port_; }
  std::size_t clients() const { return hub_.clients(); }

  void start() {
    if (io_thread_.joinable()) return;
    accept();
    io_thread_ = std::jthread([this] {
      auto guard = bridge_detail::net::make_work_guard(ioc_);
      ioc_.run();
    });
    forward(bus_.state, "state");
    forward(bus_.plan, "plan");
    forward(bus_.traces, "traces");
    forward(bus_.stats, "stats");
    forward(bus_.errors, "error");
    forward_schema();
  }

  void stop() {
    for (std::jthread& t : pumps_) t.request_stop();
    for (std::jthread& t : pumps_) {
      if (t.joinable()) t.join();
    }
    pumps_.clear();
    if (io_thread_.joinable()) {
      bridge_detail::net::post(ioc_, [this] {
        bridge_detail::beast::error_code ignored;
        acceptor_.close(ignored);
        hub_.close_all();
      });
      // Give the close handlers a moment to run, then stop the loop.
      std::this_thread::sleep_for(std::chrono::milliseconds(20));
      ioc_.stop();
      io_thread_.join();
    }
  }

 private:
  void accept() {
    acceptor_.async_accept(bridge_detail::net::make_strand(ioc_),
                           [this](boost::system::error_code ec,
                                  bridge_detail::tcp::socket socket) {
                             if (ec) return;
                             std::make_shared<bridge_detail::Session>(
                                 std::move(socket), hub_)
                                 ->run();
                             accept();
                           });
  }

  void post_frame(std::string key, bridge_detail::Frame frame) {
    bridge_detail::net::post(ioc_, [this, key = std::move(key),
                                    frame = std::move(frame)] {
      hub_.broadcast(key, frame);
    });
  }

  template <class Msg>
  void forward(Topic<Msg>& topic, std::string key) {
    pumps_.emplace_back([this, &topic, key = std::move(key)](std::stop_token st) {
      std::uint64_t seen = 0;
      while (!st.stop_requested()) {
        auto msg = topic.wait_newer(seen, std::chrono::milliseconds(50));
        if (!msg) continue;
        seen = msg->seq;
        post_frame(key, bridge_detail::make_frame(to_json(*msg)));
      }
    });
  }

  void forward_schema() {
    pumps_.emplace_back([this](std::stop_token st) {
      std::uint64_t seen = 0;
      while (!st.stop_requested()) {
        auto msg = bus_.schema.wait_newer(seen, std::chrono::milliseconds(50));
        if (!msg) continue;
        seen = msg->seq;
        for (const SchemaFrame& f : msg->frames) {
          post_frame("schema." + f.scope, bridge_detail::make_frame(to_json(f)));
        }
      }
    });
  }

  Bus& bus_;
  bridge_detail::net::io_context ioc_;
  bridge_detail::Hub hub_;
  bridge_detail::tcp::acceptor acceptor_;
  unsigned short port_ = 0;
  std::jthread io_thread_;
  std::vector<std::jthread> pumps_;
};

}  // namespace sampc
