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

#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <utility>
#include <vector>

#include "sampc/messages.hpp"

namespace sampc {

// Keep-last-1 channel. Publishing replaces the stored message and stamps it
// with the next sequence number; readers only ever see the newest message.
template <class Msg>
class Topic {
 public:
  std::uint64_t publish(Msg msg) {
    std::uint64_t seq;
    {
      std::lock_guard<std::mutex> lock(mutex_);
      seq = ++seq_;
      msg.seq = seq;
      latest_ = std::make_shared<const Msg>(std::move(msg));
    }
    cv_.notify_all();
    return seq;
  }

  std::shared_ptr<const Msg> latest() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return latest_;
  }

  std::uint64_t seq() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return seq_;
  }

  // Newest message with seq > after, or nullptr on timeout.
  template <class Rep, class Period>
  std::shared_ptr<const Msg> wait_newer(
      std::uint64_t after, std::chrono::duration<Rep, Period> timeout) const {
    std::unique_lock<std::mutex> lock(mutex_);
    if (!cv_.wait_for(lock, timeout, [&] { return seq_ > after; })) return nullptr;
    return latest_;
  }

 private:
  mutable std::mutex mutex_;
  mutable std::condition_variable cv_;
  std::uint64_t seq_ = 0;
  std::shared_ptr<const Msg> latest_;
};

// Queue owned by one subscriber of a Broadcast.
template <class Msg>
class Inbox {
 public:
  void push(const Msg& msg) {
    std::lock_guard<std::mutex> lock(mutex_);
    queue_.push_back(msg);
  }
  std::vector<Msg> drain() {
    std::lock_guard<std::mutex> lock(mutex_);
    std::vector<Msg> out(queue_.begin(), queue_.end());
    queue_.clear();
    return out;
  }

 private:
  std::mutex mutex_;
  std::deque<Msg> queue_;
};

// Fan-out channel where every subscriber receives every message in order.
// Used for operator inputs (parameter edits, commands), which must not be
// coalesced.
template <class Msg>
class Broadcast {
 public:
  std::shared_ptr<Inbox<Msg>> subscribe() {
    auto inbox = std::make_shared<Inbox<Msg>>();
    std::lock_guard<std::mutex> lock(mutex_);
    inboxes_.push_back(inbox);
    return inbox;
  }

  std::uint64_t publish(Msg msg) {
    std::lock_guard<std::mutex> lock(mutex_);
    msg.seq = ++seq_;
    std::erase_if(inboxes_, [](const auto& w) { return w.expired(); });
    for (const auto& weak : inboxes_) {
      if (auto inbox = weak.lock()) inbox->push(msg);
    }
    return msg.seq;
  }

 private:
  std::mutex mutex_;
  std::uint64_t seq_ = 0;
  std::vector<std::weak_ptr<Inbox<Msg>>> inboxes_;
};

// Every channel of the stack.
struct Bus {
  Topic<StateMsg> state;
  Topic<PlanMsg> plan;
  Topic<TracesMsg> traces;
  Topic<StatsMsg> stats;
  Topic<SchemaMsg> schema;
  Topic<ErrorMsg> errors;
  Broadcast<ParamUpdateMsg> params;
  Broadcast<CommandMsg> commands;
};

}  // namespace sampc
