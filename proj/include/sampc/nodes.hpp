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

// Simulator and controller nodes. Each node runs on its own thread and talks
// to the others only through the Bus, so the simulator can be replaced by a
// hardware driver that publishes StateMsg and consumes PlanMsg.

#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <deque>
#include <iostream>
#include <memory>
#include <mutex>
#include <numeric>
#include <optional>
#include <string>
#include <thread>
#include <utility>

#include "sampc/bus.hpp"
#include "sampc/controller.hpp"
#include "sampc/messages.hpp"
#include "sampc/registry.hpp"

namespace sampc {

// Dropdown schema listing registered tasks and optimizers.
inline SchemaFrame stack_schema(const Registry& registry, const std::string& task,
                                const std::string& optimizer) {
  json fields = json::array();
  fields.push_back({{"name", "task"},
                    {"kind", "dropdown"},
                    {"default", task},
                    {"value", task},
                    {"options", registry.task_names()}});
  fields.push_back({{"name", "optimizer"},
                    {"kind", "dropdown"},
                    {"default", optimizer},
                    {"value", optimizer},
                    {"options", registry.optimizer_names()}});
  return {"stack", std::move(fields)};
}

struct SimulatorOptions {
  double dt_sim = 0.01;
  // Sleep so simulated time tracks wall time.
  bool realtime = true;
  std::uint64_t seed = 0;
};

// Steps the active task under the latest published plan.
class SimulatorNode {
 public:
  SimulatorNode(Bus& bus, const Registry& registry, std::string task,
                SimulatorOptions options = {})
      : bus_(bus),
        registry_(registry),
        task_name_(std::move(task)),
        options_(options),
        rng_(options.seed),
        commands_(bus.commands.subscribe()) {
    if (!(options_.dt_sim > 0.0)) throw InvalidArgument("dt_sim must be > 0");
    task_ = registry_.make_task(task_name_);
    state_ = task_->reset(rng_);
  }

  ~SimulatorNode() { stop(); }

  SimulatorNode(const SimulatorNode&) = delete;
  SimulatorNode& operator=(const SimulatorNode&) = delete;

  void start() {
    if (thread_.joinable()) return;
    thread_ = std::jthread([this](std::stop_token st) { run(st); });
  }

  void stop() {
    if (thread_.joinable()) {
      thread_.request_stop();
      thread_.join();
    }
  }

  bool running() const { return thread_.joinable(); }
  bool paused() const { return paused_.load(); }

 private:
  void publish_state() {
    bus_.state.publish({0, state_.t, state_.q, state_.v, task_name_});
  }

  void handle_commands(std::chrono::steady_clock::time_point now) {
    for (const CommandMsg& cmd : commands_->drain()) {
      if (cmd.name == "pause" && !paused_) {
        paused_ = true;
        paused_at_ = now;
      } else if (cmd.name == "resume" && paused_) {
        paused_ = false;
        state_.t +=
            std::chrono::duration<double>(now - paused_at_).count();
      } else if (cmd.name == "reset") {
        state_ = task_->reset(rng_);
      } else if (cmd.name == "switch_task" && registry_.has_task(cmd.target)) {
        task_name_ = cmd.target;
        task_ = registry_.make_task(task_name_);
        state_ = task_->reset(rng_);
      }
    }
  }

  Eigen::VectorXd control_at(double t) const {
    const TaskInfo& info = task_->info();
    std::shared_ptr<const PlanMsg> msg = bus_.plan.latest();
    if (!msg || msg->nu != info.nu) return Eigen::VectorXd::Zero(info.nu);
    try {
      return info.clamp(interpolate(msg->plan(), t));
    } catch (const Error&) {
      return Eigen::VectorXd::Zero(info.nu);
    }
  }

  void run(std::stop_token st) {
    using clock = std::chrono::steady_clock;
    const auto period = std::chrono::duration_cast<clock::duration>(
        std::chrono::duration<double>(options_.dt_sim));
    auto next_tick = clock::now();
    publish_state();
    while (!st.stop_requested()) {
      handle_commands(clock::now());
      if (!paused_) {
        try {
          state_ = task_->step(state_, control_at(state_.t), options_.dt_sim);
        } catch (const NonFiniteError& e) {
          bus_.errors.publish({0, std::string("simulator: ") + e.what()});
          state_ = task_->reset(rng_);
        }
        publish_state();
      }
      if (options_.realtime) {
        next_tick += period;
        const auto now = clock::now();
        if (next_tick < now - 10 * period) next_tick = now;
        std::this_thread::sleep_until(next_tick);
      } else {
        std::this_thread::yield();
      }
    }
  }

  Bus& bus_;
  const Registry& registry_;
  std::string task_name_;
  SimulatorOptions options_;
  Rng rng_;
  std::shared_ptr<Inbox<CommandMsg>> commands_;
  std::shared_ptr<const Task> task_;
  TaskState state_;
  std::atomic<bool> paused_{false};
  std::chrono::steady_clock::time_point paused_at_;
  std::jthread thread_;
};

struct ControllerNodeOptions {
  int workers = 1;
  std::uint64_t seed = 0;
  // Number of recent updates summarized in StatsMsg.
  std::size_t stats_window = 100;
};

// Runs controller updates back to back from the latest state and publishes
// the resulting plan, traces and timing statistics. Parameter edits and
// commands are applied between updates.
class ControllerNode {
 public:
  ControllerNode(Bus& bus, const Registry& registry, std::string task,
                 std::string optimizer, ControllerNodeOptions options = {})
      : bus_(bus),
        registry_(registry),
        options_(options),
        rng_(options.seed),
        params_(bus.params.subscribe()),
        commands_(bus.commands.subscribe()) {
    configure(task, optimizer);
  }

  ~ControllerNode() { stop(); }

  ControllerNode(const ControllerNode&) = delete;
  ControllerNode& operator=(const ControllerNode&) = delete;

  void start() {
    if (thread_.joinable()) return;
    thread_ = std::jthread([this](std::stop_token st) { run(st); });
  }

  void stop() {
    if (thread_.joinable()) {
      thread_.request_stop();
      thread_.join();
    }
  }

  bool running() const { return thread_.joinable(); }
  long iterations() const { return iterations_.load(); }

 private:
  void configure(const std::string& task, const std::string& optimizer) {
    const ResolvedConfig resolved = registry_.resolve_config(task, optimizer);
    std::shared_ptr<const Task> t = registry_.make_task(task);
    auto opt = registry_.make_optimizer(optimizer, resolved.optimizer,
                                        ControlBounds::of(t->info()));
    controller_ = std::make_unique<Controller>(
        std::move(t), resolved.task, std::move(opt),
        resolved.controller_config(), options_.workers);
    task_name_ = task;
    optimizer_name_ = optimizer;
    durations_.clear();
    publish_schema();
  }

  void publish_schema() {
    const auto& task_entry = registry_.task_entry(task_name_);
    const auto& opt_entry = registry_.optimizer_entry(optimizer_name_);
    SchemaMsg msg;
    msg.frames.push_back(
        {"task", to_json(controller_->task_config().schema(task_entry.default_config))});
    msg.frames.push_back(
        {"optimizer",
         to_json(controller_->optimizer().config().schema(opt_entry.default_config))});
    msg.frames.push_back(
        {"controller", to_json(schema_of(controller_->config(), ControllerConfig{}))});
    msg.frames.push_back(stack_schema(registry_, task_name_, optimizer_name_));
    bus_.schema.publish(std::move(msg));
  }

  void report(const std::string& what) { bus_.errors.publish({0, what}); }

  void apply_param(const ParamUpdateMsg& p) {
    if (p.scope == "task") {
      AnyConfig cfg = controller_->task_config();
      cfg.set(p.path, p.value);
      controller_->set_task_config(std::move(cfg));
    } else if (p.scope == "optimizer") {
      AnyConfig cfg = controller_->optimizer().config();
      cfg.set(p.path, p.value);
      controller_->set_optimizer_config(cfg);
    } else if (p.scope == "controller") {
      ControllerConfig cfg = controller_->config();
      set_field(cfg, p.path, p.value);
      controller_->set_config(std::move(cfg));
    } else {
      throw ConfigError("unknown param scope '" + p.scope + "'");
    }
  }

  void apply_inputs() {
    for (const CommandMsg& cmd : commands_->drain()) {
      try {
        if (cmd.name == "switch_task") {
          configure(cmd.target, optimizer_name_);
        } else if (cmd.name == "switch_optimizer") {
          configure(task_name_, cmd.target);
        } else if (cmd.name == "reset") {
          controller_->reset();
        }
      } catch (const Error& e) {
        report(std::string("command ") + cmd.name + ": " + e.what());
      }
    }
    bool changed = false;
    for (const ParamUpdateMsg& p : params_->drain()) {
      try {
        apply_param(p);
        changed = true;
      } catch (const Error& e) {
        report(std::string("param ") + p.scope + "." + p.path + ": " + e.what());
      }
    }
    if (changed) publish_schema();
  }

  void publish_stats(double update_ms) {
    durations_.push_back(update_ms);
    while (durations_.size() > options_.stats_window) durations_.pop_front();
    const double n = static_cast<double>(durations_.size());
    const double mean = std::accumulate(durations_.begin(), durations_.end(), 0.0) / n;
    double var = 0.0;
    for (double d : durations_) var += (d - mean) * (d - mean);
    bus_.stats.publish({0, mean, std::sqrt(var / n), controller_->iteration(),
                        task_name_, optimizer_name_});
  }

  void run(std::stop_token st) {
    while (!st.stop_requested()) {
      apply_inputs();
      std::shared_ptr<const StateMsg> state = bus_.state.latest();
      if (!state || state->task != task_name_ ||
          state->q.size() != controller_->task().info().nq) {
        bus_.state.wait_newer(state ? state->seq : 0, std::chrono::milliseconds(20));
        continue;
      }
      try {
        UpdateResult result = controller_->update(state->state(), rng_);
        bus_.plan.publish(PlanMsg::from_plan(*controller_->nominal_plan()));
        bus_.traces.publish(TracesMsg::from_batch(
            result.batch,
            static_cast<std::size_t>(controller_->config().max_num_traces)));
        publish_stats(result.update_ms);
        ++iterations_;
      } catch (const Error& e) {
        report(std::string("controller: ") + e.what());
        std::this_thread::sleep_for(std::chrono::milliseconds(10));
      }
    }
  }

  Bus& bus_;
  const Registry& registry_;
  ControllerNodeOptions options_;
  Rng rng_;
  std::shared_ptr<Inbox<ParamUpdateMsg>> params_;
  std::shared_ptr<Inbox<CommandMsg>> commands_;
  std::unique_ptr<Controller> controller_;
  std::string task_name_;
  std::string optimizer_name_;
  std::deque<double> durations_;
  std::atomic<long> iterations_{0};
  std::jthread thread_;
};

}  // namespace sampc
