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

#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>
#include <mutex>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "sampc/config.hpp"
#include "sampc/error.hpp"
#include "sampc/optimizer.hpp"
#include "sampc/rollout.hpp"
#include "sampc/spline.hpp"
#include "sampc/task.hpp"

namespace sampc {

struct ControllerConfig {
  double horizon = 0.75;
  Choice spline{{"zoh", "linear", "cubic"}, "zoh"};
  int max_num_traces = 3;
  double dt_rollout = 0.02;

  template <class V>
  void reflect(V& v) {
    v.field("horizon", horizon);
    v.field("spline", spline);
    v.field("max_num_traces", max_num_traces);
    v.field("dt_rollout", dt_rollout);
  }

  void validate() const {
    if (!(horizon > 0.0)) throw ConfigError("horizon must be > 0");
    if (max_num_traces < 0) throw ConfigError("max_num_traces must be >= 0");
    if (!(dt_rollout > 0.0)) throw ConfigError("dt_rollout must be > 0");
    if (!parse_interpolation_kind(spline.value)) {
      throw ConfigError("unknown spline kind '" + spline.value + "'");
    }
  }

  InterpolationKind kind() const { return *parse_interpolation_kind(spline.value); }

  RolloutSettings rollout_settings() const {
    return {horizon, kind(), dt_rollout};
  }
};

struct UpdateResult {
  RolloutBatch batch;
  double update_ms = 0.0;
};

// Receding-horizon sampling controller.
//
// update() runs on one thread; action() may be called from any thread at any
// time and always sees a complete plan.
class Controller {
 public:
  Controller(std::shared_ptr<const Task> task, AnyConfig task_config,
             std::unique_ptr<Optimizer> optimizer, ControllerConfig config,
             int workers)
      : task_(std::move(task)),
        task_config_(std::move(task_config)),
        optimizer_(std::move(optimizer)),
        config_(std::move(config)),
        engine_(workers) {
    if (!task_ || !optimizer_) throw InvalidArgument("controller needs a task and an optimizer");
    if (optimizer_->nu() != task_->info().nu) {
      throw InvalidArgument("optimizer and task disagree on the number of actuators");
    }
    config_.validate();
    reset();
  }

  const Task& task() const { return *task_; }
  const Optimizer& optimizer() const { return *optimizer_; }
  const ControllerConfig& config() const { return config_; }
  const AnyConfig& task_config() const { return task_config_; }
  long iteration() const { return iteration_; }
  double last_update_ms() const { return last_update_ms_; }
  int workers() const { return engine_.workers(); }

  // All-zero nominal on [0, horizon]; clears optimizer state.
  void reset() {
    optimizer_->reset();
    install(std::make_shared<const ControlPlan>(make_plan(
        Knots::Zero(optimizer_->num_nodes(), task_->info().nu), 0.0,
        config_.horizon, config_.kind())));
  }

  void set_config(ControllerConfig config) {
    config.validate();
    config_ = std::move(config);
  }
  void set_task_config(AnyConfig config) {
    if (config.type() != task_config_.type()) {
      throw ConfigError("task config type mismatch");
    }
    task_config_ = std::move(config);
  }
  void set_optimizer_config(const AnyConfig& config) {
    optimizer_->set_config(config);
  }

  std::shared_ptr<const ControlPlan> nominal_plan() const {
    std::lock_guard<std::mutex> lock(plan_mutex_);
    return plan_;
  }

  // The nominal plan moved onto the grid starting at t: shifted forward in
  // time, re-gridded as-is if t precedes the plan (after a reset), and
  // resampled if the knot count or spline kind changed.
  ControlPlan warm_start(double t) const {
    const std::shared_ptr<const ControlPlan> current = nominal_plan();
    const Eigen::Index nodes = optimizer_->num_nodes();
    const double horizon = config_.horizon;
    if (nodes == current->num_nodes() && current->kind() == config_.kind()) {
      if (t >= current->t_start()) return shift_plan(*current, t, horizon);
      return make_plan(current->knots(), t, horizon, config_.kind());
    }
    const double from = std::max(t, current->t_start());
    const Eigen::VectorXd times = uniform_knot_times(nodes, from, horizon);
    Knots knots(nodes, current->nu());
    for (Eigen::Index i = 0; i < nodes; ++i) {
      knots.row(i) = interpolate(*current, times[i]).transpose();
    }
    return make_plan(std::move(knots), t, horizon, config_.kind());
  }

  // One planning iteration from x0: warm start, sample, roll out, update and
  // atomically install the new nominal.
  UpdateResult update(const TaskState& x0, Rng& rng) {
    if (!all_finite(x0.q) || !all_finite(x0.v) || !std::isfinite(x0.t)) {
      throw InvalidArgument("controller update needs a finite state");
    }
    const auto start = std::chrono::steady_clock::now();

    const ControlPlan shifted = warm_start(x0.t);
    const KnotBatch samples =
        optimizer_->sample_control_knots(shifted.knots(), rng);
    UpdateResult result;
    result.batch = engine_.evaluate(*task_, x0, samples,
                                    config_.rollout_settings(), task_config_);
    Knots updated =
        optimizer_->update_nominal_knots(samples, result.batch.rewards);
    install(std::make_shared<const ControlPlan>(
        std::move(updated), shifted.knot_times(), shifted.kind()));

    const auto stop = std::chrono::steady_clock::now();
    result.update_ms =
        std::chrono::duration<double, std::milli>(stop - start).count();
    last_update_ms_ = result.update_ms;
    ++iteration_;
    return result;
  }

  // Nominal control at time t, clamped to the task's control bounds.
  Eigen::VectorXd action(double t) const {
    const std::shared_ptr<const ControlPlan> plan = nominal_plan();
    return task_->info().clamp(interpolate(*plan, t));
  }

 private:
  void install(std::shared_ptr<const ControlPlan> plan) {
    std::lock_guard<std::mutex> lock(plan_mutex_);
    plan_ = std::move(plan);
  }

  std::shared_ptr<const Task> task_;
  AnyConfig task_config_;
  std::unique_ptr<Optimizer> optimizer_;
  ControllerConfig config_;
  RolloutEngine engine_;

  mutable std::mutex plan_mutex_;
  std::shared_ptr<const ControlPlan> plan_;
  long iteration_ = 0;
  double last_update_ms_ = 0.0;
};

}  // namespace sampc
