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
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "sampc/config.hpp"
#include "sampc/error.hpp"
#include "sampc/optimizer.hpp"
#include "sampc/spline.hpp"
#include "sampc/task.hpp"
#include "sampc/thread_pool.hpp"

namespace sampc {

// Time discretization of one rollout.
struct RolloutSettings {
  double horizon = 0.75;
  InterpolationKind kind = InterpolationKind::kZeroOrderHold;
  double dt = 0.02;

  // T = round(horizon / dt).
  int steps() const {
    if (!(dt > 0.0)) throw InvalidArgument("rollout dt must be positive");
    const double t = std::round(horizon / dt);
    if (!(t >= 1.0)) throw InvalidArgument("rollout needs at least one step");
    return static_cast<int>(t);
  }
};

struct TracePath {
  std::string label;
  std::vector<Eigen::Vector3d> points;
};

struct RolloutBatch {
  std::vector<ControlPlan> plans;
  // states[i] is (T+1) x nx with row 0 the shared initial state; rows after a
  // failure are NaN.
  std::vector<Eigen::MatrixXd> states;
  // controls[i] is T x nu, the clamped controls applied at each step start.
  std::vector<Eigen::MatrixXd> controls;
  // -inf marks a failed rollout.
  Eigen::VectorXd rewards;
  std::vector<std::vector<TracePath>> traces;
  int steps = 0;

  std::size_t size() const { return plans.size(); }
  bool failed(std::size_t i) const {
    return !std::isfinite(rewards[static_cast<Eigen::Index>(i)]);
  }
};

namespace detail {

inline std::vector<TracePath> empty_traces(const Task& task,
                                           const TaskState& x0, int steps) {
  std::vector<TracePath> paths;
  for (TracePoint& p : task.trace_points(x0)) {
    TracePath path{std::move(p.label), {}};
    path.points.reserve(static_cast<std::size_t>(steps) + 1);
    path.points.push_back(p.position);
    paths.push_back(std::move(path));
  }
  return paths;
}

inline void simulate_one(const Task& task, const TaskState& x0,
                         const RolloutSettings& settings,
                         const AnyConfig& task_config, const ControlPlan& plan,
                         int steps, Eigen::MatrixXd& states,
                         Eigen::MatrixXd& controls, double& reward,
                         std::vector<TracePath>& traces) {
  const TaskInfo& info = task.info();
  states.setConstant(steps + 1, info.nx(),
                     std::numeric_limits<double>::quiet_NaN());
  controls.setZero(steps, info.nu);
  states.row(0) = x0.encoded().transpose();
  traces = empty_traces(task, x0, steps);

  TaskState x = x0;
  try {
    for (int k = 0; k < steps; ++k) {
      const double t = x0.t + static_cast<double>(k) * settings.dt;
      const Eigen::VectorXd u = info.clamp(interpolate(plan, t));
      controls.row(k) = u.transpose();
      x = task.step(x, u, settings.dt);
      states.row(k + 1) = x.encoded().transpose();
      std::vector<TracePoint> pts = task.trace_points(x);
      for (std::size_t j = 0; j < pts.size() && j < traces.size(); ++j) {
        traces[j].points.push_back(pts[j].position);
      }
    }
    reward = task.reward(std::span<const Eigen::MatrixXd>(&states, 1),
                         std::span<const Eigen::MatrixXd>(&controls, 1),
                         task_config)[0];
    if (std::isnan(reward)) reward = -std::numeric_limits<double>::infinity();
  } catch (const NonFiniteError&) {
    reward = -std::numeric_limits<double>::infinity();
  }
}

}  // namespace detail

// Evaluates sampled knot arrays from a shared initial state on a reusable
// worker pool.
class RolloutEngine {
 public:
  explicit RolloutEngine(int workers) : pool_(workers) {}

  int workers() const { return pool_.size(); }

  // Rolls out every sample of `batch` from x0 over [x0.t, x0.t + horizon].
  // Throws if every rollout fails.
  RolloutBatch evaluate(const Task& task, const TaskState& x0,
                        const KnotBatch& batch,
                        const RolloutSettings& settings,
                        const AnyConfig& task_config) {
    const TaskInfo& info = task.info();
    if (x0.q.size() != info.nq || x0.v.size() != info.nv) {
      throw InvalidArgument("initial state dimension mismatch");
    }
    const int steps = settings.steps();
    const std::size_t n = batch.size();
    if (n == 0) throw InvalidArgument("empty knot batch");

    RolloutBatch out;
    out.steps = steps;
    out.plans.reserve(n);
    for (const Knots& knots : batch.samples) {
      if (knots.cols() != info.nu) {
        throw InvalidArgument("knot width does not match task actuators");
      }
      out.plans.push_back(make_plan(knots, x0.t, settings.horizon, settings.kind));
    }
    out.states.resize(n);
    out.controls.resize(n);
    out.traces.resize(n);
    out.rewards.resize(static_cast<Eigen::Index>(n));

    pool_.parallel_for(n, [&](std::size_t i) {
      detail::simulate_one(task, x0, settings, task_config, out.plans[i], steps,
                           out.states[i], out.controls[i],
                           out.rewards[static_cast<Eigen::Index>(i)],
                           out.traces[i]);
    });

    if (!out.rewards.array().isFinite().any()) {
      throw Error("all rollouts failed");
    }
    return out;
  }

 private:
  ThreadPool pool_;
};

inline RolloutBatch evaluate_batch(const Task& task, const TaskState& x0,
                                   const KnotBatch& batch,
                                   const RolloutSettings& settings,
                                   const AnyConfig& task_config, int workers) {
  RolloutEngine engine(workers);
  return engine.evaluate(task, x0, batch, settings, task_config);
}

struct SelectedTrace {
  std::size_t rollout = 0;
  double reward = 0.0;
  bool nominal = false;
  const std::vector<TracePath>* paths = nullptr;
};

// The nominal rollout (index 0) followed by the k best other rollouts in
// descending reward order; k is clamped to the available successful rollouts.
inline std::vector<SelectedTrace> top_traces(const RolloutBatch& batch,
                                             std::size_t k) {
  std::vector<SelectedTrace> out;
  if (batch.size() == 0) return out;
  out.push_back({0, batch.rewards[0], true, &batch.traces[0]});
  std::vector<std::size_t> others;
  for (std::size_t i = 1; i < batch.size(); ++i) {
    if (!batch.failed(i)) others.push_back(i);
  }
  std::stable_sort(others.begin(), others.end(),
                   [&](std::size_t a, std::size_t b) {
                     return batch.rewards[static_cast<Eigen::Index>(a)] >
                            batch.rewards[static_cast<Eigen::Index>(b)];
                   });
  others.resize(std::min(k, others.size()));
  for (std::size_t i : others) {
    out.push_back({i, batch.rewards[static_cast<Eigen::Index>(i)], false,
                   &batch.traces[i]});
  }
  return out;
}

}  // namespace sampc
