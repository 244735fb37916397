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

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "sampc/config.hpp"
#include "sampc/error.hpp"

namespace sampc {

using Rng = std::mt19937_64;

// Simulation time plus generalized positions and velocities.
struct TaskState {
  double t = 0.0;
  Eigen::VectorXd q;
  Eigen::VectorXd v;

  // [q; v] as one row-major vector.
  Eigen::VectorXd encoded() const {
    Eigen::VectorXd x(q.size() + v.size());
    x << q, v;
    return x;
  }

  bool operator==(const TaskState& other) const {
    return t == other.t && q.size() == other.q.size() &&
           v.size() == other.v.size() && q == other.q && v == other.v;
  }
};

inline bool all_finite(const Eigen::VectorXd& x) {
  return x.array().isFinite().all();
}

struct TracePoint {
  std::string label;
  Eigen::Vector3d position;
};

struct TaskInfo {
  std::string name;
  int nq = 0;
  int nv = 0;
  int nu = 0;
  Eigen::VectorXd control_lower;
  Eigen::VectorXd control_upper;

  int nx() const { return nq + nv; }

  Eigen::VectorXd clamp(const Eigen::VectorXd& u) const {
    return u.cwiseMax(control_lower).cwiseMin(control_upper);
  }
};

// Dynamics, reward and reset for one system.
//
// Implementations must be immutable after construction: rollout workers call
// step/reward concurrently on a shared instance.
class Task {
 public:
  virtual ~Task() = default;

  virtual const TaskInfo& info() const = 0;
  virtual AnyConfig default_config() const = 0;

  // Advances the state by dt with the control clamped to the task bounds.
  // Throws NonFiniteError on non-finite input or output.
  TaskState step(const TaskState& state, const Eigen::VectorXd& u,
                 double dt) const {
    const TaskInfo& ti = info();
    if (!(dt > 0.0)) throw InvalidArgument("step requires dt > 0");
    if (state.q.size() != ti.nq || state.v.size() != ti.nv ||
        u.size() != ti.nu) {
      throw InvalidArgument("state or control dimension mismatch for task " +
                            ti.name);
    }
    if (!all_finite(state.q) || !all_finite(state.v) || !all_finite(u)) {
      throw NonFiniteError("non-finite state or control in " + ti.name);
    }
    TaskState next = state;
    integrate(next, ti.clamp(u), dt);
    next.t = state.t + dt;
    if (!all_finite(next.q) || !all_finite(next.v)) {
      throw NonFiniteError("dynamics of " + ti.name + " produced non-finite state");
    }
    return next;
  }

  // Batched reward. states[i] is (T+1) x nx (or T x nx), controls[i] is
  // T x nu; one scalar per rollout.
  Eigen::VectorXd reward(std::span<const Eigen::MatrixXd> states,
                         std::span<const Eigen::MatrixXd> controls,
                         const AnyConfig& config) const {
    const TaskInfo& ti = info();
    if (states.size() != controls.size()) {
      throw InvalidArgument("reward: batch sizes of states and controls differ");
    }
    for (std::size_t i = 0; i < states.size(); ++i) {
      const Eigen::MatrixXd& x = states[i];
      const Eigen::MatrixXd& u = controls[i];
      if (x.cols() != ti.nx() || u.cols() != ti.nu) {
        throw InvalidArgument("reward: trajectory width does not match task " +
                              ti.name);
      }
      if (x.rows() != u.rows() && x.rows() != u.rows() + 1) {
        throw InvalidArgument("reward: states and controls are not time-aligned");
      }
    }
    return batch_reward(states, controls, config);
  }

  virtual TaskState reset(Rng& rng) const = 0;
  virtual std::vector<TracePoint> trace_points(const TaskState& state) const = 0;

 protected:
  // Writes the next q, v into `state` (t is handled by step()).
  virtual void integrate(TaskState& state, const Eigen::VectorXd& u,
                         double dt) const = 0;
  virtual Eigen::VectorXd batch_reward(std::span<const Eigen::MatrixXd> states,
                                       std::span<const Eigen::MatrixXd> controls,
                                       const AnyConfig& config) const = 0;
};

// Task with a typed config.
template <class Config>
class TaskBase : public Task {
 public:
  using ConfigType = Config;

  AnyConfig default_config() const override { return Config{}; }

 protected:
  virtual double rollout_reward(const Eigen::MatrixXd& states,
                                const Eigen::MatrixXd& controls,
                                const Config& config) const = 0;

  Eigen::VectorXd batch_reward(std::span<const Eigen::MatrixXd> states,
                               std::span<const Eigen::MatrixXd> controls,
                               const AnyConfig& config) const override {
    const Config& cfg = config.as<Config>();
    Eigen::VectorXd out(static_cast<Eigen::Index>(states.size()));
    for (std::size_t i = 0; i < states.size(); ++i) {
      out[static_cast<Eigen::Index>(i)] = rollout_reward(states[i], controls[i], cfg);
    }
    return out;
  }
};

inline double standard_normal(Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  return normal(rng);
}

}  // namespace sampc
