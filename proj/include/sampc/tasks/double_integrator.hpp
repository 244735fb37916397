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

#include <vector>

#include <Eigen/Dense>

#include "sampc/norms.hpp"
#include "sampc/task.hpp"

namespace sampc {

struct DoubleIntegratorConfig {
  double w_pos = 1.0;
  double w_vel = 0.1;
  double w_ctrl = 0.1;

  template <class V>
  void reflect(V& v) {
    v.field("w_pos", w_pos);
    v.field("w_vel", w_vel);
    v.field("w_ctrl", w_ctrl);
  }

  void validate() const {
    if (w_pos < 0.0 || w_vel < 0.0 || w_ctrl < 0.0) {
      throw ConfigError("double_integrator weights must be non-negative");
    }
  }
};

// Unit point mass on a line: a = u, u in [-1, 1]. Reward drives it to rest at
// the origin.
class DoubleIntegrator : public TaskBase<DoubleIntegratorConfig> {
 public:
  DoubleIntegrator() {
    info_.name = "double_integrator";
    info_.nq = 1;
    info_.nv = 1;
    info_.nu = 1;
    info_.control_lower = Eigen::VectorXd::Constant(1, -1.0);
    info_.control_upper = Eigen::VectorXd::Constant(1, 1.0);
  }

  const TaskInfo& info() const override { return info_; }

  TaskState reset(Rng& rng) const override {
    TaskState s;
    s.q = Eigen::VectorXd::Constant(1, standard_normal(rng));
    s.v = Eigen::VectorXd::Zero(1);
    return s;
  }

  std::vector<TracePoint> trace_points(const TaskState& s) const override {
    return {{"mass", Eigen::Vector3d(s.q[0], 0.0, 0.0)}};
  }

 protected:
  void integrate(TaskState& s, const Eigen::VectorXd& u,
                 double dt) const override {
    s.v += dt * u;
    s.q += dt * s.v;
  }

  double rollout_reward(const Eigen::MatrixXd& states,
                        const Eigen::MatrixXd& controls,
                        const DoubleIntegratorConfig& c) const override {
    return -c.w_pos * quadratic_norm(states.col(0).array()).sum() -
           c.w_vel * quadratic_norm(states.col(1).array()).sum() -
           c.w_ctrl * quadratic_norm(controls.array()).sum();
  }

 private:
  TaskInfo info_;
};

}  // namespace sampc
