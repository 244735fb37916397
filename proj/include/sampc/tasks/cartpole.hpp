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
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "sampc/norms.hpp"
#include "sampc/task.hpp"

namespace sampc {

struct CartpoleConfig {
  double w_vert = 10.0;
  double w_ctr = 10.0;
  double w_vel = 0.1;
  double w_ctrl = 0.1;

  template <class V>
  void reflect(V& v) {
    v.field("w_vert", w_vert);
    v.field("w_ctr", w_ctr);
    v.field("w_vel", w_vel);
    v.field("w_ctrl", w_ctrl);
  }

  void validate() const {
    if (w_vert < 0.0 || w_ctr < 0.0 || w_vel < 0.0 || w_ctrl < 0.0) {
      throw ConfigError("cartpole weights must be non-negative");
    }
  }
};

// Physical constants of the cart-pole.
struct CartpoleParams {
  double cart_mass = 1.0;       // kg
  double pole_mass = 0.1;       // kg
  double pole_half_length = 0.5;  // m
  double gravity = 9.81;        // m/s^2
  double gear = 10.0;           // N per unit control
};

// Cart on a rail with a free pole. q = [x, y]: cart position and pole angle
// (y = 0 upright, y = pi hanging). One actuator pushing the cart, u in [-1, 1].
class Cartpole : public TaskBase<CartpoleConfig> {
 public:
  explicit Cartpole(CartpoleParams params = {}) : params_(params) {
    info_.name = "cartpole";
    info_.nq = 2;
    info_.nv = 2;
    info_.nu = 1;
    info_.control_lower = Eigen::VectorXd::Constant(1, -1.0);
    info_.control_upper = Eigen::VectorXd::Constant(1, 1.0);
  }

  const TaskInfo& info() const override { return info_; }
  const CartpoleParams& params() const { return params_; }

  // Maps four standard-normal draws to a reset state: q = [1, pi] + z[0:2],
  // v = 0.1 * z[2:4].
  static TaskState reset_from_normals(const Eigen::Vector4d& z) {
    TaskState s;
    s.q = Eigen::Vector2d(1.0 + z[0], std::numbers::pi + z[1]);
    s.v = Eigen::Vector2d(0.1 * z[2], 0.1 * z[3]);
    return s;
  }

  TaskState reset(Rng& rng) const override {
    Eigen::Vector4d z;
    for (int i = 0; i < 4; ++i) z[i] = standard_normal(rng);
    return reset_from_normals(z);
  }

  std::vector<TracePoint> trace_points(const TaskState& s) const override {
    const double len = 2.0 * params_.pole_half_length;
    return {{"pole_tip", Eigen::Vector3d(s.q[0] + len * std::sin(s.q[1]), 0.0,
                                         len * std::cos(s.q[1]))}};
  }

 protected:
  void integrate(TaskState& s, const Eigen::VectorXd& u,
                 double dt) const override {
    const double mc = params_.cart_mass;
    const double mp = params_.pole_mass;
    const double l = params_.pole_half_length;
    const double g = params_.gravity;
    const double total = mc + mp;
    const double force = params_.gear * u[0];

    const double y = s.q[1];
    const double ydot = s.v[1];
    const double sy = std::sin(y);
    const double cy = std::cos(y);

    const double tmp = (force + mp * l * ydot * ydot * sy) / total;
    const double yddot =
        (g * sy - cy * tmp) / (l * (4.0 / 3.0 - mp * cy * cy / total));
    const double xddot = tmp - mp * l * yddot * cy / total;

    s.v[0] += dt * xddot;
    s.v[1] += dt * yddot;
    s.q += dt * s.v;
  }

  double rollout_reward(const Eigen::MatrixXd& states,
                        const Eigen::MatrixXd& controls,
                        const CartpoleConfig& c) const override {
    const auto x = states.col(0).array();
    const auto y = states.col(1).array();
    const auto vel = states.rightCols(2).array();
    const double vertical = -c.w_vert * smooth_l1_norm(y.cos() - 1.0, 0.01).sum();
    const double centered = -c.w_ctr * smooth_l1_norm(x, 0.1).sum();
    const double velocity = -c.w_vel * quadratic_norm(vel).sum();
    const double control = -c.w_ctrl * quadratic_norm(controls.array()).sum();
    return vertical + centered + velocity + control;
  }

 private:
  CartpoleParams params_;
  TaskInfo info_;
};

}  // namespace sampc
