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
#include <vector>

#include <Eigen/Dense>

#include "sampc/norms.hpp"
#include "sampc/task.hpp"

namespace sampc {

struct CylinderPushConfig {
  double w_pusher = 0.1;
  double w_goal = 10.0;
  double w_vel = 0.1;
  double w_ctrl = 0.1;
  ArrayField goal{{0.0, 0.0}, {"x", "y"}, {-1.0, -1.0}, {1.0, 1.0}, {0.01, 0.01}};

  template <class V>
  void reflect(V& v) {
    v.field("w_pusher", w_pusher);
    v.field("w_goal", w_goal);
    v.field("w_vel", w_vel);
    v.field("w_ctrl", w_ctrl);
    v.field("goal", goal);
  }

  void validate() const {
    if (w_pusher < 0.0 || w_goal < 0.0 || w_vel < 0.0 || w_ctrl < 0.0) {
      throw ConfigError("cylinder_push weights must be non-negative");
    }
    if (goal.values.size() != 2) {
      throw ConfigError("cylinder_push goal must have 2 entries");
    }
  }
};

struct CylinderPushParams {
  double pusher_radius = 0.15;  // m
  double target_radius = 0.2;   // m
  double pusher_mass = 1.0;     // kg
  double target_mass = 1.0;     // kg
  double box_size = 1.0;        // m, side of the reset box centred at the origin
};

// Two planar disks. q = [pusher_x, pusher_y, target_x, target_y]; the pusher
// is force-actuated in x and y, the target only moves through contact.
class CylinderPush : public TaskBase<CylinderPushConfig> {
 public:
  explicit CylinderPush(CylinderPushParams params = {}) : params_(params) {
    if (!(params_.pusher_radius > 0.0) || !(params_.target_radius > 0.0)) {
      throw InvalidArgument("cylinder radii must be positive");
    }
    info_.name = "cylinder_push";
    info_.nq = 4;
    info_.nv = 4;
    info_.nu = 2;
    info_.control_lower = Eigen::VectorXd::Constant(2, -1.0);
    info_.control_upper = Eigen::VectorXd::Constant(2, 1.0);
  }

  const TaskInfo& info() const override { return info_; }
  const CylinderPushParams& params() const { return params_; }
  double contact_distance() const {
    return params_.pusher_radius + params_.target_radius;
  }

  // Pusher at the origin, target uniform in the box without overlapping it.
  TaskState reset(Rng& rng) const override {
    std::uniform_real_distribution<double> coord(-0.5 * params_.box_size,
                                                 0.5 * params_.box_size);
    Eigen::Vector2d target;
    do {
      target = Eigen::Vector2d(coord(rng), coord(rng));
    } while (target.norm() < contact_distance());
    TaskState s;
    s.q = Eigen::VectorXd::Zero(4);
    s.q.tail<2>() = target;
    s.v = Eigen::VectorXd::Zero(4);
    return s;
  }

  std::vector<TracePoint> trace_points(const TaskState& s) const override {
    return {{"pusher", Eigen::Vector3d(s.q[0], s.q[1], 0.0)},
            {"target", Eigen::Vector3d(s.q[2], s.q[3], 0.0)}};
  }

 protected:
  void integrate(TaskState& s, const Eigen::VectorXd& u,
                 double dt) const override {
    const double mp = params_.pusher_mass;
    const double mt = params_.target_mass;

    s.v[0] += dt * u[0] / mp;
    s.v[1] += dt * u[1] / mp;
    s.q += dt * s.v;

    Eigen::Vector2d pusher = s.q.head<2>();
    Eigen::Vector2d target = s.q.tail<2>();
    const Eigen::Vector2d delta = target - pusher;
    const double dist = delta.norm();
    const double contact = contact_distance();
    if (dist >= contact) return;

    const Eigen::Vector2d normal =
        dist > 0.0 ? Eigen::Vector2d(delta / dist) : Eigen::Vector2d(1.0, 0.0);

    // Inelastic impulse along the normal when approaching.
    Eigen::Vector2d vp = s.v.head<2>();
    Eigen::Vector2d vt = s.v.tail<2>();
    const double approach = (vt - vp).dot(normal);
    if (approach < 0.0) {
      const double impulse = -approach / (1.0 / mp + 1.0 / mt);
      vp -= (impulse / mp) * normal;
      vt += (impulse / mt) * normal;
    }

    // Positional projection split by mass ratio.
    const double overlap = contact - dist;
    pusher -= overlap * (mt / (mp + mt)) * normal;
    target += overlap * (mp / (mp + mt)) * normal;

    s.q << pusher, target;
    s.v << vp, vt;
  }

  double rollout_reward(const Eigen::MatrixXd& states,
                        const Eigen::MatrixXd& controls,
                        const CylinderPushConfig& c) const override {
    const Eigen::Vector2d goal(c.goal.values[0], c.goal.values[1]);
    const Eigen::Index rows = states.rows();
    Eigen::ArrayXd gap(rows);
    Eigen::ArrayXd to_goal(rows);
    for (Eigen::Index k = 0; k < rows; ++k) {
      const Eigen::Vector2d pusher = states.row(k).segment<2>(0).transpose();
      const Eigen::Vector2d target = states.row(k).segment<2>(2).transpose();
      gap[k] = (pusher - target).norm() - contact_distance();
      to_goal[k] = (target - goal).norm();
    }
    const double pusher_term = -c.w_pusher * smooth_l1_norm(gap, 0.01).sum();
    const double goal_term = -c.w_goal * smooth_l1_norm(to_goal, 0.05).sum();
    const double velocity =
        -c.w_vel * quadratic_norm(states.rightCols(4).array()).sum();
    const double control = -c.w_ctrl * quadratic_norm(controls.array()).sum();
    return pusher_term + goal_term + velocity + control;
  }

 private:
  CylinderPushParams params_;
  TaskInfo info_;
};

}  // namespace sampc
