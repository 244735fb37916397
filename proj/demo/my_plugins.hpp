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


// A user-defined task and optimizer, compiled into a program that then runs
// the stock command line with them registered.

#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "sampc/optimizer.hpp"
#include "sampc/optimizers/predictive_sampling.hpp"
#include "sampc/registry.hpp"
#include "sampc/task.hpp"

namespace my_plugins {

using namespace sampc;

struct MyTaskCfg {
  double target = 0.5;
  double w_goal = 1.0;
  double w_ctrl = 0.01;

  template <class V>
  void reflect(V& v) {
    v.field("target", target, Slider{-1.0, 1.0, 0.01});
    v.field("w_goal", w_goal);
    v.field("w_ctrl", w_ctrl);
  }
};

// Point mass driven to `target`.
class MyTask : public TaskBase<MyTaskCfg> {
 public:
  MyTask() {
    info_.name = "my_task";
    info_.nq = 1;
    info_.nv = 1;
    info_.nu = 1;
    info_.control_lower = Eigen::VectorXd::Constant(1, -2.0);
    info_.control_upper = Eigen::VectorXd::Constant(1, 2.0);
  }
  const TaskInfo& info() const override { return info_; }
  TaskState reset(Rng&) const override {
    return {0.0, Eigen::VectorXd::Zero(1), Eigen::VectorXd::Zero(1)};
  }
  std::vector<TracePoint> trace_points(const TaskState& s) const override {
    return {{"mass", Eigen::Vector3d(s.q[0], 0.0, 0.0)}};
  }

 protected:
  void integrate(TaskState& s, const Eigen::VectorXd& u, double dt) const override {
    s.v += dt * u;
    s.q += dt * s.v;
  }
  double rollout_reward(const Eigen::MatrixXd& states, const Eigen::MatrixXd& controls,
                        const MyTaskCfg& c) const override {
    return -c.w_goal * (states.col(0).array() - c.target).square().sum() -
           c.w_ctrl * controls.array().square().sum();
  }

 private:
  TaskInfo info_;
};

struct MyOptCfg : OptimizerConfig {
  double param = 1.0;

  template <class V>
  void reflect(V& v) {
    OptimizerConfig::reflect(v);
    v.field("param", param);
  }
};

// Predictive sampling whose noise scale is param / 100.
class MyOpt : public OptimizerBase<MyOptCfg> {
 public:
  MyOpt(MyOptCfg config, ControlBounds bounds)
      : OptimizerBase(std::move(config), std::move(bounds)) {}
  std::string_view name() const override { return "my_opt"; }
  KnotBatch sample_control_knots(const Knots& nominal, Rng& rng) override {
    const Knots scale =
        Knots::Constant(nominal.rows(), nominal.cols(), config_.param / 100.0);
    return gaussian_batch(nominal, scale, config_.num_rollouts, rng);
  }
  using Optimizer::update_nominal_knots;
  Knots update_nominal_knots(const KnotBatch& samples,
                             std::span<const double> rewards) override {
    check_rewards(samples, rewards);
    return samples[argmax(rewards)];
  }
};

// Builtins plus the plugins under the module paths used in example YAML.
inline PluginCatalog plugin_catalog() {
  PluginCatalog c = PluginCatalog::with_builtins();
  c.add_task("module.path.to.MyTask", task_factory<MyTask>());
  c.add_config("module.path.to.MyTaskCfg", MyTaskCfg{});
  c.add_optimizer("module.path.to.MyOpt", optimizer_factory<MyOpt>());
  c.add_config("module.path.to.MyOptCfg", MyOptCfg{});
  return c;
}

// Registration and overrides done in code; equivalent to example.yaml.
inline Registry programmatic_registry() {
  Registry r = Registry::with_builtins();
  r.register_optimizer("my_opt", optimizer_factory<MyOpt>(), MyOptCfg{});
  r.register_task("my_task", task_factory<MyTask>(), MyTaskCfg{});
  r.set_config_overrides<ControllerConfig>("my_task", {{"horizon", 1.0}});
  r.set_config_overrides<MyOptCfg>("cylinder_push", {{"param", 42}});
  return r;
}

}  // namespace my_plugins
