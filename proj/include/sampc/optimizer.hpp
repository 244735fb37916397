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
#include <cstddef>
#include <limits>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "sampc/config.hpp"
#include "sampc/error.hpp"
#include "sampc/spline.hpp"
#include "sampc/task.hpp"

namespace sampc {

// Fields shared by every optimizer config.
struct OptimizerConfig {
  int num_rollouts = 32;
  int num_nodes = 4;

  template <class V>
  void reflect(V& v) {
    v.field("num_rollouts", num_rollouts);
    v.field("num_nodes", num_nodes);
  }

  void validate() const {
    if (num_rollouts < 2) throw ConfigError("num_rollouts must be >= 2");
    if (num_nodes < 2) throw ConfigError("num_nodes must be >= 2");
  }
};

// Sampled knot arrays; samples[i] is num_nodes x nu.
struct KnotBatch {
  std::vector<Knots> samples;

  std::size_t size() const { return samples.size(); }
  const Knots& operator[](std::size_t i) const { return samples[i]; }
};

struct ControlBounds {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  static ControlBounds of(const TaskInfo& info) {
    return {info.control_lower, info.control_upper};
  }
  Eigen::Index nu() const { return lower.size(); }

  // Clamps every row of knots in place.
  void clamp(Knots& knots) const {
    for (Eigen::Index r = 0; r < knots.rows(); ++r) {
      knots.row(r) = knots.row(r)
                         .cwiseMax(lower.transpose())
                         .cwiseMin(upper.transpose());
    }
  }
};

// Samples knots around a nominal and folds rewarded samples back into a new
// nominal. Rewards are maximized.
class Optimizer {
 public:
  explicit Optimizer(ControlBounds bounds) : bounds_(std::move(bounds)) {
    if (bounds_.nu() < 1 || bounds_.upper.size() != bounds_.nu()) {
      throw InvalidArgument("optimizer needs at least one actuator");
    }
  }
  virtual ~Optimizer() = default;

  virtual std::string_view name() const = 0;
  virtual int num_rollouts() const = 0;
  virtual int num_nodes() const = 0;
  Eigen::Index nu() const { return bounds_.nu(); }
  const ControlBounds& bounds() const { return bounds_; }

  virtual KnotBatch sample_control_knots(const Knots& nominal, Rng& rng) = 0;
  virtual Knots update_nominal_knots(const KnotBatch& samples,
                                     std::span<const double> rewards) = 0;

  Knots update_nominal_knots(const KnotBatch& samples,
                             const Eigen::VectorXd& rewards) {
    return update_nominal_knots(
        samples, std::span<const double>(rewards.data(),
                                         static_cast<std::size_t>(rewards.size())));
  }

  // Drops internal sampling state (CEM's adapted spread).
  virtual void reset() {}

  virtual AnyConfig config() const = 0;
  // Replaces the config; internal state is kept when still compatible.
  virtual void set_config(const AnyConfig& config) = 0;

 protected:
  // Throws unless |rewards| == |samples|, no reward is NaN and at least one
  // rollout succeeded (finite reward).
  static void check_rewards(const KnotBatch& samples,
                            std::span<const double> rewards) {
    if (samples.size() == 0) throw InvalidArgument("empty knot batch");
    if (rewards.size() != samples.size()) {
      throw InvalidArgument("number of rewards does not match number of samples");
    }
    bool any_finite = false;
    for (double r : rewards) {
      if (std::isnan(r)) throw InvalidArgument("NaN reward");
      any_finite = any_finite || std::isfinite(r);
    }
    if (!any_finite) throw Error("all rollouts failed");
  }

  void check_nominal(const Knots& nominal) const {
    if (nominal.cols() != nu() || nominal.rows() != num_nodes()) {
      throw InvalidArgument("nominal knots have the wrong shape");
    }
    if (!nominal.allFinite()) throw InvalidArgument("nominal knots are not finite");
  }

  // [nominal; clamp(nominal + scale .* G_i)] for i = 1..N-1, G_i i.i.d.
  // standard normal drawn in (sample, node, actuator) order.
  KnotBatch gaussian_batch(const Knots& nominal, const Knots& scale, int n,
                           Rng& rng) const {
    std::normal_distribution<double> normal(0.0, 1.0);
    KnotBatch batch;
    batch.samples.reserve(static_cast<std::size_t>(n));
    batch.samples.push_back(nominal);
    for (int i = 1; i < n; ++i) {
      Knots noised(nominal.rows(), nominal.cols());
      for (Eigen::Index r = 0; r < nominal.rows(); ++r) {
        for (Eigen::Index c = 0; c < nominal.cols(); ++c) {
          noised(r, c) = nominal(r, c) + scale(r, c) * normal(rng);
        }
      }
      bounds_.clamp(noised);
      batch.samples.push_back(std::move(noised));
    }
    return batch;
  }

 private:
  ControlBounds bounds_;
};

// Optimizer with a typed config.
template <class Config>
class OptimizerBase : public Optimizer {
 public:
  using ConfigType = Config;

  OptimizerBase(Config config, ControlBounds bounds)
      : Optimizer(std::move(bounds)), config_(std::move(config)) {
    config_.validate();
  }

  int num_rollouts() const override { return config_.num_rollouts; }
  int num_nodes() const override { return config_.num_nodes; }
  const Config& typed_config() const { return config_; }

  AnyConfig config() const override { return config_; }
  void set_config(const AnyConfig& config) override {
    Config next = config.as<Config>();
    next.validate();
    const bool reshaped = next.num_nodes != config_.num_nodes;
    config_ = std::move(next);
    on_config_changed(reshaped);
  }

 protected:
  virtual void on_config_changed(bool /*reshaped*/) {}

  Config config_;
};

}  // namespace sampc
