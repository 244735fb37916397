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
#include <string_view>
#include <vector>

#include "sampc/optimizer.hpp"

namespace sampc {

struct MPPIConfig : OptimizerConfig {
  double sigma = 0.1;
  double temperature = 0.1;

  template <class V>
  void reflect(V& v) {
    OptimizerConfig::reflect(v);
    v.field("sigma", sigma);
    v.field("temperature", temperature);
  }

  void validate() const {
    OptimizerConfig::validate();
    if (sigma < 0.0) throw ConfigError("sigma must be >= 0");
    if (!(temperature > 0.0)) throw ConfigError("temperature must be > 0");
  }
};

// Softmax weights exp((J_i - max J) / temperature), normalized. Non-finite
// (failed) rewards get weight 0.
inline std::vector<double> mppi_weights(std::span<const double> rewards,
                                        double temperature) {
  double best = -std::numeric_limits<double>::infinity();
  for (double r : rewards) best = std::max(best, r);
  std::vector<double> w(rewards.size(), 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < rewards.size(); ++i) {
    if (!std::isfinite(rewards[i])) continue;
    w[i] = std::exp((rewards[i] - best) / temperature);
    total += w[i];
  }
  for (double& wi : w) wi /= total;
  return w;
}

// Model predictive path integral update: exponentially reward-weighted
// average of Gaussian samples around the nominal.
class MPPI : public OptimizerBase<MPPIConfig> {
 public:
  MPPI(MPPIConfig config, ControlBounds bounds)
      : OptimizerBase(std::move(config), std::move(bounds)) {}

  std::string_view name() const override { return "mppi"; }

  KnotBatch sample_control_knots(const Knots& nominal, Rng& rng) override {
    check_nominal(nominal);
    const Knots scale =
        Knots::Constant(nominal.rows(), nominal.cols(), config_.sigma);
    return gaussian_batch(nominal, scale, config_.num_rollouts, rng);
  }

  using Optimizer::update_nominal_knots;
  Knots update_nominal_knots(const KnotBatch& samples,
                             std::span<const double> rewards) override {
    check_rewards(samples, rewards);
    const std::vector<double> w = mppi_weights(rewards, config_.temperature);
    Knots out = Knots::Zero(samples[0].rows(), samples[0].cols());
    for (std::size_t i = 0; i < samples.size(); ++i) {
      if (w[i] > 0.0) out += w[i] * samples[i];
    }
    return out;
  }
};

}  // namespace sampc
