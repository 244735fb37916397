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

#include <cstddef>
#include <span>
#include <string_view>

#include "sampc/optimizer.hpp"

namespace sampc {

struct PredictiveSamplingConfig : OptimizerConfig {
  double sigma = 0.05;

  template <class V>
  void reflect(V& v) {
    OptimizerConfig::reflect(v);
    v.field("sigma", sigma);
  }

  void validate() const {
    OptimizerConfig::validate();
    if (sigma < 0.0) throw ConfigError("sigma must be >= 0");
  }
};

// Index of the largest reward; the lowest index wins ties.
inline std::size_t argmax(std::span<const double> rewards) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < rewards.size(); ++i) {
    if (rewards[i] > rewards[best]) best = i;
  }
  return best;
}

// Keeps the nominal as sample 0, perturbs the rest with isotropic Gaussian
// noise and returns the best sample.
class PredictiveSampling : public OptimizerBase<PredictiveSamplingConfig> {
 public:
  PredictiveSampling(PredictiveSamplingConfig config, ControlBounds bounds)
      : OptimizerBase(std::move(config), std::move(bounds)) {}

  std::string_view name() const override { return "ps"; }

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
    return samples[argmax(rewards)];
  }
};

}  // namespace sampc
