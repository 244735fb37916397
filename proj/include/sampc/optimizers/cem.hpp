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
#include <numeric>
#include <span>
#include <string_view>
#include <vector>

#include "sampc/optimizer.hpp"

namespace sampc {

struct CEMConfig : OptimizerConfig {
  double sigma_init = 0.3;
  double sigma_min = 0.05;
  int num_elites = 4;

  template <class V>
  void reflect(V& v) {
    OptimizerConfig::reflect(v);
    v.field("sigma_init", sigma_init);
    v.field("sigma_min", sigma_min);
    v.field("num_elites", num_elites);
  }

  void validate() const {
    OptimizerConfig::validate();
    if (num_elites < 1 || num_elites >= num_rollouts) {
      throw ConfigError("num_elites must be in [1, num_rollouts)");
    }
    if (sigma_min < 0.0 || sigma_min > sigma_init) {
      throw ConfigError("need 0 <= sigma_min <= sigma_init");
    }
  }
};

// Indices of the k highest finite rewards, best first; ties keep the lower
// index first.
inline std::vector<std::size_t> elite_indices(std::span<const double> rewards,
                                              std::size_t k) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < rewards.size(); ++i) {
    if (std::isfinite(rewards[i])) idx.push_back(i);
  }
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return rewards[a] > rewards[b];
  });
  idx.resize(std::min(k, idx.size()));
  return idx;
}

// Cross-entropy method with a diagonal, per-knot Gaussian. The spread adapts
// to the elite set each update and persists between updates.
class CEM : public OptimizerBase<CEMConfig> {
 public:
  CEM(CEMConfig config, ControlBounds bounds)
      : OptimizerBase(std::move(config), std::move(bounds)) {
    reset();
  }

  std::string_view name() const override { return "cem"; }

  void reset() override {
    spread_ = Knots::Constant(config_.num_nodes, nu(), config_.sigma_init);
  }

  const Knots& spread() const { return spread_; }

  KnotBatch sample_control_knots(const Knots& nominal, Rng& rng) override {
    check_nominal(nominal);
    return gaussian_batch(nominal, spread_, config_.num_rollouts, rng);
  }

  using Optimizer::update_nominal_knots;
  Knots update_nominal_knots(const KnotBatch& samples,
                             std::span<const double> rewards) override {
    check_rewards(samples, rewards);
    const std::vector<std::size_t> elites =
        elite_indices(rewards, static_cast<std::size_t>(config_.num_elites));
    const double k = static_cast<double>(elites.size());

    Knots mean = Knots::Zero(samples[0].rows(), samples[0].cols());
    for (std::size_t i : elites) mean += samples[i];
    mean /= k;

    Knots var = Knots::Zero(mean.rows(), mean.cols());
    for (std::size_t i : elites) var += (samples[i] - mean).array().square().matrix();
    var /= k;
    spread_ = var.array().sqrt().max(config_.sigma_min).matrix();
    return mean;
  }

 protected:
  void on_config_changed(bool reshaped) override {
    if (reshaped) reset();
  }

 private:
  Knots spread_;
};

}  // namespace sampc
