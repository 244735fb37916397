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


#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "sampc/optimizers/cem.hpp"
#include "sampc/optimizers/mppi.hpp"
#include "sampc/optimizers/predictive_sampling.hpp"

namespace sampc {
namespace {

ControlBounds bounds(int nu, double lim = 1.0) {
  return {Eigen::VectorXd::Constant(nu, -lim), Eigen::VectorXd::Constant(nu, lim)};
}

KnotBatch random_batch(std::mt19937_64& rng, int n, int nodes, int nu) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  KnotBatch b;
  for (int i = 0; i < n; ++i) {
    Knots k(nodes, nu);
    for (Eigen::Index j = 0; j < k.size(); ++j) k.data()[j] = u(rng);
    b.samples.push_back(k);
  }
  return b;
}

KnotBatch scalar_batch(std::initializer_list<double> v) {
  KnotBatch b;
  for (double x : v) b.samples.push_back(Knots::Constant(1, 1, x));
  return b;
}

// Distinct rewards, spaced well apart.
std::vector<double> distinct_rewards(std::mt19937_64& rng, int n) {
  std::vector<double> r(static_cast<std::size_t>(n));
  std::iota(r.begin(), r.end(), 0.0);
  std::shuffle(r.begin(), r.end(), rng);
  for (double& x : r) x = 0.37 * x - 3.0;
  return r;
}

TEST(PredictiveSampling, ZeroSigmaRepeatsNominal) {
  PredictiveSamplingConfig cfg;
  cfg.sigma = 0.0;
  PredictiveSampling ps(cfg, bounds(2));
  const Knots nominal = Knots::Constant(4, 2, 0.25);
  Rng rng(1);
  const KnotBatch b = ps.sample_control_knots(nominal, rng);
  ASSERT_EQ(b.size(), 32u);
  for (const Knots& k : b.samples) EXPECT_EQ(k, nominal);
}

TEST(PredictiveSampling, FirstRowIsNominalAndRestClamped) {
  PredictiveSamplingConfig cfg;
  cfg.sigma = 5.0;
  PredictiveSampling ps(cfg, bounds(1, 0.5));
  // Nominal outside the bounds stays verbatim in row 0.
  const Knots nominal = Knots::Constant(4, 1, 0.9);
  Rng rng(2);
  const KnotBatch b = ps.sample_control_knots(nominal, rng);
  EXPECT_EQ(b[0], nominal);
  for (std::size_t i = 1; i < b.size(); ++i) {
    EXPECT_LE(b[i].cwiseAbs().maxCoeff(), 0.5);
  }
}

TEST(PredictiveSampling, SampleSpread) {
  PredictiveSamplingConfig cfg;
  cfg.num_rollouts = 10001;
  cfg.num_nodes = 2;
  PredictiveSampling ps(cfg, bounds(1, 100.0));
  Rng rng(3);
  const KnotBatch b = ps.sample_control_knots(Knots::Zero(2, 1), rng);
  double sum = 0.0;
  double sq = 0.0;
  for (std::size_t i = 1; i < b.size(); ++i) {
    sum += b[i](0, 0);
    sq += b[i](0, 0) * b[i](0, 0);
  }
  const double n = static_cast<double>(b.size() - 1);
  const double sd = std::sqrt(sq / n - (sum / n) * (sum / n));
  EXPECT_NEAR(sd, 0.05, 0.03 * 0.05);
}

TEST(PredictiveSampling, ArgmaxWithLowestIndexTies) {
  PredictiveSampling ps({}, bounds(1));
  const KnotBatch b = scalar_batch({10, 20, 30});
  const std::vector<double> r{1, 5, 3};
  EXPECT_EQ(ps.update_nominal_knots(b, r)(0, 0), 20);
  const std::vector<double> tie{4, 7, 7};
  EXPECT_EQ(ps.update_nominal_knots(b, tie)(0, 0), 20);
}

TEST(Optimizers, RejectBadRewards) {
  PredictiveSampling ps({}, bounds(1));
  CEMConfig cc;
  cc.num_rollouts = 3;
  cc.num_elites = 1;
  CEM cem(cc, bounds(1));
  MPPI mppi({}, bounds(1));
  const KnotBatch b = scalar_batch({1, 2, 3});
  const std::vector<double> nan{0, NAN, 1};
  const std::vector<double> short_r{0, 1};
  const double inf = std::numeric_limits<double>::infinity();
  const std::vector<double> all_failed{-inf, -inf, -inf};
  for (Optimizer* o : std::vector<Optimizer*>{&ps, &cem, &mppi}) {
    EXPECT_THROW(o->update_nominal_knots(b, nan), InvalidArgument);
    EXPECT_THROW(o->update_nominal_knots(b, short_r), InvalidArgument);
    EXPECT_THROW(o->update_nominal_knots(b, all_failed), Error);
  }
}

TEST(Optimizers, FailedRolloutsAreIgnored) {
  const double inf = std::numeric_limits<double>::infinity();
  const KnotBatch b = scalar_batch({1, 2, 3, 4});
  const std::vector<double> r{-inf, 1.0, -inf, 1.0};
  MPPI mppi({}, bounds(1, 10.0));
  EXPECT_DOUBLE_EQ(mppi.update_nominal_knots(b, r)(0, 0), 3.0);
  CEMConfig cc;
  cc.num_rollouts = 4;
  cc.num_elites = 3;
  CEM cem(cc, bounds(1, 10.0));
  // Only two finite rollouts are available as elites.
  EXPECT_DOUBLE_EQ(cem.update_nominal_knots(b, r)(0, 0), 3.0);
}

TEST(MPPI, EqualRewardsGiveMean) {
  MPPI mppi({}, bounds(1, 10.0));
  const KnotBatch b = scalar_batch({1, 2, 6});
  const std::vector<double> r{4, 4, 4};
  EXPECT_NEAR(mppi.update_nominal_knots(b, r)(0, 0), 3.0, 1e-15);
}

TEST(MPPI, WeightsAndConvexHull) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> normal(0.0, 5.0);
  MPPIConfig cfg;
  cfg.num_rollouts = 16;
  MPPI mppi(cfg, bounds(2));
  for (int trial = 0; trial < 100; ++trial) {
    const KnotBatch b = random_batch(rng, 16, 4, 2);
    std::vector<double> r(16);
    for (double& x : r) x = normal(rng);
    const std::vector<double> w = mppi_weights(r, 0.1);
    double total = 0.0;
    for (double wi : w) {
      EXPECT_GT(wi, 0.0);
      EXPECT_LE(wi, 1.0);
      total += wi;
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
    const Knots out = mppi.update_nominal_knots(b, r);
    for (Eigen::Index j = 0; j < out.size(); ++j) {
      double lo = INFINITY;
      double hi = -INFINITY;
      for (const Knots& k : b.samples) {
        lo = std::min(lo, k.data()[j]);
        hi = std::max(hi, k.data()[j]);
      }
      EXPECT_GE(out.data()[j], lo - 1e-12);
      EXPECT_LE(out.data()[j], hi + 1e-12);
    }
  }
}

TEST(MPPI, SmallTemperatureApproachesArgmax) {
  std::mt19937_64 rng(5);
  MPPIConfig cfg;
  cfg.temperature = 1e-6;
  cfg.num_rollouts = 8;
  MPPI mppi(cfg, bounds(1));
  PredictiveSamplingConfig pcfg;
  pcfg.num_rollouts = 8;
  PredictiveSampling ps(pcfg, bounds(1));
  for (int trial = 0; trial < 50; ++trial) {
    const KnotBatch b = random_batch(rng, 8, 3, 1);
    const std::vector<double> r = distinct_rewards(rng, 8);
    const Knots a = mppi.update_nominal_knots(b, r);
    const Knots p = ps.update_nominal_knots(b, r);
    EXPECT_LE((a - p).cwiseAbs().maxCoeff(), 1e-6);
  }
}

TEST(CEM, ElitesExample) {
  CEMConfig cfg;
  cfg.num_rollouts = 4;
  cfg.num_elites = 2;
  CEM cem(cfg, bounds(1, 100.0));
  const KnotBatch b = scalar_batch({1.5, 7.0, -2.0, 3.0});
  const std::vector<double> r{0, 10, 3, 7};
  EXPECT_EQ(cem.update_nominal_knots(b, r)(0, 0), (7.0 + 3.0) / 2);
  // Spread is the elite std (2.0), above the floor.
  EXPECT_DOUBLE_EQ(cem.spread()(0, 0), 2.0);
}

TEST(CEM, SpreadFlooredAndReset) {
  CEMConfig cfg;
  cfg.num_rollouts = 4;
  cfg.num_elites = 2;
  cfg.num_nodes = 2;
  CEM cem(cfg, bounds(1));
  EXPECT_EQ(cem.spread(), Knots::Constant(2, 1, 0.3));
  KnotBatch b;
  for (int i = 0; i < 4; ++i) b.samples.push_back(Knots::Constant(2, 1, 0.1));
  cem.update_nominal_knots(b, std::vector<double>{1, 2, 3, 4});
  EXPECT_EQ(cem.spread(), Knots::Constant(2, 1, 0.05));
  cem.reset();
  EXPECT_EQ(cem.spread(), Knots::Constant(2, 1, 0.3));
}

TEST(CEM, MatchesSortTopKAverage) {
  std::mt19937_64 rng(6);
  CEMConfig cfg;
  cfg.num_rollouts = 20;
  cfg.num_elites = 5;
  CEM cem(cfg, bounds(2));
  for (int trial = 0; trial < 100; ++trial) {
    const KnotBatch b = random_batch(rng, 20, 4, 2);
    const std::vector<double> r = distinct_rewards(rng, 20);
    std::vector<std::size_t> order(20);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto c) { return r[a] > r[c]; });
    Knots oracle = Knots::Zero(4, 2);
    for (int i = 0; i < 5; ++i) oracle += b[order[static_cast<std::size_t>(i)]];
    oracle /= 5.0;
    EXPECT_EQ(cem.update_nominal_knots(b, r), oracle);
  }
}

TEST(CEM, ConfigValidation) {
  CEMConfig cfg;
  cfg.num_elites = 32;
  EXPECT_THROW(CEM(cfg, bounds(1)), ConfigError);
  cfg.num_elites = 0;
  EXPECT_THROW(CEM(cfg, bounds(1)), ConfigError);
  cfg.num_elites = 4;
  cfg.sigma_min = 0.5;
  EXPECT_THROW(CEM(cfg, bounds(1)), ConfigError);
}

TEST(CEM, SamplesIncludeNominal) {
  CEM cem({}, bounds(1));
  Rng rng(0);
  const Knots nominal = Knots::Constant(4, 1, 0.2);
  const KnotBatch b = cem.sample_control_knots(nominal, rng);
  EXPECT_EQ(b[0], nominal);
  EXPECT_EQ(b.size(), 32u);
}

TEST(Optimizers, JointPermutationInvariance) {
  std::mt19937_64 rng(7);
  PredictiveSamplingConfig pcfg;
  pcfg.num_rollouts = 12;
  CEMConfig ccfg;
  ccfg.num_rollouts = 12;
  MPPIConfig mcfg;
  mcfg.num_rollouts = 12;
  mcfg.temperature = 1.0;
  PredictiveSampling ps(pcfg, bounds(2));
  CEM cem(ccfg, bounds(2));
  MPPI mppi(mcfg, bounds(2));
  for (int trial = 0; trial < 100; ++trial) {
    const KnotBatch b = random_batch(rng, 12, 3, 2);
    const std::vector<double> r = distinct_rewards(rng, 12);
    std::vector<std::size_t> perm(12);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    KnotBatch pb;
    std::vector<double> pr;
    for (std::size_t p : perm) {
      pb.samples.push_back(b[p]);
      pr.push_back(r[p]);
    }
    EXPECT_EQ(ps.update_nominal_knots(b, r), ps.update_nominal_knots(pb, pr));
    EXPECT_EQ(cem.update_nominal_knots(b, r), cem.update_nominal_knots(pb, pr));
    EXPECT_LE((mppi.update_nominal_knots(b, r) - mppi.update_nominal_knots(pb, pr))
                  .cwiseAbs()
                  .maxCoeff(),
              1e-12);
  }
}

TEST(Optimizers, SetConfigKeepsTypeAndReshapes) {
  CEM cem({}, bounds(1));
  CEMConfig next;
  next.num_nodes = 6;
  cem.set_config(AnyConfig(next));
  EXPECT_EQ(cem.num_nodes(), 6);
  EXPECT_EQ(cem.spread().rows(), 6);
  EXPECT_THROW(cem.set_config(AnyConfig(MPPIConfig{})), Error);
  next.sigma_min = -1.0;
  EXPECT_THROW(cem.set_config(AnyConfig(next)), ConfigError);
}

}  // namespace
}  // namespace sampc
