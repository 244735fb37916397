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


// Control-update timing harness behind `sampc benchmark`. Only the
// Controller::update call is timed.

#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "sampc/controller.hpp"
#include "sampc/registry.hpp"

namespace sampc {

struct BenchmarkOptions {
  std::string task = "cartpole";
  std::string optimizer = "ps";
  int threads = 10;
  int iters = 100;
  int warmup = 5;
  std::optional<int> num_rollouts;
  std::optional<double> horizon;
  std::uint64_t seed = 0;
};

struct BenchmarkResult {
  std::string task;
  std::string optimizer;
  int threads = 0;
  int num_rollouts = 0;
  double horizon_s = 0.0;
  int steps = 0;
  std::vector<double> update_ms;
  double mean_ms = 0.0;
  double std_ms = 0.0;
  // Simulated rollout steps per wall second.
  double rollouts_per_s = 0.0;
};

// Runs warmup + iters updates, each from a freshly reset state.
inline BenchmarkResult run_benchmark(const Registry& registry,
                                     const BenchmarkOptions& options) {
  if (options.iters < 10) throw InvalidArgument("--iters must be at least 10");
  if (options.threads < 1) throw InvalidArgument("--threads must be at least 1");

  ResolvedConfig cfg = registry.resolve_config(options.task, options.optimizer);
  if (options.num_rollouts) cfg.optimizer.set("num_rollouts", *options.num_rollouts);
  ControllerConfig ctrl = cfg.controller_config();
  if (options.horizon) {
    ctrl.horizon = *options.horizon;
    ctrl.validate();
  }

  std::shared_ptr<const Task> task = registry.make_task(options.task);
  auto optimizer = registry.make_optimizer(options.optimizer, cfg.optimizer,
                                           ControlBounds::of(task->info()));
  const int n = optimizer->num_rollouts();
  Controller controller(task, cfg.task, std::move(optimizer), ctrl, options.threads);

  Rng rng(options.seed);
  BenchmarkResult out;
  out.task = options.task;
  out.optimizer = options.optimizer;
  out.threads = options.threads;
  out.num_rollouts = n;
  out.horizon_s = ctrl.horizon;
  out.steps = ctrl.rollout_settings().steps();

  for (int i = 0; i < options.warmup + options.iters; ++i) {
    const TaskState x0 = task->reset(rng);
    controller.reset();
    const UpdateResult r = controller.update(x0, rng);
    if (i >= options.warmup) out.update_ms.push_back(r.update_ms);
  }

  const double m = static_cast<double>(out.update_ms.size());
  out.mean_ms = std::accumulate(out.update_ms.begin(), out.update_ms.end(), 0.0) / m;
  double var = 0.0;
  for (double d : out.update_ms) var += (d - out.mean_ms) * (d - out.mean_ms);
  out.std_ms = std::sqrt(var / m);
  out.rollouts_per_s =
      static_cast<double>(n) * out.steps / (out.mean_ms / 1000.0);
  return out;
}

inline std::string benchmark_csv_header() {
  return "task,optimizer,threads,num_rollouts,horizon_s,mean_ms,std_ms,rollouts_per_s";
}

inline std::string benchmark_csv_row(const BenchmarkResult& r) {
  std::ostringstream os;
  os << r.task << ',' << r.optimizer << ',' << r.threads << ',' << r.num_rollouts
     << ',' << r.horizon_s << ',' << r.mean_ms << ',' << r.std_ms << ','
     << r.rollouts_per_s;
  return os.str();
}

// "cartpole  ps  10 threads  N=32  4.31 ± 0.62 ms  1.2e+06 steps/s"
inline std::string benchmark_table_row(const BenchmarkResult& r) {
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "%-18s %-6s %3d threads  N=%-4d H=%.2fs  %.2f ± %.2f ms  %.3g steps/s",
                r.task.c_str(), r.optimizer.c_str(), r.threads, r.num_rollouts,
                r.horizon_s, r.mean_ms, r.std_ms, r.rollouts_per_s);
  return buf;
}

}  // namespace sampc
