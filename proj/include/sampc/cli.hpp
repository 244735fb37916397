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


// Command line front end: run the simulator/controller/bridge stack, or time
// controller updates.
//
//   sampc [run] [-cp DIR -cn NAME] [--port N] [--headless] [--duration S]
//   sampc benchmark --task cartpole --optimizer ps --threads 10 --iters 100

#pragma once

#include <algorithm>
#include <chrono>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "sampc/benchmark.hpp"
#include "sampc/bridge.hpp"
#include "sampc/nodes.hpp"
#include "sampc/registry.hpp"

namespace sampc::cli {

namespace detail {

inline volatile std::sig_atomic_t g_interrupted = 0;

inline void on_signal(int) { g_interrupted = 1; }

struct ConfigFlags {
  std::string path;
  std::string name;
};

inline void add_config_flags(CLI::App* app, ConfigFlags& flags) {
  app->add_option("--config-path", flags.path,
                  "directory holding the YAML config (-cp)");
  app->add_option("--config-name", flags.name,
                  "config file name without extension (-cn)");
}

inline std::filesystem::path config_file(const ConfigFlags& flags) {
  std::filesystem::path dir = flags.path.empty() ? "." : flags.path;
  std::filesystem::path file = dir / flags.name;
  if (file.has_extension()) return file;
  for (const char* ext : {".yaml", ".yml"}) {
    std::filesystem::path candidate = file;
    candidate += ext;
    if (std::filesystem::exists(candidate)) return candidate;
  }
  file += ".yaml";
  return file;
}

inline StackSettings load_settings(const ConfigFlags& flags,
                                          const Registry& base,
                                          const PluginCatalog& catalog) {
  if (flags.name.empty()) {
    if (!flags.path.empty()) {
      throw ConfigError("--config-path given without --config-name");
    }
    return StackSettings{base};
  }
  return load_yaml(config_file(flags), base, catalog);
}

// -cp/-cn are single-dash long flags; CLI11 wants them spelled out.
inline std::vector<std::string> normalize_args(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) {
    std::string a = argv[i];
    if (a == "-cp") a = "--config-path";
    else if (a == "-cn") a = "--config-name";
    else if (a.rfind("-cp=", 0) == 0) a = "--config-path=" + a.substr(4);
    else if (a.rfind("-cn=", 0) == 0) a = "--config-name=" + a.substr(4);
    args.push_back(std::move(a));
  }
  const bool has_command =
      !args.empty() && (args[0] == "run" || args[0] == "benchmark");
  const bool wants_help =
      !args.empty() && (args[0] == "-h" || args[0] == "--help");
  if (!has_command && !wants_help) args.insert(args.begin(), "run");
  std::reverse(args.begin(), args.end());  // CLI11 parses a reversed vector
  return args;
}

struct RunFlags {
  ConfigFlags config;
  std::string task;
  std::string optimizer;
  int port = 8080;
  bool headless = false;
  std::optional<double> duration;
  int threads = std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
  std::uint64_t seed = 0;
};

inline int run_stack(const RunFlags& flags, const Registry& base,
                     const PluginCatalog& catalog) {
  StackSettings settings = load_settings(flags.config, base, catalog);
  if (!flags.task.empty()) settings.task = flags.task;
  if (!flags.optimizer.empty()) settings.optimizer = flags.optimizer;

  Bus bus;
  std::unique_ptr<WebsocketBridge> bridge;
  if (!flags.headless) {
    bridge = std::make_unique<WebsocketBridge>(
        bus, static_cast<unsigned short>(flags.port));
  }
  ControllerNode controller(bus, settings.registry, settings.task,
                                   settings.optimizer,
                                   {flags.threads, flags.seed});
  SimulatorNode simulator(bus, settings.registry, settings.task,
                                 {.seed = flags.seed});

  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);

  if (bridge) bridge->start();
  controller.start();
  simulator.start();

  std::cout << "sampc: " << settings.task << " / " << settings.optimizer << ", "
            << flags.threads << " rollout threads" << std::endl;
  if (bridge) {
    std::cout << "sampc: GUI at ws://localhost:" << bridge->port() << "/"
              << std::endl;
  } else {
    std::cout << "sampc: headless, no websocket listener" << std::endl;
  }

  const auto start = std::chrono::steady_clock::now();
  while (!g_interrupted) {
    if (flags.duration) {
      const double elapsed = std::chrono::duration<double>(
                                 std::chrono::steady_clock::now() - start)
                                 .count();
      if (elapsed >= *flags.duration) break;
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
  }

  simulator.stop();
  controller.stop();
  if (bridge) bridge->stop();
  std::cout << "sampc: stopped after " << controller.iterations()
            << " controller updates" << std::endl;
  return 0;
}

struct BenchFlags {
  ConfigFlags config;
  BenchmarkOptions options;
  std::optional<std::string> csv;
};

inline int run_benchmark(const BenchFlags& flags, const Registry& base,
                         const PluginCatalog& catalog) {
  const StackSettings settings = load_settings(flags.config, base, catalog);
  const BenchmarkResult r =
      run_benchmark(settings.registry, flags.options);
  std::cout << benchmark_table_row(r) << std::endl;
  if (flags.csv) {
    const bool to_stdout = *flags.csv == "-";
    if (to_stdout) {
      std::cout << benchmark_csv_header() << '\n'
                << benchmark_csv_row(r) << std::endl;
    } else {
      const bool fresh = !std::filesystem::exists(*flags.csv);
      std::ofstream out(*flags.csv, std::ios::app);
      if (!out) throw Error("cannot write " + *flags.csv);
      if (fresh) out << benchmark_csv_header() << '\n';
      out << benchmark_csv_row(r) << '\n';
    }
  }
  return 0;
}

}  // namespace detail

// Entry point of the sampc executable. Programs that link their own tasks
// and optimizers register them in `base` and `catalog` first.
inline int run_cli(int argc, char** argv, const Registry& base,
                   const PluginCatalog& catalog) {
  using namespace detail;
  CLI::App app{"sampling-based MPC stack", "sampc"};
  app.require_subcommand(1);

  RunFlags run;
  CLI::App* run_cmd = app.add_subcommand("run", "run simulator, controller and bridge");
  add_config_flags(run_cmd, run.config);
  run_cmd->add_option("--task", run.task, "initial task (overrides the YAML)");
  run_cmd->add_option("--optimizer", run.optimizer, "initial optimizer");
  run_cmd->add_option("--port", run.port, "websocket port")->check(CLI::Range(0, 65535));
  run_cmd->add_flag("--headless", run.headless, "do not start the websocket bridge");
  run_cmd->add_option("--duration", run.duration, "stop after this many seconds");
  run_cmd->add_option("--threads", run.threads, "rollout threads")->check(CLI::PositiveNumber);
  run_cmd->add_option("--seed", run.seed, "random seed");

  BenchFlags bench;
  CLI::App* bench_cmd = app.add_subcommand("benchmark", "time controller updates");
  add_config_flags(bench_cmd, bench.config);
  bench_cmd->add_option("--task", bench.options.task, "task name");
  bench_cmd->add_option("--optimizer", bench.options.optimizer, "optimizer name");
  bench_cmd->add_option("--threads", bench.options.threads, "rollout threads");
  bench_cmd->add_option("--iters", bench.options.iters, "timed updates (>= 10)");
  bench_cmd->add_option("--num-rollouts", bench.options.num_rollouts, "override N");
  bench_cmd->add_option("--horizon", bench.options.horizon, "override horizon (s)");
  bench_cmd->add_option("--seed", bench.options.seed, "random seed");
  bench_cmd->add_option("--csv", bench.csv, "append a CSV row to FILE ('-' for stdout)");

  std::vector<std::string> args = normalize_args(argc, argv);
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*bench_cmd) return run_benchmark(bench, base, catalog);
    return run_stack(run, base, catalog);
  } catch (const std::exception& e) {
    std::string msg = e.what();
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    std::cerr << "sampc: error: " << msg << std::endl;
    return 2;
  }
}

inline int run_cli(int argc, char** argv) {
  return run_cli(argc, argv, Registry::with_builtins(), PluginCatalog::with_builtins());
}

}  // namespace sampc::cli
