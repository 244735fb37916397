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

// Name -> (factory, default config) registries for tasks and optimizers,
// task-specific config overrides, and YAML stack configuration.

#pragma once

#include <algorithm>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <typeindex>
#include <utility>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "sampc/config.hpp"
#include "sampc/controller.hpp"
#include "sampc/error.hpp"
#include "sampc/optimizer.hpp"
#include "sampc/optimizers/cem.hpp"
#include "sampc/optimizers/mppi.hpp"
#include "sampc/optimizers/predictive_sampling.hpp"
#include "sampc/task.hpp"
#include "sampc/tasks/cartpole.hpp"
#include "sampc/tasks/cylinder_push.hpp"
#include "sampc/tasks/double_integrator.hpp"

namespace sampc {

using TaskFactory = std::function<std::shared_ptr<const Task>()>;
using OptimizerFactory = std::function<std::unique_ptr<Optimizer>(
    const AnyConfig& config, const ControlBounds& bounds)>;

// Builds an OptimizerFactory for an OptimizerBase-derived type.
template <class Opt>
OptimizerFactory optimizer_factory() {
  return [](const AnyConfig& config, const ControlBounds& bounds) {
    return std::make_unique<Opt>(config.as<typename Opt::ConfigType>(), bounds);
  };
}

template <class TaskT>
TaskFactory task_factory() {
  return [] { return std::make_shared<const TaskT>(); };
}

// Configs resolved for one (task, optimizer) pair.
struct ResolvedConfig {
  AnyConfig task;
  AnyConfig optimizer;
  AnyConfig controller;

  const ControllerConfig& controller_config() const {
    return controller.as<ControllerConfig>();
  }

  bool operator==(const ResolvedConfig&) const = default;
};

class Registry {
 public:
  struct TaskEntry {
    TaskFactory factory;
    AnyConfig default_config;
  };
  struct OptimizerEntry {
    OptimizerFactory factory;
    AnyConfig default_config;
  };

  // cartpole, cylinder_push, double_integrator; ps, cem, mppi.
  static Registry with_builtins() {
    Registry r;
    r.register_task("cartpole", task_factory<Cartpole>(), CartpoleConfig{});
    r.register_task("cylinder_push", task_factory<CylinderPush>(),
                    CylinderPushConfig{});
    r.register_task("double_integrator", task_factory<DoubleIntegrator>(),
                    DoubleIntegratorConfig{});
    r.register_optimizer("ps", optimizer_factory<PredictiveSampling>(),
                         PredictiveSamplingConfig{});
    r.register_optimizer("cem", optimizer_factory<CEM>(), CEMConfig{});
    r.register_optimizer("mppi", optimizer_factory<MPPI>(), MPPIConfig{});
    return r;
  }

  void register_task(const std::string& name, TaskFactory factory,
                     AnyConfig default_config) {
    if (tasks_.contains(name)) {
      throw ConfigError("task '" + name + "' is already registered");
    }
    tasks_.emplace(name, TaskEntry{std::move(factory), std::move(default_config)});
    task_order_.push_back(name);
  }

  void register_optimizer(const std::string& name, OptimizerFactory factory,
                          AnyConfig default_config) {
    if (optimizers_.contains(name)) {
      throw ConfigError("optimizer '" + name + "' is already registered");
    }
    optimizers_.emplace(
        name, OptimizerEntry{std::move(factory), std::move(default_config)});
    optimizer_order_.push_back(name);
  }

  // Overrides for configs of type Config when `task` is active. Keys are
  // field paths; later calls win for the same key.
  template <class Config>
  void set_config_overrides(const std::string& task, const json& overrides) {
    set_config_overrides(task, std::type_index(typeid(Config)), overrides);
  }

  void set_config_overrides(const std::string& task, std::type_index config_type,
                            const json& overrides) {
    if (!overrides.is_object()) {
      throw ConfigError("overrides for task '" + task + "' must be a map");
    }
    auto& list = overrides_[{task, config_type}];
    for (const auto& [path, value] : overrides.items()) {
      list.emplace_back(path, value);
    }
  }

  // Controller overrides by name, as in the YAML form.
  void set_controller_overrides(const std::string& task, const json& overrides) {
    set_config_overrides<ControllerConfig>(task, overrides);
  }

  // Optimizer overrides addressed by optimizer name; they attach to that
  // optimizer's config type.
  void set_optimizer_overrides(const std::string& task,
                               const std::string& optimizer,
                               const json& overrides) {
    set_config_overrides(task, optimizer_entry(optimizer).default_config.type(),
                         overrides);
  }

  // Defaults with the overrides registered for `task` applied. Pure.
  ResolvedConfig resolve_config(const std::string& task,
                                const std::string& optimizer) const {
    ResolvedConfig out{task_entry(task).default_config,
                       optimizer_entry(optimizer).default_config,
                       ControllerConfig{}};
    apply_overrides(task, out.task);
    apply_overrides(task, out.optimizer);
    apply_overrides(task, out.controller);
    return out;
  }

  std::shared_ptr<const Task> make_task(const std::string& name) const {
    return task_entry(name).factory();
  }

  std::unique_ptr<Optimizer> make_optimizer(const std::string& name,
                                            const AnyConfig& config,
                                            const ControlBounds& bounds) const {
    return optimizer_entry(name).factory(config, bounds);
  }

  bool has_task(const std::string& name) const { return tasks_.contains(name); }
  bool has_optimizer(const std::string& name) const {
    return optimizers_.contains(name);
  }
  const std::vector<std::string>& task_names() const { return task_order_; }
  const std::vector<std::string>& optimizer_names() const {
    return optimizer_order_;
  }

  const TaskEntry& task_entry(const std::string& name) const {
    auto it = tasks_.find(name);
    if (it == tasks_.end()) throw ConfigError("unknown task '" + name + "'");
    return it->second;
  }
  const OptimizerEntry& optimizer_entry(const std::string& name) const {
    auto it = optimizers_.find(name);
    if (it == optimizers_.end()) {
      throw ConfigError("unknown optimizer '" + name + "'");
    }
    return it->second;
  }

 private:
  void apply_overrides(const std::string& task, AnyConfig& config) const {
    auto it = overrides_.find({task, config.type()});
    if (it == overrides_.end()) return;
    for (const auto& [path, value] : it->second) {
      try {
        config.set(path, value);
      } catch (const ConfigError& e) {
        throw ConfigError("override for task '" + task + "': " + e.what());
      }
    }
  }

  std::map<std::string, TaskEntry> tasks_;
  std::map<std::string, OptimizerEntry> optimizers_;
  std::vector<std::string> task_order_;
  std::vector<std::string> optimizer_order_;
  std::map<std::pair<std::string, std::type_index>,
           std::vector<std::pair<std::string, json>>>
      overrides_;
};

// Names under which YAML `custom_tasks` / `custom_optimizers` entries find
// their classes. Compiled plugins register here at startup.
class PluginCatalog {
 public:
  static PluginCatalog with_builtins() {
    PluginCatalog c;
    c.add_task("sampc.tasks.Cartpole", task_factory<Cartpole>());
    c.add_task("sampc.tasks.CylinderPush", task_factory<CylinderPush>());
    c.add_task("sampc.tasks.DoubleIntegrator", task_factory<DoubleIntegrator>());
    c.add_config("sampc.tasks.CartpoleConfig", CartpoleConfig{});
    c.add_config("sampc.tasks.CylinderPushConfig", CylinderPushConfig{});
    c.add_config("sampc.tasks.DoubleIntegratorConfig", DoubleIntegratorConfig{});
    c.add_optimizer("sampc.optimizers.PredictiveSampling",
                    optimizer_factory<PredictiveSampling>());
    c.add_optimizer("sampc.optimizers.CEM", optimizer_factory<CEM>());
    c.add_optimizer("sampc.optimizers.MPPI", optimizer_factory<MPPI>());
    c.add_config("sampc.optimizers.PredictiveSamplingConfig",
                 PredictiveSamplingConfig{});
    c.add_config("sampc.optimizers.CEMConfig", CEMConfig{});
    c.add_config("sampc.optimizers.MPPIConfig", MPPIConfig{});
    return c;
  }

  void add_task(const std::string& path, TaskFactory factory) {
    tasks_[path] = std::move(factory);
  }
  void add_optimizer(const std::string& path, OptimizerFactory factory) {
    optimizers_[path] = std::move(factory);
  }
  void add_config(const std::string& path, AnyConfig config) {
    configs_[path] = std::move(config);
  }

  const TaskFactory& task(const std::string& path) const {
    return lookup(tasks_, path, "task");
  }
  const OptimizerFactory& optimizer(const std::string& path) const {
    return lookup(optimizers_, path, "optimizer");
  }
  const AnyConfig& config(const std::string& path) const {
    return lookup(configs_, path, "config");
  }

 private:
  template <class Map>
  static const typename Map::mapped_type& lookup(const Map& map,
                                                 const std::string& path,
                                                 std::string_view what) {
    auto it = map.find(path);
    if (it == map.end()) {
      throw ConfigError("cannot resolve " + std::string(what) + " module path '" +
                        path + "'");
    }
    return it->second;
  }

  std::map<std::string, TaskFactory> tasks_;
  std::map<std::string, OptimizerFactory> optimizers_;
  std::map<std::string, AnyConfig> configs_;
};

// Registry plus the initially active selection.
struct StackSettings {
  Registry registry;
  std::string task = "cartpole";
  std::string optimizer = "ps";
};

namespace detail {

inline json yaml_scalar_to_json(const YAML::Node& node) {
  const std::string& s = node.Scalar();
  if (node.Tag() == "!") return s;  // quoted
  if (s == "true" || s == "True" || s == "TRUE") return true;
  if (s == "false" || s == "False" || s == "FALSE") return false;
  if (s == "~" || s == "null" || s.empty()) return nullptr;
  try {
    std::size_t used = 0;
    const long long v = std::stoll(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  return s;
}

inline json yaml_to_json(const YAML::Node& node) {
  switch (node.Type()) {
    case YAML::NodeType::Scalar:
      return yaml_scalar_to_json(node);
    case YAML::NodeType::Sequence: {
      json arr = json::array();
      for (const YAML::Node& e : node) arr.push_back(yaml_to_json(e));
      return arr;
    }
    case YAML::NodeType::Map: {
      json obj = json::object();
      for (const auto& kv : node) {
        obj[kv.first.as<std::string>()] = yaml_to_json(kv.second);
      }
      return obj;
    }
    default:
      return nullptr;
  }
}

inline const json& require_object(const json& j, const std::string& where) {
  if (!j.is_object()) throw ConfigError("'" + where + "' must be a map");
  return j;
}

inline std::string require_string(const json& j, const std::string& key,
                                  const std::string& where) {
  if (!j.contains(key) || !j.at(key).is_string()) {
    throw ConfigError("'" + where + "' needs a string '" + key + "' entry");
  }
  return j.at(key).get<std::string>();
}

}  // namespace detail

// Applies a parsed YAML stack document on top of `base`.
//
// Accepted keys: defaults (ignored), task, optimizer, custom_tasks,
// custom_optimizers, controller_config_overrides, optimizer_config_overrides.
// Anything else is an error listing the offending keys.
inline StackSettings load_yaml_document(const json& doc, Registry base,
                                        const PluginCatalog& catalog) {
  StackSettings out{std::move(base)};
  if (doc.is_null()) return out;
  detail::require_object(doc, "<root>");

  static const std::vector<std::string> kKnown = {
      "defaults",
      "task",
      "optimizer",
      "custom_tasks",
      "custom_optimizers",
      "controller_config_overrides",
      "optimizer_config_overrides"};
  std::vector<std::string> unknown;
  for (const auto& [key, _] : doc.items()) {
    if (std::find(kKnown.begin(), kKnown.end(), key) == kKnown.end()) {
      unknown.push_back(key);
    }
  }
  if (!unknown.empty()) {
    std::string msg = "unknown config keys:";
    for (const std::string& k : unknown) msg += " " + k;
    throw ConfigError(msg);
  }

  if (doc.contains("custom_tasks")) {
    for (const auto& [name, entry] :
         detail::require_object(doc["custom_tasks"], "custom_tasks").items()) {
      const std::string where = "custom_tasks." + name;
      detail::require_object(entry, where);
      out.registry.register_task(
          name, catalog.task(detail::require_string(entry, "task", where)),
          catalog.config(detail::require_string(entry, "config", where)));
    }
  }
  if (doc.contains("custom_optimizers")) {
    for (const auto& [name, entry] :
         detail::require_object(doc["custom_optimizers"], "custom_optimizers")
             .items()) {
      const std::string where = "custom_optimizers." + name;
      detail::require_object(entry, where);
      out.registry.register_optimizer(
          name,
          catalog.optimizer(detail::require_string(entry, "optimizer", where)),
          catalog.config(detail::require_string(entry, "config", where)));
    }
  }
  if (doc.contains("controller_config_overrides")) {
    for (const auto& [task, fields] :
         detail::require_object(doc["controller_config_overrides"],
                                "controller_config_overrides")
             .items()) {
      out.registry.set_controller_overrides(task, fields);
    }
  }
  if (doc.contains("optimizer_config_overrides")) {
    for (const auto& [task, per_opt] :
         detail::require_object(doc["optimizer_config_overrides"],
                                "optimizer_config_overrides")
             .items()) {
      for (const auto& [opt, fields] :
           detail::require_object(per_opt, "optimizer_config_overrides." + task)
               .items()) {
        out.registry.set_optimizer_overrides(task, opt, fields);
      }
    }
  }
  if (doc.contains("task")) {
    if (!doc["task"].is_string()) throw ConfigError("'task' must be a string");
    out.task = doc["task"].get<std::string>();
  }
  if (doc.contains("optimizer")) {
    if (!doc["optimizer"].is_string()) {
      throw ConfigError("'optimizer' must be a string");
    }
    out.optimizer = doc["optimizer"].get<std::string>();
  }
  if (!out.registry.has_task(out.task)) {
    throw ConfigError("unknown task '" + out.task + "'");
  }
  if (!out.registry.has_optimizer(out.optimizer)) {
    throw ConfigError("unknown optimizer '" + out.optimizer + "'");
  }
  return out;
}

inline StackSettings load_yaml_string(const std::string& text, Registry base,
                                      const PluginCatalog& catalog) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("invalid YAML: ") + e.what());
  }
  return load_yaml_document(detail::yaml_to_json(root), std::move(base), catalog);
}

inline StackSettings load_yaml(const std::filesystem::path& path, Registry base,
                               const PluginCatalog& catalog) {
  if (!std::filesystem::exists(path)) {
    throw ConfigError("config file not found: " + path.string());
  }
  YAML::Node root;
  try {
    root = YAML::LoadFile(path.string());
  } catch (const YAML::Exception& e) {
    throw ConfigError("invalid YAML in " + path.string() + ": " + e.what());
  }
  return load_yaml_document(detail::yaml_to_json(root), std::move(base), catalog);
}

inline StackSettings load_yaml(const std::filesystem::path& path) {
  return load_yaml(path, Registry::with_builtins(), PluginCatalog::with_builtins());
}

}  // namespace sampc
