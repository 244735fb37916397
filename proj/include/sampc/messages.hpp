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

// Messages exchanged between nodes and their JSON wire form.

#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "sampc/error.hpp"
#include "sampc/rollout.hpp"
#include "sampc/spline.hpp"
#include "sampc/task.hpp"

namespace sampc {

using json = nlohmann::json;

struct StateMsg {
  std::uint64_t seq = 0;
  double t = 0.0;
  Eigen::VectorXd q;
  Eigen::VectorXd v;
  std::string task;

  TaskState state() const { return {t, q, v}; }
};

struct PlanMsg {
  std::uint64_t seq = 0;
  double t_start = 0.0;
  Eigen::VectorXd knot_times;
  Knots knots;
  InterpolationKind kind = InterpolationKind::kZeroOrderHold;
  int nu = 0;

  static PlanMsg from_plan(const ControlPlan& plan) {
    return {0, plan.t_start(), plan.knot_times(), plan.knots(), plan.kind(),
            static_cast<int>(plan.nu())};
  }
  ControlPlan plan() const { return ControlPlan(knots, knot_times, kind); }
};

struct TraceEntry {
  std::vector<Eigen::Vector3d> points;
  double reward = 0.0;
  bool nominal = false;
};

struct TracesMsg {
  std::uint64_t seq = 0;
  std::vector<TraceEntry> traces;

  // One entry per (selected rollout, trace point), nominal first.
  static TracesMsg from_batch(const RolloutBatch& batch, std::size_t k) {
    TracesMsg msg;
    for (const SelectedTrace& sel : top_traces(batch, k)) {
      for (const TracePath& path : *sel.paths) {
        msg.traces.push_back({path.points, sel.reward, sel.nominal});
      }
    }
    return msg;
  }
};

struct ParamUpdateMsg {
  std::uint64_t seq = 0;
  std::string scope;  // task | optimizer | controller
  std::string path;
  json value;
};

struct CommandMsg {
  std::uint64_t seq = 0;
  // switch_task | switch_optimizer | reset | pause | resume
  std::string name;
  // Argument of switch_task / switch_optimizer.
  std::string target;
};

struct StatsMsg {
  std::uint64_t seq = 0;
  double update_ms_mean = 0.0;
  double update_ms_std = 0.0;
  long iteration = 0;
  std::string task;
  std::string optimizer;
};

struct SchemaFrame {
  std::string scope;  // task | optimizer | controller | stack
  json fields = json::array();
};

struct SchemaMsg {
  std::uint64_t seq = 0;
  std::vector<SchemaFrame> frames;
};

struct ErrorMsg {
  std::uint64_t seq = 0;
  std::string message;
};

using NodeMessage = std::variant<StateMsg, PlanMsg, TracesMsg, ParamUpdateMsg,
                                 CommandMsg, StatsMsg, SchemaMsg, ErrorMsg>;

namespace detail {

inline json vec_to_json(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

inline Eigen::VectorXd json_to_vec(const json& j, const char* what) {
  if (!j.is_array()) throw InvalidArgument(std::string(what) + " must be an array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) {
      throw InvalidArgument(std::string(what) + " must hold numbers");
    }
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

template <class T>
T get_field(const json& j, const char* key) {
  if (!j.contains(key)) {
    throw InvalidArgument(std::string("missing field '") + key + "'");
  }
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw InvalidArgument(std::string("field '") + key + "' has the wrong type");
  }
}

}  // namespace detail

inline json to_json(const StateMsg& m) {
  return {{"type", "state"}, {"seq", m.seq}, {"t", m.t},
          {"q", detail::vec_to_json(m.q)}, {"v", detail::vec_to_json(m.v)},
          {"task", m.task}};
}

inline json to_json(const PlanMsg& m) {
  json knots = json::array();
  for (Eigen::Index r = 0; r < m.knots.rows(); ++r) {
    knots.push_back(detail::vec_to_json(m.knots.row(r).transpose()));
  }
  return {{"type", "plan"},
          {"seq", m.seq},
          {"t_start", m.t_start},
          {"knot_times", detail::vec_to_json(m.knot_times)},
          {"knots", std::move(knots)},
          {"kind", std::string(to_string(m.kind))},
          {"nu", m.nu}};
}

inline json to_json(const TracesMsg& m) {
  json traces = json::array();
  for (const TraceEntry& e : m.traces) {
    json pts = json::array();
    for (const Eigen::Vector3d& p : e.points) pts.push_back({p.x(), p.y(), p.z()});
    traces.push_back(
        {{"points", std::move(pts)}, {"reward", e.reward}, {"nominal", e.nominal}});
  }
  return {{"type", "traces"}, {"seq", m.seq}, {"traces", std::move(traces)}};
}

inline json to_json(const ParamUpdateMsg& m) {
  return {{"type", "param"}, {"scope", m.scope}, {"path", m.path},
          {"value", m.value}};
}

inline json to_json(const CommandMsg& m) {
  json j = {{"type", "command"}, {"name", m.name}};
  if (m.name == "switch_task") j["task"] = m.target;
  if (m.name == "switch_optimizer") j["optimizer"] = m.target;
  return j;
}

inline json to_json(const StatsMsg& m) {
  return {{"type", "stats"},
          {"seq", m.seq},
          {"update_ms_mean", m.update_ms_mean},
          {"update_ms_std", m.update_ms_std},
          {"iteration", m.iteration},
          {"task", m.task},
          {"optimizer", m.optimizer}};
}

inline json to_json(const SchemaFrame& f) {
  return {{"type", "schema"}, {"scope", f.scope}, {"fields", f.fields}};
}

inline json to_json(const ErrorMsg& m) {
  return {{"type", "error"}, {"message", m.message}};
}

inline json to_json(const SchemaMsg& m) {
  json frames = json::array();
  for (const SchemaFrame& f : m.frames) frames.push_back(to_json(f));
  return frames;
}

inline json to_json(const NodeMessage& msg) {
  return std::visit([](const auto& m) { return to_json(m); }, msg);
}

inline PlanMsg plan_from_json(const json& j) {
  PlanMsg m;
  m.seq = detail::get_field<std::uint64_t>(j, "seq");
  m.t_start = detail::get_field<double>(j, "t_start");
  m.knot_times = detail::json_to_vec(j.at("knot_times"), "knot_times");
  m.nu = detail::get_field<int>(j, "nu");
  const json& rows = j.at("knots");
  m.knots.resize(static_cast<Eigen::Index>(rows.size()), m.nu);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const Eigen::VectorXd row = detail::json_to_vec(rows[r], "knots row");
    if (row.size() != m.nu) throw InvalidArgument("knots row width != nu");
    m.knots.row(static_cast<Eigen::Index>(r)) = row.transpose();
  }
  const auto kind = parse_interpolation_kind(detail::get_field<std::string>(j, "kind"));
  if (!kind) throw InvalidArgument("unknown interpolation kind");
  m.kind = *kind;
  return m;
}

// Parses a client frame. Only "param" and "command" frames are accepted;
// anything else throws InvalidArgument.
inline NodeMessage client_message_from_json(const json& j) {
  if (!j.is_object()) throw InvalidArgument("frame must be a JSON object");
  const std::string type = detail::get_field<std::string>(j, "type");
  if (type == "param") {
    ParamUpdateMsg m;
    m.scope = detail::get_field<std::string>(j, "scope");
    if (m.scope != "task" && m.scope != "optimizer" && m.scope != "controller") {
      throw InvalidArgument("param scope must be task, optimizer or controller");
    }
    m.path = detail::get_field<std::string>(j, "path");
    if (!j.contains("value")) throw InvalidArgument("missing field 'value'");
    m.value = j.at("value");
    return m;
  }
  if (type == "command") {
    CommandMsg m;
    m.name = detail::get_field<std::string>(j, "name");
    if (m.name == "switch_task") {
      m.target = j.contains("task") ? detail::get_field<std::string>(j, "task")
                                    : detail::get_field<std::string>(j, "value");
    } else if (m.name == "switch_optimizer") {
      m.target = j.contains("optimizer")
                     ? detail::get_field<std::string>(j, "optimizer")
                     : detail::get_field<std::string>(j, "value");
    } else if (m.name != "reset" && m.name != "pause" && m.name != "resume") {
      throw InvalidArgument("unknown command '" + m.name + "'");
    }
    return m;
  }
  throw InvalidArgument("unsupported frame type '" + type + "'");
}

}  // namespace sampc
