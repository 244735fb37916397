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
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include <Eigen/Dense>

#include "sampc/error.hpp"

namespace sampc {

// Knot values, one row per knot, one column per actuator.
using Knots = Eigen::MatrixXd;

enum class InterpolationKind { kZeroOrderHold, kLinear, kCubic };

inline std::string_view to_string(InterpolationKind kind) {
  switch (kind) {
    case InterpolationKind::kZeroOrderHold:
      return "zoh";
    case InterpolationKind::kLinear:
      return "linear";
    case InterpolationKind::kCubic:
      return "cubic";
  }
  return "zoh";
}

inline std::optional<InterpolationKind> parse_interpolation_kind(
    std::string_view name) {
  if (name == "zoh" || name == "zero_order_hold") {
    return InterpolationKind::kZeroOrderHold;
  }
  if (name == "linear") return InterpolationKind::kLinear;
  if (name == "cubic") return InterpolationKind::kCubic;
  return std::nullopt;
}

// A control spline: knot values on a strictly increasing time grid.
//
// Immutable once built, so copies can be shared freely between the
// controller thread and any thread querying actions.
class ControlPlan {
 public:
  ControlPlan(Knots knots, Eigen::VectorXd knot_times, InterpolationKind kind)
      : knots_(std::move(knots)),
        knot_times_(std::move(knot_times)),
        kind_(kind) {
    if (knots_.rows() < 2) {
      throw InvalidArgument("control plan needs at least 2 knots");
    }
    if (knots_.cols() < 1) {
      throw InvalidArgument("control plan needs at least 1 actuator");
    }
    if (knot_times_.size() != knots_.rows()) {
      throw InvalidArgument("knot_times length must equal the number of knots");
    }
    for (Eigen::Index i = 1; i < knot_times_.size(); ++i) {
      if (!(knot_times_[i] > knot_times_[i - 1])) {
        throw InvalidArgument("knot_times must be strictly increasing");
      }
    }
  }

  const Knots& knots() const { return knots_; }
  const Eigen::VectorXd& knot_times() const { return knot_times_; }
  InterpolationKind kind() const { return kind_; }
  Eigen::Index num_nodes() const { return knots_.rows(); }
  Eigen::Index nu() const { return knots_.cols(); }
  double t_start() const { return knot_times_[0]; }
  double t_end() const { return knot_times_[knot_times_.size() - 1]; }
  double horizon() const { return t_end() - t_start(); }

 private:
  Knots knots_;
  Eigen::VectorXd knot_times_;
  InterpolationKind kind_;
};

// num_nodes times spaced uniformly over [t_start, t_start + horizon]; the last
// entry is exactly t_start + horizon.
inline Eigen::VectorXd uniform_knot_times(Eigen::Index num_nodes,
                                          double t_start, double horizon) {
  if (!(horizon > 0.0)) {
    throw InvalidArgument("horizon must be positive");
  }
  if (num_nodes < 2) {
    throw InvalidArgument("control plan needs at least 2 knots");
  }
  Eigen::VectorXd times(num_nodes);
  const double spacing = horizon / static_cast<double>(num_nodes - 1);
  for (Eigen::Index i = 0; i < num_nodes - 1; ++i) {
    times[i] = t_start + static_cast<double>(i) * spacing;
  }
  times[num_nodes - 1] = t_start + horizon;
  return times;
}

inline ControlPlan make_plan(Knots knots, double t_start, double horizon,
                             InterpolationKind kind) {
  Eigen::VectorXd times = uniform_knot_times(knots.rows(), t_start, horizon);
  return ControlPlan(std::move(knots), std::move(times), kind);
}

namespace detail {

// Index i of the segment [t_i, t_{i+1}) containing t, for t strictly inside
// the knot range.
inline Eigen::Index segment_index(const Eigen::VectorXd& times, double t) {
  const double* begin = times.data();
  const double* end = begin + times.size();
  const double* it = std::upper_bound(begin, end, t);
  return static_cast<Eigen::Index>(it - begin) - 1;
}

// Catmull-Rom tangent at knot i; endpoints use the one-sided difference.
inline Eigen::RowVectorXd catmull_rom_tangent(const ControlPlan& plan,
                                              Eigen::Index i) {
  const Knots& p = plan.knots();
  const Eigen::VectorXd& t = plan.knot_times();
  const Eigen::Index last = plan.num_nodes() - 1;
  const Eigen::Index lo = std::max<Eigen::Index>(i - 1, 0);
  const Eigen::Index hi = std::min<Eigen::Index>(i + 1, last);
  return (p.row(hi) - p.row(lo)) / (t[hi] - t[lo]);
}

}  // namespace detail

// Evaluates the spline at t. Times outside the knot range clamp to the
// boundary knots; every kind reproduces the knot rows exactly at knot times.
inline Eigen::VectorXd interpolate(const ControlPlan& plan, double t) {
  const Knots& knots = plan.knots();
  const Eigen::VectorXd& times = plan.knot_times();
  const Eigen::Index last = plan.num_nodes() - 1;

  if (!(t > times[0])) return knots.row(0).transpose();
  if (t >= times[last]) return knots.row(last).transpose();

  const Eigen::Index i = detail::segment_index(times, t);
  if (t == times[i]) return knots.row(i).transpose();

  switch (plan.kind()) {
    case InterpolationKind::kZeroOrderHold:
      return knots.row(i).transpose();
    case InterpolationKind::kLinear: {
      const double w = (t - times[i]) / (times[i + 1] - times[i]);
      return (knots.row(i) + w * (knots.row(i + 1) - knots.row(i))).transpose();
    }
    case InterpolationKind::kCubic: {
      const double h = times[i + 1] - times[i];
      const double s = (t - times[i]) / h;
      const double s2 = s * s;
      const double s3 = s2 * s;
      const double h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
      const double h10 = s3 - 2.0 * s2 + s;
      const double h01 = -2.0 * s3 + 3.0 * s2;
      const double h11 = s3 - s2;
      const Eigen::RowVectorXd m0 = detail::catmull_rom_tangent(plan, i);
      const Eigen::RowVectorXd m1 = detail::catmull_rom_tangent(plan, i + 1);
      return (h00 * knots.row(i) + h10 * h * m0 + h01 * knots.row(i + 1) +
              h11 * h * m1)
          .transpose();
    }
  }
  return knots.row(i).transpose();
}

// Resamples plan onto a fresh uniform grid over
// [new_t_start, new_t_start + horizon], keeping num_nodes, nu and kind.
inline ControlPlan shift_plan(const ControlPlan& plan, double new_t_start,
                              double horizon) {
  if (new_t_start < plan.t_start()) {
    throw InvalidArgument("shift_plan cannot move a plan backwards in time");
  }
  Eigen::VectorXd times =
      uniform_knot_times(plan.num_nodes(), new_t_start, horizon);
  Knots knots(plan.num_nodes(), plan.nu());
  for (Eigen::Index i = 0; i < times.size(); ++i) {
    knots.row(i) = interpolate(plan, times[i]).transpose();
  }
  return ControlPlan(std::move(knots), std::move(times), plan.kind());
}

}  // namespace sampc
