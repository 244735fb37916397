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

#include <Eigen/Dense>

#include "sampc/error.hpp"

namespace sampc {

// sqrt(x^2 + delta^2) - delta, elementwise.
template <class Derived>
Eigen::ArrayXXd smooth_l1_norm(const Eigen::ArrayBase<Derived>& x,
                               double delta) {
  if (!(delta > 0.0)) throw InvalidArgument("smooth_l1_norm requires delta > 0");
  return (x.square() + delta * delta).sqrt() - delta;
}

inline double smooth_l1_norm(double x, double delta) {
  if (!(delta > 0.0)) throw InvalidArgument("smooth_l1_norm requires delta > 0");
  return std::sqrt(x * x + delta * delta) - delta;
}

// 0.5 * x^2, elementwise.
template <class Derived>
Eigen::ArrayXXd quadratic_norm(const Eigen::ArrayBase<Derived>& x) {
  return 0.5 * x.square();
}

inline double quadratic_norm(double x) { return 0.5 * x * x; }

}  // namespace sampc
