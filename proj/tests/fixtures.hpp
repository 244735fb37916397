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


// Shared test fixtures: the demo plugins and the widget-mapping config.

#pragma once

#include <string>
#include <vector>

#include "sampc/config.hpp"
#include "sampc/optimizer.hpp"
#include "sampc/optimizers/predictive_sampling.hpp"
#include "sampc/registry.hpp"
#include "sampc/task.hpp"

#include "my_plugins.hpp"

namespace sampc_test {

using namespace sampc;
using my_plugins::MyOpt;
using my_plugins::MyOptCfg;
using my_plugins::MyTask;
using my_plugins::MyTaskCfg;
using my_plugins::plugin_catalog;
using my_plugins::programmatic_registry;

struct DummyOptimizerConfig : OptimizerConfig {
  int num1 = 42;
  double num2 = 3.14;
  double num3 = 2.71;
  bool checkbox = true;
  Choice options{{"opt1", "opt2"}, "opt1"};
  ArrayField arr{{1.0, 2.0}, {"field1", "field2"}, {0.0, 1.0}, {10.0, 20.0}, {0.1, 0.2}};

  template <class V>
  void reflect(V& v) {
    OptimizerConfig::reflect(v);
    v.field("num1", num1);
    v.field("num2", num2, Slider{0.0, 10.0, 0.1});
    v.field("num3", num3);
    v.field("checkbox", checkbox);
    v.field("options", options);
    v.field("arr", arr);
  }
};

inline std::string fixture_dir() { return SAMPC_FIXTURE_DIR; }

}  // namespace sampc_test
