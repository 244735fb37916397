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


// Registers a custom task and optimizer, sets task-specific overrides, then
// hands over to the regular command line:
//
//   my_stack --headless --duration 5
//   my_stack -cp tests/fixtures -cn example      (same setup, from YAML)
//   my_stack benchmark --task my_task --optimizer my_opt

#include "my_plugins.hpp"
#include "sampc/cli.hpp"

int main(int argc, char** argv) {
  return sampc::cli::run_cli(argc, argv, my_plugins::programmatic_registry(),
                             my_plugins::plugin_catalog());
}
