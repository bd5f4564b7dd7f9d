// Copyright 2026 The Fragalloc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "scenarios.h"

#include <string>

namespace fragalloc::testing {
namespace {

std::string Build(const std::string& policy_json, int rounds, int sync_period) {
  return R"({
  "topology": {
    "sites": [1, 2, 3],
    "edges": [
      {"from": 1, "to": 2, "delay": 1, "bandwidth": 2},
      {"from": 1, "to": 3, "delay": 4, "bandwidth": 1},
      {"from": 2, "to": 3, "delay": 1, "bandwidth": 2}
    ]
  },
  "fragments": [{"id": 7, "size": 1}],
  "placement": {"7": 1},
  "workload": [{"node": 2, "fragment": 7, "type": "se", "rate": 2}],
  "adjacency": [[2, 3]],
  "policy": )" +
         policy_json + ",\n  \"rounds\": " + std::to_string(rounds) +
         ",\n  \"sync_period\": " + std::to_string(sync_period) + "\n}\n";
}

}  // namespace

std::string EngineeredScenarioJson(std::string_view policy, int rounds,
                                   int sync_period) {
  return Build("\"" + std::string(policy) + "\"", rounds, sync_period);
}

}  // namespace fragalloc::testing
