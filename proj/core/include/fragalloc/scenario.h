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

#ifndef FRAGALLOC_SCENARIO_H_
#define FRAGALLOC_SCENARIO_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "fragalloc/cost_model.h"
#include "fragalloc/network.h"
#include "fragalloc/policy.h"

namespace fragalloc::sim {

struct WorkloadEntry {
  cost::NodeId node;
  cost::FragmentId fragment;
  cost::QueryType type = cost::QueryType::kSelect;
  double rate = 0;  // events per round
};

// Either a builtin policy name or a rule file; exactly one is set.
struct PolicyRef {
  std::string name;
  std::string file;  // resolved against the scenario's directory
};

struct Scenario {
  net::TopologySpec topology;
  cost::SystemModel model;
  cost::Placement placement;
  cost::AccessStats initial_stats;
  std::vector<WorkloadEntry> workload;  // sorted by (node, fragment, type)
  PolicyRef policy;
  int64_t rounds = 1;
  int64_t sync_period = 1;
};

// Parses and validates a scenario document (JSON). Relative policy file
// paths are resolved against `base_dir`. Errors are InputErrors prefixed
// with the path of the offending field, e.g. "workload[0].fragment: ...".
Scenario ParseScenario(std::string_view json_text,
                       const std::string& base_dir = ".");
Scenario LoadScenario(const std::string& path);

// The builtin or file policy the scenario names.
policy::PolicyRuleSet ResolvePolicy(const PolicyRef& ref);

struct QueryEvent {
  int64_t round = 0;
  cost::NodeId node;
  cost::FragmentId fragment;
  cost::QueryType type = cost::QueryType::kSelect;

  friend bool operator==(const QueryEvent&, const QueryEvent&) = default;
};

// Events of `round`: each workload entry contributes
// floor(acc + rate) - floor(acc) events with acc = round * rate, so counts
// are integral and average to the rate. acc + rate is computed as
// (round + 1) * rate.
// Ordered by (node, fragment, type).
std::vector<QueryEvent> GenerateWorkload(const Scenario& scenario,
                                         int64_t round);

}  // namespace fragalloc::sim

#endif  // FRAGALLOC_SCENARIO_H_
