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

#ifndef FRAGALLOC_TESTS_SUPPORT_INSTANCES_H_
#define FRAGALLOC_TESTS_SUPPORT_INSTANCES_H_

#include <functional>
#include <vector>

#include "fragalloc/cost_model.h"
#include "fragalloc/policy.h"
#include "oracles.h"

namespace fragalloc::testing {

// Two or three sites. Effective transfer costs for a size-1 fragment:
// t(1,2) = 0.5, t(1,3) = 3, t(2,3) = 0.5.
struct SmallCluster {
  std::vector<cost::NodeId> nodes;
  net::LinkTable links;
};

SmallCluster MakeSmallCluster(int node_count);

// Calls `visit` with every placement of `fragment_count` fragments (ids 7,
// 8, sizes 1, 2) over the cluster and every assignment of select counts
// 0..4 to each (node, fragment) pair. With `explicit_r` each pair also gets
// an explicit requirement 0..4 instead of the counter sum.
void ForEachTriggerInstance(
    const SmallCluster& cluster, int fragment_count, bool explicit_r,
    const std::function<void(const TriggerInstance&)>& visit);

cost::SystemModel ModelOf(const TriggerInstance& in);

// Triggers the compiled policy derives from the instance's emitted facts.
std::vector<policy::MoveTrigger> EngineTriggers(
    const TriggerInstance& in, const policy::CompiledPolicy& policy);

// Sets every ordered pair of distinct nodes adjacent.
void MakeCompletelyAdjacent(TriggerInstance& in);

}  // namespace fragalloc::testing

#endif  // FRAGALLOC_TESTS_SUPPORT_INSTANCES_H_
