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

#ifndef FRAGALLOC_CLUSTER_H_
#define FRAGALLOC_CLUSTER_H_

#include <cstdint>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "fragalloc/cost_model.h"
#include "fragalloc/policy.h"
#include "fragalloc/rules/engine.h"
#include "fragalloc/rules/fact_base.h"

namespace fragalloc::runtime {

// Fact changes staged by a node between synchronizations. The latest
// operation on an atom wins, so additions and removals stay disjoint.
class PendingDeltas {
 public:
  void Assert(const rules::GroundAtom& atom);
  void Retract(const rules::GroundAtom& atom);
  void Clear();

  bool empty() const { return additions_.empty() && removals_.empty(); }
  const std::set<rules::GroundAtom>& additions() const { return additions_; }
  const std::set<rules::GroundAtom>& removals() const { return removals_; }

 private:
  std::set<rules::GroundAtom> additions_;
  std::set<rules::GroundAtom> removals_;
};

struct NodeState {
  cost::NodeId id;
  rules::FactBase base;
  PendingDeltas pending;
  // Counters and explicit requirements owned by this node.
  cost::AccessStats stats;
  // Set whenever an applied update changed `base`; cleared by evaluation.
  bool dirty = true;
};

struct SyncMessage {
  cost::NodeId from;
  int64_t round = 0;
  std::vector<rules::GroundAtom> additions;
  std::vector<rules::GroundAtom> removals;
};

struct SyncReport {
  int64_t round = 0;
  size_t messages = 0;
  size_t additions = 0;
  size_t removals = 0;
  // Atoms one node added while another removed them; the removal won.
  std::vector<rules::GroundAtom> conflicts;
};

struct RoundOutcome {
  bool evaluated = false;
  std::vector<policy::MoveTrigger> triggers;
  std::vector<policy::Move> moves;
  double relocation_cost = 0;
  std::vector<std::string> log;
};

struct ClusterOptions {
  int64_t sync_period = 1;
  // Evaluate the policy on every node and require identical trigger lists;
  // otherwise only the lowest-id node evaluates.
  bool verify_agreement = false;
  // Receives one debug line per sync message, evaluation, trigger and
  // transfer when non-null.
  std::ostream* trace = nullptr;
  rules::EvalOptions eval;
};

// Nodes of the simulated cluster, stepped in ascending id order. Every
// node starts from the same fact base; afterwards bases only change
// through synchronization and transfers, which keeps them identical at
// every sync boundary.
class Cluster {
 public:
  // Throws InputError when `placement` is not total over the model's
  // fragments or names unknown nodes, or when sync_period < 1.
  Cluster(cost::SystemModel model, const cost::Placement& placement,
          const cost::AccessStats& initial_stats, policy::CompiledPolicy policy,
          ClusterOptions options = {});

  const cost::SystemModel& model() const { return model_; }
  const std::vector<NodeState>& nodes() const { return nodes_; }
  const NodeState& node(const cost::NodeId& id) const;
  const policy::CompiledPolicy& policy() const { return policy_; }
  const ClusterOptions& options() const { return options_; }

  bool IsSyncRound(int64_t round) const {
    return round % options_.sync_period == 0;
  }

  // Counts one query at `node` and stages the changed freq/4 (and req/3,
  // unless explicitly configured) facts. Throws InputError for unknown
  // nodes or fragments.
  void RecordQuery(const cost::NodeId& node, const cost::FragmentId& fragment,
                   cost::QueryType type);

  // All-to-all exchange of pending deltas. Throws InvariantError when
  // `round` is not a sync round or when bases diverge afterwards.
  SyncReport Synchronize(int64_t round);

  // Evaluates the policy if any fact changed since the last evaluation and
  // executes the selected moves. On an engine error every node is restored
  // to its state before the call and the error is rethrown.
  RoundOutcome AllocationRound(int64_t round);

  // Moves the fragment on every node and returns the relocation charge.
  // Throws InvariantError("... not placed at src ...") when no node holds it
  // at src, or on a placement mismatch between nodes.
  double ExecuteTransfer(const policy::Move& move);

  // Placement recorded in the lowest-id node's base.
  cost::Placement CurrentPlacement() const;
  // Every node's counters, synchronized or not.
  cost::AccessStats CumulativeStats() const;
  // Statistics as recorded in the lowest-id node's base.
  cost::AccessStats SyncedStats() const;
  // Fact-base hash per node, ascending node id.
  std::vector<uint64_t> BaseHashes() const;

 private:
  NodeState& MutableNode(const cost::NodeId& id);
  void Trace(const std::string& line) const;

  cost::SystemModel model_;
  policy::CompiledPolicy policy_;
  ClusterOptions options_;
  std::vector<NodeState> nodes_;
};

}  // namespace fragalloc::runtime

#endif  // FRAGALLOC_CLUSTER_H_
