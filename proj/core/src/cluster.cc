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

#include "fragalloc/cluster.h"

#include <algorithm>
#include <utility>

#include "fragalloc/error.h"

namespace fragalloc::runtime {
namespace {

std::string Join(const std::set<rules::GroundAtom>& atoms) {
  std::string out;
  for (const rules::GroundAtom& a : atoms) {
    if (!out.empty()) out += " ";
    out += a.ToString();
  }
  return out;
}

}  // namespace

void PendingDeltas::Assert(const rules::GroundAtom& atom) {
  removals_.erase(atom);
  additions_.insert(atom);
}

void PendingDeltas::Retract(const rules::GroundAtom& atom) {
  additions_.erase(atom);
  removals_.insert(atom);
}

void PendingDeltas::Clear() {
  additions_.clear();
  removals_.clear();
}

Cluster::Cluster(cost::SystemModel model, const cost::Placement& placement,
                 const cost::AccessStats& initial_stats,
                 policy::CompiledPolicy policy, ClusterOptions options)
    : model_(std::move(model)),
      policy_(std::move(policy)),
      options_(std::move(options)) {
  if (options_.sync_period < 1) {
    throw InputError("sync_period must be >= 1");
  }
  for (const auto& [fragment, node] : placement) {
    if (!model_.has_fragment(fragment)) {
      throw InputError("placement names unknown fragment " +
                       fragment.ToString());
    }
    if (!model_.has_node(node)) {
      throw InputError("placement names unknown node " + node.ToString());
    }
  }
  for (const cost::FragmentSpec& f : model_.fragments) {
    if (!placement.count(f.id)) {
      throw InputError("fragment " + f.id.ToString() + " has no placement");
    }
  }

  rules::FactBase base =
      cost::EmitNetworkFacts(model_, initial_stats, placement);
  std::vector<cost::NodeId> ids = model_.nodes;
  std::sort(ids.begin(), ids.end());
  for (const cost::NodeId& id : ids) {
    NodeState node{id, base, {}, {}, true};
    for (const auto& [key, count] : initial_stats.frequencies()) {
      const auto& [i, j, k] = key;
      if (i == id) node.stats.SetFrequency(i, j, k, count);
    }
    for (const auto& [key, r] : initial_stats.explicit_requirements()) {
      if (key.first == id) node.stats.SetRequirement(key.first, key.second, r);
    }
    nodes_.push_back(std::move(node));
  }
}

const NodeState& Cluster::node(const cost::NodeId& id) const {
  for (const NodeState& n : nodes_) {
    if (n.id == id) return n;
  }
  throw InputError("unknown node " + id.ToString());
}

NodeState& Cluster::MutableNode(const cost::NodeId& id) {
  return const_cast<NodeState&>(node(id));
}

void Cluster::Trace(const std::string& line) const {
  if (options_.trace != nullptr) *options_.trace << line << "\n";
}

void Cluster::RecordQuery(const cost::NodeId& node_id,
                          const cost::FragmentId& fragment,
                          cost::QueryType type) {
  if (!model_.has_fragment(fragment)) {
    throw InputError("unknown fragment " + fragment.ToString());
  }
  NodeState& node = MutableNode(node_id);
  cost::AccessStats& stats = node.stats;
  double old_r = stats.requirement(node_id, fragment);
  if (stats.has_frequency(node_id, fragment, type)) {
    node.pending.Retract(cost::FreqFact(
        node_id, fragment, type, stats.frequency(node_id, fragment, type)));
  }
  stats.Add(node_id, fragment, type);
  node.pending.Assert(cost::FreqFact(node_id, fragment, type,
                                     stats.frequency(node_id, fragment, type)));
  if (!stats.has_explicit_requirement(node_id, fragment)) {
    node.pending.Retract(cost::ReqFact(node_id, fragment, old_r));
    node.pending.Assert(
        cost::ReqFact(node_id, fragment, stats.requirement(node_id, fragment)));
  }
}

SyncReport Cluster::Synchronize(int64_t round) {
  if (!IsSyncRound(round)) {
    throw InvariantError("round " + std::to_string(round) +
                         " is not a sync round");
  }
  SyncReport report;
  report.round = round;
  std::vector<SyncMessage> messages;
  for (const NodeState& n : nodes_) {
    if (n.pending.empty()) continue;
    messages.push_back(SyncMessage{
        n.id,
        round,
        {n.pending.additions().begin(), n.pending.additions().end()},
        {n.pending.removals().begin(), n.pending.removals().end()}});
    Trace("sync round " + std::to_string(round) + " from " + n.id.ToString() +
          ": +[" + Join(n.pending.additions()) + "] -[" +
          Join(n.pending.removals()) + "]");
  }

  std::set<rules::GroundAtom> conflicts;
  for (size_t a = 0; a < messages.size(); ++a) {
    for (size_t b = 0; b < messages.size(); ++b) {
      if (a == b) continue;
      for (const rules::GroundAtom& atom : messages[a].additions) {
        if (std::binary_search(messages[b].removals.begin(),
                               messages[b].removals.end(), atom)) {
          conflicts.insert(atom);
        }
      }
    }
  }
  for (SyncMessage& m : messages) {
    std::erase_if(m.additions, [&](const rules::GroundAtom& atom) {
      return conflicts.count(atom) > 0;
    });
    report.additions += m.additions.size();
    report.removals += m.removals.size();
  }
  for (const rules::GroundAtom& atom : conflicts) {
    Trace("sync round " + std::to_string(round) + " conflict on " +
          atom.ToString() + ": removal wins");
  }
  report.messages = messages.size();
  report.conflicts.assign(conflicts.begin(), conflicts.end());

  for (NodeState& n : nodes_) {
    for (const SyncMessage& m : messages) {
      rules::UpdateReport r =
          rules::UpdateFacts(n.base, m.additions, m.removals);
      if (r.changed()) n.dirty = true;
    }
    n.pending.Clear();
  }

  uint64_t first = nodes_.front().base.Hash();
  for (const NodeState& n : nodes_) {
    if (n.base.Hash() != first || !(n.base == nodes_.front().base)) {
      throw InvariantError("fact bases diverged after sync round " +
                           std::to_string(round) + " at node " +
                           n.id.ToString());
    }
  }
  return report;
}

RoundOutcome Cluster::AllocationRound(int64_t round) {
  RoundOutcome outcome;
  bool dirty = std::any_of(nodes_.begin(), nodes_.end(),
                           [](const NodeState& n) { return n.dirty; });
  if (!dirty) return outcome;

  std::vector<NodeState> snapshot = nodes_;
  try {
    outcome.evaluated = true;
    const NodeState& leader = nodes_.front();
    outcome.triggers =
        policy::ComputeTriggers(leader.base, policy_, options_.eval);
    Trace("evaluate round " + std::to_string(round) + " at " +
          leader.id.ToString() + ": " +
          std::to_string(outcome.triggers.size()) + " trigger(s)");
    if (options_.verify_agreement) {
      for (size_t i = 1; i < nodes_.size(); ++i) {
        auto local =
            policy::ComputeTriggers(nodes_[i].base, policy_, options_.eval);
        Trace("evaluate round " + std::to_string(round) + " at " +
              nodes_[i].id.ToString() + ": " + std::to_string(local.size()) +
              " trigger(s)");
        if (local != outcome.triggers) {
          throw InvariantError("node " + nodes_[i].id.ToString() +
                               " derived different triggers than node " +
                               leader.id.ToString() + " in round " +
                               std::to_string(round));
        }
      }
    }
    for (const policy::MoveTrigger& t : outcome.triggers) {
      Trace("trigger " + t.ToString());
    }
    for (NodeState& n : nodes_) n.dirty = false;

    outcome.moves =
        policy::ResolveConflicts(outcome.triggers, CurrentPlacement(),
                                 SyncedStats(), model_, &outcome.log);
    for (const std::string& line : outcome.log) Trace(line);
    for (const policy::Move& move : outcome.moves) {
      outcome.relocation_cost += ExecuteTransfer(move);
    }
  } catch (const Error&) {
    nodes_ = std::move(snapshot);
    throw;
  }
  return outcome;
}

double Cluster::ExecuteTransfer(const policy::Move& move) {
  const policy::MoveTrigger& t = move.trigger;
  rules::GroundAtom from = cost::PlacedFact(t.fragment, t.src);
  size_t holders =
      std::count_if(nodes_.begin(), nodes_.end(),
                    [&](const NodeState& n) { return n.base.Contains(from); });
  if (holders == 0) {
    throw InvariantError("fragment " + t.fragment.ToString() +
                         " not placed at src " + t.src.ToString());
  }
  if (holders != nodes_.size()) {
    throw InvariantError("placement mismatch for fragment " +
                         t.fragment.ToString() + " across nodes");
  }
  double charge = cost::RelocationCost(
      t.src, t.dst, model_.fragment(t.fragment), model_.links, model_.factors);
  rules::GroundAtom to = cost::PlacedFact(t.fragment, t.dst);
  for (NodeState& n : nodes_) {
    n.base.Erase(from);
    n.base.Insert(to);
    n.dirty = true;
  }
  Trace("transfer " + t.ToString() + " relocation cost " +
        rules::FormatNumber(charge));
  return charge;
}

cost::Placement Cluster::CurrentPlacement() const {
  return cost::PlacementFromFacts(nodes_.front().base, model_);
}

cost::AccessStats Cluster::CumulativeStats() const {
  cost::AccessStats total;
  for (const NodeState& n : nodes_) total.Merge(n.stats);
  return total;
}

cost::AccessStats Cluster::SyncedStats() const {
  return cost::StatsFromFacts(nodes_.front().base);
}

std::vector<uint64_t> Cluster::BaseHashes() const {
  std::vector<uint64_t> out;
  for (const NodeState& n : nodes_) out.push_back(n.base.Hash());
  return out;
}

}  // namespace fragalloc::runtime
