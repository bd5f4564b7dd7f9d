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

#ifndef FRAGALLOC_COST_MODEL_H_
#define FRAGALLOC_COST_MODEL_H_

#include <array>
#include <map>
#include <optional>
#include <set>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "fragalloc/network.h"
#include "fragalloc/rules/fact_base.h"
#include "fragalloc/rules/term.h"

namespace fragalloc::cost {

using NodeId = rules::Value;
using FragmentId = rules::Value;

enum class QueryType { kSelect, kUpdate, kDelete };

inline constexpr std::array<QueryType, 3> kQueryTypes = {
    QueryType::kSelect, QueryType::kUpdate, QueryType::kDelete};

// "se", "up", "de".
std::string_view QueryTypeName(QueryType type);
std::optional<QueryType> ParseQueryType(std::string_view name);

struct FragmentSpec {
  FragmentId id;
  double size = 1;   // megabytes; drives transfer cost
  double units = 1;  // capacity units; drives the capacity check
};

// Per-query-type access counters f(i,j,k) and access frequencies r(i,j).
// r defaults to the sum of f over query types unless set explicitly.
class AccessStats {
 public:
  using Key = std::tuple<NodeId, FragmentId, QueryType>;

  void Add(const NodeId& node, const FragmentId& fragment, QueryType type,
           double count = 1);
  void SetFrequency(const NodeId& node, const FragmentId& fragment,
                    QueryType type, double count);
  void SetRequirement(const NodeId& node, const FragmentId& fragment, double r);

  // Returns 0 for counters never touched.
  double frequency(const NodeId& node, const FragmentId& fragment,
                   QueryType type) const;
  bool has_frequency(const NodeId& node, const FragmentId& fragment,
                     QueryType type) const;
  double TotalFrequency(const NodeId& node, const FragmentId& fragment) const;
  double requirement(const NodeId& node, const FragmentId& fragment) const;
  bool has_explicit_requirement(const NodeId& node,
                                const FragmentId& fragment) const;

  const std::map<Key, double>& frequencies() const { return frequencies_; }
  const std::map<std::pair<NodeId, FragmentId>, double>& explicit_requirements()
      const {
    return requirements_;
  }

  // (node, fragment) pairs with any counter or explicit requirement.
  std::set<std::pair<NodeId, FragmentId>> Pairs() const;

  // Adds every counter of `other`; explicit requirements are copied.
  void Merge(const AccessStats& other);

  friend bool operator==(const AccessStats&, const AccessStats&) = default;

 private:
  std::map<Key, double> frequencies_;
  std::map<std::pair<NodeId, FragmentId>, double> requirements_;
};

// User-defined factor gamma(i,j), communication expense other(i,j) and
// execution weight e(i,j,k); all default to 1.
struct CostFactors {
  std::map<std::pair<NodeId, NodeId>, double> gamma;
  std::map<std::pair<NodeId, NodeId>, double> other;
  std::map<std::tuple<NodeId, FragmentId, QueryType>, double> exec_weight;

  double Gamma(const NodeId& i, const NodeId& j) const;
  double Other(const NodeId& i, const NodeId& j) const;
  double ExecWeight(const NodeId& i, const FragmentId& j, QueryType k) const;
};

// Fragment -> holder node.
using Placement = std::map<FragmentId, NodeId>;
// Node -> capacity in fragment units. Nodes absent from the map are
// unconstrained.
using Capacity = std::map<NodeId, double>;

// Static description of the cluster every cost computation runs against.
struct SystemModel {
  std::vector<NodeId> nodes;  // sites, ascending
  net::LinkTable links;
  std::vector<FragmentSpec> fragments;  // ascending by id
  CostFactors factors;
  Capacity capacity;
  std::set<std::pair<NodeId, NodeId>> adjacency;

  // Throws InputError for an unknown id.
  const FragmentSpec& fragment(const FragmentId& id) const;
  bool has_fragment(const FragmentId& id) const;
  bool has_node(const NodeId& id) const;
};

// 1/bandwidth, with infinite bandwidth encoded as 0.
double ReverseBandwidth(double bandwidth);

// Cost for `node` to access `fragment` held at `holder`:
// gamma * size * (1/bandwidth) * delay * other, multiplied left to right
// exactly as the access_cost rule does. Zero when node == holder. Throws
// InputError when the pair is disconnected.
double TransferCost(const NodeId& node, const NodeId& holder,
                    const FragmentSpec& fragment, const net::LinkTable& links,
                    const CostFactors& factors);

// Sum over accessed (i, j) of r(i,j) * TransferCost(i, placement[j], j).
double TotalTransmissionCost(const Placement& placement,
                             const AccessStats& stats,
                             const SystemModel& model);

struct CapacityViolation {
  NodeId node;
  double load = 0;
  double limit = 0;
  friend bool operator==(const CapacityViolation&,
                         const CapacityViolation&) = default;
};

// Nodes whose placed fragment units exceed their capacity, ascending.
std::vector<CapacityViolation> CheckCapacity(
    const Placement& placement, const std::vector<FragmentSpec>& fragments,
    const Capacity& capacity);

// Sum over (i, j, k) of e(i,j,k) * f(i,j,k).
double ExecutionCost(const AccessStats& stats, const CostFactors& factors);

// Charge for shipping `fragment` from `src` to `dst`: the transfer cost
// product with gamma fixed at 1.
double RelocationCost(const NodeId& src, const NodeId& dst,
                      const FragmentSpec& fragment, const net::LinkTable& links,
                      const CostFactors& factors);

// Ground facts describing the model, statistics and placement:
// delay/3, reverse_bandwidth/3, other/3, user_defined_parameter/3 per
// link; size/2, units/2 per fragment; freq/4 per counter; req/3 for every
// node x fragment; exec_weight/4 for every node x fragment x type;
// placed/2; adjacent/2; capacity/2.
rules::FactBase EmitNetworkFacts(const SystemModel& model,
                                 const AccessStats& stats,
                                 const Placement& placement);

// Rule deriving access_cost(I,J,T): the transfer cost for node I to reach
// fragment J at its current holder. Policies are evaluated with it.
std::string_view AccessCostRuleText();

// The plain transfer-cost rule transfer_cost(I,J,T) over a node pair, with
// J also naming the fragment whose size is used.
std::string_view TransferCostRuleText();

rules::GroundAtom PlacedFact(const FragmentId& fragment, const NodeId& node);
rules::GroundAtom FreqFact(const NodeId& node, const FragmentId& fragment,
                           QueryType type, double count);
rules::GroundAtom ReqFact(const NodeId& node, const FragmentId& fragment,
                          double r);

// Reads placed/2 back from a fact base. Throws InvariantError unless every
// fragment of `model` has exactly one holder.
Placement PlacementFromFacts(const rules::FactBase& facts,
                             const SystemModel& model);

// Reads freq/4 and req/3 back from a fact base. Requirements become
// explicit only where they differ from the counter sum.
AccessStats StatsFromFacts(const rules::FactBase& facts);

}  // namespace fragalloc::cost

#endif  // FRAGALLOC_COST_MODEL_H_
