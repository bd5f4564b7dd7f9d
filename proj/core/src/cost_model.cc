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

#include "fragalloc/cost_model.h"

#include <algorithm>
#include <cmath>

#include "fragalloc/error.h"

namespace fragalloc::cost {
namespace {

using rules::GroundAtom;
using rules::Value;

constexpr std::string_view kAccessCostRule =
    "% Cost for node I to access fragment J at its current holder H.\n"
    "access_cost(I,J,T) :- placed(J,H), user_defined_parameter(I,H,U), "
    "size(J,S),\n"
    "                      reverse_bandwidth(I,H,W), delay(I,H,D), "
    "other(I,H,O),\n"
    "                      T is U*S*W*D*O.\n";

constexpr std::string_view kTransferCostRule =
    "transfer_cost(I,J,T) :- user_defined_parameter(I,J,U),\n"
    "                        size(J,S),\n"
    "                        reverse_bandwidth(I,J,W),\n"
    "                        delay(I,J,D),\n"
    "                        other(I,J,O),\n"
    "                        T is U*S*W*D*O.\n";

template <typename Map, typename Key>
double Lookup(const Map& map, const Key& key, double fallback) {
  auto it = map.find(key);
  return it == map.end() ? fallback : it->second;
}

Value TypeValue(QueryType type) {
  return Value::Symbol(std::string(QueryTypeName(type)));
}

}  // namespace

std::string_view QueryTypeName(QueryType type) {
  switch (type) {
    case QueryType::kSelect:
      return "se";
    case QueryType::kUpdate:
      return "up";
    case QueryType::kDelete:
      return "de";
  }
  return "?";
}

std::optional<QueryType> ParseQueryType(std::string_view name) {
  for (QueryType t : kQueryTypes) {
    if (QueryTypeName(t) == name) return t;
  }
  return std::nullopt;
}

void AccessStats::Add(const NodeId& node, const FragmentId& fragment,
                      QueryType type, double count) {
  frequencies_[{node, fragment, type}] += count;
}

void AccessStats::SetFrequency(const NodeId& node, const FragmentId& fragment,
                               QueryType type, double count) {
  frequencies_[{node, fragment, type}] = count;
}

void AccessStats::SetRequirement(const NodeId& node, const FragmentId& fragment,
                                 double r) {
  requirements_[{node, fragment}] = r;
}

double AccessStats::frequency(const NodeId& node, const FragmentId& fragment,
                              QueryType type) const {
  return Lookup(frequencies_, Key{node, fragment, type}, 0.0);
}

bool AccessStats::has_frequency(const NodeId& node, const FragmentId& fragment,
                                QueryType type) const {
  return frequencies_.count({node, fragment, type}) > 0;
}

double AccessStats::TotalFrequency(const NodeId& node,
                                   const FragmentId& fragment) const {
  double total = 0;
  for (QueryType t : kQueryTypes) total += frequency(node, fragment, t);
  return total;
}

double AccessStats::requirement(const NodeId& node,
                                const FragmentId& fragment) const {
  auto it = requirements_.find({node, fragment});
  return it == requirements_.end() ? TotalFrequency(node, fragment)
                                   : it->second;
}

bool AccessStats::has_explicit_requirement(const NodeId& node,
                                           const FragmentId& fragment) const {
  return requirements_.count({node, fragment}) > 0;
}

std::set<std::pair<NodeId, FragmentId>> AccessStats::Pairs() const {
  std::set<std::pair<NodeId, FragmentId>> out;
  for (const auto& [key, count] : frequencies_) {
    out.emplace(std::get<0>(key), std::get<1>(key));
  }
  for (const auto& [key, r] : requirements_) out.insert(key);
  return out;
}

void AccessStats::Merge(const AccessStats& other) {
  for (const auto& [key, count] : other.frequencies_)
    frequencies_[key] += count;
  for (const auto& [key, r] : other.requirements_) requirements_[key] = r;
}

double CostFactors::Gamma(const NodeId& i, const NodeId& j) const {
  return Lookup(gamma, std::make_pair(i, j), 1.0);
}

double CostFactors::Other(const NodeId& i, const NodeId& j) const {
  return Lookup(other, std::make_pair(i, j), 1.0);
}

double CostFactors::ExecWeight(const NodeId& i, const FragmentId& j,
                               QueryType k) const {
  return Lookup(exec_weight, std::make_tuple(i, j, k), 1.0);
}

const FragmentSpec& SystemModel::fragment(const FragmentId& id) const {
  auto it = std::lower_bound(
      fragments.begin(), fragments.end(), id,
      [](const FragmentSpec& f, const FragmentId& key) { return f.id < key; });
  if (it == fragments.end() || !(it->id == id)) {
    throw InputError("unknown fragment " + id.ToString());
  }
  return *it;
}

bool SystemModel::has_fragment(const FragmentId& id) const {
  return std::any_of(fragments.begin(), fragments.end(),
                     [&](const FragmentSpec& f) { return f.id == id; });
}

bool SystemModel::has_node(const NodeId& id) const {
  return std::find(nodes.begin(), nodes.end(), id) != nodes.end();
}

double ReverseBandwidth(double bandwidth) {
  return std::isinf(bandwidth) ? 0.0 : 1.0 / bandwidth;
}

double TransferCost(const NodeId& node, const NodeId& holder,
                    const FragmentSpec& fragment, const net::LinkTable& links,
                    const CostFactors& factors) {
  if (node == holder) return 0;
  const net::EffectiveLink& link = links.At(node, holder);
  return factors.Gamma(node, holder) * fragment.size *
         ReverseBandwidth(link.bandwidth) * link.delay *
         factors.Other(node, holder);
}

double TotalTransmissionCost(const Placement& placement,
                             const AccessStats& stats,
                             const SystemModel& model) {
  double total = 0;
  for (const auto& [node, fragment] : stats.Pairs()) {
    double r = stats.requirement(node, fragment);
    if (r == 0) continue;
    auto holder = placement.find(fragment);
    if (holder == placement.end()) {
      throw InputError("fragment " + fragment.ToString() + " is not placed");
    }
    total += r * TransferCost(node, holder->second, model.fragment(fragment),
                              model.links, model.factors);
  }
  return total;
}

std::vector<CapacityViolation> CheckCapacity(
    const Placement& placement, const std::vector<FragmentSpec>& fragments,
    const Capacity& capacity) {
  std::vector<const FragmentSpec*> ordered;
  for (const FragmentSpec& f : fragments) ordered.push_back(&f);
  std::sort(ordered.begin(), ordered.end(),
            [](const auto* a, const auto* b) { return a->id < b->id; });
  std::map<NodeId, double> load;
  for (const FragmentSpec* f : ordered) {
    auto it = placement.find(f->id);
    if (it != placement.end()) load[it->second] += f->units;
  }
  std::vector<CapacityViolation> out;
  for (const auto& [node, used] : load) {
    auto limit = capacity.find(node);
    if (limit != capacity.end() && used > limit->second) {
      out.push_back({node, used, limit->second});
    }
  }
  return out;
}

double ExecutionCost(const AccessStats& stats, const CostFactors& factors) {
  double total = 0;
  for (const auto& [key, count] : stats.frequencies()) {
    const auto& [i, j, k] = key;
    total += factors.ExecWeight(i, j, k) * count;
  }
  return total;
}

double RelocationCost(const NodeId& src, const NodeId& dst,
                      const FragmentSpec& fragment, const net::LinkTable& links,
                      const CostFactors& factors) {
  if (src == dst) return 0;
  const net::EffectiveLink& link = links.At(src, dst);
  return 1.0 * fragment.size * ReverseBandwidth(link.bandwidth) * link.delay *
         factors.Other(src, dst);
}

GroundAtom PlacedFact(const FragmentId& fragment, const NodeId& node) {
  return GroundAtom{"placed", {fragment, node}};
}

GroundAtom FreqFact(const NodeId& node, const FragmentId& fragment,
                    QueryType type, double count) {
  return GroundAtom{"freq",
                    {node, fragment, TypeValue(type), Value::Number(count)}};
}

GroundAtom ReqFact(const NodeId& node, const FragmentId& fragment, double r) {
  return GroundAtom{"req", {node, fragment, Value::Number(r)}};
}

rules::FactBase EmitNetworkFacts(const SystemModel& model,
                                 const AccessStats& stats,
                                 const Placement& placement) {
  rules::FactBase facts;
  auto num = [](double v) { return Value::Number(v); };
  for (const auto& [key, link] : model.links.links()) {
    const auto& [i, j] = key;
    facts.Insert({"delay", {i, j, num(link.delay)}});
    facts.Insert(
        {"reverse_bandwidth", {i, j, num(ReverseBandwidth(link.bandwidth))}});
    facts.Insert({"other", {i, j, num(model.factors.Other(i, j))}});
    facts.Insert(
        {"user_defined_parameter", {i, j, num(model.factors.Gamma(i, j))}});
  }
  for (const FragmentSpec& f : model.fragments) {
    facts.Insert({"size", {f.id, num(f.size)}});
    facts.Insert({"units", {f.id, num(f.units)}});
    for (const NodeId& node : model.nodes) {
      facts.Insert(ReqFact(node, f.id, stats.requirement(node, f.id)));
      for (QueryType k : kQueryTypes) {
        facts.Insert({"exec_weight",
                      {node, f.id, TypeValue(k),
                       num(model.factors.ExecWeight(node, f.id, k))}});
      }
    }
  }
  for (const auto& [key, count] : stats.frequencies()) {
    const auto& [i, j, k] = key;
    facts.Insert(FreqFact(i, j, k, count));
  }
  for (const auto& [fragment, node] : placement) {
    facts.Insert(PlacedFact(fragment, node));
  }
  for (const auto& [a, b] : model.adjacency) {
    facts.Insert({"adjacent", {a, b}});
  }
  for (const auto& [node, limit] : model.capacity) {
    facts.Insert({"capacity", {node, num(limit)}});
  }
  return facts;
}

std::string_view AccessCostRuleText() { return kAccessCostRule; }

std::string_view TransferCostRuleText() { return kTransferCostRule; }

Placement PlacementFromFacts(const rules::FactBase& facts,
                             const SystemModel& model) {
  Placement placement;
  if (const rules::Relation* rel = facts.Find("placed")) {
    for (const rules::Tuple& row : rel->rows()) {
      if (!placement.emplace(row[0], row[1]).second) {
        throw InvariantError("fragment " + row[0].ToString() +
                             " is placed at more than one node");
      }
    }
  }
  for (const FragmentSpec& f : model.fragments) {
    if (!placement.count(f.id)) {
      throw InvariantError("fragment " + f.id.ToString() + " is not placed");
    }
  }
  return placement;
}

AccessStats StatsFromFacts(const rules::FactBase& facts) {
  AccessStats stats;
  if (const rules::Relation* rel = facts.Find("freq")) {
    for (const rules::Tuple& row : rel->rows()) {
      auto type =
          row[2].is_symbol() ? ParseQueryType(row[2].symbol()) : std::nullopt;
      if (!type || !row[3].is_number()) {
        throw InvariantError("malformed freq fact freq(" + row[0].ToString() +
                             "," + row[1].ToString() + "," + row[2].ToString() +
                             "," + row[3].ToString() + ")");
      }
      stats.SetFrequency(row[0], row[1], *type, row[3].number());
    }
  }
  if (const rules::Relation* rel = facts.Find("req")) {
    for (const rules::Tuple& row : rel->rows()) {
      if (!row[2].is_number()) continue;
      if (stats.requirement(row[0], row[1]) != row[2].number()) {
        stats.SetRequirement(row[0], row[1], row[2].number());
      }
    }
  }
  return stats;
}

}  // namespace fragalloc::cost
