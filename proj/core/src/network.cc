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

#include "fragalloc/network.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "fragalloc/error.h"

namespace fragalloc::net {
namespace {

void CheckElement(const NetworkElement& e, const char* kind) {
  if (!(e.delay >= 0) || !std::isfinite(e.delay)) {
    throw InputError(std::string(kind) + " " + e.id.ToString() +
                     ": delay must be a finite number >= 0");
  }
  if (!(e.bandwidth > 0)) {
    throw InputError(std::string(kind) + " " + e.id.ToString() +
                     ": bandwidth must be > 0");
  }
}

struct Label {
  double delay = 0;
  std::vector<ElementId> path;
  double bandwidth = kInfiniteBandwidth;

  bool Beats(const Label& other) const {
    if (delay != other.delay) return delay < other.delay;
    return path < other.path;
  }
};

}  // namespace

const NetworkElement* NetworkGraph::Find(const ElementId& id) const {
  auto it = element_index_.find(id);
  return it == element_index_.end() ? nullptr : &elements_[it->second];
}

bool NetworkGraph::IsSite(const ElementId& id) const {
  const NetworkElement* e = Find(id);
  return e != nullptr && e->kind == ElementKind::kSite;
}

const std::vector<NetworkGraph::Neighbor>& NetworkGraph::Neighbors(
    const ElementId& id) const {
  static const std::vector<Neighbor> kNone;
  auto it = adjacency_.find(id);
  return it == adjacency_.end() ? kNone : it->second;
}

NetworkGraph BuildGraph(TopologySpec spec) {
  if (spec.sites.empty()) throw InputError("topology has no sites");
  NetworkGraph g;
  for (NetworkElement& s : spec.sites) s.kind = ElementKind::kSite;
  for (NetworkElement& r : spec.routers) r.kind = ElementKind::kRouter;
  for (const auto* group : {&spec.sites, &spec.routers}) {
    for (const NetworkElement& e : *group) {
      CheckElement(e, e.kind == ElementKind::kSite ? "site" : "router");
      if (!g.element_index_.emplace(e.id, g.elements_.size()).second) {
        throw InputError("duplicate id " + e.id.ToString());
      }
      g.elements_.push_back(e);
    }
  }
  std::set<std::pair<ElementId, ElementId>> seen;
  for (size_t i = 0; i < spec.edges.size(); ++i) {
    const Edge& e = spec.edges[i];
    std::string name = "edge " + e.a.ToString() + "-" + e.b.ToString();
    for (const ElementId* end : {&e.a, &e.b}) {
      if (!g.element_index_.count(*end)) {
        throw InputError(name + ": unknown endpoint " + end->ToString());
      }
    }
    if (e.a == e.b) throw InputError(name + ": self-loop");
    if (!(e.delay >= 0) || !std::isfinite(e.delay)) {
      throw InputError(name + ": delay must be a finite number >= 0");
    }
    if (!(e.bandwidth > 0)) throw InputError(name + ": bandwidth must be > 0");
    auto key = std::minmax(e.a, e.b);
    if (!seen.emplace(key.first, key.second).second) {
      throw InputError(name + ": more than one edge between these endpoints");
    }
    g.adjacency_[e.a].push_back({e.b, i});
    g.adjacency_[e.b].push_back({e.a, i});
  }
  for (auto& [id, list] : g.adjacency_) {
    std::sort(list.begin(), list.end(),
              [](const auto& x, const auto& y) { return x.id < y.id; });
  }
  g.sites_ = std::move(spec.sites);
  g.routers_ = std::move(spec.routers);
  g.edges_ = std::move(spec.edges);
  return g;
}

void LinkTable::Put(EffectiveLink link) {
  auto key = std::make_pair(link.from, link.to);
  links_[key] = std::move(link);
}

const EffectiveLink* LinkTable::Find(const ElementId& from,
                                     const ElementId& to) const {
  auto it = links_.find({from, to});
  return it == links_.end() ? nullptr : &it->second;
}

const EffectiveLink& LinkTable::At(const ElementId& from,
                                   const ElementId& to) const {
  const EffectiveLink* link = Find(from, to);
  if (link == nullptr) {
    throw InputError("no link between nodes " + from.ToString() + " and " +
                     to.ToString());
  }
  return *link;
}

LinkTable ContractRouters(const NetworkGraph& graph) {
  LinkTable table;
  for (const NetworkElement& source : graph.sites()) {
    std::map<ElementId, Label> best;
    std::set<ElementId> settled;
    // Ordered by (delay, path); the path's last element is the node.
    std::set<std::pair<double, std::vector<ElementId>>> frontier;
    best[source.id] = Label{0, {source.id}, kInfiniteBandwidth};
    frontier.emplace(0.0, std::vector<ElementId>{source.id});

    while (!frontier.empty()) {
      auto [delay, path] = *frontier.begin();
      frontier.erase(frontier.begin());
      const ElementId& node = path.back();
      if (!settled.insert(node).second) continue;
      const Label& label = best[node];
      const NetworkElement* element = graph.Find(node);
      if (element->kind == ElementKind::kSite && !(node == source.id)) {
        // Each pair is resolved from its smaller endpoint and mirrored, so
        // the table is symmetric even under floating-point rounding.
        if (source.id < node) {
          std::vector<ElementId> reversed(label.path.rbegin(),
                                          label.path.rend());
          table.Put(EffectiveLink{source.id, node, label.delay, label.bandwidth,
                                  label.path});
          table.Put(EffectiveLink{node, source.id, label.delay, label.bandwidth,
                                  std::move(reversed)});
        }
        continue;  // sites never relay
      }
      double base = label.delay;
      if (element->kind == ElementKind::kRouter) base = base + element->delay;
      for (const auto& [next, edge_index] : graph.Neighbors(node)) {
        if (settled.count(next)) continue;
        const Edge& edge = graph.edges()[edge_index];
        Label candidate{base + edge.delay, label.path,
                        std::min(label.bandwidth, edge.bandwidth)};
        candidate.path.push_back(next);
        auto it = best.find(next);
        if (it != best.end()) {
          if (!candidate.Beats(it->second)) continue;
          frontier.erase({it->second.delay, it->second.path});
        }
        frontier.emplace(candidate.delay, candidate.path);
        best[next] = std::move(candidate);
      }
    }
    table.Put(EffectiveLink{
        source.id, source.id, 0, kInfiniteBandwidth, {source.id}});
  }
  return table;
}

std::vector<std::pair<ElementId, ElementId>> DirectSitePairs(
    const NetworkGraph& graph) {
  std::set<std::pair<ElementId, ElementId>> pairs;
  for (const Edge& e : graph.edges()) {
    if (graph.IsSite(e.a) && graph.IsSite(e.b)) {
      pairs.emplace(e.a, e.b);
      pairs.emplace(e.b, e.a);
    }
  }
  return {pairs.begin(), pairs.end()};
}

}  // namespace fragalloc::net
