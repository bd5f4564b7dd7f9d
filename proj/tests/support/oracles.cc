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

#include "oracles.h"

#include <algorithm>
#include <cmath>
#include <functional>

namespace fragalloc::testing {
namespace {

struct Element {
  bool site = false;
  double delay = 0;
};

struct Arc {
  net::ElementId to;
  double delay = 0;
  double bandwidth = 0;
};

}  // namespace

std::map<std::pair<net::ElementId, net::ElementId>, OracleLink> BruteForceLinks(
    const net::TopologySpec& spec) {
  std::map<net::ElementId, Element> elements;
  for (const auto& s : spec.sites) elements[s.id] = {true, s.delay};
  for (const auto& r : spec.routers) elements[r.id] = {false, r.delay};
  std::map<net::ElementId, std::vector<Arc>> arcs;
  for (const net::Edge& e : spec.edges) {
    arcs[e.a].push_back({e.b, e.delay, e.bandwidth});
    arcs[e.b].push_back({e.a, e.delay, e.bandwidth});
  }

  std::map<std::pair<net::ElementId, net::ElementId>, OracleLink> best;
  for (const auto& source : spec.sites) {
    std::vector<net::ElementId> path{source.id};
    std::set<net::ElementId> on_path{source.id};
    std::function<void(double, double)> walk = [&](double delay,
                                                   double bandwidth) {
      const net::ElementId here = path.back();
      for (const Arc& arc : arcs[here]) {
        if (on_path.count(arc.to)) continue;
        double d = delay;
        if (!elements[here].site) d += elements[here].delay;
        d += arc.delay;
        double w = std::min(bandwidth, arc.bandwidth);
        path.push_back(arc.to);
        if (elements[arc.to].site) {
          if (source.id < arc.to) {
            auto key = std::make_pair(source.id, arc.to);
            auto it = best.find(key);
            if (it == best.end() || d < it->second.delay ||
                (d == it->second.delay && path < it->second.path)) {
              best[key] = OracleLink{d, w, path};
            }
          }
        } else {
          on_path.insert(arc.to);
          walk(d, w);
          on_path.erase(arc.to);
        }
        path.pop_back();
      }
    };
    walk(0, net::kInfiniteBandwidth);
  }

  std::map<std::pair<net::ElementId, net::ElementId>, OracleLink> out = best;
  for (const auto& [key, link] : best) {
    OracleLink mirrored = link;
    std::reverse(mirrored.path.begin(), mirrored.path.end());
    out[{key.second, key.first}] = mirrored;
  }
  return out;
}

std::vector<policy::MoveTrigger> BruteForceTriggers(const TriggerInstance& in,
                                                    bool require_adjacency) {
  auto t = [&](const cost::NodeId& node, const cost::NodeId& holder,
               const cost::FragmentSpec& fragment) -> double {
    if (node == holder) return 0;
    const net::EffectiveLink& link = in.links.At(node, holder);
    double reverse = std::isinf(link.bandwidth) ? 0 : 1 / link.bandwidth;
    auto lookup = [](const auto& map, const auto& key) {
      auto it = map.find(key);
      return it == map.end() ? 1.0 : it->second;
    };
    return lookup(in.factors.gamma, std::make_pair(node, holder)) *
           fragment.size * reverse * link.delay *
           lookup(in.factors.other, std::make_pair(node, holder));
  };
  auto total = [&](const cost::NodeId& i, const cost::FragmentId& j) {
    double sum = 0;
    for (cost::QueryType k : cost::kQueryTypes)
      sum += in.stats.frequency(i, j, k);
    return sum;
  };

  std::vector<policy::MoveTrigger> out;
  for (const cost::FragmentSpec& f : in.fragments) {
    const cost::NodeId& holder = in.placement.at(f.id);
    double f1 = total(holder, f.id);
    double r1 = in.stats.requirement(holder, f.id) * t(holder, holder, f);
    if (!(f1 <= r1)) continue;
    for (const cost::NodeId& other : in.nodes) {
      if (other == holder) continue;
      if (require_adjacency && !in.adjacency.count({holder, other})) continue;
      double f2 = total(other, f.id);
      double r2 = in.stats.requirement(other, f.id) * t(other, holder, f);
      if (f2 > r2) out.push_back({holder, other, f.id});
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace fragalloc::testing
