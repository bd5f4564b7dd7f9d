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

#ifndef FRAGALLOC_NETWORK_H_
#define FRAGALLOC_NETWORK_H_

#include <limits>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "fragalloc/rules/term.h"

namespace fragalloc::net {

// Element ids are ground terms: numeric ids ("5") or identifiers ("r1").
using ElementId = rules::Value;

inline constexpr double kInfiniteBandwidth =
    std::numeric_limits<double>::infinity();

enum class ElementKind { kSite, kRouter };

struct NetworkElement {
  ElementId id;
  ElementKind kind = ElementKind::kSite;
  double delay = 0;                       // milliseconds
  double bandwidth = kInfiniteBandwidth;  // megabytes per second
};

struct Edge {
  ElementId a;
  ElementId b;
  double delay = 0;
  double bandwidth = kInfiniteBandwidth;
};

struct TopologySpec {
  std::vector<NetworkElement> sites;
  std::vector<NetworkElement> routers;
  std::vector<Edge> edges;
};

// Validated topology. Element ids are unique across sites and routers so
// that edge endpoints are unambiguous.
class NetworkGraph {
 public:
  const std::vector<NetworkElement>& sites() const { return sites_; }
  const std::vector<NetworkElement>& routers() const { return routers_; }
  const std::vector<Edge>& edges() const { return edges_; }

  const NetworkElement* Find(const ElementId& id) const;
  bool IsSite(const ElementId& id) const;

  struct Neighbor {
    ElementId id;
    size_t edge;  // index into edges()
  };
  // Neighbors of `id` sorted by id.
  const std::vector<Neighbor>& Neighbors(const ElementId& id) const;

 private:
  friend NetworkGraph BuildGraph(TopologySpec spec);

  std::vector<NetworkElement> sites_;
  std::vector<NetworkElement> routers_;
  std::vector<Edge> edges_;
  std::map<ElementId, size_t> element_index_;  // into elements_
  std::vector<NetworkElement> elements_;
  std::map<ElementId, std::vector<Neighbor>> adjacency_;
};

// Throws InputError on duplicate ids, unknown endpoints, self-loops,
// parallel edges, negative delays, non-positive bandwidths, or no sites.
NetworkGraph BuildGraph(TopologySpec spec);

// Direct site-to-site link standing in for a router path.
struct EffectiveLink {
  ElementId from;
  ElementId to;
  double delay = 0;
  double bandwidth = kInfiniteBandwidth;
  // Elements of the selected path, endpoints included.
  std::vector<ElementId> path;

  friend bool operator==(const EffectiveLink&, const EffectiveLink&) = default;
};

class LinkTable {
 public:
  void Put(EffectiveLink link);

  const EffectiveLink* Find(const ElementId& from, const ElementId& to) const;
  // Throws InputError when the pair is disconnected.
  const EffectiveLink& At(const ElementId& from, const ElementId& to) const;

  const std::map<std::pair<ElementId, ElementId>, EffectiveLink>& links()
      const {
    return links_;
  }
  size_t size() const { return links_.size(); }

 private:
  std::map<std::pair<ElementId, ElementId>, EffectiveLink> links_;
};

// Contracts router chains into effective links for every ordered reachable
// site pair. Paths may pass through routers but never through another site.
// The selected path minimizes edge delays plus intermediate router delays,
// ties going to the lexicographically smallest element-id sequence read
// from the smaller endpoint (so (i,j) and (j,i) always agree); its
// bandwidth is the minimum edge bandwidth along it. (i,i) has delay 0 and
// infinite bandwidth. Unreachable pairs are absent.
LinkTable ContractRouters(const NetworkGraph& graph);

// Site pairs joined by a single direct edge, in both orientations.
std::vector<std::pair<ElementId, ElementId>> DirectSitePairs(
    const NetworkGraph& graph);

}  // namespace fragalloc::net

#endif  // FRAGALLOC_NETWORK_H_
