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

#include <benchmark/benchmark.h>

#include <string>

#include "fragalloc/network.h"

namespace fragalloc::net {
namespace {

// `sites` sites hanging off a ring of routers, one site per router.
TopologySpec RouterRing(int sites) {
  TopologySpec spec;
  for (int i = 0; i < sites; ++i) {
    ElementId site = rules::Value::Number(i + 1);
    ElementId router = rules::Value::Symbol("r" + std::to_string(i));
    spec.sites.push_back({site});
    spec.routers.push_back({router, ElementKind::kRouter, 1});
    spec.edges.push_back({site, router, 1, 10});
    ElementId next =
        rules::Value::Symbol("r" + std::to_string((i + 1) % sites));
    spec.edges.push_back({router, next, 2, 5.0 + i % 3});
  }
  return spec;
}

void BM_ContractRouterRing(benchmark::State& state) {
  NetworkGraph graph = BuildGraph(RouterRing(static_cast<int>(state.range(0))));
  for (auto _ : state) {
    benchmark::DoNotOptimize(ContractRouters(graph).size());
  }
}
BENCHMARK(BM_ContractRouterRing)->Arg(5)->Arg(20)->Arg(50);

}  // namespace
}  // namespace fragalloc::net
