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

#ifndef FRAGALLOC_SIMULATOR_H_
#define FRAGALLOC_SIMULATOR_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "fragalloc/cluster.h"
#include "fragalloc/cost_model.h"
#include "fragalloc/policy.h"
#include "fragalloc/rules/engine.h"
#include "fragalloc/scenario.h"

namespace fragalloc::sim {

struct RoundMetrics {
  int64_t round = 0;
  // Total transmission cost of the round-end placement against the
  // cumulative statistics of every node.
  double transmission_cost = 0;
  // Weighted count of the queries issued this round.
  double execution_cost = 0;
  double relocation_cost = 0;
  bool synchronized = false;
  std::vector<policy::MoveTrigger> moves;
  std::vector<cost::CapacityViolation> capacity_violations;
};

struct MetricsTimeline {
  std::vector<RoundMetrics> rounds;
  bool failed = false;
  std::string error;  // set when failed

  double TotalTransmissionCost() const;
  double TotalExecutionCost() const;
  double TotalRelocationCost() const;
  size_t MoveCount() const;
  size_t CapacityViolationCount() const;
};

struct RunOptions {
  std::optional<int64_t> rounds;  // overrides the scenario's round count
  bool verify_agreement = false;
  std::ostream* trace = nullptr;
  rules::EvalOptions eval;
  // Called after every completed round with the cluster in its round-end
  // state.
  std::function<void(const runtime::Cluster&, const RoundMetrics&)> observer;
};

// Steps the cluster through the scenario's rounds. Each round issues the
// round's queries, synchronizes and runs the allocation step on sync
// rounds, then records costs. A library error ends the run early: the
// rounds completed so far are kept and the timeline is marked failed.
MetricsTimeline Run(const Scenario& scenario,
                    const policy::PolicyRuleSet& policy,
                    const RunOptions& options = {});

// One JSON object per round with keys round, transmission_cost,
// execution_cost, relocation_cost, moves; then a summary object.
void WriteJsonLines(const MetricsTimeline& timeline, std::ostream& out);
// Same values as CSV: a header, one row per round, and a summary row.
void WriteCsv(const MetricsTimeline& timeline, std::ostream& out);
// Throw Error when `path` cannot be written.
void WriteJsonLinesFile(const MetricsTimeline& timeline,
                        const std::string& path);
void WriteCsvFile(const MetricsTimeline& timeline, const std::string& path);

}  // namespace fragalloc::sim

#endif  // FRAGALLOC_SIMULATOR_H_
