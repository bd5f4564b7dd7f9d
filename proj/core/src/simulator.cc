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

#include "fragalloc/simulator.h"

#include <fstream>
#include <nlohmann/json.hpp>

#include "fragalloc/error.h"

namespace fragalloc::sim {
namespace {

std::string JsonId(const rules::Value& v) {
  if (v.is_number()) return rules::FormatNumber(v.number());
  return nlohmann::json(v.symbol()).dump();
}

std::string JsonMove(const policy::MoveTrigger& m) {
  return "{\"src\":" + JsonId(m.src) + ",\"dst\":" + JsonId(m.dst) +
         ",\"fragment\":" + JsonId(m.fragment) + "}";
}

std::string CsvMoves(const std::vector<policy::MoveTrigger>& moves) {
  std::string out;
  for (const policy::MoveTrigger& m : moves) {
    if (!out.empty()) out += ";";
    out +=
        m.src.ToString() + ">" + m.dst.ToString() + ":" + m.fragment.ToString();
  }
  return out;
}

}  // namespace

double MetricsTimeline::TotalTransmissionCost() const {
  double total = 0;
  for (const RoundMetrics& r : rounds) total += r.transmission_cost;
  return total;
}

double MetricsTimeline::TotalExecutionCost() const {
  double total = 0;
  for (const RoundMetrics& r : rounds) total += r.execution_cost;
  return total;
}

double MetricsTimeline::TotalRelocationCost() const {
  double total = 0;
  for (const RoundMetrics& r : rounds) total += r.relocation_cost;
  return total;
}

size_t MetricsTimeline::MoveCount() const {
  size_t n = 0;
  for (const RoundMetrics& r : rounds) n += r.moves.size();
  return n;
}

size_t MetricsTimeline::CapacityViolationCount() const {
  size_t n = 0;
  for (const RoundMetrics& r : rounds) n += r.capacity_violations.size();
  return n;
}

MetricsTimeline Run(const Scenario& scenario,
                    const policy::PolicyRuleSet& policy,
                    const RunOptions& options) {
  runtime::ClusterOptions cluster_options;
  cluster_options.sync_period = scenario.sync_period;
  cluster_options.verify_agreement = options.verify_agreement;
  cluster_options.trace = options.trace;
  cluster_options.eval = options.eval;
  runtime::Cluster cluster(scenario.model, scenario.placement,
                           scenario.initial_stats,
                           policy::CompiledPolicy(policy), cluster_options);

  MetricsTimeline timeline;
  const int64_t rounds = options.rounds.value_or(scenario.rounds);
  for (int64_t round = 0; round < rounds; ++round) {
    RoundMetrics m;
    m.round = round;
    try {
      for (const QueryEvent& e : GenerateWorkload(scenario, round)) {
        cluster.RecordQuery(e.node, e.fragment, e.type);
        m.execution_cost +=
            scenario.model.factors.ExecWeight(e.node, e.fragment, e.type);
      }
      if (cluster.IsSyncRound(round)) {
        m.synchronized = true;
        cluster.Synchronize(round);
        runtime::RoundOutcome outcome = cluster.AllocationRound(round);
        m.relocation_cost = outcome.relocation_cost;
        for (const policy::Move& move : outcome.moves) {
          m.moves.push_back(move.trigger);
        }
      }
      cost::Placement placement = cluster.CurrentPlacement();
      m.transmission_cost = cost::TotalTransmissionCost(
          placement, cluster.CumulativeStats(), scenario.model);
      m.capacity_violations = cost::CheckCapacity(
          placement, scenario.model.fragments, scenario.model.capacity);
    } catch (const Error& e) {
      timeline.failed = true;
      timeline.error = "round " + std::to_string(round) + ": " + e.what();
      break;
    }
    timeline.rounds.push_back(m);
    if (options.observer) options.observer(cluster, timeline.rounds.back());
  }
  return timeline;
}

void WriteJsonLines(const MetricsTimeline& timeline, std::ostream& out) {
  using rules::FormatNumber;
  for (const RoundMetrics& r : timeline.rounds) {
    out << "{\"round\":" << r.round
        << ",\"transmission_cost\":" << FormatNumber(r.transmission_cost)
        << ",\"execution_cost\":" << FormatNumber(r.execution_cost)
        << ",\"relocation_cost\":" << FormatNumber(r.relocation_cost)
        << ",\"moves\":[";
    for (size_t i = 0; i < r.moves.size(); ++i) {
      out << (i ? "," : "") << JsonMove(r.moves[i]);
    }
    out << "]}\n";
  }
  out << "{\"summary\":true,\"rounds\":" << timeline.rounds.size()
      << ",\"transmission_cost\":"
      << FormatNumber(timeline.TotalTransmissionCost())
      << ",\"execution_cost\":" << FormatNumber(timeline.TotalExecutionCost())
      << ",\"relocation_cost\":" << FormatNumber(timeline.TotalRelocationCost())
      << ",\"moves\":" << timeline.MoveCount()
      << ",\"capacity_violations\":" << timeline.CapacityViolationCount()
      << ",\"status\":\"" << (timeline.failed ? "failed" : "ok") << "\"";
  if (timeline.failed) {
    out << ",\"error\":" << nlohmann::json(timeline.error).dump();
  }
  out << "}\n";
}

void WriteCsv(const MetricsTimeline& timeline, std::ostream& out) {
  using rules::FormatNumber;
  out << "round,transmission_cost,execution_cost,relocation_cost,moves\n";
  for (const RoundMetrics& r : timeline.rounds) {
    out << r.round << "," << FormatNumber(r.transmission_cost) << ","
        << FormatNumber(r.execution_cost) << ","
        << FormatNumber(r.relocation_cost) << "," << CsvMoves(r.moves) << "\n";
  }
  out << "summary," << FormatNumber(timeline.TotalTransmissionCost()) << ","
      << FormatNumber(timeline.TotalExecutionCost()) << ","
      << FormatNumber(timeline.TotalRelocationCost()) << ","
      << timeline.MoveCount() << "\n";
}

namespace {

template <typename Writer>
void WriteFile(const MetricsTimeline& timeline, const std::string& path,
               Writer writer) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path);
  writer(timeline, out);
  out.flush();
  if (!out) throw Error("cannot write " + path);
}

}  // namespace

void WriteJsonLinesFile(const MetricsTimeline& timeline,
                        const std::string& path) {
  WriteFile(timeline, path, WriteJsonLines);
}

void WriteCsvFile(const MetricsTimeline& timeline, const std::string& path) {
  WriteFile(timeline, path, WriteCsv);
}

}  // namespace fragalloc::sim
