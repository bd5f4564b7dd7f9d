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

#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include <nlohmann/json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "fragalloc/error.h"
#include "scenarios.h"

namespace fragalloc::sim {
namespace {

using rules::Value;
using ::testing::HasSubstr;

Value N(double v) { return Value::Number(v); }

policy::PolicyRuleSet NeverMove() {
  return policy::ParsePolicy("static", "move(X,Y,J) :- placed(J,X), never(Y).");
}

MetricsTimeline RunEngineered(std::string_view policy_name, int rounds,
                              const RunOptions& options = {}) {
  Scenario s =
      ParseScenario(testing::EngineeredScenarioJson(policy_name, rounds));
  return sim::Run(s, ResolvePolicy(s.policy), options);
}

TEST(RunTest, EngineeredMoveAtFirstSyncRound) {
  MetricsTimeline moved = RunEngineered("threshold", 12);
  ASSERT_FALSE(moved.failed) << moved.error;
  ASSERT_EQ(moved.rounds.size(), 12u);
  ASSERT_EQ(moved.rounds[0].moves.size(), 1u);
  EXPECT_EQ(moved.rounds[0].moves[0], (policy::MoveTrigger{N(1), N(2), N(7)}));
  EXPECT_EQ(moved.rounds[0].relocation_cost, 0.5);
  EXPECT_EQ(moved.MoveCount(), 1u);

  Scenario s = ParseScenario(testing::EngineeredScenarioJson("threshold", 12));
  MetricsTimeline still = sim::Run(s, NeverMove());
  ASSERT_EQ(still.MoveCount(), 0u);
  for (size_t r = 0; r < 12; ++r) {
    EXPECT_LT(moved.rounds[r].transmission_cost,
              still.rounds[r].transmission_cost)
        << "round " << r;
  }
}

TEST(RunTest, ZeroWorkloadNeverMoves) {
  Scenario s = ParseScenario(testing::EngineeredScenarioJson("threshold", 10));
  s.workload.clear();
  MetricsTimeline t = sim::Run(s, ResolvePolicy(s.policy));
  EXPECT_EQ(t.MoveCount(), 0u);
  EXPECT_EQ(t.TotalTransmissionCost(), 0);
  EXPECT_EQ(t.TotalExecutionCost(), 0);
}

TEST(RunTest, NnaWithoutAdjacencyStaysPut) {
  MetricsTimeline t = RunEngineered("nna", 50);
  ASSERT_FALSE(t.failed);
  EXPECT_EQ(t.MoveCount(), 0u);
  EXPECT_EQ(t.rounds.back().transmission_cost, 0.5 * 100);
}

TEST(RunTest, RoundOverrideAndAccounting) {
  Scenario s = ParseScenario(testing::EngineeredScenarioJson("threshold", 30));
  RunOptions options;
  options.rounds = 9;
  size_t observed = 0;
  options.observer = [&](const runtime::Cluster& c, const RoundMetrics& m) {
    ++observed;
    EXPECT_EQ(m.transmission_cost,
              cost::TotalTransmissionCost(c.CurrentPlacement(),
                                          c.CumulativeStats(), s.model));
    EXPECT_EQ(m.synchronized, m.round % 4 == 0);
    if (!m.synchronized) EXPECT_TRUE(m.moves.empty());
  };
  MetricsTimeline t = sim::Run(s, ResolvePolicy(s.policy), options);
  EXPECT_EQ(t.rounds.size(), 9u);
  EXPECT_EQ(observed, 9u);
  EXPECT_EQ(t.TotalExecutionCost(), 18);
}

TEST(RunTest, EngineErrorFailsTimeline) {
  RunOptions options;
  options.eval.max_derived_facts = 1;
  MetricsTimeline t = RunEngineered("threshold", 5, options);
  EXPECT_TRUE(t.failed);
  EXPECT_TRUE(t.rounds.empty());
  EXPECT_THAT(t.error, HasSubstr("round 0: "));
}

TEST(RunTest, Deterministic) {
  std::ostringstream a;
  std::ostringstream b;
  WriteJsonLines(RunEngineered("threshold", 20), a);
  WriteJsonLines(RunEngineered("threshold", 20), b);
  EXPECT_EQ(a.str(), b.str());
}

std::vector<std::string> SplitLines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  return lines;
}

TEST(WriteJsonLinesTest, OneLinePerRoundPlusSummary) {
  std::ostringstream out;
  WriteJsonLines(RunEngineered("threshold", 3), out);
  auto lines = SplitLines(out.str());
  ASSERT_EQ(lines.size(), 4u);
  auto first = nlohmann::json::parse(lines[0]);
  EXPECT_EQ(first["round"], 0);
  EXPECT_EQ(first["relocation_cost"], 0.5);
  EXPECT_EQ(first["moves"][0]["fragment"], 7);
  EXPECT_EQ(first["moves"][0]["src"], 1);
  EXPECT_EQ(first["moves"][0]["dst"], 2);
  auto summary = nlohmann::json::parse(lines[3]);
  EXPECT_EQ(summary["summary"], true);
  EXPECT_EQ(summary["rounds"], 3);
  EXPECT_EQ(summary["moves"], 1);
  EXPECT_EQ(summary["status"], "ok");
  EXPECT_FALSE(summary.contains("error"));
}

TEST(WriteJsonLinesTest, FailedRunCarriesError) {
  MetricsTimeline t;
  t.failed = true;
  t.error = "round 0: \"boom\"";
  std::ostringstream out;
  WriteJsonLines(t, out);
  auto summary = nlohmann::json::parse(SplitLines(out.str()).back());
  EXPECT_EQ(summary["status"], "failed");
  EXPECT_EQ(summary["error"], "round 0: \"boom\"");
}

TEST(WriteCsvTest, MatchesJsonValues) {
  MetricsTimeline t = RunEngineered("threshold", 6);
  std::ostringstream json;
  std::ostringstream csv;
  WriteJsonLines(t, json);
  WriteCsv(t, csv);
  auto json_lines = SplitLines(json.str());
  auto csv_lines = SplitLines(csv.str());
  ASSERT_EQ(csv_lines.size(), json_lines.size() + 1);
  EXPECT_EQ(csv_lines[0],
            "round,transmission_cost,execution_cost,relocation_cost,moves");
  EXPECT_EQ(csv_lines[1], "0,0,2,0.5,1>2:7");
  for (size_t r = 0; r < t.rounds.size(); ++r) {
    auto row = nlohmann::json::parse(json_lines[r]);
    std::ostringstream expected;
    expected << row["round"].get<int>() << ","
             << rules::FormatNumber(row["transmission_cost"].get<double>())
             << "," << rules::FormatNumber(row["execution_cost"].get<double>())
             << ","
             << rules::FormatNumber(row["relocation_cost"].get<double>());
    EXPECT_THAT(csv_lines[r + 1], ::testing::StartsWith(expected.str()));
  }
  EXPECT_THAT(csv_lines.back(), ::testing::StartsWith("summary,"));
}

TEST(WriteFileTest, UnwritablePathThrows) {
  EXPECT_THROW(WriteJsonLinesFile({}, "/nonexistent/dir/out.jsonl"), Error);
  EXPECT_THROW(WriteCsvFile({}, "/nonexistent/dir/out.csv"), Error);
}

}  // namespace
}  // namespace fragalloc::sim
