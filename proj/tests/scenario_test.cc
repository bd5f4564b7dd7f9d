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

#include "fragalloc/scenario.h"

#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "fragalloc/error.h"

namespace fragalloc::sim {
namespace {

using rules::Value;
using ::testing::HasSubstr;

Value N(double v) { return Value::Number(v); }

constexpr std::string_view kMinimal = R"({
  "topology": {"sites": [1, 2], "edges": [{"from": 1, "to": 2, "delay": 1, "bandwidth": 2}]},
  "fragments": [{"id": 7}],
  "placement": {"7": 1},
  "rounds": 3
})";

std::string ExpectInputError(std::string_view json) {
  try {
    ParseScenario(json);
  } catch (const InputError& e) {
    return e.what();
  }
  ADD_FAILURE() << "expected InputError for " << json;
  return "";
}

TEST(ParseScenarioTest, MinimalDocumentDefaults) {
  Scenario s = ParseScenario(kMinimal);
  EXPECT_EQ(s.model.nodes, (std::vector<Value>{N(1), N(2)}));
  EXPECT_EQ(s.model.fragments.size(), 1u);
  EXPECT_EQ(s.model.fragments[0].size, 1);
  EXPECT_EQ(s.placement.at(N(7)), N(1));
  EXPECT_EQ(s.rounds, 3);
  EXPECT_EQ(s.sync_period, 1);
  EXPECT_EQ(s.policy.name, "threshold");
  EXPECT_TRUE(s.workload.empty());
  EXPECT_EQ(s.model.links.At(N(1), N(2)).delay, 1);
  EXPECT_EQ(s.model.adjacency.size(), 2u);
}

TEST(ParseScenarioTest, ExplicitAdjacencyIsSymmetric) {
  std::string json(kMinimal);
  json.insert(json.rfind('}'), R"(, "adjacency": [[2, 1]])");
  Scenario s = ParseScenario(json);
  EXPECT_EQ(s.model.adjacency.count({N(1), N(2)}), 1u);
  EXPECT_EQ(s.model.adjacency.count({N(2), N(1)}), 1u);

  json = kMinimal;
  json.insert(json.rfind('}'), R"(, "adjacency": [])");
  EXPECT_TRUE(ParseScenario(json).model.adjacency.empty());
}

TEST(ParseScenarioTest, RoutersAndInfiniteBandwidth) {
  Scenario s = ParseScenario(R"({
    "topology": {"sites": [1, 2], "routers": [{"id": "r1", "delay": 2}],
                 "edges": [{"from": 1, "to": "r1", "delay": 1, "bandwidth": 4},
                           {"from": "r1", "to": 2, "delay": 3, "bandwidth": "inf"}]},
    "fragments": [{"id": 7}], "placement": {"7": 1}, "rounds": 1})");
  const net::EffectiveLink& link = s.model.links.At(N(1), N(2));
  EXPECT_EQ(link.delay, 6);
  EXPECT_EQ(link.bandwidth, 4);
  EXPECT_TRUE(s.model.adjacency.empty());
}

TEST(ParseScenarioTest, FactorForms) {
  Scenario s = ParseScenario(R"({
    "topology": {"sites": [1, 2], "edges": [{"from": 1, "to": 2}]},
    "fragments": [{"id": 7}], "placement": {"7": 1}, "rounds": 1,
    "factors": {"gamma": {"1,2": 3},
                "other": [{"i": 2, "j": 1, "value": 4}],
                "exec_weight": {"1,7,up": 2}}})");
  EXPECT_EQ(s.model.factors.Gamma(N(1), N(2)), 3);
  EXPECT_EQ(s.model.factors.Other(N(2), N(1)), 4);
  EXPECT_EQ(s.model.factors.ExecWeight(N(1), N(7), cost::QueryType::kUpdate),
            2);
  EXPECT_EQ(s.model.factors.ExecWeight(N(1), N(7), cost::QueryType::kSelect),
            1);
}

TEST(ParseScenarioTest, InfeasiblePlacement) {
  std::string json(kMinimal);
  json.insert(json.rfind('}'), R"(, "capacities": {"1": 0.5})");
  EXPECT_EQ(ExpectInputError(json),
            "infeasible initial placement at node 1: load 1 exceeds "
            "capacity 0.5");
}

TEST(ParseScenarioTest, ErrorsNameTheField) {
  std::string json(kMinimal);
  json.insert(
      json.rfind('}'),
      R"(, "workload": [{"node": 1, "fragment": 99, "type": "se", "rate": 1}])");
  EXPECT_THAT(ExpectInputError(json),
              HasSubstr("workload[0].fragment: unknown fragment 99"));

  json = kMinimal;
  json.insert(
      json.rfind('}'),
      R"(, "workload": [{"node": 1, "fragment": 7, "type": "xx", "rate": 1}])");
  EXPECT_THAT(ExpectInputError(json), HasSubstr("workload[0].type"));

  json = kMinimal;
  json.insert(json.rfind('}'), R"(, "colour": 1)");
  EXPECT_THAT(ExpectInputError(json), HasSubstr("colour"));

  EXPECT_THAT(ExpectInputError("{"), HasSubstr("malformed JSON"));
  EXPECT_THAT(ExpectInputError("[]"), HasSubstr("expected an object"));
  EXPECT_THAT(ExpectInputError(R"({"topology": {"sites": [1]}})"),
              HasSubstr("missing field 'fragments'"));
}

TEST(ParseScenarioTest, UnknownPolicyRejected) {
  std::string json(kMinimal);
  json.insert(json.rfind('}'), R"(, "policy": "fna")");
  EXPECT_THAT(ExpectInputError(json), HasSubstr("unknown policy 'fna'"));
}

TEST(ParseScenarioTest, PolicyFileRelativeToScenario) {
  auto dir = std::filesystem::temp_directory_path() / "fragalloc_scenario_test";
  std::filesystem::create_directories(dir);
  {
    std::ofstream(dir / "mine.dl")
        << "move(X,Y,J) :- placed(J,X), adjacent(X,Y).\n";
    std::string json(kMinimal);
    json.insert(json.rfind('}'), R"(, "policy": {"file": "mine.dl"})");
    std::ofstream(dir / "s.json") << json;
  }
  Scenario s = LoadScenario((dir / "s.json").string());
  EXPECT_EQ(s.policy.file, (dir / "mine.dl").string());
  EXPECT_EQ(ResolvePolicy(s.policy).program.rules.size(), 1u);
  std::filesystem::remove_all(dir);
}

TEST(LoadScenarioTest, MissingFile) {
  EXPECT_THROW(LoadScenario("/nonexistent/scenario.json"), InputError);
}

Scenario WithRate(double rate) {
  std::string json(kMinimal);
  json.insert(
      json.rfind('}'),
      R"(, "workload": [{"node": 2, "fragment": 7, "type": "se", "rate": )" +
          rules::FormatNumber(rate) + "}]");
  return ParseScenario(json);
}

TEST(GenerateWorkloadTest, IntegralRate) {
  Scenario s = WithRate(2);
  for (int64_t r = 0; r < 5; ++r) {
    auto events = GenerateWorkload(s, r);
    ASSERT_EQ(events.size(), 2u);
    EXPECT_EQ(events[0], (QueryEvent{r, N(2), N(7), cost::QueryType::kSelect}));
  }
}

TEST(GenerateWorkloadTest, FractionalRateAlternates) {
  Scenario s = WithRate(0.5);
  std::vector<size_t> counts;
  for (int64_t r = 0; r < 6; ++r)
    counts.push_back(GenerateWorkload(s, r).size());
  EXPECT_EQ(counts, (std::vector<size_t>{0, 1, 0, 1, 0, 1}));
}

TEST(GenerateWorkloadTest, ZeroRateIsSilent) {
  Scenario s = WithRate(0);
  for (int64_t r = 0; r < 10; ++r) EXPECT_TRUE(GenerateWorkload(s, r).empty());
}

TEST(GenerateWorkloadTest, LongRunAverageMatchesRate) {
  for (double rate : {0.25, 0.3, 1.75, 3.0}) {
    Scenario s = WithRate(rate);
    size_t total = 0;
    const int64_t rounds = 400;
    for (int64_t r = 0; r < rounds; ++r) total += GenerateWorkload(s, r).size();
    EXPECT_NEAR(static_cast<double>(total), rate * rounds, 1.0) << rate;
  }
}

}  // namespace
}  // namespace fragalloc::sim
