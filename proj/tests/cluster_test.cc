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

#include "fragalloc/cluster.h"

#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include <sstream>
#include <string>
#include <vector>

#include "fragalloc/error.h"

namespace fragalloc::runtime {
namespace {

using cost::QueryType;
using rules::GroundAtom;
using rules::Value;
using ::testing::HasSubstr;

Value N(double v) { return Value::Number(v); }

// Sites 1, 2, 3. Fragment 7 (size 1) sits at 1; t(2,1) = 0.5 so node 2's
// threshold r * 0.5 is always below its own count. The 1-3 link costs
// 1 * 1 * 0.5 * 5 * 5 = 12.5 to cross.
cost::SystemModel Model() {
  net::TopologySpec spec;
  spec.sites = {{N(1)}, {N(2)}, {N(3)}};
  spec.edges = {{N(1), N(2), 1, 2}, {N(1), N(3), 5, 2}, {N(2), N(3), 4, 1}};
  cost::SystemModel m;
  m.nodes = {N(1), N(2), N(3)};
  m.links = net::ContractRouters(net::BuildGraph(spec));
  m.fragments = {{N(7), 1, 1}};
  m.factors.other[{N(1), N(3)}] = 5;
  return m;
}

const cost::Placement kAtOne = {{N(7), N(1)}};

Cluster MakeCluster(ClusterOptions options = {},
                    std::string_view policy = "threshold") {
  return Cluster(Model(), kAtOne, {},
                 policy::CompiledPolicy(policy::BuiltinPolicy(policy)),
                 options);
}

GroundAtom Freq(double node, double count) {
  return cost::FreqFact(N(node), N(7), QueryType::kSelect, count);
}

TEST(PendingDeltasTest, LastOperationWins) {
  PendingDeltas d;
  GroundAtom a = Freq(1, 1);
  d.Assert(a);
  d.Retract(a);
  EXPECT_TRUE(d.additions().empty());
  EXPECT_EQ(d.removals().count(a), 1u);
  d.Assert(a);
  EXPECT_TRUE(d.removals().empty());
  EXPECT_EQ(d.additions().count(a), 1u);
  d.Clear();
  EXPECT_TRUE(d.empty());
}

TEST(ClusterTest, ConstructorValidatesPlacement) {
  auto compiled = policy::CompiledPolicy(policy::BuiltinPolicy("threshold"));
  EXPECT_THROW(Cluster(Model(), {}, {}, compiled), InputError);
  EXPECT_THROW(Cluster(Model(), {{N(7), N(9)}}, {}, compiled), InputError);
  EXPECT_THROW(Cluster(Model(), {{N(7), N(1)}, {N(8), N(1)}}, {}, compiled),
               InputError);
  ClusterOptions bad;
  bad.sync_period = 0;
  EXPECT_THROW(Cluster(Model(), kAtOne, {}, compiled, bad), InputError);
}

TEST(ClusterTest, NodesStartIdentical) {
  Cluster c = MakeCluster();
  ASSERT_EQ(c.nodes().size(), 3u);
  auto hashes = c.BaseHashes();
  EXPECT_EQ(hashes[0], hashes[1]);
  EXPECT_EQ(hashes[1], hashes[2]);
  EXPECT_EQ(c.CurrentPlacement(), kAtOne);
}

TEST(ClusterTest, RecordQueryStagesCounterLocally) {
  Cluster c = MakeCluster();
  uint64_t before = c.node(N(2)).base.Hash();
  for (int i = 0; i < 3; ++i) c.RecordQuery(N(2), N(7), QueryType::kSelect);
  const NodeState& n = c.node(N(2));
  EXPECT_EQ(n.stats.frequency(N(2), N(7), QueryType::kSelect), 3);
  EXPECT_EQ(n.pending.additions().count(Freq(2, 3)), 1u);
  EXPECT_EQ(n.pending.additions().count(Freq(2, 2)), 0u);
  EXPECT_EQ(n.pending.additions().count(cost::ReqFact(N(2), N(7), 3)), 1u);
  EXPECT_EQ(n.pending.removals().count(cost::ReqFact(N(2), N(7), 0)), 1u);
  EXPECT_EQ(n.base.Hash(), before);
  EXPECT_TRUE(c.node(N(1)).pending.empty());
}

TEST(ClusterTest, RecordQueryRejectsUnknownIds) {
  Cluster c = MakeCluster();
  try {
    c.RecordQuery(N(1), N(99), QueryType::kSelect);
    FAIL() << "expected InputError";
  } catch (const InputError& e) {
    EXPECT_THAT(e.what(), HasSubstr("unknown fragment 99"));
  }
  EXPECT_THROW(c.RecordQuery(N(9), N(7), QueryType::kSelect), InputError);
}

TEST(ClusterTest, SyncConvergesAllNodes) {
  Cluster c = MakeCluster();
  c.RecordQuery(N(2), N(7), QueryType::kSelect);
  c.RecordQuery(N(2), N(7), QueryType::kSelect);
  c.RecordQuery(N(3), N(7), QueryType::kUpdate);
  SyncReport report = c.Synchronize(0);
  EXPECT_EQ(report.messages, 2u);
  EXPECT_TRUE(report.conflicts.empty());
  for (const NodeState& n : c.nodes()) {
    EXPECT_TRUE(n.base.Contains(Freq(2, 2)));
    EXPECT_FALSE(n.base.Contains(Freq(2, 1)));
    EXPECT_TRUE(n.base.Contains(cost::ReqFact(N(2), N(7), 2)));
    EXPECT_FALSE(n.base.Contains(cost::ReqFact(N(2), N(7), 0)));
    EXPECT_TRUE(n.pending.empty());
  }
  auto hashes = c.BaseHashes();
  EXPECT_EQ(hashes[0], hashes[2]);
  EXPECT_EQ(c.SyncedStats().requirement(N(3), N(7)), 1);
}

TEST(ClusterTest, EmptySyncChangesNothing) {
  Cluster c = MakeCluster();
  auto before = c.BaseHashes();
  SyncReport report = c.Synchronize(0);
  EXPECT_EQ(report.messages, 0u);
  EXPECT_EQ(c.BaseHashes(), before);
}

TEST(ClusterTest, SyncOnlyOnSyncRounds) {
  ClusterOptions options;
  options.sync_period = 2;
  Cluster c = MakeCluster(options);
  EXPECT_FALSE(c.IsSyncRound(1));
  EXPECT_THROW(c.Synchronize(1), InvariantError);
  EXPECT_NO_THROW(c.Synchronize(2));
}

TEST(ClusterTest, SyncResultIndependentOfRecordOrder) {
  Cluster a = MakeCluster();
  Cluster b = MakeCluster();
  a.RecordQuery(N(1), N(7), QueryType::kSelect);
  a.RecordQuery(N(3), N(7), QueryType::kDelete);
  b.RecordQuery(N(3), N(7), QueryType::kDelete);
  b.RecordQuery(N(1), N(7), QueryType::kSelect);
  a.Synchronize(0);
  b.Synchronize(0);
  EXPECT_EQ(a.BaseHashes(), b.BaseHashes());
}

TEST(ClusterTest, CumulativeStatsIncludeUnsyncedCounters) {
  Cluster c = MakeCluster();
  c.RecordQuery(N(2), N(7), QueryType::kSelect);
  EXPECT_EQ(c.CumulativeStats().frequency(N(2), N(7), QueryType::kSelect), 1);
  EXPECT_EQ(c.SyncedStats().frequency(N(2), N(7), QueryType::kSelect), 0);
}

TEST(ClusterTest, AllocationRoundMovesFragment) {
  std::ostringstream trace;
  ClusterOptions options;
  options.trace = &trace;
  Cluster c = MakeCluster(options);
  c.RecordQuery(N(2), N(7), QueryType::kSelect);
  c.Synchronize(0);
  RoundOutcome outcome = c.AllocationRound(0);
  EXPECT_TRUE(outcome.evaluated);
  EXPECT_EQ(outcome.triggers,
            (std::vector<policy::MoveTrigger>{{N(1), N(2), N(7)}}));
  ASSERT_EQ(outcome.moves.size(), 1u);
  EXPECT_EQ(outcome.relocation_cost, 0.5);
  EXPECT_EQ(c.CurrentPlacement(), (cost::Placement{{N(7), N(2)}}));
  for (const NodeState& n : c.nodes()) {
    EXPECT_TRUE(n.base.Contains(cost::PlacedFact(N(7), N(2))));
    EXPECT_FALSE(n.base.Contains(cost::PlacedFact(N(7), N(1))));
  }
  EXPECT_THAT(trace.str(), HasSubstr("transfer move(1,2,7)"));
}

TEST(ClusterTest, UnchangedFactsSkipEvaluation) {
  Cluster c = MakeCluster();
  c.RecordQuery(N(2), N(7), QueryType::kSelect);
  c.Synchronize(0);
  EXPECT_EQ(c.AllocationRound(0).moves.size(), 1u);
  RoundOutcome after_move = c.AllocationRound(1);
  EXPECT_TRUE(after_move.evaluated);
  EXPECT_TRUE(after_move.moves.empty());
  EXPECT_FALSE(c.AllocationRound(2).evaluated);
}

TEST(ClusterTest, VerifiedAgreementSameOutcome) {
  ClusterOptions options;
  options.verify_agreement = true;
  Cluster c = MakeCluster(options);
  c.RecordQuery(N(2), N(7), QueryType::kSelect);
  c.RecordQuery(N(3), N(7), QueryType::kSelect);
  c.Synchronize(0);
  RoundOutcome outcome = c.AllocationRound(0);
  ASSERT_EQ(outcome.moves.size(), 1u);
  EXPECT_EQ(outcome.moves[0].trigger.dst, N(2));
}

TEST(ClusterTest, ExecuteTransferTwiceFails) {
  Cluster c = MakeCluster();
  policy::Move move{{N(1), N(3), N(7)}, 0};
  EXPECT_EQ(c.ExecuteTransfer(move), 12.5);
  try {
    c.ExecuteTransfer(move);
    FAIL() << "expected InvariantError";
  } catch (const InvariantError& e) {
    EXPECT_THAT(e.what(), HasSubstr("not placed at src"));
  }
  EXPECT_EQ(c.CurrentPlacement(), (cost::Placement{{N(7), N(3)}}));
}

TEST(ClusterTest, EngineErrorRollsBack) {
  ClusterOptions options;
  options.eval.max_derived_facts = 1;
  Cluster c = MakeCluster(options);
  c.RecordQuery(N(2), N(7), QueryType::kSelect);
  c.Synchronize(0);
  auto before = c.BaseHashes();
  EXPECT_THROW(c.AllocationRound(0), EvaluationError);
  EXPECT_EQ(c.BaseHashes(), before);
  for (const NodeState& n : c.nodes()) EXPECT_TRUE(n.dirty);
  EXPECT_EQ(c.CurrentPlacement(), kAtOne);
}

TEST(ClusterTest, NnaWithoutAdjacencyNeverMoves) {
  Cluster c = MakeCluster({}, "nna");
  c.RecordQuery(N(2), N(7), QueryType::kSelect);
  c.Synchronize(0);
  RoundOutcome outcome = c.AllocationRound(0);
  EXPECT_TRUE(outcome.evaluated);
  EXPECT_TRUE(outcome.triggers.empty());
}

}  // namespace
}  // namespace fragalloc::runtime
