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

#include "fragalloc/policy.h"

#include <algorithm>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <tuple>

#include "fragalloc/error.h"
#include "fragalloc/rules/parser.h"

namespace fragalloc::policy {
namespace {

constexpr std::string_view kThresholdRules =
    "% Threshold policy: move fragment J away from holder I1 when I1 uses\n"
    "% it at most r*t times while I2 uses it more than r*t times.\n"
    "total_freq(I,J,F) :- req(I,J,Q), F is sum(V : freq(I,J,K,V)).\n"
    "threshold(I,J,R) :- req(I,J,Q), access_cost(I,J,T), R is Q*T.\n"
    "move(I1,I2,J) :- placed(J,I1),\n"
    "                 total_freq(I1,J,F1), threshold(I1,J,R1), F1 <= R1,\n"
    "                 total_freq(I2,J,F2), threshold(I2,J,R2), F2 > R2.\n";

constexpr std::string_view kNnaRules =
    "% Nearest-neighbour policy: the threshold test restricted to\n"
    "% destinations directly linked to the holder.\n"
    "total_freq(I,J,F) :- req(I,J,Q), F is sum(V : freq(I,J,K,V)).\n"
    "threshold(I,J,R) :- req(I,J,Q), access_cost(I,J,T), R is Q*T.\n"
    "move(I1,I2,J) :- placed(J,I1), adjacent(I1,I2),\n"
    "                 total_freq(I1,J,F1), threshold(I1,J,R1), F1 <= R1,\n"
    "                 total_freq(I2,J,F2), threshold(I2,J,R2), F2 > R2.\n";

void RequireMove(const PolicyRuleSet& policy) {
  for (const rules::Rule& rule : policy.program.rules) {
    if (rule.head.predicate == "move") {
      if (rule.head.args.size() != 3) {
        throw InputError("policy '" + policy.name +
                         "': move must have 3 arguments");
      }
      return;
    }
  }
  throw InputError("policy '" + policy.name + "' defines no move/3 rule");
}

rules::StratifiedProgram CompileProgram(const PolicyRuleSet& policy) {
  rules::Program prelude = rules::ParseProgram(cost::AccessCostRuleText());
  rules::Program merged = rules::Merge(std::move(prelude), policy.program);
  rules::CollectArities(merged);
  return rules::Stratify(std::move(merged));
}

}  // namespace

std::vector<std::string> BuiltinPolicyNames() { return {"nna", "threshold"}; }

PolicyRuleSet BuiltinPolicy(std::string_view name) {
  if (name == "threshold") return ParsePolicy("threshold", kThresholdRules);
  if (name == "nna") return ParsePolicy("nna", kNnaRules);
  throw InputError("unknown policy '" + std::string(name) + "'");
}

PolicyRuleSet ParsePolicy(std::string name, std::string_view text) {
  PolicyRuleSet policy{std::move(name), std::string(text),
                       rules::ParseProgram(text)};
  RequireMove(policy);
  return policy;
}

PolicyRuleSet LoadPolicyFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read policy file " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParsePolicy(path, buffer.str());
}

std::string ExportPolicy(const PolicyRuleSet& policy) {
  return std::string(cost::AccessCostRuleText()) + "\n" + policy.text;
}

CompiledPolicy::CompiledPolicy(PolicyRuleSet policy)
    : rule_set_(std::move(policy)), program_(CompileProgram(rule_set_)) {}

std::string MoveTrigger::ToString() const {
  return "move(" + src.ToString() + "," + dst.ToString() + "," +
         fragment.ToString() + ")";
}

bool operator<(const MoveTrigger& a, const MoveTrigger& b) {
  return std::tie(a.src, a.dst, a.fragment) <
         std::tie(b.src, b.dst, b.fragment);
}

std::vector<MoveTrigger> ComputeTriggers(const rules::FactBase& base,
                                         const CompiledPolicy& policy,
                                         const rules::EvalOptions& options) {
  rules::Atom goal{
      "move",
      {rules::Term::Var("X"), rules::Term::Var("Y"), rules::Term::Var("Z")}};
  rules::QueryResult result =
      rules::Query(policy.program(), base, goal, options);
  std::vector<MoveTrigger> out;
  for (const rules::Bindings& answer : result.answers) {
    MoveTrigger t{answer[0].second, answer[1].second, answer[2].second};
    if (!(t.src == t.dst)) out.push_back(std::move(t));
  }
  return out;
}

std::vector<Move> ResolveConflicts(const std::vector<MoveTrigger>& triggers,
                                   const cost::Placement& placement,
                                   const cost::AccessStats& stats,
                                   const cost::SystemModel& model,
                                   std::vector<std::string>* log) {
  auto note = [&](const MoveTrigger& t, const std::string& why) {
    if (log != nullptr) log->push_back("dropped " + t.ToString() + ": " + why);
  };
  std::map<cost::FragmentId, std::vector<MoveTrigger>> by_fragment;
  for (const MoveTrigger& t : triggers) {
    auto holder = placement.find(t.fragment);
    if (holder == placement.end() || !(holder->second == t.src)) {
      note(t, "fragment not placed at src");
      continue;
    }
    by_fragment[t.fragment].push_back(t);
  }

  const double before = cost::TotalTransmissionCost(placement, stats, model);
  cost::Placement working = placement;
  std::vector<Move> moves;
  for (auto& [fragment, candidates] : by_fragment) {
    std::sort(candidates.begin(), candidates.end(),
              [](const MoveTrigger& a, const MoveTrigger& b) {
                return std::tie(a.dst, a.src) < std::tie(b.dst, b.src);
              });
    std::optional<Move> best;
    for (const MoveTrigger& t : candidates) {
      cost::Placement trial = working;
      trial[fragment] = t.dst;
      auto violations =
          cost::CheckCapacity(trial, model.fragments, model.capacity);
      if (std::any_of(violations.begin(), violations.end(),
                      [&](const cost::CapacityViolation& v) {
                        return v.node == t.dst;
                      })) {
        note(t, "destination capacity exceeded");
        continue;
      }
      cost::Placement hypothetical = placement;
      hypothetical[fragment] = t.dst;
      double benefit =
          before - cost::TotalTransmissionCost(hypothetical, stats, model);
      if (!best || benefit > best->benefit) best = Move{t, benefit};
    }
    if (best) {
      working[fragment] = best->trigger.dst;
      moves.push_back(*best);
    }
  }
  return moves;
}

}  // namespace fragalloc::policy
