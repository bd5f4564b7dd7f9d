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

#ifndef FRAGALLOC_POLICY_H_
#define FRAGALLOC_POLICY_H_

#include <string>
#include <string_view>
#include <vector>

#include "fragalloc/cost_model.h"
#include "fragalloc/rules/engine.h"
#include "fragalloc/rules/fact_base.h"
#include "fragalloc/rules/program.h"

namespace fragalloc::policy {

// A named rule set defining move/3. The access_cost/3 prelude is not part
// of `text`; it is added when the policy is compiled.
struct PolicyRuleSet {
  std::string name;
  std::string text;
  rules::Program program;
};

// Names accepted by BuiltinPolicy, ascending.
std::vector<std::string> BuiltinPolicyNames();

// "threshold" or "nna". Throws InputError("unknown policy 'x'") otherwise.
PolicyRuleSet BuiltinPolicy(std::string_view name);

// Parses user-supplied policy text. Throws ParseError/InputError, or
// InputError when move/3 is not defined by a rule.
PolicyRuleSet ParsePolicy(std::string name, std::string_view text);
PolicyRuleSet LoadPolicyFile(const std::string& path);

// The access_cost prelude followed by the policy rules, ready to be edited
// and passed back through --policy-file.
std::string ExportPolicy(const PolicyRuleSet& policy);

// Prelude and policy merged and stratified once, reused every round.
class CompiledPolicy {
 public:
  explicit CompiledPolicy(PolicyRuleSet policy);

  const PolicyRuleSet& rule_set() const { return rule_set_; }
  const rules::StratifiedProgram& program() const { return program_; }

 private:
  PolicyRuleSet rule_set_;
  rules::StratifiedProgram program_;
};

struct MoveTrigger {
  cost::NodeId src;
  cost::NodeId dst;
  cost::FragmentId fragment;

  std::string ToString() const;
  friend bool operator==(const MoveTrigger&, const MoveTrigger&) = default;
  friend bool operator<(const MoveTrigger& a, const MoveTrigger& b);
};

// Answers of move(X,Y,Z) over `base`, deduplicated and ordered by term
// order of (src, dst, fragment). Answers with src == dst are discarded.
std::vector<MoveTrigger> ComputeTriggers(
    const rules::FactBase& base, const CompiledPolicy& policy,
    const rules::EvalOptions& options = {});

struct Move {
  MoveTrigger trigger;
  // Total transmission cost before the move minus after it.
  double benefit = 0;

  friend bool operator==(const Move&, const Move&) = default;
};

// Picks at most one move per fragment: stale triggers (fragment not at
// src) and moves overflowing dst capacity are dropped, then the highest
// benefit wins with ties going to the smallest (dst, src). Fragments are
// handled in ascending order and each accepted move counts toward later
// capacity checks. Drop reasons are appended to `log` when non-null.
std::vector<Move> ResolveConflicts(const std::vector<MoveTrigger>& triggers,
                                   const cost::Placement& placement,
                                   const cost::AccessStats& stats,
                                   const cost::SystemModel& model,
                                   std::vector<std::string>* log = nullptr);

}  // namespace fragalloc::policy

#endif  // FRAGALLOC_POLICY_H_
