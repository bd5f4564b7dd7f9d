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

#ifndef FRAGALLOC_RULES_ENGINE_H_
#define FRAGALLOC_RULES_ENGINE_H_

#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "fragalloc/rules/fact_base.h"
#include "fragalloc/rules/program.h"

namespace fragalloc::rules {

// A program whose predicates have been assigned strata such that every
// aggregated predicate lives in a strictly lower stratum than the head that
// aggregates it. Immutable once built.
class StratifiedProgram {
 public:
  const Program& program() const { return program_; }

  // Stratum of `predicate`; predicates the program never mentions are 0.
  int stratum(const std::string& predicate) const;
  int stratum_count() const {
    return static_cast<int>(rules_by_stratum_.size());
  }
  const std::map<std::string, int>& strata() const { return strata_; }
  const std::map<std::string, size_t>& arities() const { return arities_; }

  // Indices into program().rules of the rules whose head is in `stratum`.
  const std::vector<size_t>& rules_in(int stratum) const {
    return rules_by_stratum_[stratum];
  }

 private:
  friend StratifiedProgram Stratify(Program program);

  Program program_;
  std::map<std::string, int> strata_;
  std::map<std::string, size_t> arities_;
  std::vector<std::vector<size_t>> rules_by_stratum_;
};

// Throws InputError("aggregation cycle through p -> ...") when a predicate
// transitively aggregates over itself.
StratifiedProgram Stratify(Program program);

struct EvalOptions {
  // Evaluation aborts with EvaluationError once this many facts have been
  // derived beyond the input.
  size_t max_derived_facts = 1'000'000;
};

// Least fixpoint of `program` over `base` plus the program's own facts,
// computed stratum by stratum with semi-naive iteration. The result holds
// the inputs and every derived fact.
FactBase Evaluate(const StratifiedProgram& program, const FactBase& base,
                  const EvalOptions& options = {});

// Variable name to value, in first-occurrence order within the goal.
using Bindings = std::vector<std::pair<std::string, Value>>;

struct QueryResult {
  std::vector<Bindings> answers;
  // Set when neither the program nor the base knows the goal predicate.
  bool unknown_predicate = false;
};

// Matches `goal` against an already evaluated fact base. Answers are
// distinct and sorted by the total term order over the bound values.
QueryResult Match(const FactBase& facts, const Atom& goal);

// Evaluate, then Match.
QueryResult Query(const StratifiedProgram& program, const FactBase& base,
                  const Atom& goal, const EvalOptions& options = {});

// The goal with its variables replaced by one answer's values.
GroundAtom Instantiate(const Atom& goal, const Bindings& answer);

}  // namespace fragalloc::rules

#endif  // FRAGALLOC_RULES_ENGINE_H_
