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

#ifndef FRAGALLOC_RULES_PROGRAM_H_
#define FRAGALLOC_RULES_PROGRAM_H_

#include <map>
#include <string>
#include <variant>
#include <vector>

#include "fragalloc/rules/term.h"

namespace fragalloc::rules {

// Arithmetic expression over terms. A leaf holds a term; interior nodes hold
// one operand (negation) or two (binary operators).
struct Expr {
  enum class Kind { kTerm, kAdd, kSubtract, kMultiply, kDivide, kNegate };

  Kind kind = Kind::kTerm;
  Term term;
  std::vector<Expr> operands;

  static Expr Leaf(Term t);
  static Expr Binary(Kind kind, Expr lhs, Expr rhs);
  static Expr Negate(Expr operand);

  std::string ToString() const;
  friend bool operator==(const Expr&, const Expr&) = default;
};

enum class CompareOp { kEq, kNe, kLt, kGt, kLe, kGe };

std::string_view CompareOpText(CompareOp op);

struct Comparison {
  CompareOp op;
  Expr lhs;
  Expr rhs;
  friend bool operator==(const Comparison&, const Comparison&) = default;
};

// `Variable is Expr`. Binds the variable, or tests equality when it is
// already bound by an earlier literal.
struct Binding {
  std::string variable;
  Expr value;
  friend bool operator==(const Binding&, const Binding&) = default;
};

// `Result is sum(ValueVar : Source)`.
//
// Variables of `source` that also occur elsewhere in the rule are group
// variables; the rest (including `value`) are local to the aggregate. The
// sum runs over all matching source facts per group. Group variables bound
// by earlier literals select one group (an empty group sums to 0); unbound
// ones enumerate every group present in the data.
struct Aggregation {
  std::string result;
  std::string value;
  Atom source;
  friend bool operator==(const Aggregation&, const Aggregation&) = default;
};

using Literal = std::variant<Atom, Comparison, Binding, Aggregation>;

std::string LiteralToString(const Literal& literal);

struct Rule {
  Atom head;
  std::vector<Literal> body;

  std::string ToString() const;
  friend bool operator==(const Rule&, const Rule&) = default;
};

struct Program {
  std::vector<Rule> rules;
  std::vector<GroundAtom> facts;

  // Source text that parses back to an equal program.
  std::string ToString() const;
  friend bool operator==(const Program&, const Program&) = default;
};

// Variables appearing in the rule, in first-occurrence order.
std::vector<std::string> RuleVariables(const Rule& rule);

// Throws InputError naming the offending variable when the rule is not
// range-restricted under left-to-right evaluation.
void CheckSafety(const Rule& rule);

// Predicate name to arity over rules and facts. Throws InputError on the
// first predicate used with two different arities.
std::map<std::string, size_t> CollectArities(const Program& program);

// Concatenates two programs and re-checks arity consistency.
Program Merge(Program first, const Program& second);

// Replaces bound variables by their values; used to report instantiated
// rules in evaluation errors.
Rule Substitute(const Rule& rule, const std::map<std::string, Value>& values);

}  // namespace fragalloc::rules

#endif  // FRAGALLOC_RULES_PROGRAM_H_
