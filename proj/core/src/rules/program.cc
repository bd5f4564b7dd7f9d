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

#include "fragalloc/rules/program.h"

#include <algorithm>
#include <set>

#include "fragalloc/error.h"

namespace fragalloc::rules {
namespace {

int Precedence(Expr::Kind kind) {
  switch (kind) {
    case Expr::Kind::kAdd:
    case Expr::Kind::kSubtract:
      return 1;
    case Expr::Kind::kMultiply:
    case Expr::Kind::kDivide:
      return 2;
    case Expr::Kind::kNegate:
      return 3;
    case Expr::Kind::kTerm:
      return 4;
  }
  return 4;
}

char OperatorChar(Expr::Kind kind) {
  switch (kind) {
    case Expr::Kind::kAdd:
      return '+';
    case Expr::Kind::kSubtract:
    case Expr::Kind::kNegate:
      return '-';
    case Expr::Kind::kMultiply:
      return '*';
    case Expr::Kind::kDivide:
      return '/';
    case Expr::Kind::kTerm:
      break;
  }
  return '?';
}

std::string Parenthesize(const Expr& e, bool wrap) {
  return wrap ? "(" + e.ToString() + ")" : e.ToString();
}

void ExprVariables(const Expr& e, std::vector<std::string>* out) {
  if (e.kind == Expr::Kind::kTerm) {
    if (e.term.is_variable()) out->push_back(e.term.variable());
    return;
  }
  for (const Expr& op : e.operands) ExprVariables(op, out);
}

void AtomVariables(const Atom& a, std::vector<std::string>* out) {
  for (const Term& t : a.args) {
    if (t.is_variable()) out->push_back(t.variable());
  }
}

// Variables of one literal, in order of appearance.
std::vector<std::string> LiteralVariables(const Literal& literal) {
  std::vector<std::string> out;
  std::visit(
      [&](const auto& l) {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, Atom>) {
          AtomVariables(l, &out);
        } else if constexpr (std::is_same_v<T, Comparison>) {
          ExprVariables(l.lhs, &out);
          ExprVariables(l.rhs, &out);
        } else if constexpr (std::is_same_v<T, Binding>) {
          out.push_back(l.variable);
          ExprVariables(l.value, &out);
        } else {
          out.push_back(l.result);
          out.push_back(l.value);
          AtomVariables(l.source, &out);
        }
      },
      literal);
  return out;
}

Term SubstituteTerm(const Term& t, const std::map<std::string, Value>& values) {
  if (!t.is_variable()) return t;
  auto it = values.find(t.variable());
  return it == values.end() ? t : Term(it->second);
}

Atom SubstituteAtom(const Atom& a, const std::map<std::string, Value>& values) {
  Atom out{a.predicate, {}};
  for (const Term& t : a.args) out.args.push_back(SubstituteTerm(t, values));
  return out;
}

Expr SubstituteExpr(const Expr& e, const std::map<std::string, Value>& values) {
  Expr out = e;
  if (e.kind == Expr::Kind::kTerm) {
    out.term = SubstituteTerm(e.term, values);
  } else {
    for (Expr& op : out.operands) op = SubstituteExpr(op, values);
  }
  return out;
}

}  // namespace

Expr Expr::Leaf(Term t) {
  Expr e;
  e.term = std::move(t);
  return e;
}

Expr Expr::Binary(Kind kind, Expr lhs, Expr rhs) {
  Expr e;
  e.kind = kind;
  e.operands.push_back(std::move(lhs));
  e.operands.push_back(std::move(rhs));
  return e;
}

Expr Expr::Negate(Expr operand) {
  Expr e;
  e.kind = Kind::kNegate;
  e.operands.push_back(std::move(operand));
  return e;
}

std::string Expr::ToString() const {
  if (kind == Kind::kTerm) return term.ToString();
  int prec = Precedence(kind);
  if (kind == Kind::kNegate) {
    const Expr& op = operands[0];
    // A negated number literal would re-parse as a negative literal.
    bool wrap = Precedence(op.kind) < prec ||
                (op.kind == Kind::kTerm && !op.term.is_variable() &&
                 op.term.value().is_number());
    return "-" + Parenthesize(op, wrap);
  }
  const Expr& lhs = operands[0];
  const Expr& rhs = operands[1];
  std::string out = Parenthesize(lhs, Precedence(lhs.kind) < prec);
  out += OperatorChar(kind);
  out += Parenthesize(rhs,
                      Precedence(rhs.kind) <= prec && rhs.kind != Kind::kTerm);
  return out;
}

std::string_view CompareOpText(CompareOp op) {
  switch (op) {
    case CompareOp::kEq:
      return "==";
    case CompareOp::kNe:
      return "!=";
    case CompareOp::kLt:
      return "<";
    case CompareOp::kGt:
      return ">";
    case CompareOp::kLe:
      return "<=";
    case CompareOp::kGe:
      return ">=";
  }
  return "?";
}

std::string LiteralToString(const Literal& literal) {
  return std::visit(
      [](const auto& l) -> std::string {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, Atom>) {
          return l.ToString();
        } else if constexpr (std::is_same_v<T, Comparison>) {
          return l.lhs.ToString() + " " + std::string(CompareOpText(l.op)) +
                 " " + l.rhs.ToString();
        } else if constexpr (std::is_same_v<T, Binding>) {
          return l.variable + " is " + l.value.ToString();
        } else {
          return l.result + " is sum(" + l.value + " : " + l.source.ToString() +
                 ")";
        }
      },
      literal);
}

std::string Rule::ToString() const {
  std::string out = head.ToString() + " :- ";
  for (size_t i = 0; i < body.size(); ++i) {
    if (i) out += ", ";
    out += LiteralToString(body[i]);
  }
  return out + ".";
}

std::string Program::ToString() const {
  std::string out;
  for (const GroundAtom& f : facts) out += f.ToString() + ".\n";
  for (const Rule& r : rules) out += r.ToString() + "\n";
  return out;
}

std::vector<std::string> RuleVariables(const Rule& rule) {
  std::vector<std::string> all;
  AtomVariables(rule.head, &all);
  for (const Literal& l : rule.body) {
    std::vector<std::string> vars = LiteralVariables(l);
    all.insert(all.end(), vars.begin(), vars.end());
  }
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (std::string& v : all) {
    if (seen.insert(v).second) out.push_back(std::move(v));
  }
  return out;
}

void CheckSafety(const Rule& rule) {
  auto unsafe = [&](const std::string& var, const std::string& why) {
    throw InputError("unsafe rule `" + rule.ToString() + "`: variable " + var +
                     " " + why);
  };

  // Occurrences outside each aggregation literal decide group vs local.
  std::map<std::string, int> occurrences;
  {
    std::vector<std::string> head_vars;
    AtomVariables(rule.head, &head_vars);
    for (const std::string& v : head_vars) ++occurrences[v];
    for (const Literal& l : rule.body) {
      for (const std::string& v : LiteralVariables(l)) ++occurrences[v];
    }
  }

  std::set<std::string> bound;
  for (const Literal& literal : rule.body) {
    if (const auto* atom = std::get_if<Atom>(&literal)) {
      std::vector<std::string> vars;
      AtomVariables(*atom, &vars);
      bound.insert(vars.begin(), vars.end());
    } else if (const auto* cmp = std::get_if<Comparison>(&literal)) {
      for (const std::string& v : LiteralVariables(literal)) {
        if (!bound.count(v)) {
          unsafe(v, "in comparison `" + LiteralToString(*cmp) +
                        "` is not bound by an earlier literal");
        }
      }
    } else if (const auto* bind = std::get_if<Binding>(&literal)) {
      std::vector<std::string> vars;
      ExprVariables(bind->value, &vars);
      for (const std::string& v : vars) {
        if (!bound.count(v)) {
          unsafe(v, "in `" + LiteralToString(*bind) +
                        "` is not bound by an earlier literal");
        }
      }
      bound.insert(bind->variable);
    } else {
      const auto& agg = std::get<Aggregation>(literal);
      std::vector<std::string> source_vars;
      AtomVariables(agg.source, &source_vars);
      if (std::find(source_vars.begin(), source_vars.end(), agg.value) ==
          source_vars.end()) {
        unsafe(agg.value, "summed in `" + LiteralToString(agg) +
                              "` does not occur in the aggregated atom");
      }
      if (std::find(source_vars.begin(), source_vars.end(), agg.result) !=
          source_vars.end()) {
        unsafe(agg.result, "cannot be both the result and an argument of `" +
                               LiteralToString(agg) + "`");
      }
      std::map<std::string, int> inside;
      for (const std::string& v : LiteralVariables(literal)) ++inside[v];
      if (occurrences[agg.value] > inside[agg.value]) {
        unsafe(agg.value, "summed in `" + LiteralToString(agg) +
                              "` must not occur outside the aggregate");
      }
      for (const std::string& v : source_vars) {
        if (occurrences[v] > inside[v]) bound.insert(v);
      }
      bound.insert(agg.result);
    }
  }
  std::vector<std::string> head_vars;
  AtomVariables(rule.head, &head_vars);
  for (const std::string& v : head_vars) {
    if (!bound.count(v)) unsafe(v, "in the head is not bound by the body");
  }
}

std::map<std::string, size_t> CollectArities(const Program& program) {
  std::map<std::string, size_t> arities;
  auto note = [&](const std::string& pred, size_t arity) {
    auto [it, inserted] = arities.emplace(pred, arity);
    if (!inserted && it->second != arity) {
      throw InputError("inconsistent arity for predicate " + pred + ": " +
                       std::to_string(it->second) + " vs " +
                       std::to_string(arity));
    }
  };
  for (const GroundAtom& f : program.facts) note(f.predicate, f.args.size());
  for (const Rule& r : program.rules) {
    note(r.head.predicate, r.head.args.size());
    for (const Literal& l : r.body) {
      if (const auto* a = std::get_if<Atom>(&l)) {
        note(a->predicate, a->args.size());
      } else if (const auto* agg = std::get_if<Aggregation>(&l)) {
        note(agg->source.predicate, agg->source.args.size());
      }
    }
  }
  return arities;
}

Program Merge(Program first, const Program& second) {
  first.rules.insert(first.rules.end(), second.rules.begin(),
                     second.rules.end());
  first.facts.insert(first.facts.end(), second.facts.begin(),
                     second.facts.end());
  CollectArities(first);
  return first;
}

Rule Substitute(const Rule& rule, const std::map<std::string, Value>& values) {
  Rule out;
  out.head = SubstituteAtom(rule.head, values);
  for (const Literal& literal : rule.body) {
    out.body.push_back(std::visit(
        [&](const auto& l) -> Literal {
          using T = std::decay_t<decltype(l)>;
          if constexpr (std::is_same_v<T, Atom>) {
            return SubstituteAtom(l, values);
          } else if constexpr (std::is_same_v<T, Comparison>) {
            return Comparison{l.op, SubstituteExpr(l.lhs, values),
                              SubstituteExpr(l.rhs, values)};
          } else if constexpr (std::is_same_v<T, Binding>) {
            return Binding{l.variable, SubstituteExpr(l.value, values)};
          } else {
            return Aggregation{l.result, l.value,
                               SubstituteAtom(l.source, values)};
          }
        },
        literal));
  }
  return out;
}

}  // namespace fragalloc::rules
