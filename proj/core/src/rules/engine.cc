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

#include "fragalloc/rules/engine.h"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <set>

#include "fragalloc/error.h"

namespace fragalloc::rules {
namespace {

constexpr size_t kMaxArity = 32;

// ---------------------------------------------------------------------------
// Rule compilation: variables become frame slots and every literal knows
// statically which of its variables are already bound.

struct Slot {
  bool is_var = false;
  int slot = -1;
  Value constant;
};

struct CompiledAtom {
  std::string predicate;
  std::vector<Slot> args;
  uint32_t key_mask = 0;
  std::vector<int> key_positions;
  // (position, slot) for the first occurrence of a variable unbound so far.
  std::vector<std::pair<int, int>> binds;
  // (position, slot) for repeated occurrences of such a variable.
  std::vector<std::pair<int, int>> checks;

  uint32_t full_mask() const {
    return args.size() >= 32 ? ~0u : ((1u << args.size()) - 1);
  }
};

struct CompiledExpr {
  Expr::Kind kind = Expr::Kind::kTerm;
  Slot leaf;
  std::vector<CompiledExpr> operands;
};

enum class LiteralKind { kAtom, kCompare, kBind, kAggregate };

struct CompiledLiteral {
  LiteralKind kind = LiteralKind::kAtom;
  CompiledAtom atom;  // kAtom, and the source atom of kAggregate
  CompareOp op = CompareOp::kEq;
  CompiledExpr lhs;  // kCompare lhs, kBind value
  CompiledExpr rhs;
  int target = -1;  // kBind variable, kAggregate result
  bool target_bound = false;
  int value_position = -1;            // kAggregate summed argument
  std::vector<int> open_group_slots;  // kAggregate group vars bound here
  // Variables bound before this literal, for error reports.
  std::vector<std::pair<std::string, int>> bound_before;
};

struct CompiledRule {
  const Rule* source = nullptr;
  CompiledAtom head;
  std::vector<CompiledLiteral> body;
  int slot_count = 0;
  std::vector<int> recursive_atoms;  // body indices of same-stratum atoms
};

class RuleCompiler {
 public:
  explicit RuleCompiler(const Rule& rule) { out_.source = &rule; }

  CompiledRule Compile(const std::set<std::string>& same_stratum) {
    const Rule& rule = *out_.source;
    std::map<std::string, int> occurrences;
    for (const std::string& v : OccurrenceList(rule)) ++occurrences[v];

    for (size_t i = 0; i < rule.body.size(); ++i) {
      CompiledLiteral lit;
      for (const auto& [name, slot] : slots_) {
        if (bound_.count(slot)) lit.bound_before.emplace_back(name, slot);
      }
      const Literal& literal = rule.body[i];
      if (const auto* atom = std::get_if<Atom>(&literal)) {
        lit.kind = LiteralKind::kAtom;
        lit.atom = CompileAtom(*atom);
        if (same_stratum.count(atom->predicate)) {
          out_.recursive_atoms.push_back(static_cast<int>(i));
        }
      } else if (const auto* cmp = std::get_if<Comparison>(&literal)) {
        lit.kind = LiteralKind::kCompare;
        lit.op = cmp->op;
        lit.lhs = CompileExpr(cmp->lhs);
        lit.rhs = CompileExpr(cmp->rhs);
      } else if (const auto* bind = std::get_if<Binding>(&literal)) {
        lit.kind = LiteralKind::kBind;
        lit.lhs = CompileExpr(bind->value);
        lit.target = SlotOf(bind->variable);
        lit.target_bound = bound_.count(lit.target) > 0;
        bound_.insert(lit.target);
      } else {
        const auto& agg = std::get<Aggregation>(literal);
        lit.kind = LiteralKind::kAggregate;
        std::map<std::string, int> inside;
        inside[agg.result]++;
        inside[agg.value]++;
        for (const Term& t : agg.source.args) {
          if (t.is_variable()) inside[t.variable()]++;
        }
        std::set<int> before = bound_;
        lit.atom = CompileAtom(agg.source);
        for (size_t p = 0; p < agg.source.args.size(); ++p) {
          const Term& t = agg.source.args[p];
          if (t.is_variable() && t.variable() == agg.value &&
              lit.value_position < 0) {
            lit.value_position = static_cast<int>(p);
          }
        }
        // Variables newly bound by the source match: group ones stay bound,
        // local ones are released after the literal.
        bound_ = before;
        std::set<int> seen;
        for (size_t p = 0; p < agg.source.args.size(); ++p) {
          const Term& t = agg.source.args[p];
          if (!t.is_variable()) continue;
          int slot = SlotOf(t.variable());
          bool group = occurrences[t.variable()] > inside[t.variable()];
          if (group && !before.count(slot) && seen.insert(slot).second) {
            lit.open_group_slots.push_back(slot);
            bound_.insert(slot);
          }
        }
        lit.target = SlotOf(agg.result);
        lit.target_bound = bound_.count(lit.target) > 0;
        bound_.insert(lit.target);
      }
      out_.body.push_back(std::move(lit));
    }
    out_.head = CompileAtom(rule.head);
    out_.slot_count = static_cast<int>(slots_.size());
    return std::move(out_);
  }

 private:
  static std::vector<std::string> OccurrenceList(const Rule& rule) {
    std::vector<std::string> out;
    auto atom_vars = [&](const Atom& a) {
      for (const Term& t : a.args) {
        if (t.is_variable()) out.push_back(t.variable());
      }
    };
    std::function<void(const Expr&)> expr_vars = [&](const Expr& e) {
      if (e.kind == Expr::Kind::kTerm) {
        if (e.term.is_variable()) out.push_back(e.term.variable());
      } else {
        for (const Expr& op : e.operands) expr_vars(op);
      }
    };
    atom_vars(rule.head);
    for (const Literal& l : rule.body) {
      if (const auto* a = std::get_if<Atom>(&l)) {
        atom_vars(*a);
      } else if (const auto* c = std::get_if<Comparison>(&l)) {
        expr_vars(c->lhs);
        expr_vars(c->rhs);
      } else if (const auto* b = std::get_if<Binding>(&l)) {
        out.push_back(b->variable);
        expr_vars(b->value);
      } else {
        const auto& g = std::get<Aggregation>(l);
        out.push_back(g.result);
        out.push_back(g.value);
        atom_vars(g.source);
      }
    }
    return out;
  }

  int SlotOf(const std::string& name) {
    auto [it, inserted] = slots_.emplace(name, static_cast<int>(slots_.size()));
    return it->second;
  }

  Slot CompileTerm(const Term& t) {
    Slot s;
    if (t.is_variable()) {
      s.is_var = true;
      s.slot = SlotOf(t.variable());
    } else {
      s.constant = t.value();
    }
    return s;
  }

  CompiledAtom CompileAtom(const Atom& atom) {
    CompiledAtom out;
    out.predicate = atom.predicate;
    std::set<int> bound_here;
    for (size_t p = 0; p < atom.args.size(); ++p) {
      Slot s = CompileTerm(atom.args[p]);
      if (!s.is_var || bound_.count(s.slot)) {
        out.key_mask |= 1u << p;
        out.key_positions.push_back(static_cast<int>(p));
      } else if (bound_here.insert(s.slot).second) {
        out.binds.emplace_back(static_cast<int>(p), s.slot);
      } else {
        out.checks.emplace_back(static_cast<int>(p), s.slot);
      }
      out.args.push_back(std::move(s));
    }
    bound_.insert(bound_here.begin(), bound_here.end());
    return out;
  }

  CompiledExpr CompileExpr(const Expr& e) {
    CompiledExpr out;
    out.kind = e.kind;
    if (e.kind == Expr::Kind::kTerm) {
      out.leaf = CompileTerm(e.term);
    } else {
      for (const Expr& op : e.operands) out.operands.push_back(CompileExpr(op));
    }
    return out;
  }

  CompiledRule out_;
  std::map<std::string, int> slots_;
  std::set<int> bound_;
};

// ---------------------------------------------------------------------------
// Evaluation.

class StratumEvaluator {
 public:
  StratumEvaluator(FactBase& db, size_t* derived, size_t cap)
      : db_(db), derived_(derived), cap_(cap) {}

  // Runs `rule` with the body atom at `delta_position` read from `delta`
  // (or everything from the full base when delta_position < 0), adding new
  // head facts to `fresh`.
  void Run(const CompiledRule& rule, int delta_position, FactBase* delta,
           FactBase* fresh) {
    rule_ = &rule;
    delta_position_ = delta_position;
    delta_ = delta;
    fresh_ = fresh;
    frame_.assign(rule.slot_count, Value());
    Solve(0);
  }

 private:
  const Value& Resolve(const Slot& s) const {
    return s.is_var ? frame_[s.slot] : s.constant;
  }

  [[noreturn]] void Fail(size_t literal, const std::string& what) const {
    std::map<std::string, Value> values;
    for (const auto& [name, slot] : rule_->body[literal].bound_before) {
      values[name] = frame_[slot];
    }
    throw EvaluationError(what + " in rule instance `" +
                          Substitute(*rule_->source, values).ToString() + "`");
  }

  Value Eval(const CompiledExpr& e, size_t literal) const {
    if (e.kind == Expr::Kind::kTerm) return Resolve(e.leaf);
    std::vector<double> nums;
    for (const CompiledExpr& op : e.operands) {
      Value v = Eval(op, literal);
      if (!v.is_number()) {
        Fail(literal, "arithmetic on non-numeric term '" + v.symbol() + "'");
      }
      nums.push_back(v.number());
    }
    double r = 0;
    switch (e.kind) {
      case Expr::Kind::kAdd:
        r = nums[0] + nums[1];
        break;
      case Expr::Kind::kSubtract:
        r = nums[0] - nums[1];
        break;
      case Expr::Kind::kMultiply:
        r = nums[0] * nums[1];
        break;
      case Expr::Kind::kDivide:
        if (nums[1] == 0.0) Fail(literal, "division by zero");
        r = nums[0] / nums[1];
        break;
      case Expr::Kind::kNegate:
        r = -nums[0];
        break;
      case Expr::Kind::kTerm:
        break;
    }
    if (!std::isfinite(r)) Fail(literal, "non-finite arithmetic result");
    return Value::Number(r);
  }

  static bool Compare(CompareOp op, const Value& a, const Value& b) {
    int c = Value::Compare(a, b);
    switch (op) {
      case CompareOp::kEq:
        return c == 0;
      case CompareOp::kNe:
        return c != 0;
      case CompareOp::kLt:
        return c < 0;
      case CompareOp::kGt:
        return c > 0;
      case CompareOp::kLe:
        return c <= 0;
      case CompareOp::kGe:
        return c >= 0;
    }
    return false;
  }

  Tuple Key(const CompiledAtom& atom) const {
    Tuple key;
    key.reserve(atom.key_positions.size());
    for (int p : atom.key_positions) key.push_back(Resolve(atom.args[p]));
    return key;
  }

  // Binds the atom's free variables from `row`; false when a repeated
  // variable disagrees.
  bool Bind(const CompiledAtom& atom, const Tuple& row) {
    for (const auto& [pos, slot] : atom.binds) frame_[slot] = row[pos];
    for (const auto& [pos, slot] : atom.checks) {
      if (!(row[pos] == frame_[slot])) return false;
    }
    return true;
  }

  template <typename Fn>
  void ForEachMatch(Relation* rel, const CompiledAtom& atom, Fn&& fn) {
    if (rel == nullptr || rel->empty()) return;
    if (atom.key_mask == atom.full_mask()) {
      if (rel->Contains(Key(atom))) fn(nullptr);
      return;
    }
    if (atom.key_mask == 0) {
      const std::vector<Tuple>& rows = rel->rows();
      for (size_t r = 0; r < rows.size(); ++r) {
        if (Bind(atom, rows[r])) fn(&rows[r]);
      }
      return;
    }
    const std::vector<uint32_t>& hits = rel->Lookup(atom.key_mask, Key(atom));
    for (uint32_t r : hits) {
      const Tuple& row = rel->rows()[r];
      if (Bind(atom, row)) fn(&row);
    }
  }

  void Emit() {
    const CompiledAtom& head = rule_->head;
    GroundAtom fact{head.predicate, {}};
    fact.args.reserve(head.args.size());
    for (const Slot& s : head.args) fact.args.push_back(Resolve(s));
    if (db_.Contains(fact)) return;
    if (fresh_->Insert(fact)) {
      if (++*derived_ > cap_) {
        throw EvaluationError("derived-fact cap of " + std::to_string(cap_) +
                              " exceeded");
      }
    }
  }

  void Solve(size_t i) {
    if (i == rule_->body.size()) {
      Emit();
      return;
    }
    const CompiledLiteral& lit = rule_->body[i];
    switch (lit.kind) {
      case LiteralKind::kAtom: {
        FactBase& source =
            static_cast<int>(i) == delta_position_ ? *delta_ : db_;
        ForEachMatch(source.FindMutable(lit.atom.predicate), lit.atom,
                     [&](const Tuple*) { Solve(i + 1); });
        return;
      }
      case LiteralKind::kCompare:
        if (Compare(lit.op, Eval(lit.lhs, i), Eval(lit.rhs, i))) Solve(i + 1);
        return;
      case LiteralKind::kBind: {
        Value v = Eval(lit.lhs, i);
        if (lit.target_bound) {
          if (v == frame_[lit.target]) Solve(i + 1);
          return;
        }
        frame_[lit.target] = std::move(v);
        Solve(i + 1);
        return;
      }
      case LiteralKind::kAggregate:
        SolveAggregate(i, lit);
        return;
    }
  }

  void SolveAggregate(size_t i, const CompiledLiteral& lit) {
    // Group key -> matching rows; rows are summed in term order so the
    // result does not depend on storage order.
    std::map<Tuple, std::vector<const Tuple*>, decltype(&TupleLess)> groups(
        &TupleLess);
    ForEachMatch(db_.FindMutable(lit.atom.predicate), lit.atom,
                 [&](const Tuple* row) {
                   Tuple key;
                   for (int slot : lit.open_group_slots) {
                     key.push_back(frame_[slot]);
                   }
                   groups[std::move(key)].push_back(row);
                 });
    if (lit.open_group_slots.empty() && groups.empty()) groups[Tuple{}];
    for (auto& [key, rows] : groups) {
      std::sort(rows.begin(), rows.end(), [](const Tuple* a, const Tuple* b) {
        return TupleLess(*a, *b);
      });
      double sum = 0;
      for (const Tuple* row : rows) {
        // A fully bound source matches at most one fact, passed as nullptr.
        const Value& v = row ? (*row)[lit.value_position]
                             : Resolve(lit.atom.args[lit.value_position]);
        if (!v.is_number()) {
          Fail(i, "sum over non-numeric term '" + v.symbol() + "'");
        }
        sum += v.number();
      }
      for (size_t k = 0; k < key.size(); ++k) {
        frame_[lit.open_group_slots[k]] = key[k];
      }
      Value total = Value::Number(sum);
      if (lit.target_bound) {
        if (total == frame_[lit.target]) Solve(i + 1);
      } else {
        frame_[lit.target] = total;
        Solve(i + 1);
      }
    }
  }

  FactBase& db_;
  size_t* derived_;
  size_t cap_;
  const CompiledRule* rule_ = nullptr;
  int delta_position_ = -1;
  FactBase* delta_ = nullptr;
  FactBase* fresh_ = nullptr;
  std::vector<Value> frame_;
};

void Absorb(FactBase& db, const FactBase& fresh) {
  for (const auto& [name, rel] : fresh.relations()) {
    Relation& target = db.GetOrCreate(name, rel.arity());
    for (const Tuple& row : rel.rows()) target.Insert(row);
  }
}

}  // namespace

int StratifiedProgram::stratum(const std::string& predicate) const {
  auto it = strata_.find(predicate);
  return it == strata_.end() ? 0 : it->second;
}

StratifiedProgram Stratify(Program program) {
  StratifiedProgram out;
  out.arities_ = CollectArities(program);
  for (const Rule& r : program.rules) CheckSafety(r);

  std::vector<std::string> names;
  std::map<std::string, int> id;
  for (const auto& [name, arity] : out.arities_) {
    if (arity > kMaxArity) {
      throw InputError("predicate " + name + " exceeds the maximum arity of " +
                       std::to_string(kMaxArity));
    }
    id[name] = static_cast<int>(names.size());
    names.push_back(name);
  }
  struct Edge {
    int to;
    int weight;
  };
  std::vector<std::vector<Edge>> edges(names.size());
  for (const Rule& r : program.rules) {
    int head = id[r.head.predicate];
    for (const Literal& l : r.body) {
      if (const auto* a = std::get_if<Atom>(&l)) {
        edges[id[a->predicate]].push_back({head, 0});
      } else if (const auto* g = std::get_if<Aggregation>(&l)) {
        edges[id[g->source.predicate]].push_back({head, 1});
      }
    }
  }

  // Tarjan's SCC; components come out sinks first.
  const int n = static_cast<int>(names.size());
  std::vector<int> index(n, -1), low(n, 0), comp(n, -1);
  std::vector<bool> on_stack(n, false);
  std::vector<int> stack;
  std::vector<std::vector<int>> components;
  int counter = 0;
  std::function<void(int)> connect = [&](int v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack[v] = true;
    for (const Edge& e : edges[v]) {
      if (index[e.to] < 0) {
        connect(e.to);
        low[v] = std::min(low[v], low[e.to]);
      } else if (on_stack[e.to]) {
        low[v] = std::min(low[v], index[e.to]);
      }
    }
    if (low[v] == index[v]) {
      std::vector<int> members;
      int w;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack[w] = false;
        comp[w] = static_cast<int>(components.size());
        members.push_back(w);
      } while (w != v);
      components.push_back(std::move(members));
    }
  };
  for (int v = 0; v < n; ++v) {
    if (index[v] < 0) connect(v);
  }

  for (int v = 0; v < n; ++v) {
    for (const Edge& e : edges[v]) {
      if (e.weight == 0 || comp[v] != comp[e.to]) continue;
      if (v == e.to) {
        throw InputError("aggregation cycle through " + names[v]);
      }
      // Path e.to -> ... -> v inside the component closes the cycle.
      std::vector<int> parent(n, -1);
      std::deque<int> queue{e.to};
      parent[e.to] = e.to;
      while (!queue.empty() && parent[v] < 0) {
        int u = queue.front();
        queue.pop_front();
        for (const Edge& f : edges[u]) {
          if (comp[f.to] == comp[v] && parent[f.to] < 0) {
            parent[f.to] = u;
            queue.push_back(f.to);
          }
        }
      }
      std::vector<int> path;
      for (int u = v; u != e.to; u = parent[u]) path.push_back(u);
      path.push_back(e.to);
      std::reverse(path.begin(), path.end());
      std::string cycle = names[v];
      for (int u : path) cycle += " -> " + names[u];
      throw InputError("aggregation cycle through " + cycle);
    }
  }

  std::vector<int> comp_stratum(components.size(), 0);
  for (size_t c = components.size(); c-- > 0;) {
    for (int v : components[c]) {
      for (const Edge& e : edges[v]) {
        if (comp[e.to] == static_cast<int>(c)) continue;
        comp_stratum[comp[e.to]] =
            std::max(comp_stratum[comp[e.to]], comp_stratum[c] + e.weight);
      }
    }
  }
  int max_stratum = 0;
  for (int v = 0; v < n; ++v) {
    out.strata_[names[v]] = comp_stratum[comp[v]];
    max_stratum = std::max(max_stratum, comp_stratum[comp[v]]);
  }
  out.rules_by_stratum_.assign(max_stratum + 1, {});
  for (size_t r = 0; r < program.rules.size(); ++r) {
    out.rules_by_stratum_[out.strata_[program.rules[r].head.predicate]]
        .push_back(r);
  }
  out.program_ = std::move(program);
  return out;
}

FactBase Evaluate(const StratifiedProgram& program, const FactBase& base,
                  const EvalOptions& options) {
  for (const auto& [name, arity] : program.arities()) {
    const Relation* rel = base.Find(name);
    if (rel != nullptr && rel->arity() != arity) {
      throw InputError("inconsistent arity for predicate " + name + ": " +
                       std::to_string(arity) + " in program vs " +
                       std::to_string(rel->arity()) + " in fact base");
    }
  }
  FactBase db = base;
  for (const GroundAtom& f : program.program().facts) db.Insert(f);

  size_t derived = 0;
  StratumEvaluator evaluator(db, &derived, options.max_derived_facts);
  for (int s = 0; s < program.stratum_count(); ++s) {
    const std::vector<size_t>& indices = program.rules_in(s);
    if (indices.empty()) continue;
    std::set<std::string> heads;
    for (size_t r : indices) {
      heads.insert(program.program().rules[r].head.predicate);
    }
    std::vector<CompiledRule> rules;
    for (size_t r : indices) {
      rules.push_back(RuleCompiler(program.program().rules[r]).Compile(heads));
    }

    FactBase delta;
    for (const CompiledRule& rule : rules) {
      evaluator.Run(rule, -1, nullptr, &delta);
    }
    Absorb(db, delta);
    while (delta.size() > 0) {
      FactBase fresh;
      for (const CompiledRule& rule : rules) {
        for (int pos : rule.recursive_atoms) {
          const auto& pred = rule.body[pos].atom.predicate;
          const Relation* d = delta.Find(pred);
          if (d == nullptr || d->empty()) continue;
          evaluator.Run(rule, pos, &delta, &fresh);
        }
      }
      Absorb(db, fresh);
      delta = std::move(fresh);
    }
  }
  return db;
}

QueryResult Match(const FactBase& facts, const Atom& goal) {
  QueryResult result;
  const Relation* rel = facts.Find(goal.predicate);
  if (rel == nullptr) {
    result.unknown_predicate = true;
    return result;
  }
  if (rel->arity() != goal.args.size()) return result;

  std::vector<std::string> names;
  std::vector<int> slot_of(goal.args.size(), -1);
  for (size_t p = 0; p < goal.args.size(); ++p) {
    if (!goal.args[p].is_variable()) continue;
    const std::string& v = goal.args[p].variable();
    auto it = std::find(names.begin(), names.end(), v);
    slot_of[p] = static_cast<int>(it - names.begin());
    if (it == names.end()) names.push_back(v);
  }

  std::set<Tuple, decltype(&TupleLess)> answers(&TupleLess);
  for (const Tuple& row : rel->rows()) {
    Tuple values(names.size());
    std::vector<bool> set(names.size(), false);
    bool ok = true;
    for (size_t p = 0; p < row.size() && ok; ++p) {
      if (slot_of[p] < 0) {
        ok = row[p] == goal.args[p].value();
      } else if (set[slot_of[p]]) {
        ok = row[p] == values[slot_of[p]];
      } else {
        values[slot_of[p]] = row[p];
        set[slot_of[p]] = true;
      }
    }
    if (ok) answers.insert(std::move(values));
  }
  for (const Tuple& values : answers) {
    Bindings b;
    for (size_t k = 0; k < names.size(); ++k)
      b.emplace_back(names[k], values[k]);
    result.answers.push_back(std::move(b));
  }
  return result;
}

QueryResult Query(const StratifiedProgram& program, const FactBase& base,
                  const Atom& goal, const EvalOptions& options) {
  FactBase facts = Evaluate(program, base, options);
  QueryResult result = Match(facts, goal);
  if (result.unknown_predicate && program.arities().count(goal.predicate)) {
    result.unknown_predicate = false;
  }
  return result;
}

GroundAtom Instantiate(const Atom& goal, const Bindings& answer) {
  GroundAtom out{goal.predicate, {}};
  for (const Term& t : goal.args) {
    if (!t.is_variable()) {
      out.args.push_back(t.value());
      continue;
    }
    auto it = std::find_if(answer.begin(), answer.end(), [&](const auto& kv) {
      return kv.first == t.variable();
    });
    if (it == answer.end()) {
      throw InputError("answer has no binding for variable " + t.variable());
    }
    out.args.push_back(it->second);
  }
  return out;
}

}  // namespace fragalloc::rules
