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

#ifndef FRAGALLOC_RULES_TERM_H_
#define FRAGALLOC_RULES_TERM_H_

#include <cstddef>
#include <functional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace fragalloc::rules {

// A ground term: a double-precision number or a lowercase-initial symbol.
//
// Values carry a total order used everywhere determinism matters: numbers
// sort before symbols, numbers by value, symbols lexicographically. Number
// equality is exact; -0.0 is normalized to 0.0 on construction.
class Value {
 public:
  Value() : data_(0.0) {}

  static Value Number(double v) { return Value(v == 0.0 ? 0.0 : v); }
  static Value Symbol(std::string s) { return Value(std::move(s)); }

  bool is_number() const { return std::holds_alternative<double>(data_); }
  bool is_symbol() const { return !is_number(); }
  double number() const { return std::get<double>(data_); }
  const std::string& symbol() const { return std::get<std::string>(data_); }

  std::string ToString() const;
  size_t Hash() const;

  friend bool operator==(const Value& a, const Value& b) {
    return a.data_ == b.data_;
  }
  friend bool operator<(const Value& a, const Value& b) {
    return Compare(a, b) < 0;
  }
  friend bool operator>(const Value& a, const Value& b) { return b < a; }
  friend bool operator<=(const Value& a, const Value& b) { return !(b < a); }
  friend bool operator>=(const Value& a, const Value& b) { return !(a < b); }

  // Three-way comparison in the total term order: negative, zero, positive.
  static int Compare(const Value& a, const Value& b);

 private:
  explicit Value(double v) : data_(v) {}
  explicit Value(std::string s) : data_(std::move(s)) {}

  std::variant<double, std::string> data_;
};

using Tuple = std::vector<Value>;

struct TupleHash {
  size_t operator()(const Tuple& t) const;
};

// Formats a number the way fact text expects: integral values without a
// decimal point, everything else as the shortest round-trip decimal.
std::string FormatNumber(double v);

bool IsIdentifier(std::string_view s);
bool IsVariableName(std::string_view s);

// Converts an identifier used in scenario input ("7", "r1") to a term:
// numeric text becomes a number, identifiers become symbols. Returns false
// when the text is neither.
bool ParseValue(std::string_view text, Value* out);

struct Variable {
  std::string name;
  friend bool operator==(const Variable&, const Variable&) = default;
};

// A rule-level term: either a variable or a ground value.
class Term {
 public:
  Term() : data_(Value()) {}
  Term(Value v) : data_(std::move(v)) {}     // NOLINT(runtime/explicit)
  Term(Variable v) : data_(std::move(v)) {}  // NOLINT(runtime/explicit)

  static Term Var(std::string name) { return Term(Variable{std::move(name)}); }

  bool is_variable() const { return std::holds_alternative<Variable>(data_); }
  const std::string& variable() const { return std::get<Variable>(data_).name; }
  const Value& value() const { return std::get<Value>(data_); }

  std::string ToString() const;

  friend bool operator==(const Term&, const Term&) = default;

 private:
  std::variant<Value, Variable> data_;
};

struct Atom {
  std::string predicate;
  std::vector<Term> args;

  bool IsGround() const;
  std::string ToString() const;
  friend bool operator==(const Atom&, const Atom&) = default;
};

struct GroundAtom {
  std::string predicate;
  Tuple args;

  std::string ToString() const;
  Atom ToAtom() const;

  friend bool operator==(const GroundAtom&, const GroundAtom&) = default;
  friend bool operator<(const GroundAtom& a, const GroundAtom& b);
};

// Throws InputError naming the first variable when `atom` is not ground.
GroundAtom ToGround(const Atom& atom);

bool TupleLess(const Tuple& a, const Tuple& b);

}  // namespace fragalloc::rules

template <>
struct std::hash<fragalloc::rules::Value> {
  size_t operator()(const fragalloc::rules::Value& v) const { return v.Hash(); }
};

#endif  // FRAGALLOC_RULES_TERM_H_
