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

#include "fragalloc/rules/term.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>

#include "fragalloc/error.h"

namespace fragalloc::rules {

int Value::Compare(const Value& a, const Value& b) {
  if (a.is_number() != b.is_number()) return a.is_number() ? -1 : 1;
  if (a.is_number()) {
    double x = a.number();
    double y = b.number();
    return x < y ? -1 : (y < x ? 1 : 0);
  }
  int c = a.symbol().compare(b.symbol());
  return c < 0 ? -1 : (c > 0 ? 1 : 0);
}

std::string Value::ToString() const {
  return is_number() ? FormatNumber(number()) : symbol();
}

size_t Value::Hash() const {
  if (is_number()) return std::hash<double>()(number());
  return std::hash<std::string>()(symbol()) ^ 0x9e3779b97f4a7c15ULL;
}

size_t TupleHash::operator()(const Tuple& t) const {
  size_t h = t.size();
  for (const Value& v : t) {
    h ^= v.Hash() + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return h;
}

std::string FormatNumber(double v) {
  if (v == 0.0) return "0";
  if (std::isfinite(v) && v == std::trunc(v) && std::fabs(v) < 1e15) {
    return std::to_string(static_cast<int64_t>(v));
  }
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

bool IsIdentifier(std::string_view s) {
  if (s.empty() || !(s[0] >= 'a' && s[0] <= 'z')) return false;
  for (char c : s) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_'))
      return false;
  }
  return true;
}

bool IsVariableName(std::string_view s) {
  if (s.empty() || !((s[0] >= 'A' && s[0] <= 'Z') || s[0] == '_')) return false;
  for (char c : s) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_'))
      return false;
  }
  return true;
}

bool ParseValue(std::string_view text, Value* out) {
  if (IsIdentifier(text)) {
    *out = Value::Symbol(std::string(text));
    return true;
  }
  size_t digit_at = (!text.empty() && text[0] == '-') ? 1 : 0;
  if (text.size() <= digit_at ||
      !std::isdigit(static_cast<unsigned char>(text[digit_at]))) {
    return false;
  }
  double v = 0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size() ||
      !std::isfinite(v)) {
    return false;
  }
  *out = Value::Number(v);
  return true;
}

std::string Term::ToString() const {
  return is_variable() ? variable() : value().ToString();
}

bool Atom::IsGround() const {
  for (const Term& t : args) {
    if (t.is_variable()) return false;
  }
  return true;
}

std::string Atom::ToString() const {
  std::string out = predicate + "(";
  for (size_t i = 0; i < args.size(); ++i) {
    if (i) out += ",";
    out += args[i].ToString();
  }
  return out + ")";
}

std::string GroundAtom::ToString() const {
  std::string out = predicate + "(";
  for (size_t i = 0; i < args.size(); ++i) {
    if (i) out += ",";
    out += args[i].ToString();
  }
  return out + ")";
}

Atom GroundAtom::ToAtom() const {
  Atom atom{predicate, {}};
  atom.args.reserve(args.size());
  for (const Value& v : args) atom.args.emplace_back(v);
  return atom;
}

bool TupleLess(const Tuple& a, const Tuple& b) {
  size_t n = std::min(a.size(), b.size());
  for (size_t i = 0; i < n; ++i) {
    int c = Value::Compare(a[i], b[i]);
    if (c != 0) return c < 0;
  }
  return a.size() < b.size();
}

bool operator<(const GroundAtom& a, const GroundAtom& b) {
  if (a.predicate != b.predicate) return a.predicate < b.predicate;
  return TupleLess(a.args, b.args);
}

GroundAtom ToGround(const Atom& atom) {
  GroundAtom out{atom.predicate, {}};
  out.args.reserve(atom.args.size());
  for (const Term& t : atom.args) {
    if (t.is_variable()) {
      throw InputError("non-ground atom " + atom.ToString() + ": variable " +
                       t.variable());
    }
    out.args.push_back(t.value());
  }
  return out;
}

}  // namespace fragalloc::rules
