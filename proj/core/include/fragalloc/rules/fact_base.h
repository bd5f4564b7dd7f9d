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

#ifndef FRAGALLOC_RULES_FACT_BASE_H_
#define FRAGALLOC_RULES_FACT_BASE_H_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "fragalloc/rules/term.h"

namespace fragalloc::rules {

// Set of tuples of one predicate, with lazily built hash indexes keyed on
// a subset of argument positions.
class Relation {
 public:
  explicit Relation(size_t arity) : arity_(arity) {}

  size_t arity() const { return arity_; }
  size_t size() const { return rows_.size(); }
  bool empty() const { return rows_.empty(); }
  const std::vector<Tuple>& rows() const { return rows_; }

  bool Contains(const Tuple& t) const { return positions_.count(t) != 0; }
  // Returns true when the tuple was not already present.
  bool Insert(Tuple t);
  bool Erase(const Tuple& t);

  // Indices of rows whose values at the positions set in `mask` equal
  // `key` (listed in position order). Builds the index on first use;
  // rows inserted later are added to every existing index.
  const std::vector<uint32_t>& Lookup(uint32_t mask, const Tuple& key);

 private:
  using Index = std::unordered_map<Tuple, std::vector<uint32_t>, TupleHash>;

  Tuple Project(uint32_t mask, const Tuple& row) const;

  size_t arity_;
  std::vector<Tuple> rows_;
  std::unordered_map<Tuple, size_t, TupleHash> positions_;
  std::unordered_map<uint32_t, Index> indexes_;
};

// Ground atoms grouped by predicate, with set semantics. Each predicate
// keeps the arity it was first inserted with.
class FactBase {
 public:
  // Returns true when the atom was new. Throws InputError on an arity
  // mismatch.
  bool Insert(const GroundAtom& atom);
  bool Erase(const GroundAtom& atom);
  bool Contains(const GroundAtom& atom) const;

  const Relation* Find(std::string_view predicate) const;
  Relation* FindMutable(std::string_view predicate);
  Relation& GetOrCreate(const std::string& predicate, size_t arity);

  size_t size() const;
  const std::map<std::string, Relation, std::less<>>& relations() const {
    return relations_;
  }

  // All atoms, sorted by predicate name then term order.
  std::vector<GroundAtom> Atoms() const;

  // One `pred(a,b).` line per atom in Atoms() order.
  std::string Serialize() const;

  // FNV-1a over Serialize().
  uint64_t Hash() const;

  friend bool operator==(const FactBase& a, const FactBase& b);

 private:
  std::map<std::string, Relation, std::less<>> relations_;
};

struct UpdateReport {
  size_t added = 0;
  size_t removed = 0;
  // Removals that named atoms absent from the base.
  std::vector<GroundAtom> not_present;

  bool changed() const { return added + removed > 0; }
};

// Applies `removals`, then `additions`.
UpdateReport UpdateFacts(FactBase& base, std::span<const GroundAtom> additions,
                         std::span<const GroundAtom> removals);

// Same, for atoms straight from the parser; throws InputError when any atom
// has a variable.
UpdateReport UpdateFacts(FactBase& base, std::span<const Atom> additions,
                         std::span<const Atom> removals);

}  // namespace fragalloc::rules

#endif  // FRAGALLOC_RULES_FACT_BASE_H_
