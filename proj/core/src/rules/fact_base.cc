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

#include "fragalloc/rules/fact_base.h"

#include <algorithm>

#include "fragalloc/error.h"

namespace fragalloc::rules {

bool Relation::Insert(Tuple t) {
  if (positions_.count(t)) return false;
  uint32_t row = static_cast<uint32_t>(rows_.size());
  positions_.emplace(t, rows_.size());
  rows_.push_back(std::move(t));
  for (auto& [mask, index] : indexes_) {
    index[Project(mask, rows_.back())].push_back(row);
  }
  return true;
}

bool Relation::Erase(const Tuple& t) {
  auto it = positions_.find(t);
  if (it == positions_.end()) return false;
  size_t pos = it->second;
  positions_.erase(it);
  if (pos + 1 != rows_.size()) {
    rows_[pos] = std::move(rows_.back());
    positions_[rows_[pos]] = pos;
  }
  rows_.pop_back();
  indexes_.clear();
  return true;
}

Tuple Relation::Project(uint32_t mask, const Tuple& row) const {
  Tuple key;
  for (size_t i = 0; i < row.size(); ++i) {
    if (mask & (1u << i)) key.push_back(row[i]);
  }
  return key;
}

const std::vector<uint32_t>& Relation::Lookup(uint32_t mask, const Tuple& key) {
  static const std::vector<uint32_t> kEmpty;
  auto it = indexes_.find(mask);
  if (it == indexes_.end()) {
    Index index;
    for (size_t r = 0; r < rows_.size(); ++r) {
      index[Project(mask, rows_[r])].push_back(static_cast<uint32_t>(r));
    }
    it = indexes_.emplace(mask, std::move(index)).first;
  }
  auto hit = it->second.find(key);
  return hit == it->second.end() ? kEmpty : hit->second;
}

bool FactBase::Insert(const GroundAtom& atom) {
  return GetOrCreate(atom.predicate, atom.args.size()).Insert(atom.args);
}

bool FactBase::Erase(const GroundAtom& atom) {
  Relation* rel = FindMutable(atom.predicate);
  return rel != nullptr && rel->arity() == atom.args.size() &&
         rel->Erase(atom.args);
}

bool FactBase::Contains(const GroundAtom& atom) const {
  const Relation* rel = Find(atom.predicate);
  return rel != nullptr && rel->arity() == atom.args.size() &&
         rel->Contains(atom.args);
}

const Relation* FactBase::Find(std::string_view predicate) const {
  auto it = relations_.find(predicate);
  return it == relations_.end() ? nullptr : &it->second;
}

Relation* FactBase::FindMutable(std::string_view predicate) {
  auto it = relations_.find(predicate);
  return it == relations_.end() ? nullptr : &it->second;
}

Relation& FactBase::GetOrCreate(const std::string& predicate, size_t arity) {
  auto it = relations_.find(predicate);
  if (it == relations_.end()) {
    it = relations_.emplace(predicate, Relation(arity)).first;
  } else if (it->second.arity() != arity) {
    throw InputError("inconsistent arity for predicate " + predicate + ": " +
                     std::to_string(it->second.arity()) + " vs " +
                     std::to_string(arity));
  }
  return it->second;
}

size_t FactBase::size() const {
  size_t n = 0;
  for (const auto& [name, rel] : relations_) n += rel.size();
  return n;
}

std::vector<GroundAtom> FactBase::Atoms() const {
  std::vector<GroundAtom> out;
  out.reserve(size());
  for (const auto& [name, rel] : relations_) {
    std::vector<Tuple> rows = rel.rows();
    std::sort(rows.begin(), rows.end(), TupleLess);
    for (Tuple& row : rows) out.push_back(GroundAtom{name, std::move(row)});
  }
  return out;
}

std::string FactBase::Serialize() const {
  std::string out;
  for (const GroundAtom& atom : Atoms()) {
    out += atom.ToString();
    out += ".\n";
  }
  return out;
}

uint64_t FactBase::Hash() const {
  uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : Serialize()) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

bool operator==(const FactBase& a, const FactBase& b) {
  if (a.size() != b.size()) return false;
  for (const auto& [name, rel] : a.relations_) {
    if (rel.empty()) continue;
    const Relation* other = b.Find(name);
    if (other == nullptr || other->size() != rel.size()) return false;
    for (const Tuple& row : rel.rows()) {
      if (!other->Contains(row)) return false;
    }
  }
  return true;
}

UpdateReport UpdateFacts(FactBase& base, std::span<const GroundAtom> additions,
                         std::span<const GroundAtom> removals) {
  UpdateReport report;
  for (const GroundAtom& atom : removals) {
    if (base.Erase(atom)) {
      ++report.removed;
    } else {
      report.not_present.push_back(atom);
    }
  }
  for (const GroundAtom& atom : additions) {
    if (base.Insert(atom)) ++report.added;
  }
  return report;
}

UpdateReport UpdateFacts(FactBase& base, std::span<const Atom> additions,
                         std::span<const Atom> removals) {
  std::vector<GroundAtom> add;
  std::vector<GroundAtom> remove;
  for (const Atom& a : additions) add.push_back(ToGround(a));
  for (const Atom& a : removals) remove.push_back(ToGround(a));
  return UpdateFacts(base, add, remove);
}

}  // namespace fragalloc::rules
