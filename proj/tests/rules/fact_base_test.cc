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

#include <gtest/gtest.h>

#include <vector>

#include "fragalloc/error.h"
#include "fragalloc/rules/parser.h"

namespace fragalloc::rules {
namespace {

GroundAtom Placed(double j, double i) {
  return {"placed", {Value::Number(j), Value::Number(i)}};
}

TEST(FactBaseTest, SetSemantics) {
  FactBase base;
  EXPECT_TRUE(base.Insert(Placed(7, 1)));
  EXPECT_FALSE(base.Insert(Placed(7, 1)));
  EXPECT_EQ(base.size(), 1u);
}

TEST(FactBaseTest, ArityMismatchRejected) {
  FactBase base;
  base.Insert(Placed(7, 1));
  EXPECT_THROW(base.Insert(GroundAtom{"placed", {Value::Number(1)}}),
               InputError);
}

TEST(FactBaseTest, SerializeIsSortedAndStable) {
  FactBase a;
  a.Insert({"q", {Value::Symbol("b")}});
  a.Insert({"q", {Value::Number(3)}});
  a.Insert({"p", {Value::Number(0.5), Value::Symbol("x")}});
  EXPECT_EQ(a.Serialize(), "p(0.5,x).\nq(3).\nq(b).\n");

  FactBase b;
  b.Insert({"p", {Value::Number(0.5), Value::Symbol("x")}});
  b.Insert({"q", {Value::Number(3)}});
  b.Insert({"q", {Value::Symbol("b")}});
  EXPECT_EQ(a.Hash(), b.Hash());
  EXPECT_TRUE(a == b);
}

TEST(FactBaseTest, EqualityIgnoresEmptiedRelations) {
  FactBase a;
  FactBase b;
  a.Insert(Placed(7, 1));
  a.Erase(Placed(7, 1));
  EXPECT_TRUE(a == b);
  EXPECT_EQ(a.Serialize(), "");
}

TEST(FactBaseTest, LookupTracksInsertsAndErases) {
  FactBase base;
  base.Insert(Placed(7, 1));
  base.Insert(Placed(8, 1));
  Relation* rel = base.FindMutable("placed");
  ASSERT_NE(rel, nullptr);
  EXPECT_EQ(rel->Lookup(0b10, {Value::Number(1)}).size(), 2u);
  base.Insert(Placed(9, 1));
  EXPECT_EQ(rel->Lookup(0b10, {Value::Number(1)}).size(), 3u);
  base.Erase(Placed(8, 1));
  const auto& rows = rel->Lookup(0b10, {Value::Number(1)});
  ASSERT_EQ(rows.size(), 2u);
  for (uint32_t r : rows) EXPECT_NE(rel->rows()[r][0], Value::Number(8));
}

TEST(UpdateFactsTest, AssertThenRetractRestoresBase) {
  FactBase base;
  base.Insert({"size", {Value::Number(7), Value::Number(1)}});
  std::string before = base.Serialize();
  std::vector<GroundAtom> atoms = {Placed(7, 1)};
  UpdateFacts(base, atoms, {});
  UpdateReport r = UpdateFacts(base, {}, atoms);
  EXPECT_EQ(r.removed, 1u);
  EXPECT_EQ(base.Serialize(), before);
}

TEST(UpdateFactsTest, DuplicateAssertStoresOneCopy) {
  FactBase base;
  std::vector<GroundAtom> twice = {Placed(7, 1), Placed(7, 1)};
  UpdateReport r = UpdateFacts(base, twice, {});
  EXPECT_EQ(r.added, 1u);
  EXPECT_EQ(base.size(), 1u);
}

TEST(UpdateFactsTest, AbsentRemovalFlagged) {
  FactBase base;
  std::vector<GroundAtom> absent = {{"q", {Value::Number(9)}}};
  UpdateReport r = UpdateFacts(base, {}, absent);
  EXPECT_FALSE(r.changed());
  ASSERT_EQ(r.not_present.size(), 1u);
  EXPECT_EQ(r.not_present[0].ToString(), "q(9)");
}

TEST(UpdateFactsTest, RemovalsApplyBeforeAdditions) {
  FactBase base;
  std::vector<GroundAtom> atom = {Placed(7, 1)};
  UpdateFacts(base, atom, atom);
  EXPECT_TRUE(base.Contains(Placed(7, 1)));
}

TEST(UpdateFactsTest, NonGroundAtomRejected) {
  FactBase base;
  std::vector<Atom> bad = {ParseAtom("placed(7,X)")};
  EXPECT_THROW(UpdateFacts(base, bad, {}), InputError);
  EXPECT_EQ(base.size(), 0u);
}

}  // namespace
}  // namespace fragalloc::rules
