// Copyright 2026 The heapsql Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <random>
#include <string>

#include "heapsql/canonical.h"
#include "heapsql/query_builder.h"
#include "heapsql/query_text.h"
#include "heapsql/status.h"
#include "heapsql/validate.h"
#include "support/random_query.h"

namespace heapsql {
namespace {

Database& SmallDb() {
  static Database* db = [] {
    auto* d = new Database(size_t{32} << 20);
    testing::LoadTables(*d, testing::MakeRandomTables(7, 500, 200));
    return d;
  }();
  return *db;
}

QuerySpec Q6Like() {
  return Select()
      .From("t1")
      .Field(As(Sum(Mul("a_fval", "a_large")), "revenue"))
      .Where(Ge("a_date", DateLit("1994-01-01")))
      .Where(Lt("a_date", DateLit("1995-01-01")))
      .Where(Between("a_fval", 0.05, 0.07))
      .Where(Lt("a_small", 4))
      .Build();
}

TEST(Builder, DefaultAliasesSkipTakenNames) {
  QuerySpec q = Select().From("t1").Field(Sum("a_large")).Field(As(Count(), "f1")).Build();
  AssignDefaultAliases(q);
  EXPECT_EQ(q.select[0].alias, "f2");
  EXPECT_EQ(OutputName(q.select[1]), "f1");
  const QuerySpec p = Select().From("t1").Field("a_small").Build();
  EXPECT_EQ(OutputName(p.select[0]), "a_small");
}

TEST(Builder, OrderDefaultsToAscending) {
  const QuerySpec q = Select().From("t1").Field("a_small").OrderBy("a_small").Build();
  ASSERT_EQ(q.order.size(), 1u);
  EXPECT_FALSE(q.order[0].descending);
}

TEST(QueryText, ParsesDocumentedShape) {
  const QuerySpec q = ParseQuery(R"({
    "select": [{"expr": {"kind": "Agg", "fn": "SUM", "arg": {"kind": "Arith", "op": "mul",
                "left": "l_extendedprice", "right": "l_discount"}}, "alias": "revenue"}],
    "from": [{"table": "lineitem"}],
    "where": [{"kind": "Between", "column": "l_discount",
               "lo": {"kind": "LitFloat", "value": 0.05},
               "hi": {"kind": "LitFloat", "value": 0.07}},
              {"kind": "Cmp", "op": "lt", "column": "l_shipdate",
               "value": {"kind": "LitDate", "value": "1995-01-01"}}],
    "free": "l_shipdate"
  })");
  EXPECT_EQ(ToString(q),
            "SELECT SUM((l_extendedprice * l_discount)) AS revenue FROM lineitem WHERE "
            "l_discount BETWEEN 0.05 AND 0.07 AND l_shipdate < DATE '1995-01-01' FREE l_shipdate");
}

TEST(QueryText, MalformedInputNamesTheField) {
  for (const char* bad : {R"({"select": 3})", R"({"from": [{"table": "t"}], "where": [{"kind":
        "Cmp", "op": "almost", "column": "a", "value": {"kind": "LitInt", "value": 1}}]})",
                          "not json", R"({"select": [{"expr": {"kind": "Agg", "fn": "MEDIAN",
        "arg": "a"}}]})"}) {
    try {
      ParseQuery(bad);
      ADD_FAILURE() << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kMalformedQuery) << bad;
    }
  }
}

TEST(QueryText, RandomRoundTrip) {
  std::mt19937_64 rng(11);
  const auto tables = testing::MakeRandomTables(7, 500, 200);
  for (int i = 0; i < 300; ++i) {
    const QuerySpec q = testing::RandomQuery(rng, tables, SmallDb().catalog).spec;
    const std::string text = SerializeQuery(q);
    const QuerySpec back = ParseQuery(text);
    ASSERT_EQ(ToString(back), ToString(q)) << text;
    ASSERT_EQ(SerializeQuery(back), text);
  }
}

TEST(Validate, AcceptsAndInfersOutput) {
  const ValidationResult v = Validate(Q6Like(), SmallDb().catalog);
  ASSERT_TRUE(v.ok()) << v.Message();
  ASSERT_EQ(v.output.size(), 1u);
  EXPECT_EQ(v.output[0].name, "revenue");
  EXPECT_EQ(v.output[0].type, PhysType::kF64);
}

TEST(Validate, Diagnostics) {
  const Catalog& cat = SmallDb().catalog;
  struct Case {
    QuerySpec q;
    ErrorCode code;
  };
  const std::vector<Case> cases = {
      {Select().From("nope").Field("x").Build(), ErrorCode::kUnknownTable},
      {Select().From("t1").Field("a_nope").Build(), ErrorCode::kUnknownColumn},
      {Select().From("t1").Field("a_small").Field(Sum("a_large")).Build(), ErrorCode::kValidation},
      {Select().From("t1").Field(Sum(Sum("a_large"))).Build(), ErrorCode::kUnsupportedShape},
      {Select().From("t1").Join("t1").On("a_key", "a_key").Field(Count()).Build(),
       ErrorCode::kUnsupportedShape},
      {Select().From("t1").Field(Count()).Where(Lt("a_cat", 3)).Build(), ErrorCode::kValidation},
      {Select().From("t1").Field("a_small").Field("a_small").Build(), ErrorCode::kValidation},
  };
  for (const auto& c : cases) {
    const ValidationResult v = Validate(c.q, cat);
    ASSERT_FALSE(v.ok()) << ToString(c.q);
    EXPECT_EQ(v.code(), c.code) << ToString(c.q) << ": " << v.Message();
    EXPECT_FALSE(v.Message().empty());
  }
}

TEST(Validate, AmbiguousUnqualifiedNameAcrossJoin) {
  Database db(1 << 20);
  ColumnBuffer a("k", PhysType::kI32), b("k", PhysType::kI32);
  a.AppendI32(1);
  b.AppendI32(1);
  std::vector<ColumnBuffer> ca{a}, cb{b};
  LoadTable(db.heap, db.catalog, "x", ca);
  LoadTable(db.heap, db.catalog, "y", cb);
  const QuerySpec bad = Select().From("x").Join("y").On("x.k", "y.k").Field(Sum("k")).Build();
  EXPECT_FALSE(Validate(bad, db.catalog).ok());
  const QuerySpec good = Select().From("x").Join("y").On("x.k", "y.k").Field(Sum("y.k")).Build();
  EXPECT_TRUE(Validate(good, db.catalog).ok()) << Validate(good, db.catalog).Message();
}

TEST(Canonical, OrderInsensitiveAndIdempotent) {
  const QuerySpec a = Q6Like();
  QuerySpec b = Select()
                    .From("t1")
                    .Field(As(Sum(Mul("a_large", "a_fval")), "revenue"))
                    .Where(Lt("a_small", 4))
                    .Where(Between("a_fval", 0.05, 0.07))
                    .Where(Lt("a_date", DateLit("1995-01-01")))
                    .Where(Ge("a_date", DateLit("1994-01-01")))
                    .Build();
  EXPECT_TRUE(StructurallyEqual(a, b));
  EXPECT_EQ(Fingerprint(a), Fingerprint(b));
  EXPECT_EQ(CanonicalText(Canonicalize(a)), CanonicalText(a));
  // No semantic folding.
  const QuerySpec c = Select().From("t1").Field(Count()).Where(Lt("a_small", 5)).Build();
  const QuerySpec d = Select().From("t1").Field(Count()).Where(Le("a_small", 4)).Build();
  EXPECT_FALSE(StructurallyEqual(c, d));
  // Subtraction operands are not reordered.
  EXPECT_FALSE(StructurallyEqual(Sub("a_large", "a_small"), Sub("a_small", "a_large")));
  EXPECT_TRUE(StructurallyEqual(Add("a_large", "a_small"), Add("a_small", "a_large")));
  EXPECT_TRUE(StructurallyEqual(Or({Lt("a_small", 1), Gt("a_small", 8)}),
                                Or({Gt("a_small", 8), Lt("a_small", 1)})));
}

TEST(Canonical, SelectOrderAndAliasesMatter) {
  const QuerySpec a = Select().From("t1").Field("a_small").Field(Sum("a_large")).GroupBy("a_small").Build();
  const QuerySpec b = Select().From("t1").Field(Sum("a_large")).Field("a_small").GroupBy("a_small").Build();
  EXPECT_FALSE(StructurallyEqual(a, b));
  EXPECT_NE(Fingerprint(a), Fingerprint(b));
}

TEST(Canonical, Fnv1aKnownVectors) {
  EXPECT_EQ(Fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(Fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(Fnv1a64("foobar"), 0x85944171f73967e8ULL);
}

TEST(Canonical, RandomPermutationProperty) {
  std::mt19937_64 rng(5);
  const auto tables = testing::MakeRandomTables(7, 500, 200);
  for (int i = 0; i < 300; ++i) {
    const QuerySpec q = testing::RandomQuery(rng, tables, SmallDb().catalog).spec;
    QuerySpec p = q;
    std::shuffle(p.where.begin(), p.where.end(), rng);
    std::shuffle(p.group.begin(), p.group.end(), rng);
    ASSERT_EQ(CanonicalText(p), CanonicalText(q)) << ToString(q);
    ASSERT_EQ(CanonicalText(Canonicalize(q)), CanonicalText(q));
  }
}

}  // namespace
}  // namespace heapsql
