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

#include <fmt/format.h>
#include <gtest/gtest.h>

#include <random>
#include <string>

#include "heapsql/canonical.h"
#include "heapsql/engine.h"
#include "heapsql/query_builder.h"
#include "heapsql/split_client.h"
#include "heapsql/split_rewriter.h"
#include "heapsql/status.h"
#include "support/random_query.h"

namespace heapsql {
namespace {

struct Fixture {
  testing::TableData tables = testing::MakeRandomTables(21, 3000, 500);
  Database db{size_t{64} << 20};
  Fixture() { testing::LoadTables(db, tables); }
};

Fixture& Fx() {
  static Fixture* f = new Fixture();
  return *f;
}

QuerySpec AvgPerSmall() {
  return Select()
      .From("t1")
      .Field("a_small")
      .Field(As(Avg("a_fval"), "avg_f"))
      .Field(As(Sum("a_large"), "total"))
      .Where(Lt("a_cat", "d"))
      .Where(Ge("a_date", DateLit("1994-01-01")))
      .GroupBy("a_small")
      .Build();
}

const ColumnRef kDate{"", "a_date"};

TEST(CanFree, Rules) {
  const QuerySpec join = Select()
                             .From("t1")
                             .Join("t2")
                             .On("a_key", "b_key")
                             .Field(Count())
                             .Where(Or({Lt("a_small", 2), Gt("a_large", 9000)}))
                             .Where(IsIn("a_id", Select().From("t2").Field("b_id").Where(
                                                     Lt("b_fval", 0.5)).Build()))
                             .Where(ColCmp(CmpOp::kLt, "a_fval", "b_fval"))
                             .Build();
  for (const char* c : {"a_key", "b_key", "a_small", "a_large", "a_id", "b_id", "b_fval", "a_fval"}) {
    const FreeCheck chk = CanFree(join, ColumnRef::Parse(c), &Fx().db.catalog);
    EXPECT_FALSE(chk.ok) << c;
    EXPECT_EQ(chk.code, ErrorCode::kFreeRejected) << c;
    EXPECT_FALSE(chk.reason.empty());
  }
  EXPECT_TRUE(CanFree(join, ColumnRef::Parse("a_date"), &Fx().db.catalog).ok);
  EXPECT_TRUE(CanFree(join, ColumnRef::Parse("b_cat"), &Fx().db.catalog).ok);
  const FreeCheck unknown = CanFree(join, ColumnRef::Parse("a_zzz"), &Fx().db.catalog);
  EXPECT_FALSE(unknown.ok);
  EXPECT_EQ(unknown.code, ErrorCode::kUnknownColumn);
}

TEST(GenerateMvq, AvgSplitsIntoSumAndCount) {
  const MVDefinition mv = GenerateMvq(AvgPerSmall(), kDate, &Fx().db.catalog);
  const QuerySpec want = Select()
                             .From("t1")
                             .Field("a_small")
                             .Field(As(Sum("a_fval"), "f1"))
                             .Field(As(Count("a_fval"), "f2"))
                             .Field(As(Sum("a_large"), "f3"))
                             .Field("a_date")
                             .Where(Lt("a_cat", "d"))
                             .GroupBy("a_small")
                             .GroupBy("a_date")
                             .Build();
  EXPECT_TRUE(StructurallyEqual(mv.mvq, want)) << ToString(mv.mvq);
  ASSERT_EQ(mv.agg_map.size(), 2u);
  EXPECT_EQ(mv.agg_map[0].sum, "f1");
  EXPECT_EQ(mv.agg_map[0].cnt, "f2");
  EXPECT_EQ(mv.agg_map[1].sum, "f3");
  EXPECT_EQ(mv.name, fmt::format("mv_{:016x}", mv.source_fingerprint));
  EXPECT_EQ(GenerateMvq(AvgPerSmall(), kDate).name, mv.name);
}

TEST(GenerateMvq, FreeColumnNotDuplicated) {
  const QuerySpec q = Select().From("t1").Field("a_date").Field("a_id").Where(Lt("a_date", DateLit("1995-01-01"))).Build();
  const MVDefinition mv = GenerateMvq(q, kDate);
  ASSERT_EQ(mv.mvq.select.size(), 2u);
  EXPECT_TRUE(mv.mvq.where.empty());
  EXPECT_TRUE(mv.mvq.group.empty());
  EXPECT_FALSE(mv.aggregated());
}

TEST(GenerateMvq, RejectedColumnThrows) {
  const QuerySpec q = Select().From("t1").Join("t2").On("a_key", "b_key").Field(Count()).Build();
  try {
    GenerateMvq(q, ColumnRef::Parse("a_key"));
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kFreeRejected);
  }
}

TEST(DeriveAgg, Rules) {
  const MVDefinition mv = GenerateMvq(AvgPerSmall(), kDate);
  EXPECT_EQ(ToString(DeriveAgg(Avg("a_fval"), mv.agg_map)), "(SUM(f1) / SUM(f2))");
  EXPECT_EQ(ToString(DeriveAgg(Sum("a_large"), mv.agg_map)), "SUM(f3)");
  EXPECT_EQ(ToString(DeriveAgg(Sum("a_fval"), mv.agg_map)), "SUM(f1)");
  EXPECT_EQ(ToString(DeriveAgg(Count("a_fval"), mv.agg_map)), "SUM(f2)");
  try {
    DeriveAgg(Max("a_fval"), mv.agg_map);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnmappedAggregate);
  }
}

TEST(Matches, EachConditionCanFail) {
  const MVDefinition mv = GenerateMvq(AvgPerSmall(), kDate);
  auto first = [&](const QuerySpec& q) { return Matches(q, mv).first_failed; };
  QuerySpec ok = AvgPerSmall();
  ok.where.pop_back();
  ok.where.push_back(Between("a_date", DateLit("1996-01-01"), DateLit("1996-06-30")));
  EXPECT_EQ(first(ok), 0);

  QuerySpec c1 = ok;
  c1.select.push_back(As(Max("a_fval"), "mx"));
  EXPECT_EQ(first(c1), 1);

  QuerySpec c2 = ok;
  c2.from = {FromItem{"t2", nullptr, ""}};
  EXPECT_EQ(Matches(c2, mv).conds[1], false);

  QuerySpec c3 = ok;
  c3.joins.push_back(JoinSpec{"t2", ColumnRef::Parse("a_key"), ColumnRef::Parse("b_key")});
  EXPECT_EQ(first(c3), 3);

  QuerySpec c4 = ok;
  c4.where.push_back(Gt("a_large", 5));
  EXPECT_EQ(first(c4), 4);
  EXPECT_NE(Matches(c4, mv).offending.find("a_large"), std::string::npos);
  QuerySpec c4b = ok;
  c4b.where.erase(c4b.where.begin());
  EXPECT_EQ(first(c4b), 4);

  QuerySpec c5 = ok;
  c5.group.push_back(ColumnRef::Parse("a_cat"));
  c5.select.push_back({Col("a_cat"), ""});
  EXPECT_EQ(Matches(c5, mv).conds[4], false);

  QuerySpec regroup = ok;
  regroup.group.push_back(kDate);
  regroup.select.push_back({MakeColumn(kDate), ""});
  EXPECT_EQ(first(regroup), 0);
  QuerySpec coarser = ok;
  coarser.group.clear();
  coarser.select.erase(coarser.select.begin());
  EXPECT_EQ(first(coarser), 0);

  try {
    GenerateVq(c4, mv);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNoMatch);
    EXPECT_NE(std::string(e.what()).find("cond 4"), std::string::npos);
  }
}

TEST(GenerateVq, RewritesAgainstTheView) {
  const MVDefinition mv = GenerateMvq(AvgPerSmall(), kDate);
  QuerySpec q = AvgPerSmall();
  q.where.pop_back();
  q.where.push_back(Lt("a_date", DateLit("1993-03-01")));
  const QuerySpec vq = GenerateVq(q, mv);
  const QuerySpec want = Select()
                             .From(mv.name)
                             .Field("a_small")
                             .Field(As(Div(Sum("f1"), Sum("f2")), "avg_f"))
                             .Field(As(Sum("f3"), "total"))
                             .Where(Lt("a_date", DateLit("1993-03-01")))
                             .GroupBy("a_small")
                             .Build();
  EXPECT_TRUE(StructurallyEqual(vq, want)) << ToString(vq);
}

TEST(Split, DefinitionJsonRoundTrip) {
  const MVDefinition mv = GenerateMvq(AvgPerSmall(), kDate);
  const MVDefinition back = MVDefinitionFromJson(MVDefinitionToJson(mv));
  EXPECT_EQ(back.name, mv.name);
  EXPECT_EQ(back.source_fingerprint, mv.source_fingerprint);
  EXPECT_TRUE(StructurallyEqual(back.mvq, mv.mvq));
  ASSERT_EQ(back.agg_map.size(), mv.agg_map.size());
  EXPECT_EQ(back.agg_map[0].cnt, mv.agg_map[0].cnt);
}

// Every follow-up that differs only on the free column must match the view
// and give the direct answer.
TEST(Split, RandomFollowUpsEqualDirect) {
  std::mt19937_64 rng(77);
  for (const Scenario& s : testing::SyntheticSplitScenarios()) {
    QuerySpec q_o = s.query;
    q_o.free.reset();
    const MVDefinition mv = GenerateMvq(q_o, s.free, &Fx().db.catalog);
    ViewSession client(size_t{32} << 20, ExecuteQuery(mv.mvq, Fx().db), mv);
    const ColumnBuffer values = testing::FreeColumnValues(Fx().db, q_o, s.free);
    for (int i = 0; i < 10; ++i) {
      const testing::GeneratedQuery f = testing::RandomFollowUp(rng, q_o, s.free, values);
      const MatchReport m = client.Check(f.spec);
      ASSERT_TRUE(m.matched) << s.id << ": " << m.Message() << " for " << ToString(f.spec);
      const ResultSet direct = ExecuteQuery(f.spec, Fx().db);
      const ResultSet via = client.Run(f.spec);
      std::string why;
      ASSERT_TRUE(ResultsEquivalent(direct, via, 1e-9, f.ordered, &why))
          << s.id << ": " << ToString(f.spec) << ": " << why;
    }
  }
}

}  // namespace
}  // namespace heapsql
