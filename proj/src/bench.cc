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

#include "heapsql/bench.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "heapsql/mv_payload.h"
#include "heapsql/query_builder.h"
#include "heapsql/query_text.h"
#include "heapsql/split_client.h"
#include "heapsql/split_rewriter.h"
#include "heapsql/status.h"

namespace heapsql {

namespace {

using Clock = std::chrono::steady_clock;

double MsSince(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

// Median of `runs` timed calls after `warmup` untimed ones.
template <typename Fn>
double TimeMedian(int warmup, int runs, Fn&& fn) {
  for (int i = 0; i < warmup; ++i) fn();
  std::vector<double> ms;
  for (int i = 0; i < runs; ++i) {
    const auto t0 = Clock::now();
    fn();
    ms.push_back(MsSince(t0));
  }
  if (ms.empty()) return 0;
  std::sort(ms.begin(), ms.end());
  const size_t n = ms.size();
  return n % 2 ? ms[n / 2] : (ms[n / 2 - 1] + ms[n / 2]) / 2;
}

Scenario Make(std::string id, std::string description, QueryBuilder b, const char* free) {
  return Scenario{std::move(id), std::move(description), b.Build(), ColumnRef::Parse(free)};
}

Expr DiscPrice() { return Mul("l_extendedprice", Sub(1, "l_discount")); }

QueryBuilder Q1() {
  return Select()
      .From("lineitem")
      .Field("l_returnflag")
      .Field("l_linestatus")
      .Field(As(Sum("l_quantity"), "sum_qty"))
      .Field(As(Sum("l_extendedprice"), "sum_base_price"))
      .Field(As(Sum(DiscPrice()), "sum_disc_price"))
      .Field(As(Avg("l_quantity"), "avg_qty"))
      .Field(As(Avg("l_discount"), "avg_disc"))
      .Field(As(Count(), "count_order"))
      .Where(Le("l_shipdate", DateLit("1998-09-02")))
      .GroupBy("l_returnflag")
      .GroupBy("l_linestatus")
      .OrderBy("l_returnflag")
      .OrderBy("l_linestatus");
}

QueryBuilder Q2() {
  return Select()
      .From("partsupp")
      .Join("part")
      .On("ps_partkey", "p_partkey")
      .Field("p_mfgr")
      .Field(As(Min("ps_supplycost"), "min_cost"))
      .Field(As(Count(), "offers"))
      .Where(Eq("p_size", 15))
      .Where(Ge("p_type", "STANDARD"))
      .GroupBy("p_mfgr")
      .OrderBy("p_mfgr");
}

QueryBuilder Q3() {
  return Select()
      .From("orders")
      .Join("customer")
      .On("o_custkey", "c_custkey")
      .Field("o_shippriority")
      .Field(As(Sum("o_totalprice"), "revenue"))
      .Field(As(Count(), "orders"))
      .Where(Eq("c_mktsegment", "BUILDING"))
      .Where(Lt("o_orderdate", DateLit("1995-03-15")))
      .GroupBy("o_shippriority");
}

QueryBuilder Q4() {
  QuerySpec late = Select()
                       .From("lineitem")
                       .Field("l_orderkey")
                       .Where(ColCmp(CmpOp::kLt, "l_commitdate", "l_receiptdate"))
                       .Build();
  return Select()
      .From("orders")
      .Field("o_orderpriority")
      .Field(As(Count(), "order_count"))
      .Where(Ge("o_orderdate", DateLit("1993-07-01")))
      .Where(Lt("o_orderdate", DateLit("1993-10-01")))
      .Where(IsIn("o_orderkey", late))
      .GroupBy("o_orderpriority")
      .OrderBy("o_orderpriority");
}

QueryBuilder Q5a() {
  return Select()
      .From("supplier")
      .Join("nation")
      .On("s_nationkey", "n_nationkey")
      .Field("n_name")
      .Field(As(Sum("s_acctbal"), "balance"))
      .Where(Eq("n_regionkey", 2))
      .GroupBy("n_name");
}

QueryBuilder Q5b() {
  return Select()
      .From("orders")
      .Join("customer")
      .On("o_custkey", "c_custkey")
      .Field("c_nationkey")
      .Field(As(Sum("o_totalprice"), "revenue"))
      .Where(Ge("o_orderdate", DateLit("1994-01-01")))
      .Where(Lt("o_orderdate", DateLit("1995-01-01")))
      .GroupBy("c_nationkey");
}

QueryBuilder Q6() {
  return Select()
      .From("lineitem")
      .Field(As(Sum(Mul("l_extendedprice", "l_discount")), "revenue"))
      .Where(Ge("l_shipdate", DateLit("1994-01-01")))
      .Where(Lt("l_shipdate", DateLit("1995-01-01")))
      .Where(Between("l_discount", 0.05, 0.07))
      .Where(Lt("l_quantity", 24));
}

QueryBuilder Q7() {
  return Select()
      .From("lineitem")
      .Join("supplier")
      .On("l_suppkey", "s_suppkey")
      .Field("s_nationkey")
      .Field(As(Sum(DiscPrice()), "volume"))
      .Where(Between("l_shipdate", DateLit("1995-01-01"), DateLit("1996-12-31")))
      .GroupBy("s_nationkey");
}

QueryBuilder Q12() {
  return Select()
      .From("lineitem")
      .Join("orders")
      .On("l_orderkey", "o_orderkey")
      .Field("o_orderpriority")
      .Field(As(Count(), "line_count"))
      .Where(Eq("l_shipmode", "MAIL"))
      .Where(Ge("l_receiptdate", DateLit("1994-01-01")))
      .Where(Lt("l_receiptdate", DateLit("1995-01-01")))
      .GroupBy("o_orderpriority")
      .OrderBy("o_orderpriority");
}

QueryBuilder Q14() {
  return Select()
      .From("lineitem")
      .Join("part")
      .On("l_partkey", "p_partkey")
      .Field(As(Div(Mul(100.0, Sum(DiscPrice())), Sum("l_extendedprice")), "disc_share"))
      .Field(As(Avg("p_retailprice"), "avg_retail"))
      .Where(Ge("l_shipdate", DateLit("1995-09-01")))
      .Where(Lt("l_shipdate", DateLit("1995-10-01")));
}

QueryBuilder Q17() {
  return Select()
      .From("lineitem")
      .Join("part")
      .On("l_partkey", "p_partkey")
      .Field(As(Div(Sum("l_extendedprice"), 7.0), "avg_yearly"))
      .Field(As(Avg("l_quantity"), "avg_qty"))
      .Where(Eq("p_brand", "Brand#23"))
      .Where(Eq("p_container", "MED BOX"));
}

QueryBuilder Q20() {
  QuerySpec stocked =
      Select().From("partsupp").Field("ps_suppkey").Where(Gt("ps_availqty", 5000)).Build();
  return Select()
      .From("supplier")
      .Join("nation")
      .On("s_nationkey", "n_nationkey")
      .Field(As(Count(), "suppliers"))
      .Field(As(Sum("s_acctbal"), "balance"))
      .Where(Eq("n_name", "CANADA"))
      .Where(IsIn("s_suppkey", stocked));
}

QueryBuilder Q21a() {
  return Select()
      .From("lineitem")
      .Join("orders")
      .On("l_orderkey", "o_orderkey")
      .Field("l_shipmode")
      .Field(As(Count(), "numwait"))
      .Where(Eq("o_orderstatus", "F"))
      .Where(ColCmp(CmpOp::kGt, "l_receiptdate", "l_commitdate"))
      .GroupBy("l_shipmode")
      .OrderBy("l_shipmode");
}

QueryBuilder Q21b() {
  return Select()
      .From("lineitem")
      .Join("supplier")
      .On("l_suppkey", "s_suppkey")
      .Field("s_name")
      .Field(As(Count(), "numwait"))
      .Where(Eq("s_nationkey", 20))
      .Where(ColCmp(CmpOp::kGt, "l_receiptdate", "l_commitdate"))
      .GroupBy("s_name");
}

}  // namespace

std::vector<Scenario> TpchScenarios() {
  return {
      Make("Q1a", "pricing summary by flag and status", Q1(), "l_shipdate"),
      Make("Q2a", "minimum supply cost per manufacturer", Q2(), "p_size"),
      Make("Q2b", "minimum supply cost per manufacturer", Q2(), "p_type"),
      Make("Q3a", "revenue of a market segment", Q3(), "c_mktsegment"),
      Make("Q3b", "revenue of a market segment", Q3(), "o_orderdate"),
      Make("Q4a", "late orders by priority", Q4(), "o_orderdate"),
      Make("Q5a", "supplier balance per nation in a region", Q5a(), "n_regionkey"),
      Make("Q5b", "order revenue per customer nation", Q5b(), "o_orderdate"),
      Make("Q6a", "forecast revenue change", Q6(), "l_shipdate"),
      Make("Q6b", "forecast revenue change", Q6(), "l_discount"),
      Make("Q6c", "forecast revenue change", Q6(), "l_quantity"),
      Make("Q7a", "shipping volume per supplier nation", Q7(), "l_shipdate"),
      Make("Q12a", "shipping mode and order priority", Q12(), "l_shipmode"),
      Make("Q12b", "shipping mode and order priority", Q12(), "l_receiptdate"),
      Make("Q14a", "promotion effect", Q14(), "l_shipdate"),
      Make("Q17a", "small-quantity order revenue", Q17(), "p_brand"),
      Make("Q17b", "small-quantity order revenue", Q17(), "p_container"),
      Make("Q20a", "stocked suppliers of a nation", Q20(), "n_name"),
      Make("Q21a", "late deliveries by shipping mode", Q21a(), "o_orderstatus"),
      Make("Q21b", "late deliveries of a nation's suppliers", Q21b(), "s_nationkey"),
  };
}

nlohmann::json ScenariosToJson(const std::vector<Scenario>& s) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& x : s) {
    out.push_back({{"id", x.id},
                   {"description", x.description},
                   {"query", QueryToJson(x.query)},
                   {"free", x.free.ToString()}});
  }
  return out;
}

std::vector<Scenario> ScenariosFromJson(const nlohmann::json& j) {
  std::vector<Scenario> out;
  try {
    for (const auto& x : j) {
      out.push_back(Scenario{x.at("id").get<std::string>(), x.value("description", ""),
                             QueryFromJson(x.at("query")),
                             ColumnRef::Parse(x.at("free").get<std::string>())});
    }
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error(ErrorCode::kMalformedQuery, std::string("bad scenario file: ") + e.what());
  }
  return out;
}

std::vector<Scenario> LoadScenarioFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(ss.str());
  } catch (const std::exception& e) {
    throw Error(ErrorCode::kMalformedQuery, path + ": " + e.what());
  }
  return ScenariosFromJson(j);
}

std::optional<uint64_t> Breakeven(double direct_ms, double mvq_ms, double copy_ms,
                                  double view_ms) {
  if (!(view_ms < direct_ms)) return std::nullopt;
  const double k = std::ceil((mvq_ms + copy_ms) / (direct_ms - view_ms));
  return static_cast<uint64_t>(std::max(1.0, k));
}

BenchRecord RunScenario(Database& db, const Scenario& s, int warmup, int runs) {
  BenchRecord r;
  r.id = s.id;
  r.free_col = s.free.ToString();
  const FreeCheck check = CanFree(s.query, s.free, &db.catalog);
  if (!check.ok) {
    r.rejected = check.reason;
    return r;
  }
  QuerySpec direct_q = s.query;
  direct_q.free.reset();
  ResultSet direct;
  r.direct_ms = TimeMedian(warmup, runs, [&] { direct = ExecuteQuery(direct_q, db); });

  const MVDefinition mv = GenerateMvq(s.query, s.free, &db.catalog);
  ResultSet view;
  r.mvq_ms = TimeMedian(warmup, runs, [&] { view = ExecuteQuery(mv.mvq, db); });
  r.mv_rows = view.row_count();

  std::string payload;
  r.copy_ms = TimeMedian(warmup, runs, [&] {
    payload = SerializeMV(view, &mv);
    const MVPayload p = DeserializeMV(payload);
    Database client(payload.size() * 2 + (1 << 20));
    LoadMV(client, p);
  });
  r.mv_bytes = payload.size();

  ViewSession client(payload.size() * 2 + (64u << 20), payload);
  ResultSet answered;
  r.view_ms = TimeMedian(warmup, runs, [&] { answered = client.Run(direct_q); });
  r.results_equal = ResultsEquivalent(direct, answered, 1e-9, false);
  r.breakeven = Breakeven(r.direct_ms, r.mvq_ms, r.copy_ms, r.view_ms);
  return r;
}

std::string FormatBenchTable(const std::vector<BenchRecord>& records) {
  std::string out = fmt::format("{:<6} {:<16} {:>10} {:>10} {:>9} {:>11} {:>9} {:>9} {:>9} {:>5}\n",
                                "id", "free", "direct_ms", "mvq_ms", "mv_rows", "mv_bytes",
                                "copy_ms", "view_ms", "breakeven", "equal");
  for (const auto& r : records) {
    if (!r.rejected.empty()) {
      out += fmt::format("{:<6} {:<16} rejected: {}\n", r.id, r.free_col, r.rejected);
      continue;
    }
    out += fmt::format("{:<6} {:<16} {:>10.3f} {:>10.3f} {:>9} {:>11} {:>9.3f} {:>9.3f} {:>9} {:>5}\n",
                       r.id, r.free_col, r.direct_ms, r.mvq_ms, r.mv_rows, r.mv_bytes, r.copy_ms,
                       r.view_ms, r.breakeven ? std::to_string(*r.breakeven) : "never",
                       r.results_equal ? "yes" : "NO");
  }
  return out;
}

std::vector<MicroRecord> RunMicro(Database& db, const std::string& table, int warmup, int runs) {
  struct Case {
    const char* name;
    Predicate pred;
  };
  const std::vector<Case> cases = {
      {"integer", Eq("o_shippriority", 0)},
      {"float", Gt("o_totalprice", 555.5)},
      {"string", Eq("o_orderpriority", "1-URGENT")},
  };
  const uint64_t rows = db.catalog.Get(table).row_count;
  std::vector<MicroRecord> out;
  for (const auto& c : cases) {
    const QuerySpec q = Select().From(table).Field(As(Count(), "n")).Where(c.pred).Build();
    MicroRecord m;
    m.name = c.name;
    m.predicate = ToString(c.pred);
    m.rows = rows;
    ResultSet rs;
    m.ms = TimeMedian(warmup, runs, [&] { rs = ExecuteQuery(q, db); });
    m.matched = static_cast<uint64_t>(rs.columns[0].I64(0));
    m.rows_per_sec = m.ms > 0 ? static_cast<double>(rows) / (m.ms / 1000.0) : 0;
    out.push_back(std::move(m));
  }
  return out;
}

std::string FormatMicroTable(const std::vector<MicroRecord>& records) {
  std::string out = fmt::format("{:<8} {:<36} {:>9} {:>9} {:>11} {:>9} {:>14}\n", "type",
                                "predicate", "rows", "matched", "selectivity", "ms", "rows/sec");
  for (const auto& m : records) {
    const double sel = m.rows ? static_cast<double>(m.matched) / static_cast<double>(m.rows) : 0;
    out += fmt::format("{:<8} {:<36} {:>9} {:>9} {:>11.4f} {:>9.3f} {:>14.0f}\n", m.name,
                       m.predicate, m.rows, m.matched, sel, m.ms, m.rows_per_sec);
  }
  return out;
}

}  // namespace heapsql
