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

#include "support/random_query.h"

#include <algorithm>
#include <memory>
#include <stdexcept>

#include "heapsql/datagen.h"
#include "heapsql/query_builder.h"
#include "heapsql/split_rewriter.h"
#include "heapsql/validate.h"

namespace heapsql::testing {

namespace {

int Pick(std::mt19937_64& rng, int n) {
  return static_cast<int>(std::uniform_int_distribution<int>(0, n - 1)(rng));
}
bool Chance(std::mt19937_64& rng, double p) { return std::bernoulli_distribution(p)(rng); }

template <typename T>
const T& OneOf(std::mt19937_64& rng, const std::vector<T>& v) {
  return v[static_cast<size_t>(Pick(rng, static_cast<int>(v.size())))];
}

Literal CellLiteral(const ColumnBuffer& c, size_t r) {
  switch (c.type()) {
    case PhysType::kI32: return int64_t{c.I32(r)};
    case PhysType::kI64: return c.I64(r);
    case PhysType::kF32: return static_cast<double>(c.F32(r));
    case PhysType::kF64: return c.F64(r);
    case PhysType::kD32: return c.D32(r);
    case PhysType::kStr: return std::string(c.Str(r));
  }
  return int64_t{0};
}

Literal Sample(std::mt19937_64& rng, const ColumnBuffer& c) {
  if (c.size() == 0) return int64_t{0};
  return CellLiteral(c, std::uniform_int_distribution<size_t>(0, c.size() - 1)(rng));
}

double Numeric(const Literal& v) {
  if (const auto* i = std::get_if<int64_t>(&v)) return static_cast<double>(*i);
  if (const auto* d = std::get_if<Date>(&v)) return d->days;
  return std::get<double>(v);
}

bool LiteralLess(const Literal& a, const Literal& b) {
  if (std::holds_alternative<std::string>(a)) return a < b;
  return Numeric(a) < Numeric(b);
}

// A literal in the column's domain, sometimes off the sampled values.
Literal RandomLiteral(std::mt19937_64& rng, const ColumnBuffer& c) {
  Literal v = Sample(rng, c);
  if (IsIntegral(c.type()) && Chance(rng, 0.15)) {
    return static_cast<double>(std::get<int64_t>(v)) + 0.5;
  }
  return v;
}

OrTerm RandomTerm(std::mt19937_64& rng, const ColumnRef& ref, const ColumnBuffer& c) {
  if (Chance(rng, 0.3)) {
    Literal lo = RandomLiteral(rng, c), hi = RandomLiteral(rng, c);
    if (LiteralLess(hi, lo)) std::swap(lo, hi);
    return BetweenPred{ref, lo, hi};
  }
  static const std::vector<CmpOp> ops = {CmpOp::kLt, CmpOp::kLe, CmpOp::kGt,
                                         CmpOp::kGe, CmpOp::kEq, CmpOp::kNe};
  return CmpPred{OneOf(rng, ops), ref, RandomLiteral(rng, c)};
}

Predicate RandomPredicate(std::mt19937_64& rng, const ColumnRef& ref, const ColumnBuffer& c) {
  if (Chance(rng, 0.2)) {
    OrPred o;
    o.terms = {RandomTerm(rng, ref, c), RandomTerm(rng, ref, c)};
    return o;
  }
  OrTerm t = RandomTerm(rng, ref, c);
  if (auto* cmp = std::get_if<CmpPred>(&t)) return *cmp;
  return std::get<BetweenPred>(t);
}

struct SourceCols {
  std::string table;
  const std::vector<ColumnBuffer>* cols;
};

const ColumnBuffer& ColumnNamed(const std::vector<ColumnBuffer>& cols, const std::string& name) {
  for (const auto& c : cols) {
    if (c.name() == name) return c;
  }
  throw std::runtime_error("no column " + name);
}

ColumnRef RefTo(std::mt19937_64& rng, const std::string& table, const std::string& name) {
  return Chance(rng, 0.2) ? ColumnRef{table, name} : ColumnRef{"", name};
}

const ColumnBuffer& RandomColumn(std::mt19937_64& rng, const std::vector<SourceCols>& src,
                                 bool numeric_only, ColumnRef* ref) {
  for (;;) {
    const SourceCols& s = OneOf(rng, src);
    const ColumnBuffer& c = OneOf(rng, *s.cols);
    if (numeric_only && !IsNumeric(c.type())) continue;
    *ref = RefTo(rng, s.table, c.name());
    return c;
  }
}

Expr RandomValueExpr(std::mt19937_64& rng, const std::vector<SourceCols>& src, PhysType* type) {
  ColumnRef ref;
  const ColumnBuffer& c = RandomColumn(rng, src, true, &ref);
  *type = c.type();
  Expr e = MakeColumn(ref);
  if (!Chance(rng, 0.3)) return e;
  ColumnRef ref2;
  const ColumnBuffer& c2 = RandomColumn(rng, src, true, &ref2);
  switch (Pick(rng, 4)) {
    case 0: *type = PhysType::kF64; return MakeArith(ArithOp::kMul, e, MakeLiteral(0.5));
    case 1: return MakeArith(ArithOp::kAdd, e, MakeLiteral(int64_t{7}));
    case 2:
      if (IsFloating(c.type()) || IsFloating(c2.type())) *type = PhysType::kF64;
      return MakeArith(ArithOp::kAdd, e, MakeColumn(ref2));
    default:
      *type = PhysType::kF64;
      return MakeArith(ArithOp::kDiv, e, MakeArith(ArithOp::kAdd, MakeColumn(ref2), MakeLiteral(int64_t{1})));
  }
}

Expr RandomAgg(std::mt19937_64& rng, const std::vector<SourceCols>& src) {
  PhysType t{};
  switch (Pick(rng, 6)) {
    case 0: return MakeAgg(AggFn::kCount, nullptr);
    case 1: return MakeAgg(AggFn::kSum, RandomValueExpr(rng, src, &t));
    case 2: return MakeAgg(AggFn::kAvg, RandomValueExpr(rng, src, &t));
    case 3: return MakeAgg(AggFn::kMin, RandomValueExpr(rng, src, &t));
    case 4: return MakeAgg(AggFn::kMax, RandomValueExpr(rng, src, &t));
    default: {
      // ratio of two aggregates
      return MakeArith(ArithOp::kDiv, MakeAgg(AggFn::kSum, RandomValueExpr(rng, src, &t)),
                       MakeAgg(AggFn::kCount, nullptr));
    }
  }
}

std::vector<Predicate> RandomWhere(std::mt19937_64& rng, const std::vector<SourceCols>& src,
                                   int max_preds) {
  std::vector<Predicate> out;
  const int n = Pick(rng, max_preds + 1);
  for (int i = 0; i < n; ++i) {
    if (Chance(rng, 0.1)) {
      ColumnRef l, r;
      const ColumnBuffer& lc = RandomColumn(rng, src, true, &l);
      const ColumnBuffer& rc = RandomColumn(rng, src, true, &r);
      if (IsIntegral(lc.type()) && IsIntegral(rc.type()) && !(l == r)) {
        out.push_back(ColumnCmpPred{Chance(rng, 0.5) ? CmpOp::kLt : CmpOp::kGe, l, r});
        continue;
      }
    }
    const SourceCols& s = OneOf(rng, src);
    const ColumnBuffer& c = OneOf(rng, *s.cols);
    out.push_back(RandomPredicate(rng, RefTo(rng, s.table, c.name()), c));
  }
  return out;
}

std::vector<std::string> GroupCandidates(const std::string& p) {
  return {p + "small", p + "key", p + "cat"};
}

}  // namespace

TableData MakeRandomTables(uint64_t seed, size_t rows_t1, size_t rows_t2) {
  TableData t;
  t["t1"] = GenerateSynthetic(seed, rows_t1, "a_");
  t["t2"] = GenerateSynthetic(seed ^ 0x9e3779b97f4a7c15ULL, rows_t2, "b_");
  return t;
}

void LoadTables(Database& db, const TableData& tables) {
  for (const auto& [name, cols] : tables) LoadTable(db.heap, db.catalog, name, cols);
}

GeneratedQuery RandomQuery(std::mt19937_64& rng, const TableData& tables, const Catalog& catalog) {
  const SourceCols t1{"t1", &tables.at("t1")}, t2{"t2", &tables.at("t2")};
  for (;;) {
    GeneratedQuery g;
    QuerySpec& q = g.spec;
    const int shape = Pick(rng, 20);
    std::vector<SourceCols> src;
    std::string prefix = "a_";
    if (shape < 3) {
      // derived FROM
      QuerySpec sub;
      sub.from.push_back(FromItem{"t1", nullptr, ""});
      for (const char* c : {"a_small", "a_large", "a_key", "a_fval", "a_cat", "a_date"}) {
        sub.select.push_back(SelectItem{MakeColumn({"", c}), ""});
      }
      sub.where = RandomWhere(rng, {t1}, 2);
      q.from.push_back(FromItem{"", std::make_shared<const QuerySpec>(sub), "d"});
      src = {t1};
    } else {
      const bool second = Chance(rng, 0.25);
      q.from.push_back(FromItem{second ? "t2" : "t1", nullptr, ""});
      src = {second ? t2 : t1};
      prefix = second ? "b_" : "a_";
      if (shape >= 10) {
        const SourceCols& other = second ? t1 : t2;
        q.joins.push_back(JoinSpec{other.table, {"", prefix + "key"},
                                   {"", (second ? "a_" : "b_") + std::string("key")}});
        src.push_back(other);
      }
    }
    const bool derived = shape < 3;
    const std::vector<SourceCols> pred_src =
        derived ? std::vector<SourceCols>{} : src;
    if (!derived) q.where = RandomWhere(rng, pred_src, 3);
    if (!derived && q.joins.empty() && Chance(rng, 0.15)) {
      // IS IN over the other table
      const std::string other = prefix == "a_" ? "t2" : "t1";
      const std::string op = prefix == "a_" ? "b_" : "a_";
      QuerySpec sub;
      sub.from.push_back(FromItem{other, nullptr, ""});
      sub.select.push_back(SelectItem{MakeColumn({"", op + "key"}), ""});
      sub.where = RandomWhere(rng, {other == "t1" ? t1 : t2}, 2);
      q.where.push_back(IsInPred{{"", prefix + "key"}, std::make_shared<const QuerySpec>(sub)});
    }

    const bool projection = !derived && q.joins.empty() && Chance(rng, 0.1);
    if (projection) {
      q.select.push_back(SelectItem{MakeColumn({"", prefix + "id"}), ""});
      PhysType t{};
      q.select.push_back(SelectItem{RandomValueExpr(rng, src, &t), ""});
      if (Chance(rng, 0.4)) {
        q.order.push_back(OrderItem{prefix + "id", Chance(rng, 0.5)});
        if (Chance(rng, 0.5)) q.limit = static_cast<uint64_t>(1 + Pick(rng, 30));
        g.ordered = true;
      }
    } else {
      std::vector<std::string> group;
      if (Chance(rng, 0.6)) {
        std::vector<std::string> cands = GroupCandidates(derived ? "a_" : prefix);
        if (!q.joins.empty()) {
          for (auto& c : GroupCandidates(prefix == "a_" ? "b_" : "a_")) cands.push_back(c);
        }
        std::shuffle(cands.begin(), cands.end(), rng);
        group.assign(cands.begin(), cands.begin() + 1 + Pick(rng, 2));
      }
      for (const auto& gcol : group) {
        q.group.push_back({"", gcol});
        q.select.push_back(SelectItem{MakeColumn({"", gcol}), ""});
      }
      const int naggs = group.empty() ? 1 + Pick(rng, 3) : Pick(rng, 4);
      std::vector<SourceCols> agg_src = src;
      for (int i = 0; i < naggs; ++i) q.select.push_back(SelectItem{RandomAgg(rng, agg_src), ""});
      if (derived) {
        // only the derived columns are visible
        for (auto& s : q.select) {
          bool ok = true;
          ForEachColumn(s.expr, [&](const ColumnRef& c) {
            static const std::vector<std::string> vis = {"a_small", "a_large", "a_key",
                                                         "a_fval", "a_cat", "a_date"};
            if (std::find(vis.begin(), vis.end(), c.name) == vis.end() || !c.table.empty()) {
              ok = false;
            }
          });
          if (!ok) s.expr = MakeAgg(AggFn::kSum, MakeColumn({"", "a_large"}));
        }
      }
      if (!group.empty() && Chance(rng, 0.35)) {
        for (const auto& gcol : group) q.order.push_back(OrderItem{gcol, Chance(rng, 0.5)});
        if (Chance(rng, 0.5)) q.limit = static_cast<uint64_t>(1 + Pick(rng, 20));
        g.ordered = true;
      }
    }
    AssignDefaultAliases(q);
    if (Validate(q, catalog).ok()) return g;
  }
}

ColumnBuffer FreeColumnValues(const Database& db, const QuerySpec& q_o, const ColumnRef& col) {
  std::vector<std::string> tables;
  for (const auto& f : q_o.from) tables.push_back(f.table);
  for (const auto& j : q_o.joins) tables.push_back(j.table);
  for (const auto& t : tables) {
    if (!col.table.empty() && col.table != t) continue;
    const TableDescriptor* d = db.catalog.Find(t);
    if (!d) continue;
    if (const ColumnDescriptor* c = d->FindColumn(col.name)) return ExportColumn(db.heap, *c);
  }
  throw std::runtime_error("free column not found: " + col.ToString());
}

GeneratedQuery RandomFollowUp(std::mt19937_64& rng, const QuerySpec& q_o, const ColumnRef& cfree,
                              const ColumnBuffer& values) {
  GeneratedQuery g;
  QuerySpec& q = g.spec;
  q = q_o;
  q.free.reset();
  q.where.clear();
  for (const auto& p : q_o.where) {
    if (!IsFreePredicate(p, cfree)) q.where.push_back(p);
  }
  const int n = Pick(rng, 3);
  for (int i = 0; i < n; ++i) q.where.push_back(RandomPredicate(rng, cfree, values));

  const bool aggregated = q_o.HasAggregate() || !q_o.group.empty();
  if (q.select.size() > 1 && Chance(rng, 0.25)) {
    // drop one non-group term
    std::vector<size_t> droppable;
    for (size_t i = 0; i < q.select.size(); ++i) {
      const auto& e = q.select[i].expr;
      const bool is_group = e->kind == ExprKind::kColumn &&
                            std::any_of(q.group.begin(), q.group.end(),
                                        [&](const ColumnRef& c) { return SameColumn(c, e->column); });
      if (!is_group) droppable.push_back(i);
    }
    if (droppable.size() > 1) {
      q.select.erase(q.select.begin() + static_cast<long>(OneOf(rng, droppable)));
    }
  }
  const bool grouped_by_free = std::any_of(q.group.begin(), q.group.end(),
                                           [&](const ColumnRef& c) { return SameColumn(c, cfree); });
  if (aggregated && !grouped_by_free && Chance(rng, 0.3)) {
    q.group.push_back(cfree);
    const bool selected = std::any_of(q.select.begin(), q.select.end(), [&](const SelectItem& s) {
      return s.expr->kind == ExprKind::kColumn && SameColumn(s.expr->column, cfree);
    });
    if (!selected) q.select.insert(q.select.begin(), SelectItem{MakeColumn(cfree), ""});
  }

  // Keep an ORDER BY only when it is a total order over the group keys.
  q.order.clear();
  q.limit.reset();
  bool all_keys_selected = !q.group.empty();
  std::vector<std::string> keys;
  for (const auto& gcol : q.group) {
    bool found = false;
    for (const auto& s : q.select) {
      if (s.expr->kind == ExprKind::kColumn && SameColumn(s.expr->column, gcol)) {
        keys.push_back(OutputName(s));
        found = true;
        break;
      }
    }
    all_keys_selected = all_keys_selected && found;
  }
  if (aggregated && all_keys_selected && Chance(rng, 0.4)) {
    for (const auto& k : keys) q.order.push_back(OrderItem{k, Chance(rng, 0.5)});
    if (Chance(rng, 0.5)) q.limit = static_cast<uint64_t>(1 + Pick(rng, 10));
    g.ordered = true;
  }
  return g;
}

std::vector<Scenario> SyntheticSplitScenarios() {
  auto make = [](const char* id, const char* d, QueryBuilder b, const char* free) {
    return Scenario{id, d, b.Build(), ColumnRef::Parse(free)};
  };
  std::vector<Scenario> s;
  s.push_back(make("S1", "sum over a date window", Select()
                                                       .From("t1")
                                                       .Field(As(Sum("a_large"), "total"))
                                                       .Where(Between("a_date", DateLit("1993-01-01"),
                                                                      DateLit("1995-12-31"))),
                   "a_date"));
  s.push_back(make("S2", "count and average per small bucket",
                   Select()
                       .From("t1")
                       .Field("a_small")
                       .Field(As(Count(), "n"))
                       .Field(As(Avg("a_fval"), "avg_f"))
                       .Where(Lt("a_large", 50000))
                       .GroupBy("a_small"),
                   "a_date"));
  s.push_back(make("S3", "extremes per category",
                   Select()
                       .From("t1")
                       .Field("a_cat")
                       .Field(As(Min("a_big"), "lo"))
                       .Field(As(Max("a_dval"), "hi"))
                       .GroupBy("a_cat")
                       .OrderBy("a_cat"),
                   "a_large"));
  s.push_back(make("S4", "join sum per small bucket",
                   Select()
                       .From("t1")
                       .Join("t2")
                       .On("a_key", "b_key")
                       .Field("a_small")
                       .Field(As(Sum("b_large"), "s"))
                       .GroupBy("a_small"),
                   "b_date"));
  s.push_back(make("S5", "join count for one category",
                   Select()
                       .From("t1")
                       .Join("t2")
                       .On("a_key", "b_key")
                       .Field(As(Count(), "n"))
                       .Where(Eq("a_cat", "BUILDING")),
                   "a_fval"));
  s.push_back(make("S6", "projection of a bucket",
                   Select().From("t1").Field("a_id").Field("a_large").Where(Eq("a_small", 3)),
                   "a_date"));
  s.push_back(make("S7", "sum of a product", Select()
                                                  .From("t1")
                                                  .Field(As(Sum(Mul("a_large", "a_small")), "p"))
                                                  .Where(Ge("a_key", 10)),
                   "a_cat"));
  s.push_back(make("S8", "semi-join on key",
                   Select()
                       .From("t1")
                       .Field(As(Sum("a_large"), "s"))
                       .Where(IsIn("a_key", Select().From("t2").Field("b_key").Where(Lt("b_small", 3)).Build())),
                   "a_date"));
  s.push_back(make("S9", "average of a wide integer per two keys",
                   Select()
                       .From("t1")
                       .Field("a_cat")
                       .Field("a_small")
                       .Field(As(Avg("a_big"), "avg_big"))
                       .GroupBy("a_cat")
                       .GroupBy("a_small"),
                   "a_dval"));
  s.push_back(make("S10", "computed projection",
                   Select()
                       .From("t1")
                       .Field("a_id")
                       .Field(As(Add("a_large", "a_small"), "ls"))
                       .Where(Lt("a_key", 8)),
                   "a_fval"));
  s.push_back(make("S11", "latest date per bucket under a disjunction",
                   Select()
                       .From("t1")
                       .Field("a_small")
                       .Field(As(Count(), "n"))
                       .Field(As(Max("a_date"), "latest"))
                       .Where(Or({Lt("a_large", 20000), Gt("a_large", 80000)}))
                       .GroupBy("a_small"),
                   "a_cat"));
  s.push_back(make("S12", "join average per right category",
                   Select()
                       .From("t1")
                       .Join("t2")
                       .On("a_key", "b_key")
                       .Field("b_cat")
                       .Field(As(Avg("a_fval"), "avg_f"))
                       .Field(As(Div(Sum("a_large"), Count()), "ratio"))
                       .GroupBy("b_cat")
                       .OrderBy("b_cat"),
                   "a_large"));
  s.push_back(make("S13", "column comparison filter",
                   Select()
                       .From("t1")
                       .Field(As(Sum("a_large"), "s"))
                       .Field(As(Min("a_fval"), "mf"))
                       .Where(ColCmp(CmpOp::kLt, "a_small", "a_key")),
                   "a_date"));
  return s;
}

}  // namespace heapsql::testing
