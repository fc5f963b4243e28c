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

#include "heapsql/split_rewriter.h"

#include <map>
#include <set>

#include <fmt/format.h>

#include "heapsql/canonical.h"
#include "heapsql/query_builder.h"
#include "heapsql/query_text.h"
#include "heapsql/validate.h"

namespace heapsql {

namespace {

std::string ArgKey(const Expr& arg) { return ToString(arg); }

std::string AggKey(AggFn fn, const Expr& arg) {
  return std::string(AggFnName(fn)) + "|" + ArgKey(arg);
}

void CollectNames(const QuerySpec& q, std::set<std::string>* names);

void CollectNames(const Predicate& p, std::set<std::string>* names) {
  for (const auto& c : PredicateColumns(p)) names->insert(c.name);
  if (const auto* in = std::get_if<IsInPred>(&p)) {
    if (in->subquery) CollectNames(*in->subquery, names);
  }
}

// Bare names of every column referenced anywhere in `q`, subqueries included.
void CollectNames(const QuerySpec& q, std::set<std::string>* names) {
  auto add = [&](const ColumnRef& c) { names->insert(c.name); };
  for (const auto& s : q.select) ForEachColumn(s.expr, add);
  for (const auto& f : q.from) {
    if (f.subquery) CollectNames(*f.subquery, names);
  }
  for (const auto& j : q.joins) {
    add(j.left);
    add(j.right);
  }
  for (const auto& p : q.where) CollectNames(p, names);
  for (const auto& g : q.group) add(g);
}

bool Contains(const std::vector<ColumnRef>& cols, const ColumnRef& c) {
  for (const auto& x : cols) {
    if (SameColumn(x, c)) return true;
  }
  return false;
}

ColumnRef Bare(const ColumnRef& c) { return ColumnRef{"", c.name}; }

OrTerm RebaseTerm(const OrTerm& t) {
  return std::visit(
      [](auto p) -> OrTerm {
        p.column = Bare(p.column);
        return p;
      },
      t);
}

Predicate RebasePredicate(const Predicate& p) {
  if (const auto* c = std::get_if<CmpPred>(&p)) {
    CmpPred out = *c;
    out.column = Bare(out.column);
    return out;
  }
  if (const auto* b = std::get_if<BetweenPred>(&p)) {
    BetweenPred out = *b;
    out.column = Bare(out.column);
    return out;
  }
  if (const auto* o = std::get_if<OrPred>(&p)) {
    OrPred out;
    for (const auto& t : o->terms) out.terms.push_back(RebaseTerm(t));
    return out;
  }
  return p;
}

// View column supplying `fn` over `arg`, or "" when the view lacks it.
std::string Provided(AggFn fn, const Expr& arg, const std::vector<AggMapping>& agg_map) {
  const std::string key = ArgKey(arg);
  for (const auto& m : agg_map) {
    if (ArgKey(m.term->arg) != key) continue;
    switch (fn) {
      case AggFn::kSum:
        if (!m.sum.empty()) return m.sum;
        break;
      case AggFn::kCount:
        if (!m.cnt.empty()) return m.cnt;
        break;
      case AggFn::kMin:
        if (!m.min.empty()) return m.min;
        break;
      case AggFn::kMax:
        if (!m.max.empty()) return m.max;
        break;
      case AggFn::kAvg: break;
    }
  }
  return "";
}

bool CanDerive(const Expr& agg, const std::vector<AggMapping>& agg_map) {
  if (agg->agg_fn == AggFn::kAvg) {
    return !Provided(AggFn::kSum, agg->arg, agg_map).empty() &&
           !Provided(AggFn::kCount, agg->arg, agg_map).empty();
  }
  return !Provided(agg->agg_fn, agg->arg, agg_map).empty();
}

struct ViewShape {
  std::vector<ColumnRef> columns;                   // bare column terms
  std::vector<std::pair<Expr, std::string>> computed;  // non-aggregate expressions
};

ViewShape ShapeOf(const MVDefinition& mv) {
  ViewShape v;
  for (const auto& s : mv.mvq.select) {
    if (s.expr->kind == ExprKind::kColumn) {
      v.columns.push_back(s.expr->column);
    } else if (!ContainsAgg(s.expr)) {
      v.computed.emplace_back(s.expr, s.alias);
    }
  }
  return v;
}

bool ColumnsInView(const Expr& e, const ViewShape& v) {
  bool ok = true;
  ForEachColumn(e, [&](const ColumnRef& c) { ok = ok && Contains(v.columns, c); });
  return ok;
}

Expr MapExpr(const Expr& e, const MVDefinition& mv, const ViewShape& v) {
  for (const auto& [expr, alias] : v.computed) {
    if (StructurallyEqual(expr, e)) return MakeColumn(ColumnRef{"", alias});
  }
  switch (e->kind) {
    case ExprKind::kColumn: return MakeColumn(Bare(e->column));
    case ExprKind::kLiteral: return e;
    case ExprKind::kArith:
      return MakeArith(e->arith_op, MapExpr(e->left, mv, v), MapExpr(e->right, mv, v));
    case ExprKind::kAgg: return DeriveAgg(e, mv.agg_map);
  }
  return e;
}

QuerySpec JoinPart(const QuerySpec& q) {
  QuerySpec out;
  out.joins = q.joins;
  return out;
}

QuerySpec FromPart(const QuerySpec& q) {
  QuerySpec out;
  out.from = q.from;
  return out;
}

}  // namespace

bool SameColumn(const ColumnRef& a, const ColumnRef& b) {
  return a.name == b.name && (a.table.empty() || b.table.empty() || a.table == b.table);
}

bool IsFreePredicate(const Predicate& p, const ColumnRef& cfree) {
  if (!std::holds_alternative<CmpPred>(p) && !std::holds_alternative<BetweenPred>(p) &&
      !std::holds_alternative<OrPred>(p)) {
    return false;
  }
  const auto cols = PredicateColumns(p);
  if (cols.empty()) return false;
  for (const auto& c : cols) {
    if (!SameColumn(c, cfree)) return false;
  }
  return true;
}

FreeCheck CanFree(const QuerySpec& q, const ColumnRef& col, const Catalog* catalog) {
  auto reject = [](std::string reason) { return FreeCheck{false, ErrorCode::kFreeRejected, reason}; };
  if (catalog) {
    const ValidationResult v = Validate(q, *catalog);
    if (!v.ok()) return FreeCheck{false, v.code(), v.Message()};
    std::vector<Diagnostic> diags;
    const Scope scope = BuildScope(q, *catalog, &diags);
    Diagnostic d;
    if (!scope.Resolve(col, &d)) return FreeCheck{false, d.code, d.message};
  }
  const std::string name = col.ToString();
  for (const auto& j : q.joins) {
    if (SameColumn(j.left, col) || SameColumn(j.right, col)) {
      return reject(fmt::format("{} appears in the join condition", name));
    }
  }
  std::set<std::string> sub_names;
  for (const auto& p : q.where) {
    if (const auto* cc = std::get_if<ColumnCmpPred>(&p)) {
      if (SameColumn(cc->left, col) || SameColumn(cc->right, col)) {
        return reject(fmt::format("{} appears in a predicate on multiple columns: {}", name,
                                  ToString(p)));
      }
    } else if (std::holds_alternative<OrPred>(p)) {
      if (Contains(PredicateColumns(p), col)) {
        return reject(fmt::format("{} appears in an OR clause: {}", name, ToString(p)));
      }
    } else if (const auto* in = std::get_if<IsInPred>(&p)) {
      if (SameColumn(in->column, col)) {
        return reject(fmt::format("{} is tested against a subquery: {}", name, ToString(p)));
      }
      if (in->subquery) CollectNames(*in->subquery, &sub_names);
    }
  }
  for (const auto& f : q.from) {
    if (f.subquery) CollectNames(*f.subquery, &sub_names);
  }
  if (sub_names.count(col.name)) {
    return reject(fmt::format("{} is referenced inside a subquery", name));
  }
  return FreeCheck{};
}

std::vector<Expr> RewriteAgg(const Expr& agg) {
  if (agg->agg_fn == AggFn::kAvg) {
    return {MakeAgg(AggFn::kSum, agg->arg), MakeAgg(AggFn::kCount, agg->arg)};
  }
  return {agg};
}

MVDefinition GenerateMvq(const QuerySpec& q_o, const ColumnRef& cfree, const Catalog* catalog) {
  const FreeCheck check = CanFree(q_o, cfree, catalog);
  if (!check.ok) throw Error(check.code, check.reason);

  QuerySpec q = q_o;
  AssignDefaultAliases(q);
  MVDefinition mv;
  mv.free_col = cfree;
  QuerySpec& m = mv.mvq;
  m.from = q.from;
  m.joins = q.joins;
  m.group = q.group;
  for (const auto& p : q.where) {
    if (!IsFreePredicate(p, cfree)) m.where.push_back(p);
  }

  std::set<std::string> used{cfree.name};
  for (const auto& s : q.select) {
    if (s.expr->kind == ExprKind::kColumn) used.insert(s.expr->column.name);
  }
  int next = 1;
  auto fresh = [&] {
    std::string n;
    do {
      n = fmt::format("f{}", next++);
    } while (used.count(n));
    used.insert(n);
    return n;
  };

  std::map<std::string, std::string> emitted;  // AggKey -> view column
  auto emit = [&](const Expr& comp) {
    const std::string key = AggKey(comp->agg_fn, comp->arg);
    auto it = emitted.find(key);
    if (it != emitted.end()) return it->second;
    const std::string n = fresh();
    m.select.push_back({comp, n});
    emitted.emplace(key, n);
    return n;
  };

  std::vector<ColumnRef> view_cols;
  std::set<std::string> mapped;
  const bool has_agg = q.HasAggregate();
  for (const auto& s : q.select) {
    if (ContainsAgg(s.expr)) {
      ForEachAgg(s.expr, [&](const Expr& a) {
        const std::string key = AggKey(a->agg_fn, a->arg);
        if (!mapped.insert(key).second) return;
        AggMapping map;
        map.term = a;
        const std::vector<Expr> parts = RewriteAgg(a);
        switch (a->agg_fn) {
          case AggFn::kSum: map.sum = emit(parts[0]); break;
          case AggFn::kCount: map.cnt = emit(parts[0]); break;
          case AggFn::kMin: map.min = emit(parts[0]); break;
          case AggFn::kMax: map.max = emit(parts[0]); break;
          case AggFn::kAvg:
            map.sum = emit(parts[0]);
            map.cnt = emit(parts[1]);
            break;
        }
        mv.agg_map.push_back(std::move(map));
      });
    } else if (s.expr->kind == ExprKind::kColumn) {
      if (Contains(view_cols, s.expr->column)) continue;
      view_cols.push_back(s.expr->column);
      m.select.push_back({s.expr, ""});
    } else {
      m.select.push_back({s.expr, fresh()});
    }
  }
  if (!Contains(view_cols, cfree)) m.select.push_back({MakeColumn(cfree), ""});
  if ((has_agg || !m.group.empty()) && !Contains(m.group, cfree)) m.group.push_back(cfree);

  QuerySpec source;
  source.select = q.select;
  source.from = q.from;
  source.joins = q.joins;
  source.where = m.where;
  source.group = q.group;
  source.free = cfree;
  mv.source_fingerprint = Fingerprint(source);
  mv.name = fmt::format("mv_{:016x}", mv.source_fingerprint);
  return mv;
}

std::string MatchReport::Message() const {
  if (matched) return "matched";
  return fmt::format("cond {} failed: {}", first_failed, offending);
}

MatchReport Matches(const QuerySpec& q_n, const MVDefinition& mv) {
  QuerySpec q = q_n;
  AssignDefaultAliases(q);
  const ColumnRef& cf = mv.free_col;
  const ViewShape view = ShapeOf(mv);
  const bool agg_view = mv.aggregated();
  MatchReport r;
  auto fail = [&](int cond, std::string what) {
    r.conds[cond - 1] = false;
    if (r.first_failed == 0) {
      r.first_failed = cond;
      r.offending = std::move(what);
    }
  };

  // cond 1: every select term is available from the view.
  const bool q_agg = q.HasAggregate();
  if (agg_view && !q_agg && q.group.empty()) {
    fail(1, "the view is aggregated but the query neither aggregates nor groups");
  }
  for (const auto& s : q.select) {
    if (ContainsAgg(s.expr)) {
      ForEachAgg(s.expr, [&](const Expr& a) {
        if (!agg_view || !CanDerive(a, mv.agg_map)) fail(1, ToString(a));
      });
    } else if (s.expr->kind == ExprKind::kColumn) {
      if (!Contains(view.columns, s.expr->column)) fail(1, ToString(s.expr));
    } else {
      bool ok = false;
      for (const auto& [expr, alias] : view.computed) ok = ok || StructurallyEqual(expr, s.expr);
      if (!ok && !ColumnsInView(s.expr, view)) fail(1, ToString(s.expr));
    }
  }

  // cond 2 and 3: same sources and join.
  if (CanonicalText(FromPart(q)) != CanonicalText(FromPart(mv.mvq))) {
    fail(2, "FROM differs from the view definition");
  }
  if (CanonicalText(JoinPart(q)) != CanonicalText(JoinPart(mv.mvq))) {
    fail(3, "JOIN differs from the view definition");
  }

  // cond 4: predicates other than those on the free column match exactly.
  QuerySpec rest, view_where;
  for (const auto& p : q.where) {
    if (!IsFreePredicate(p, cf)) rest.where.push_back(p);
  }
  view_where.where = mv.mvq.where;
  if (CanonicalText(rest) != CanonicalText(view_where)) {
    std::string what = "WHERE differs from the view definition";
    const QuerySpec cr = Canonicalize(rest);
    const QuerySpec cv = Canonicalize(view_where);
    for (const auto& p : cr.where) {
      bool found = false;
      for (const auto& w : cv.where) found = found || StructurallyEqual(p, w);
      if (!found) {
        what = "predicate not in the view definition: " + ToString(p);
        break;
      }
    }
    fail(4, what);
  }

  // cond 5: grouping only on view group columns or the free column.
  for (const auto& g : q.group) {
    if (SameColumn(g, cf)) continue;
    if (!agg_view || !Contains(mv.mvq.group, g) || !Contains(view.columns, g)) {
      fail(5, g.ToString());
    }
  }
  if (!agg_view && !q.group.empty() && r.conds[4]) fail(5, "grouping over a projection view");

  r.matched = r.first_failed == 0;
  return r;
}

Expr DeriveAgg(const Expr& agg, const std::vector<AggMapping>& agg_map) {
  auto col = [&](AggFn fn) {
    const std::string c = Provided(fn, agg->arg, agg_map);
    if (c.empty()) throw Error(ErrorCode::kUnmappedAggregate, "view has no column for " + ToString(agg));
    return MakeColumn(ColumnRef{"", c});
  };
  switch (agg->agg_fn) {
    case AggFn::kSum: return MakeAgg(AggFn::kSum, col(AggFn::kSum));
    case AggFn::kCount: return MakeAgg(AggFn::kSum, col(AggFn::kCount));
    case AggFn::kMin: return MakeAgg(AggFn::kMin, col(AggFn::kMin));
    case AggFn::kMax: return MakeAgg(AggFn::kMax, col(AggFn::kMax));
    case AggFn::kAvg:
      return MakeArith(ArithOp::kDiv, MakeAgg(AggFn::kSum, col(AggFn::kSum)),
                       MakeAgg(AggFn::kSum, col(AggFn::kCount)));
  }
  return agg;
}

QuerySpec GenerateVq(const QuerySpec& q_n, const MVDefinition& mv) {
  const MatchReport report = Matches(q_n, mv);
  if (!report.matched) throw Error(ErrorCode::kNoMatch, report.Message());
  QuerySpec q = q_n;
  AssignDefaultAliases(q);
  const ViewShape view = ShapeOf(mv);

  QuerySpec vq;
  for (const auto& s : q.select) {
    SelectItem item{MapExpr(s.expr, mv, view), s.alias};
    if (item.alias.empty() && s.expr->kind != ExprKind::kColumn) item.alias = OutputName(s);
    vq.select.push_back(std::move(item));
  }
  vq.from.push_back(FromItem{mv.name, nullptr, ""});
  for (const auto& p : q.where) {
    if (IsFreePredicate(p, mv.free_col)) vq.where.push_back(RebasePredicate(p));
  }
  for (const auto& g : q.group) vq.group.push_back(Bare(g));
  vq.order = q.order;
  vq.limit = q.limit;
  return vq;
}

nlohmann::json MVDefinitionToJson(const MVDefinition& mv) {
  nlohmann::json map = nlohmann::json::array();
  for (const auto& m : mv.agg_map) {
    nlohmann::json e{{"term", ExprToJson(m.term)}};
    if (!m.sum.empty()) e["sum"] = m.sum;
    if (!m.cnt.empty()) e["cnt"] = m.cnt;
    if (!m.min.empty()) e["min"] = m.min;
    if (!m.max.empty()) e["max"] = m.max;
    map.push_back(std::move(e));
  }
  return nlohmann::json{{"name", mv.name},
                        {"mvq", QueryToJson(mv.mvq)},
                        {"free", mv.free_col.ToString()},
                        {"agg_map", std::move(map)},
                        {"source_fingerprint", fmt::format("{:016x}", mv.source_fingerprint)}};
}

MVDefinition MVDefinitionFromJson(const nlohmann::json& j) {
  try {
    MVDefinition mv;
    mv.name = j.at("name").get<std::string>();
    mv.mvq = QueryFromJson(j.at("mvq"));
    mv.free_col = ColumnRef::Parse(j.at("free").get<std::string>());
    for (const auto& e : j.at("agg_map")) {
      AggMapping m;
      m.term = ExprFromJson(e.at("term"));
      if (m.term->kind != ExprKind::kAgg) {
        throw Error(ErrorCode::kMalformedQuery, "agg_map term is not an aggregate");
      }
      m.sum = e.value("sum", "");
      m.cnt = e.value("cnt", "");
      m.min = e.value("min", "");
      m.max = e.value("max", "");
      mv.agg_map.push_back(std::move(m));
    }
    mv.source_fingerprint =
        std::stoull(j.at("source_fingerprint").get<std::string>(), nullptr, 16);
    return mv;
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error(ErrorCode::kMalformedQuery, std::string("bad view definition: ") + e.what());
  }
}

}  // namespace heapsql
