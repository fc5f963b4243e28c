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

#include "heapsql/query_builder.h"

#include <set>

#include <fmt/format.h>

#include "heapsql/status.h"

namespace heapsql {

Expr Col(std::string_view column) { return MakeColumn(ColumnRef::Parse(column)); }
Expr Lit(Literal value) { return MakeLiteral(std::move(value)); }
Date DateLit(std::string_view text) { return ParseDate(text); }

Expr Add(ExprArg a, ExprArg b) { return MakeArith(ArithOp::kAdd, a.expr, b.expr); }
Expr Sub(ExprArg a, ExprArg b) { return MakeArith(ArithOp::kSub, a.expr, b.expr); }
Expr Mul(ExprArg a, ExprArg b) { return MakeArith(ArithOp::kMul, a.expr, b.expr); }
Expr Div(ExprArg a, ExprArg b) { return MakeArith(ArithOp::kDiv, a.expr, b.expr); }
Expr Sum(ExprArg a) { return MakeAgg(AggFn::kSum, a.expr); }
Expr Count(ExprArg a) { return MakeAgg(AggFn::kCount, a.expr); }
Expr Count() { return MakeAgg(AggFn::kCount, nullptr); }
Expr Avg(ExprArg a) { return MakeAgg(AggFn::kAvg, a.expr); }
Expr Min(ExprArg a) { return MakeAgg(AggFn::kMin, a.expr); }
Expr Max(ExprArg a) { return MakeAgg(AggFn::kMax, a.expr); }

SelectItem As(ExprArg e, std::string alias) { return SelectItem{e.expr, std::move(alias)}; }

Predicate Lt(ColArg c, LitArg v) { return CmpPred{CmpOp::kLt, c.ref, v.value}; }
Predicate Le(ColArg c, LitArg v) { return CmpPred{CmpOp::kLe, c.ref, v.value}; }
Predicate Gt(ColArg c, LitArg v) { return CmpPred{CmpOp::kGt, c.ref, v.value}; }
Predicate Ge(ColArg c, LitArg v) { return CmpPred{CmpOp::kGe, c.ref, v.value}; }
Predicate Eq(ColArg c, LitArg v) { return CmpPred{CmpOp::kEq, c.ref, v.value}; }
Predicate Ne(ColArg c, LitArg v) { return CmpPred{CmpOp::kNe, c.ref, v.value}; }

Predicate Between(ColArg c, LitArg lo, LitArg hi) {
  return BetweenPred{c.ref, lo.value, hi.value};
}

Predicate IsIn(ColArg c, QuerySpec subquery) {
  return IsInPred{c.ref, std::make_shared<const QuerySpec>(std::move(subquery))};
}

Predicate Or(std::initializer_list<Predicate> terms) {
  OrPred out;
  for (const auto& t : terms) {
    if (const auto* cmp = std::get_if<CmpPred>(&t)) {
      out.terms.emplace_back(*cmp);
    } else if (const auto* btw = std::get_if<BetweenPred>(&t)) {
      out.terms.emplace_back(*btw);
    } else {
      throw Error(ErrorCode::kMalformedQuery,
                  "OR terms must be comparisons or BETWEEN: " + ToString(t));
    }
  }
  return out;
}

Predicate ColCmp(CmpOp op, ColArg left, ColArg right) {
  return ColumnCmpPred{op, left.ref, right.ref};
}

QueryBuilder Select() { return QueryBuilder(); }

QueryBuilder& QueryBuilder::From(std::string table) {
  spec_.from.push_back(FromItem{std::move(table), nullptr, ""});
  pending_join_ = false;
  return *this;
}

QueryBuilder& QueryBuilder::From(QuerySpec subquery, std::string alias) {
  spec_.from.push_back(
      FromItem{"", std::make_shared<const QuerySpec>(std::move(subquery)), std::move(alias)});
  pending_join_ = false;
  return *this;
}

QueryBuilder& QueryBuilder::Join(std::string table) {
  if (pending_join_) {
    throw Error(ErrorCode::kMalformedQuery, "join('" + spec_.joins.back().table +
                                                "') is missing its on() before the next join");
  }
  spec_.joins.push_back(JoinSpec{std::move(table), {}, {}});
  pending_join_ = true;
  return *this;
}

QueryBuilder& QueryBuilder::On(ColArg left, ColArg right) {
  if (!pending_join_) throw Error(ErrorCode::kMalformedQuery, "on() without a preceding join()");
  spec_.joins.back().left = left.ref;
  spec_.joins.back().right = right.ref;
  pending_join_ = false;
  return *this;
}

QueryBuilder& QueryBuilder::Field(ExprArg e) { return Field(SelectItem{e.expr, ""}); }

QueryBuilder& QueryBuilder::Field(SelectItem item) {
  spec_.select.push_back(std::move(item));
  return *this;
}

QueryBuilder& QueryBuilder::Where(Predicate p) {
  spec_.where.push_back(std::move(p));
  return *this;
}

QueryBuilder& QueryBuilder::GroupBy(ColArg c) {
  spec_.group.push_back(c.ref);
  return *this;
}

QueryBuilder& QueryBuilder::OrderBy(std::string key, bool descending) {
  spec_.order.push_back(OrderItem{std::move(key), descending});
  return *this;
}

QueryBuilder& QueryBuilder::Limit(uint64_t n) {
  spec_.limit = n;
  return *this;
}

QueryBuilder& QueryBuilder::Free(ColArg c) {
  if (spec_.free) {
    throw Error(ErrorCode::kMalformedQuery,
                fmt::format("free() already set to '{}'", spec_.free->ToString()));
  }
  spec_.free = c.ref;
  return *this;
}

QuerySpec QueryBuilder::Build() const {
  if (pending_join_) {
    throw Error(ErrorCode::kMalformedQuery,
                "join('" + spec_.joins.back().table + "') has no on() condition");
  }
  QuerySpec out = spec_;
  AssignDefaultAliases(out);
  return out;
}

void AssignDefaultAliases(QuerySpec& spec) {
  std::set<std::string> used;
  for (const auto& s : spec.select) {
    std::string name = OutputName(s);
    if (!name.empty()) used.insert(name);
  }
  int next = 1;
  for (auto& s : spec.select) {
    if (!OutputName(s).empty()) continue;
    std::string alias;
    do {
      alias = fmt::format("f{}", next++);
    } while (used.count(alias));
    used.insert(alias);
    s.alias = alias;
  }
}

}  // namespace heapsql
