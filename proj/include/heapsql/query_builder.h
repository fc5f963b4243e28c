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

#pragma once

#include <cstdint>
#include <initializer_list>
#include <string>
#include <string_view>

#include "heapsql/query.h"

namespace heapsql {

// Fluent construction of QuerySpec values:
//
//   QuerySpec q6 = Select()
//       .From("lineitem")
//       .Field(As(Sum(Mul("l_extendedprice", "l_discount")), "revenue"))
//       .Where(Between("l_discount", 0.05, 0.07))
//       .Where(Lt("l_quantity", 24))
//       .Free("l_shipdate")
//       .Build();

// Anything usable as an expression operand: a column name ("x" or "t.x"),
// a number, a date, or an Expr.
struct ExprArg {
  ExprArg(Expr e) : expr(std::move(e)) {}
  ExprArg(const char* column) : expr(MakeColumn(ColumnRef::Parse(column))) {}
  ExprArg(const std::string& column) : expr(MakeColumn(ColumnRef::Parse(column))) {}
  ExprArg(int v) : expr(MakeLiteral(int64_t{v})) {}
  ExprArg(int64_t v) : expr(MakeLiteral(v)) {}
  ExprArg(double v) : expr(MakeLiteral(v)) {}
  ExprArg(Date v) : expr(MakeLiteral(v)) {}

  Expr expr;
};

// A literal operand of a predicate. Character strings are string literals.
struct LitArg {
  LitArg(int v) : value(int64_t{v}) {}
  LitArg(int64_t v) : value(v) {}
  LitArg(double v) : value(v) {}
  LitArg(Date v) : value(v) {}
  LitArg(const char* v) : value(std::string(v)) {}
  LitArg(std::string v) : value(std::move(v)) {}
  LitArg(Literal v) : value(std::move(v)) {}

  Literal value;
};

// A column operand of a predicate.
struct ColArg {
  ColArg(const char* c) : ref(ColumnRef::Parse(c)) {}
  ColArg(const std::string& c) : ref(ColumnRef::Parse(c)) {}
  ColArg(ColumnRef c) : ref(std::move(c)) {}

  ColumnRef ref;
};

Expr Col(std::string_view column);
Expr Lit(Literal value);
/// Date literal from "YYYY-MM-DD"; throws Error(kConversion).
Date DateLit(std::string_view text);

Expr Add(ExprArg a, ExprArg b);
Expr Sub(ExprArg a, ExprArg b);
Expr Mul(ExprArg a, ExprArg b);
Expr Div(ExprArg a, ExprArg b);
Expr Sum(ExprArg a);
Expr Count(ExprArg a);
Expr Count();
Expr Avg(ExprArg a);
Expr Min(ExprArg a);
Expr Max(ExprArg a);
SelectItem As(ExprArg e, std::string alias);

Predicate Lt(ColArg c, LitArg v);
Predicate Le(ColArg c, LitArg v);
Predicate Gt(ColArg c, LitArg v);
Predicate Ge(ColArg c, LitArg v);
Predicate Eq(ColArg c, LitArg v);
Predicate Ne(ColArg c, LitArg v);
Predicate Between(ColArg c, LitArg lo, LitArg hi);
Predicate IsIn(ColArg c, QuerySpec subquery);
/// Each term must be a comparison or BETWEEN; throws Error(kMalformedQuery).
Predicate Or(std::initializer_list<Predicate> terms);
Predicate ColCmp(CmpOp op, ColArg left, ColArg right);

class QueryBuilder {
 public:
  QueryBuilder& From(std::string table);
  QueryBuilder& From(QuerySpec subquery, std::string alias);
  QueryBuilder& Join(std::string table);
  /// Throws Error(kMalformedQuery) unless it directly follows Join().
  QueryBuilder& On(ColArg left, ColArg right);
  QueryBuilder& Field(ExprArg e);
  QueryBuilder& Field(SelectItem item);
  QueryBuilder& Where(Predicate p);
  QueryBuilder& GroupBy(ColArg c);
  QueryBuilder& OrderBy(std::string key, bool descending = false);
  QueryBuilder& Limit(uint64_t n);
  /// Throws Error(kMalformedQuery) on a second call.
  QueryBuilder& Free(ColArg c);

  /// Assigns f1, f2, ... to unaliased computed select terms.
  /// Throws Error(kMalformedQuery) for a Join() without On().
  QuerySpec Build() const;

 private:
  QuerySpec spec_;
  bool pending_join_ = false;
};

QueryBuilder Select();

/// Gives unaliased computed select terms the aliases f1, f2, ... skipping
/// names already in use.
void AssignDefaultAliases(QuerySpec& spec);

}  // namespace heapsql
