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
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "heapsql/date.h"

namespace heapsql {

// Logical query representation. All nodes are immutable once built and are
// shared by pointer, so copying a QuerySpec is cheap.

struct ColumnRef {
  std::string table;  // empty when unqualified
  std::string name;

  /// Parses "name" or "table.name".
  static ColumnRef Parse(std::string_view text);
  std::string ToString() const;
  bool operator==(const ColumnRef&) const = default;
};

using Literal = std::variant<int64_t, double, Date, std::string>;

enum class ExprKind : uint8_t { kColumn, kLiteral, kArith, kAgg };
enum class ArithOp : uint8_t { kAdd, kSub, kMul, kDiv };
enum class AggFn : uint8_t { kSum, kCount, kAvg, kMin, kMax };

struct ExprNode;
using Expr = std::shared_ptr<const ExprNode>;

struct ExprNode {
  ExprKind kind = ExprKind::kLiteral;
  ColumnRef column;
  Literal literal;
  ArithOp arith_op = ArithOp::kAdd;
  AggFn agg_fn = AggFn::kSum;
  Expr left;   // arith
  Expr right;  // arith
  Expr arg;    // agg; null for COUNT(*)
};

Expr MakeColumn(ColumnRef column);
Expr MakeLiteral(Literal value);
Expr MakeArith(ArithOp op, Expr left, Expr right);
Expr MakeAgg(AggFn fn, Expr arg);

std::string_view ArithOpName(ArithOp op);  // "add", ...
std::string_view AggFnName(AggFn fn);      // "SUM", ...
std::optional<ArithOp> ArithOpFromName(std::string_view name);
std::optional<AggFn> AggFnFromName(std::string_view name);

bool ContainsAgg(const Expr& e);
/// Calls `fn` on every column reference in `e` (including inside aggregates).
void ForEachColumn(const Expr& e, const std::function<void(const ColumnRef&)>& fn);
/// Calls `fn` on every aggregate node in `e`, outermost first.
void ForEachAgg(const Expr& e, const std::function<void(const Expr&)>& fn);

enum class CmpOp : uint8_t { kLt, kLe, kGt, kGe, kEq, kNe };
std::string_view CmpOpName(CmpOp op);  // "lt", ...
std::optional<CmpOp> CmpOpFromName(std::string_view name);

struct CmpPred {
  CmpOp op = CmpOp::kEq;
  ColumnRef column;
  Literal value;
};

struct BetweenPred {
  ColumnRef column;
  Literal lo;
  Literal hi;
};

struct QuerySpec;

struct IsInPred {
  ColumnRef column;
  std::shared_ptr<const QuerySpec> subquery;
};

using OrTerm = std::variant<CmpPred, BetweenPred>;

struct OrPred {
  std::vector<OrTerm> terms;
};

// Comparison between two columns of the same row (e.g. a < b).
struct ColumnCmpPred {
  CmpOp op = CmpOp::kEq;
  ColumnRef left;
  ColumnRef right;
};

using Predicate = std::variant<CmpPred, BetweenPred, IsInPred, OrPred, ColumnCmpPred>;

/// Columns of the enclosing query a predicate references (an IS-IN
/// subquery's own columns are not included).
std::vector<ColumnRef> PredicateColumns(const Predicate& p);

struct SelectItem {
  Expr expr;
  std::string alias;  // empty: the column name for bare columns
};

struct FromItem {
  std::string table;                          // base table, or
  std::shared_ptr<const QuerySpec> subquery;  // derived table named `alias`
  std::string alias;

  /// The name the rest of the query sees.
  const std::string& name() const { return subquery ? alias : table; }
};

struct JoinSpec {
  std::string table;
  ColumnRef left;
  ColumnRef right;
};

struct OrderItem {
  std::string key;  // output column name (alias or column name)
  bool descending = false;
};

struct QuerySpec {
  std::vector<SelectItem> select;
  std::vector<FromItem> from;
  std::vector<JoinSpec> joins;
  std::vector<Predicate> where;
  std::vector<ColumnRef> group;
  std::vector<OrderItem> order;
  std::optional<uint64_t> limit;
  std::optional<ColumnRef> free;

  bool HasAggregate() const;
};

/// Output name of a select term: alias, else the bare column's name.
std::string OutputName(const SelectItem& item);

/// One-line rendering used for diagnostics, ordering and fingerprints.
std::string ToString(const Literal& v);
std::string ToString(const Expr& e);
std::string ToString(const Predicate& p);
std::string ToString(const OrTerm& t);
std::string ToString(const QuerySpec& q);

/// SQL-flavoured multi-line rendering for humans.
std::string ToSql(const QuerySpec& q);

}  // namespace heapsql
