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

#include "heapsql/query.h"

#include <fmt/format.h>

namespace heapsql {

ColumnRef ColumnRef::Parse(std::string_view text) {
  const size_t dot = text.find('.');
  if (dot == std::string_view::npos) return ColumnRef{"", std::string(text)};
  return ColumnRef{std::string(text.substr(0, dot)), std::string(text.substr(dot + 1))};
}

std::string ColumnRef::ToString() const {
  return table.empty() ? name : table + "." + name;
}

Expr MakeColumn(ColumnRef column) {
  auto n = std::make_shared<ExprNode>();
  n->kind = ExprKind::kColumn;
  n->column = std::move(column);
  return n;
}

Expr MakeLiteral(Literal value) {
  auto n = std::make_shared<ExprNode>();
  n->kind = ExprKind::kLiteral;
  n->literal = std::move(value);
  return n;
}

Expr MakeArith(ArithOp op, Expr left, Expr right) {
  auto n = std::make_shared<ExprNode>();
  n->kind = ExprKind::kArith;
  n->arith_op = op;
  n->left = std::move(left);
  n->right = std::move(right);
  return n;
}

Expr MakeAgg(AggFn fn, Expr arg) {
  auto n = std::make_shared<ExprNode>();
  n->kind = ExprKind::kAgg;
  n->agg_fn = fn;
  n->arg = std::move(arg);
  return n;
}

std::string_view ArithOpName(ArithOp op) {
  switch (op) {
    case ArithOp::kAdd: return "add";
    case ArithOp::kSub: return "sub";
    case ArithOp::kMul: return "mul";
    case ArithOp::kDiv: return "div";
  }
  return "?";
}

std::string_view AggFnName(AggFn fn) {
  switch (fn) {
    case AggFn::kSum: return "SUM";
    case AggFn::kCount: return "COUNT";
    case AggFn::kAvg: return "AVG";
    case AggFn::kMin: return "MIN";
    case AggFn::kMax: return "MAX";
  }
  return "?";
}

std::string_view CmpOpName(CmpOp op) {
  switch (op) {
    case CmpOp::kLt: return "lt";
    case CmpOp::kLe: return "le";
    case CmpOp::kGt: return "gt";
    case CmpOp::kGe: return "ge";
    case CmpOp::kEq: return "eq";
    case CmpOp::kNe: return "ne";
  }
  return "?";
}

std::optional<ArithOp> ArithOpFromName(std::string_view name) {
  for (auto op : {ArithOp::kAdd, ArithOp::kSub, ArithOp::kMul, ArithOp::kDiv}) {
    if (ArithOpName(op) == name) return op;
  }
  return std::nullopt;
}

std::optional<AggFn> AggFnFromName(std::string_view name) {
  for (auto fn : {AggFn::kSum, AggFn::kCount, AggFn::kAvg, AggFn::kMin, AggFn::kMax}) {
    if (AggFnName(fn) == name) return fn;
  }
  return std::nullopt;
}

std::optional<CmpOp> CmpOpFromName(std::string_view name) {
  for (auto op : {CmpOp::kLt, CmpOp::kLe, CmpOp::kGt, CmpOp::kGe, CmpOp::kEq, CmpOp::kNe}) {
    if (CmpOpName(op) == name) return op;
  }
  return std::nullopt;
}

bool ContainsAgg(const Expr& e) {
  if (!e) return false;
  switch (e->kind) {
    case ExprKind::kAgg: return true;
    case ExprKind::kArith: return ContainsAgg(e->left) || ContainsAgg(e->right);
    default: return false;
  }
}

void ForEachColumn(const Expr& e, const std::function<void(const ColumnRef&)>& fn) {
  if (!e) return;
  switch (e->kind) {
    case ExprKind::kColumn: fn(e->column); break;
    case ExprKind::kLiteral: break;
    case ExprKind::kArith:
      ForEachColumn(e->left, fn);
      ForEachColumn(e->right, fn);
      break;
    case ExprKind::kAgg: ForEachColumn(e->arg, fn); break;
  }
}

void ForEachAgg(const Expr& e, const std::function<void(const Expr&)>& fn) {
  if (!e) return;
  if (e->kind == ExprKind::kAgg) {
    fn(e);
    ForEachAgg(e->arg, fn);
  } else if (e->kind == ExprKind::kArith) {
    ForEachAgg(e->left, fn);
    ForEachAgg(e->right, fn);
  }
}

std::vector<ColumnRef> PredicateColumns(const Predicate& p) {
  std::vector<ColumnRef> out;
  auto term_columns = [&](const OrTerm& t) {
    std::visit([&](const auto& x) { out.push_back(x.column); }, t);
  };
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, OrPred>) {
          for (const auto& t : x.terms) term_columns(t);
        } else if constexpr (std::is_same_v<T, ColumnCmpPred>) {
          out.push_back(x.left);
          out.push_back(x.right);
        } else {
          out.push_back(x.column);
        }
      },
      p);
  return out;
}

bool QuerySpec::HasAggregate() const {
  for (const auto& s : select) {
    if (ContainsAgg(s.expr)) return true;
  }
  return false;
}

std::string OutputName(const SelectItem& item) {
  if (!item.alias.empty()) return item.alias;
  if (item.expr && item.expr->kind == ExprKind::kColumn) return item.expr->column.name;
  return {};
}

std::string ToString(const Literal& v) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, int64_t>) {
          return std::to_string(x);
        } else if constexpr (std::is_same_v<T, double>) {
          std::string s = fmt::format("{}", x);
          if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
          return s;
        } else if constexpr (std::is_same_v<T, Date>) {
          return "DATE '" + FormatDate(x) + "'";
        } else {
          std::string s = "'";
          for (char c : x) {
            if (c == '\'') s += '\'';
            s += c;
          }
          return s + "'";
        }
      },
      v);
}

namespace {

std::string_view ArithSymbol(ArithOp op) {
  switch (op) {
    case ArithOp::kAdd: return "+";
    case ArithOp::kSub: return "-";
    case ArithOp::kMul: return "*";
    case ArithOp::kDiv: return "/";
  }
  return "?";
}

std::string_view CmpSymbol(CmpOp op) {
  switch (op) {
    case CmpOp::kLt: return "<";
    case CmpOp::kLe: return "<=";
    case CmpOp::kGt: return ">";
    case CmpOp::kGe: return ">=";
    case CmpOp::kEq: return "=";
    case CmpOp::kNe: return "<>";
  }
  return "?";
}

std::string RenderSelect(const QuerySpec& q) {
  std::string out;
  for (size_t i = 0; i < q.select.size(); ++i) {
    if (i) out += ", ";
    out += ToString(q.select[i].expr);
    if (!q.select[i].alias.empty()) out += " AS " + q.select[i].alias;
  }
  return out;
}

std::string RenderFrom(const FromItem& f) {
  if (f.subquery) return "(" + ToString(*f.subquery) + ") AS " + f.alias;
  return f.table;
}

}  // namespace

std::string ToString(const Expr& e) {
  if (!e) return "*";
  switch (e->kind) {
    case ExprKind::kColumn: return e->column.ToString();
    case ExprKind::kLiteral: return ToString(e->literal);
    case ExprKind::kArith:
      return fmt::format("({} {} {})", ToString(e->left), ArithSymbol(e->arith_op),
                         ToString(e->right));
    case ExprKind::kAgg:
      return fmt::format("{}({})", AggFnName(e->agg_fn), ToString(e->arg));
  }
  return {};
}

std::string ToString(const OrTerm& t) {
  return std::visit([](const auto& x) { return ToString(Predicate(x)); }, t);
}

std::string ToString(const Predicate& p) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, CmpPred>) {
          return fmt::format("{} {} {}", x.column.ToString(), CmpSymbol(x.op), ToString(x.value));
        } else if constexpr (std::is_same_v<T, BetweenPred>) {
          return fmt::format("{} BETWEEN {} AND {}", x.column.ToString(), ToString(x.lo),
                             ToString(x.hi));
        } else if constexpr (std::is_same_v<T, IsInPred>) {
          return fmt::format("{} IN ({})", x.column.ToString(),
                             x.subquery ? ToString(*x.subquery) : std::string("?"));
        } else if constexpr (std::is_same_v<T, OrPred>) {
          std::string s = "(";
          for (size_t i = 0; i < x.terms.size(); ++i) {
            if (i) s += " OR ";
            s += ToString(x.terms[i]);
          }
          return s + ")";
        } else {
          return fmt::format("{} {} {}", x.left.ToString(), CmpSymbol(x.op), x.right.ToString());
        }
      },
      p);
}

std::string ToString(const QuerySpec& q) {
  std::string out = "SELECT " + RenderSelect(q);
  if (!q.from.empty()) {
    out += " FROM ";
    for (size_t i = 0; i < q.from.size(); ++i) {
      if (i) out += ", ";
      out += RenderFrom(q.from[i]);
    }
  }
  for (const auto& j : q.joins) {
    out += fmt::format(" JOIN {} ON {} = {}", j.table, j.left.ToString(), j.right.ToString());
  }
  for (size_t i = 0; i < q.where.size(); ++i) {
    out += i ? " AND " : " WHERE ";
    out += ToString(q.where[i]);
  }
  for (size_t i = 0; i < q.group.size(); ++i) {
    out += i ? ", " : " GROUP BY ";
    out += q.group[i].ToString();
  }
  for (size_t i = 0; i < q.order.size(); ++i) {
    out += i ? ", " : " ORDER BY ";
    out += q.order[i].key + (q.order[i].descending ? " DESC" : " ASC");
  }
  if (q.limit) out += fmt::format(" LIMIT {}", *q.limit);
  if (q.free) out += " FREE " + q.free->ToString();
  return out;
}

std::string ToSql(const QuerySpec& q) {
  std::string out = "SELECT " + RenderSelect(q) + "\n";
  if (!q.from.empty()) {
    out += "FROM   ";
    for (size_t i = 0; i < q.from.size(); ++i) {
      if (i) out += ", ";
      out += RenderFrom(q.from[i]);
    }
    out += "\n";
  }
  for (const auto& j : q.joins) {
    out += fmt::format("JOIN   {} ON {} = {}\n", j.table, j.left.ToString(), j.right.ToString());
  }
  for (size_t i = 0; i < q.where.size(); ++i) {
    out += (i ? "  AND  " : "WHERE  ") + ToString(q.where[i]) + "\n";
  }
  if (!q.group.empty()) {
    out += "GROUP BY ";
    for (size_t i = 0; i < q.group.size(); ++i) {
      if (i) out += ", ";
      out += q.group[i].ToString();
    }
    out += "\n";
  }
  if (!q.order.empty()) {
    out += "ORDER BY ";
    for (size_t i = 0; i < q.order.size(); ++i) {
      if (i) out += ", ";
      out += q.order[i].key + (q.order[i].descending ? " DESC" : "");
    }
    out += "\n";
  }
  if (q.limit) out += fmt::format("LIMIT  {}\n", *q.limit);
  if (q.free) out += "FREE   " + q.free->ToString() + "\n";
  return out;
}

}  // namespace heapsql
