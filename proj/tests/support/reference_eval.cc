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

#include "support/reference_eval.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <variant>

namespace heapsql::testing {

namespace {

struct V {
  PhysType t = PhysType::kI64;
  int64_t i = 0;
  double f = 0;
  std::string s;
};

bool IsFloat(PhysType t) { return t == PhysType::kF32 || t == PhysType::kF64; }
bool IsStr(PhysType t) { return t == PhysType::kStr; }
double AsDouble(const V& v) { return IsFloat(v.t) ? v.f : static_cast<double>(v.i); }

struct Source {
  std::string name;
  const std::vector<ColumnBuffer>* cols = nullptr;
  size_t rows = 0;
};

V Cell(const ColumnBuffer& c, size_t r) {
  V v;
  v.t = c.type();
  switch (c.type()) {
    case PhysType::kI32: v.i = c.I32(r); break;
    case PhysType::kD32: v.i = c.D32(r).days; break;
    case PhysType::kI64: v.i = c.I64(r); break;
    case PhysType::kF32: v.f = c.F32(r); break;
    case PhysType::kF64: v.f = c.F64(r); break;
    case PhysType::kStr: v.s = std::string(c.Str(r)); break;
  }
  return v;
}

V FromLiteral(const Literal& l) {
  V v;
  if (const auto* i = std::get_if<int64_t>(&l)) {
    v.t = PhysType::kI64;
    v.i = *i;
  } else if (const auto* d = std::get_if<double>(&l)) {
    v.t = PhysType::kF64;
    v.f = *d;
  } else if (const auto* dt = std::get_if<Date>(&l)) {
    v.t = PhysType::kD32;
    v.i = dt->days;
  } else {
    v.t = PhysType::kStr;
    v.s = std::get<std::string>(l);
  }
  return v;
}

int Sign(long double x, long double y) { return (x > y) - (x < y); }

// Column value against a predicate constant, in the column's domain.
int CompareToLiteral(const V& c, const Literal& lit) {
  const V l = FromLiteral(lit);
  if (IsStr(c.t)) return (c.s > l.s) - (c.s < l.s);
  if (c.t == PhysType::kF32) {
    const float x = static_cast<float>(c.f);
    const float y = static_cast<float>(AsDouble(l));
    return (x > y) - (x < y);
  }
  if (c.t == PhysType::kF64) return Sign(c.f, AsDouble(l));
  if (IsFloat(l.t)) return Sign(static_cast<long double>(c.i), static_cast<long double>(l.f));
  return (c.i > l.i) - (c.i < l.i);
}

int CompareValues(const V& a, const V& b) {
  if (IsStr(a.t)) return (a.s > b.s) - (a.s < b.s);
  if (IsFloat(a.t) || IsFloat(b.t)) return Sign(AsDouble(a), AsDouble(b));
  return (a.i > b.i) - (a.i < b.i);
}

bool Holds(CmpOp op, int c) {
  switch (op) {
    case CmpOp::kLt: return c < 0;
    case CmpOp::kLe: return c <= 0;
    case CmpOp::kGt: return c > 0;
    case CmpOp::kGe: return c >= 0;
    case CmpOp::kEq: return c == 0;
    case CmpOp::kNe: return c != 0;
  }
  return false;
}

class Evaluator {
 public:
  explicit Evaluator(const TableData& tables) : tables_(tables) {}

  ResultSet Run(const QuerySpec& q);

 private:
  using Row = std::vector<size_t>;  // one row index per source

  const ColumnBuffer& Resolve(const ColumnRef& ref, size_t* source) const {
    for (size_t s = 0; s < sources_.size(); ++s) {
      if (!ref.table.empty() && ref.table != sources_[s].name) continue;
      for (const auto& c : *sources_[s].cols) {
        if (c.name() == ref.name) {
          *source = s;
          return c;
        }
      }
    }
    throw std::runtime_error("reference: unknown column " + ref.ToString());
  }

  V ColumnValue(const ColumnRef& ref, const Row& row) const {
    size_t s = 0;
    const ColumnBuffer& c = Resolve(ref, &s);
    return Cell(c, row[s]);
  }

  PhysType TypeOf(const Expr& e) const {
    switch (e->kind) {
      case ExprKind::kColumn: {
        size_t s = 0;
        return Resolve(e->column, &s).type();
      }
      case ExprKind::kLiteral: return FromLiteral(e->literal).t;
      case ExprKind::kArith: {
        const PhysType l = TypeOf(e->left), r = TypeOf(e->right);
        return e->arith_op == ArithOp::kDiv || IsFloat(l) || IsFloat(r) ? PhysType::kF64
                                                                         : PhysType::kI64;
      }
      case ExprKind::kAgg:
        switch (e->agg_fn) {
          case AggFn::kCount: return PhysType::kI64;
          case AggFn::kAvg: return PhysType::kF64;
          case AggFn::kSum: return IsFloat(TypeOf(e->arg)) ? PhysType::kF64 : PhysType::kI64;
          case AggFn::kMin:
          case AggFn::kMax: return TypeOf(e->arg);
        }
    }
    return PhysType::kI64;
  }

  V Eval(const Expr& e, const Row& row, const std::map<const ExprNode*, V>* aggs) const {
    switch (e->kind) {
      case ExprKind::kColumn: return ColumnValue(e->column, row);
      case ExprKind::kLiteral: return FromLiteral(e->literal);
      case ExprKind::kAgg: return aggs->at(e.get());
      case ExprKind::kArith: {
        const V a = Eval(e->left, row, aggs), b = Eval(e->right, row, aggs);
        V out;
        if (e->arith_op == ArithOp::kDiv || IsFloat(a.t) || IsFloat(b.t)) {
          out.t = PhysType::kF64;
          const double x = AsDouble(a), y = AsDouble(b);
          switch (e->arith_op) {
            case ArithOp::kAdd: out.f = x + y; break;
            case ArithOp::kSub: out.f = x - y; break;
            case ArithOp::kMul: out.f = x * y; break;
            case ArithOp::kDiv: out.f = x / y; break;
          }
        } else {
          out.t = PhysType::kI64;
          const auto x = static_cast<uint64_t>(a.i), y = static_cast<uint64_t>(b.i);
          switch (e->arith_op) {
            case ArithOp::kAdd: out.i = static_cast<int64_t>(x + y); break;
            case ArithOp::kSub: out.i = static_cast<int64_t>(x - y); break;
            case ArithOp::kMul: out.i = static_cast<int64_t>(x * y); break;
            case ArithOp::kDiv: break;
          }
        }
        return out;
      }
    }
    return V{};
  }

  bool TermHolds(const OrTerm& t, const Row& row) const {
    if (const auto* c = std::get_if<CmpPred>(&t)) {
      return Holds(c->op, CompareToLiteral(ColumnValue(c->column, row), c->value));
    }
    const auto& b = std::get<BetweenPred>(t);
    const V v = ColumnValue(b.column, row);
    return CompareToLiteral(v, b.lo) >= 0 && CompareToLiteral(v, b.hi) <= 0;
  }

  bool PredHolds(const Predicate& p, const Row& row) const {
    if (const auto* c = std::get_if<CmpPred>(&p)) return TermHolds(*c, row);
    if (const auto* b = std::get_if<BetweenPred>(&p)) return TermHolds(*b, row);
    if (const auto* o = std::get_if<OrPred>(&p)) {
      for (const auto& t : o->terms) {
        if (TermHolds(t, row)) return true;
      }
      return false;
    }
    if (const auto* cc = std::get_if<ColumnCmpPred>(&p)) {
      return Holds(cc->op, CompareValues(ColumnValue(cc->left, row), ColumnValue(cc->right, row)));
    }
    const auto& in = std::get<IsInPred>(p);
    const V v = ColumnValue(in.column, row);
    const std::vector<V>& set = in_sets_.at(&in);
    for (const auto& x : set) {
      if (CompareValues(v, x) == 0) return true;
    }
    return false;
  }

  const TableData& tables_;
  std::vector<Source> sources_;
  std::vector<ResultSet> derived_;
  std::map<const IsInPred*, std::vector<V>> in_sets_;
};

using KeyPart = std::variant<int64_t, double, std::string>;

KeyPart ToKey(const V& v) {
  if (IsStr(v.t)) return v.s;
  if (IsFloat(v.t)) return v.f == 0 ? 0.0 : v.f;
  return v.i;
}

void Append(ColumnBuffer& out, const V& v) {
  switch (out.type()) {
    case PhysType::kI32: out.AppendI32(static_cast<int32_t>(IsFloat(v.t) ? v.f : v.i)); break;
    case PhysType::kD32: out.AppendDate(Date{static_cast<int32_t>(v.i)}); break;
    case PhysType::kI64:
      out.AppendI64(IsFloat(v.t) ? static_cast<int64_t>(v.f) : v.i);
      break;
    case PhysType::kF32: out.AppendF32(static_cast<float>(AsDouble(v))); break;
    case PhysType::kF64: out.AppendF64(AsDouble(v)); break;
    case PhysType::kStr: out.AppendString(v.s); break;
  }
}

int CompareForSort(const ColumnBuffer& c, size_t a, size_t b) {
  const V x = Cell(c, a), y = Cell(c, b);
  if (IsFloat(c.type())) {
    const bool nx = std::isnan(x.f), ny = std::isnan(y.f);
    if (nx || ny) return nx == ny ? 0 : (nx ? 1 : -1);
  }
  return CompareValues(x, y);
}

ResultSet Evaluator::Run(const QuerySpec& q) {
  // Sources.
  for (const auto& f : q.from) {
    if (f.subquery) {
      derived_.push_back(Evaluator(tables_).Run(*f.subquery));
      sources_.push_back({f.alias, &derived_.back().columns, derived_.back().row_count()});
    } else {
      const auto& cols = tables_.at(f.table);
      sources_.push_back({f.table, &cols, cols.empty() ? 0 : cols.front().size()});
    }
  }
  for (const auto& j : q.joins) {
    const auto& cols = tables_.at(j.table);
    sources_.push_back({j.table, &cols, cols.empty() ? 0 : cols.front().size()});
  }
  for (const auto& p : q.where) {
    if (const auto* in = std::get_if<IsInPred>(&p)) {
      const ResultSet sub = Evaluator(tables_).Run(*in->subquery);
      std::vector<V> values;
      for (size_t r = 0; r < sub.row_count(); ++r) values.push_back(Cell(sub.columns[0], r));
      in_sets_[in] = std::move(values);
    }
  }

  // Qualifying rows, in nested-loop order.
  std::vector<Row> rows;
  auto keep = [&](const Row& row) {
    for (const auto& p : q.where) {
      if (!PredHolds(p, row)) return;
    }
    rows.push_back(row);
  };
  if (q.joins.empty()) {
    for (size_t r = 0; r < sources_[0].rows; ++r) keep(Row{r});
  } else {
    const auto& j = q.joins[0];
    for (size_t a = 0; a < sources_[0].rows; ++a) {
      for (size_t b = 0; b < sources_[1].rows; ++b) {
        const Row row{a, b};
        if (CompareValues(ColumnValue(j.left, row), ColumnValue(j.right, row)) == 0) keep(row);
      }
    }
  }

  ResultSet out;
  for (const auto& s : q.select) out.columns.emplace_back(OutputName(s), TypeOf(s.expr));

  const bool aggregated = q.HasAggregate() || !q.group.empty();
  if (!aggregated) {
    for (const auto& row : rows) {
      for (size_t i = 0; i < q.select.size(); ++i) {
        Append(out.columns[i], Eval(q.select[i].expr, row, nullptr));
      }
    }
  } else {
    std::vector<Expr> aggs;
    for (const auto& s : q.select) ForEachAgg(s.expr, [&](const Expr& a) { aggs.push_back(a); });

    std::map<std::vector<KeyPart>, std::vector<size_t>> groups;
    std::vector<std::vector<KeyPart>> first_seen;
    for (size_t r = 0; r < rows.size(); ++r) {
      std::vector<KeyPart> key;
      for (const auto& g : q.group) key.push_back(ToKey(ColumnValue(g, rows[r])));
      auto [it, inserted] = groups.try_emplace(key);
      if (inserted) first_seen.push_back(key);
      it->second.push_back(r);
    }
    if (q.group.empty() && groups.empty()) {
      groups[{}] = {};
      first_seen.push_back({});
    }
    for (const auto& key : first_seen) {
      const std::vector<size_t>& members = groups.at(key);
      std::map<const ExprNode*, V> values;
      for (const auto& a : aggs) {
        V v;
        v.t = TypeOf(a);
        const PhysType arg_t = a->arg ? TypeOf(a->arg) : PhysType::kI64;
        const auto n = static_cast<int64_t>(members.size());
        switch (a->agg_fn) {
          case AggFn::kCount: v.i = n; break;
          case AggFn::kSum:
          case AggFn::kAvg: {
            uint64_t isum = 0;
            double fsum = 0;
            for (size_t m : members) {
              const V x = Eval(a->arg, rows[m], nullptr);
              if (IsFloat(arg_t)) {
                fsum += x.f;
              } else {
                isum += static_cast<uint64_t>(x.i);
              }
            }
            const double total = IsFloat(arg_t) ? fsum : static_cast<double>(static_cast<int64_t>(isum));
            if (a->agg_fn == AggFn::kAvg) {
              v.f = total / static_cast<double>(n);
            } else if (IsFloat(arg_t)) {
              v.f = fsum;
            } else {
              v.i = static_cast<int64_t>(isum);
            }
            break;
          }
          case AggFn::kMin:
          case AggFn::kMax: {
            if (members.empty()) {
              if (IsFloat(arg_t)) {
                v.f = std::numeric_limits<double>::quiet_NaN();
              } else {
                v.i = arg_t == PhysType::kI64 ? std::numeric_limits<int64_t>::min()
                                              : std::numeric_limits<int32_t>::min();
              }
              break;
            }
            bool first = true;
            for (size_t m : members) {
              const V x = Eval(a->arg, rows[m], nullptr);
              const bool better = a->agg_fn == AggFn::kMin ? CompareValues(x, v) < 0
                                                           : CompareValues(x, v) > 0;
              if (first || better) {
                v.i = x.i;
                v.f = x.f;
              }
              first = false;
            }
            break;
          }
        }
        values[a.get()] = v;
      }
      const Row rep = members.empty() ? Row(sources_.size(), 0) : rows[members.front()];
      for (size_t i = 0; i < q.select.size(); ++i) {
        Append(out.columns[i], Eval(q.select[i].expr, rep, &values));
      }
    }
  }

  if (!q.order.empty() || q.limit) {
    std::vector<size_t> perm(out.row_count());
    std::iota(perm.begin(), perm.end(), size_t{0});
    std::vector<std::pair<const ColumnBuffer*, bool>> keys;
    for (const auto& o : q.order) keys.emplace_back(out.Find(o.key), o.descending);
    std::stable_sort(perm.begin(), perm.end(), [&](size_t a, size_t b) {
      for (const auto& [c, desc] : keys) {
        const int k = CompareForSort(*c, a, b);
        if (k != 0) return desc ? k > 0 : k < 0;
      }
      return false;
    });
    if (q.limit && *q.limit < perm.size()) perm.resize(*q.limit);
    ResultSet sorted;
    for (const auto& c : out.columns) {
      ColumnBuffer col(c.name(), c.type());
      for (size_t r : perm) col.AppendFrom(c, r);
      sorted.columns.push_back(std::move(col));
    }
    out = std::move(sorted);
  }
  return out;
}

}  // namespace

ResultSet ReferenceEvaluate(const QuerySpec& q, const TableData& tables) {
  return Evaluator(tables).Run(q);
}

}  // namespace heapsql::testing
