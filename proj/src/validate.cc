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

#include "heapsql/validate.h"

#include <cmath>
#include <set>

#include <fmt/format.h>

namespace heapsql {

ErrorCode ValidationResult::code() const {
  for (const auto& d : diagnostics) {
    if (d.code == ErrorCode::kUnsupportedShape) return d.code;
  }
  return diagnostics.empty() ? ErrorCode::kValidation : diagnostics.front().code;
}

std::string ValidationResult::Message() const {
  std::string out;
  for (const auto& d : diagnostics) {
    if (!out.empty()) out += "; ";
    out += d.message;
  }
  return out;
}

void Scope::AddSource(std::string name, TableSchema columns) {
  sources_.push_back(Source{std::move(name), std::move(columns)});
}

std::optional<Scope::Resolved> Scope::Resolve(const ColumnRef& ref, Diagnostic* error) const {
  std::optional<Resolved> found;
  bool table_seen = ref.table.empty();
  for (size_t s = 0; s < sources_.size(); ++s) {
    if (!ref.table.empty() && sources_[s].name != ref.table) continue;
    table_seen = true;
    const TableSchema& cols = sources_[s].columns;
    for (size_t c = 0; c < cols.size(); ++c) {
      if (cols[c].name != ref.name) continue;
      if (found) {
        if (error) {
          *error = {ErrorCode::kValidation,
                    fmt::format("column '{}' is ambiguous", ref.ToString())};
        }
        return std::nullopt;
      }
      found = Resolved{static_cast<int>(s), static_cast<int>(c), cols[c].type};
    }
  }
  if (!found && error) {
    if (!table_seen) {
      *error = {ErrorCode::kUnknownTable,
                fmt::format("column '{}' names a table not in FROM/JOIN", ref.ToString())};
    } else {
      *error = {ErrorCode::kUnknownColumn, fmt::format("unknown column '{}'", ref.ToString())};
    }
  }
  return found;
}

PhysType LiteralType(const Literal& v) {
  switch (v.index()) {
    case 0: return PhysType::kI64;
    case 1: return PhysType::kF64;
    case 2: return PhysType::kD32;
    default: return PhysType::kStr;
  }
}

namespace {

void Add(std::vector<Diagnostic>* diags, std::string message,
         ErrorCode code = ErrorCode::kValidation) {
  diags->push_back(Diagnostic{code, std::move(message)});
}

std::optional<PhysType> ResolveType(const ColumnRef& ref, const Scope& scope,
                                    std::vector<Diagnostic>* diags) {
  Diagnostic err;
  auto r = scope.Resolve(ref, &err);
  if (!r) {
    diags->push_back(err);
    return std::nullopt;
  }
  return r->type;
}

bool LiteralOk(const Literal& v, std::vector<Diagnostic>* diags) {
  if (const double* d = std::get_if<double>(&v); d && !std::isfinite(*d)) {
    Add(diags, "float literals must be finite");
    return false;
  }
  return true;
}

bool Comparable(PhysType col, const Literal& v) {
  switch (LiteralType(v)) {
    case PhysType::kI64:
    case PhysType::kF64: return IsNumeric(col);
    case PhysType::kD32: return col == PhysType::kD32;
    default: return col == PhysType::kStr;
  }
}

// Negative, zero or positive; both literals of compatible kinds.
int CompareLiterals(const Literal& a, const Literal& b) {
  if (LiteralType(a) == PhysType::kD32) {
    return std::get<Date>(a).days - std::get<Date>(b).days;
  }
  if (LiteralType(a) == PhysType::kStr) {
    return std::get<std::string>(a).compare(std::get<std::string>(b));
  }
  auto num = [](const Literal& l) {
    return l.index() == 0 ? static_cast<double>(std::get<int64_t>(l)) : std::get<double>(l);
  };
  const double x = num(a), y = num(b);
  return x < y ? -1 : (x > y ? 1 : 0);
}

bool KeyCompatible(PhysType a, PhysType b) {
  if (IsIntegral(a) && IsIntegral(b)) return true;
  if (IsFloating(a) && IsFloating(b)) return true;
  return a == b;
}

void CheckColumnLiteral(const ColumnRef& column, const Literal& v, const Scope& scope,
                        std::vector<Diagnostic>* diags) {
  auto t = ResolveType(column, scope, diags);
  if (!LiteralOk(v, diags) || !t) return;
  if (!Comparable(*t, v)) {
    Add(diags, fmt::format("cannot compare {} column '{}' with {}", PhysTypeName(*t),
                           column.ToString(), ToString(v)));
  }
}

void CheckOrTerm(const OrTerm& term, const Scope& scope, std::vector<Diagnostic>* diags);

void CheckBetween(const BetweenPred& b, const Scope& scope, std::vector<Diagnostic>* diags) {
  const size_t before = diags->size();
  CheckColumnLiteral(b.column, b.lo, scope, diags);
  CheckColumnLiteral(b.column, b.hi, scope, diags);
  if (diags->size() != before) return;
  if (LiteralType(b.lo) == PhysType::kStr || LiteralType(b.hi) == PhysType::kStr ||
      LiteralType(b.lo) == PhysType::kD32 || LiteralType(b.hi) == PhysType::kD32) {
    if (LiteralType(b.lo) != LiteralType(b.hi)) {
      Add(diags, "BETWEEN bounds must have the same kind");
      return;
    }
  }
  if (CompareLiterals(b.lo, b.hi) > 0) {
    Add(diags, fmt::format("BETWEEN on '{}' has lo {} > hi {}", b.column.ToString(),
                           ToString(b.lo), ToString(b.hi)));
  }
}

void CheckOrTerm(const OrTerm& term, const Scope& scope, std::vector<Diagnostic>* diags) {
  if (const auto* c = std::get_if<CmpPred>(&term)) {
    CheckColumnLiteral(c->column, c->value, scope, diags);
  } else {
    CheckBetween(std::get<BetweenPred>(term), scope, diags);
  }
}

void ValidateInto(const QuerySpec& spec, const Catalog& catalog, ValidationResult* out);

void CheckPredicate(const Predicate& p, const Scope& scope, const Catalog& catalog,
                    std::vector<Diagnostic>* diags) {
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, CmpPred>) {
          CheckColumnLiteral(x.column, x.value, scope, diags);
        } else if constexpr (std::is_same_v<T, BetweenPred>) {
          CheckBetween(x, scope, diags);
        } else if constexpr (std::is_same_v<T, OrPred>) {
          if (x.terms.empty()) Add(diags, "OR group has no terms");
          for (const auto& t : x.terms) CheckOrTerm(t, scope, diags);
        } else if constexpr (std::is_same_v<T, ColumnCmpPred>) {
          auto l = ResolveType(x.left, scope, diags);
          auto r = ResolveType(x.right, scope, diags);
          if (l && r && !(IsNumeric(*l) && IsNumeric(*r)) && *l != *r) {
            Add(diags, fmt::format("cannot compare '{}' ({}) with '{}' ({})", x.left.ToString(),
                                   PhysTypeName(*l), x.right.ToString(), PhysTypeName(*r)));
          }
        } else {
          auto t = ResolveType(x.column, scope, diags);
          if (!x.subquery) {
            Add(diags, "IS IN predicate has no subquery");
            return;
          }
          ValidationResult sub;
          ValidateInto(*x.subquery, catalog, &sub);
          for (auto& d : sub.diagnostics) {
            diags->push_back({d.code, "in IS IN subquery: " + d.message});
          }
          if (!sub.ok()) return;
          if (x.subquery->free) Add(diags, "a subquery cannot carry a FREE clause");
          if (sub.output.size() != 1) {
            Add(diags, fmt::format("IS IN subquery must return one column, not {}",
                                   sub.output.size()));
          } else if (t && !KeyCompatible(*t, sub.output[0].type)) {
            Add(diags, fmt::format("IS IN compares {} column '{}' with {} values",
                                   PhysTypeName(*t), x.column.ToString(),
                                   PhysTypeName(sub.output[0].type)));
          }
        }
      },
      p);
}

std::optional<PhysType> AggType(const ExprNode& e, const Scope& scope,
                                std::vector<Diagnostic>* diags) {
  if (e.agg_fn == AggFn::kCount) {
    if (e.arg) {
      if (ContainsAgg(e.arg)) {
        Add(diags, "aggregates cannot be nested", ErrorCode::kUnsupportedShape);
        return std::nullopt;
      }
      if (!InferExprType(e.arg, scope, diags)) return std::nullopt;
    }
    return PhysType::kI64;
  }
  if (!e.arg) {
    Add(diags, fmt::format("{} needs an argument", AggFnName(e.agg_fn)));
    return std::nullopt;
  }
  if (ContainsAgg(e.arg)) {
    Add(diags, "aggregates cannot be nested", ErrorCode::kUnsupportedShape);
    return std::nullopt;
  }
  auto t = InferExprType(e.arg, scope, diags);
  if (!t) return std::nullopt;
  switch (e.agg_fn) {
    case AggFn::kSum:
    case AggFn::kAvg:
      if (!IsNumeric(*t)) {
        Add(diags, fmt::format("{} needs a numeric argument, got {}", AggFnName(e.agg_fn),
                               PhysTypeName(*t)));
        return std::nullopt;
      }
      if (e.agg_fn == AggFn::kAvg) return PhysType::kF64;
      return IsIntegral(*t) ? PhysType::kI64 : PhysType::kF64;
    case AggFn::kMin:
    case AggFn::kMax:
      if (*t == PhysType::kStr) {
        Add(diags, fmt::format("{} over strings is not supported", AggFnName(e.agg_fn)));
        return std::nullopt;
      }
      return *t;
    case AggFn::kCount: break;
  }
  return PhysType::kI64;
}

}  // namespace

std::optional<PhysType> InferExprType(const Expr& e, const Scope& scope,
                                      std::vector<Diagnostic>* diags) {
  if (!e) {
    Add(diags, "missing expression");
    return std::nullopt;
  }
  switch (e->kind) {
    case ExprKind::kColumn: return ResolveType(e->column, scope, diags);
    case ExprKind::kLiteral:
      if (!LiteralOk(e->literal, diags)) return std::nullopt;
      return LiteralType(e->literal);
    case ExprKind::kArith: {
      auto l = InferExprType(e->left, scope, diags);
      auto r = InferExprType(e->right, scope, diags);
      if (!l || !r) return std::nullopt;
      if (!IsNumeric(*l) || !IsNumeric(*r)) {
        Add(diags, fmt::format("arithmetic needs numeric operands: {}", ToString(e)));
        return std::nullopt;
      }
      if (e->arith_op == ArithOp::kDiv || IsFloating(*l) || IsFloating(*r)) return PhysType::kF64;
      return PhysType::kI64;
    }
    case ExprKind::kAgg: return AggType(*e, scope, diags);
  }
  return std::nullopt;
}

Scope BuildScope(const QuerySpec& spec, const Catalog& catalog, std::vector<Diagnostic>* diags) {
  Scope scope;
  auto add_table = [&](const std::string& name) {
    const TableDescriptor* t = catalog.Find(name);
    if (!t) {
      Add(diags, fmt::format("unknown table '{}'", name), ErrorCode::kUnknownTable);
      scope.AddSource(name, {});
      return;
    }
    TableSchema cols;
    for (const auto& c : t->columns) cols.push_back({c.name, c.type});
    scope.AddSource(name, std::move(cols));
  };
  if (spec.from.size() != 1) {
    Add(diags, fmt::format("exactly one FROM item is supported, got {}", spec.from.size()),
        spec.from.empty() ? ErrorCode::kValidation : ErrorCode::kUnsupportedShape);
  }
  if (!spec.from.empty()) {
    const FromItem& f = spec.from.front();
    if (f.subquery) {
      if (f.alias.empty()) Add(diags, "a FROM subquery needs an alias");
      ValidationResult sub;
      ValidateInto(*f.subquery, catalog, &sub);
      for (auto& d : sub.diagnostics) diags->push_back({d.code, "in FROM subquery: " + d.message});
      if (f.subquery->free) Add(diags, "a subquery cannot carry a FREE clause");
      scope.AddSource(f.alias, sub.output);
    } else {
      add_table(f.table);
    }
  }
  if (spec.joins.size() > 1) {
    Add(diags, fmt::format("only two-way joins are supported, got {} joins", spec.joins.size()),
        ErrorCode::kUnsupportedShape);
  }
  if (spec.joins.size() == 1) {
    if (!spec.from.empty() && spec.joins[0].table == spec.from[0].name()) {
      Add(diags, "self joins are not supported", ErrorCode::kUnsupportedShape);
    }
    add_table(spec.joins[0].table);
  }
  return scope;
}

namespace {

void ValidateInto(const QuerySpec& spec, const Catalog& catalog, ValidationResult* out) {
  std::vector<Diagnostic>* diags = &out->diagnostics;
  Scope scope = BuildScope(spec, catalog, diags);
  if (!diags->empty()) return;

  if (spec.joins.size() == 1) {
    const JoinSpec& j = spec.joins[0];
    Diagnostic err;
    auto l = scope.Resolve(j.left, &err);
    if (!l) diags->push_back(err);
    auto r = scope.Resolve(j.right, &err);
    if (!r) diags->push_back(err);
    if (l && r) {
      if (l->source == r->source) {
        Add(diags, "join condition must reference one column from each side");
      } else if (!KeyCompatible(l->type, r->type) || IsFloating(l->type)) {
        Add(diags, fmt::format("cannot join {} with {}", PhysTypeName(l->type),
                               PhysTypeName(r->type)));
      }
    }
  }

  for (const auto& p : spec.where) CheckPredicate(p, scope, catalog, diags);

  std::vector<Scope::Resolved> group;
  for (const auto& g : spec.group) {
    Diagnostic err;
    auto r = scope.Resolve(g, &err);
    if (!r) {
      diags->push_back(err);
      continue;
    }
    group.push_back(*r);
  }

  if (spec.select.empty()) Add(diags, "SELECT list is empty");
  const bool aggregated = spec.HasAggregate() || !spec.group.empty();
  std::set<std::string> names;
  for (const auto& s : spec.select) {
    auto t = InferExprType(s.expr, scope, diags);
    const std::string name = OutputName(s);
    if (name.empty()) {
      Add(diags, fmt::format("select term {} needs an alias", ToString(s.expr)));
    } else if (!names.insert(name).second) {
      Add(diags, fmt::format("duplicate output column '{}'", name));
    }
    if (!t) continue;
    if (!aggregated) continue;
    if (s.expr->kind == ExprKind::kColumn) {
      auto r = scope.Resolve(s.expr->column, nullptr);
      bool grouped = false;
      for (const auto& g : group) grouped |= g.source == r->source && g.column == r->column;
      if (!grouped) {
        Add(diags, fmt::format("column '{}' must appear in GROUP BY or inside an aggregate",
                               s.expr->column.ToString()));
      }
    } else if (ContainsAgg(s.expr)) {
      // Outside aggregates only literals may appear.
      bool bad = false;
      std::function<void(const Expr&)> walk = [&](const Expr& e) {
        if (!e) return;
        if (e->kind == ExprKind::kColumn) bad = true;
        if (e->kind == ExprKind::kArith) {
          walk(e->left);
          walk(e->right);
        }
      };
      walk(s.expr);
      if (bad) {
        Add(diags, fmt::format("{} mixes aggregates with bare columns", ToString(s.expr)));
      }
    } else {
      Add(diags, fmt::format("{} must be an aggregate or a GROUP BY column", ToString(s.expr)));
    }
    if (diags->empty()) out->output.push_back({name, *t});
  }
  if (!aggregated) {
    for (const auto& s : spec.select) {
      if (!s.expr) continue;
      std::vector<Diagnostic> ignored;
      auto t = InferExprType(s.expr, scope, &ignored);
      if (t) out->output.push_back({OutputName(s), *t});
    }
  }

  for (const auto& o : spec.order) {
    if (!names.count(o.key)) {
      Add(diags, fmt::format("ORDER BY key '{}' is not an output column", o.key));
    }
  }
  if (spec.free) {
    Diagnostic err;
    if (!scope.Resolve(*spec.free, &err)) diags->push_back(err);
  }
  if (!diags->empty()) out->output.clear();
}

}  // namespace

ValidationResult Validate(const QuerySpec& spec, const Catalog& catalog) {
  ValidationResult out;
  ValidateInto(spec, catalog, &out);
  return out;
}

TableSchema InferOutputSchema(const QuerySpec& spec, const Catalog& catalog) {
  ValidationResult r = Validate(spec, catalog);
  if (!r.ok()) throw Error(r.code(), r.Message());
  return std::move(r.output);
}

}  // namespace heapsql
