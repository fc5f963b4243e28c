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

#include <algorithm>
#include <cmath>
#include <map>

#include <fmt/format.h>

#include "heapsql/engine.h"
#include "heapsql/query_text.h"
#include "heapsql/status.h"
#include "heapsql/validate.h"

namespace heapsql {

std::string_view TemplateName(TemplateId id) {
  switch (id) {
    case TemplateId::kFilterAgg: return "FilterAgg";
    case TemplateId::kFilterProject: return "FilterProject";
    case TemplateId::kHashJoinAgg: return "HashJoinAgg";
    case TemplateId::kGroupBy: return "GroupBy";
    case TemplateId::kSubqueryMaterialize: return "SubqueryMaterialize";
    case TemplateId::kIsInSemiJoin: return "IsInSemiJoin";
  }
  return "?";
}

namespace {

constexpr int64_t kI64Min = std::numeric_limits<int64_t>::min();
constexpr int64_t kI64Max = std::numeric_limits<int64_t>::max();

ColumnSlot Slot(const Scope& scope, const ColumnRef& ref) {
  Diagnostic err;
  auto r = scope.Resolve(ref, &err);
  if (!r) throw Error(err.code, err.message);
  return ColumnSlot{r->source, r->column, r->type, ref.name};
}

bool IsIntDomain(PhysType t) { return IsIntegral(t) || t == PhysType::kD32; }

void Lower(RangeBinding& r, int64_t v, bool incl) {
  if (!incl) {
    if (v == kI64Max) {
      r.empty = true;
      return;
    }
    ++v;
  }
  r.ilo = std::max(r.ilo, v);
}

void Upper(RangeBinding& r, int64_t v, bool incl) {
  if (!incl) {
    if (v == kI64Min) {
      r.empty = true;
      return;
    }
    --v;
  }
  r.ihi = std::min(r.ihi, v);
}

// Integral column against a fractional literal: round the bound inward.
void LowerFrac(RangeBinding& r, double d, bool incl) {
  if (d >= 9.2e18) {
    r.empty = true;
    return;
  }
  if (d <= -9.2e18) return;
  if (std::floor(d) == d) {
    Lower(r, static_cast<int64_t>(d), incl);
  } else {
    Lower(r, static_cast<int64_t>(std::ceil(d)), true);
  }
}

void UpperFrac(RangeBinding& r, double d, bool incl) {
  if (d <= -9.2e18) {
    r.empty = true;
    return;
  }
  if (d >= 9.2e18) return;
  if (std::floor(d) == d) {
    Upper(r, static_cast<int64_t>(d), incl);
  } else {
    Upper(r, static_cast<int64_t>(std::floor(d)), true);
  }
}

double FloatBound(PhysType t, const Literal& v) {
  const double d = v.index() == 0 ? static_cast<double>(std::get<int64_t>(v)) : std::get<double>(v);
  return t == PhysType::kF32 ? static_cast<double>(static_cast<float>(d)) : d;
}

double StepUp(PhysType t, double v) {
  if (t == PhysType::kF32) {
    return std::nextafter(static_cast<float>(v), std::numeric_limits<float>::infinity());
  }
  return std::nextafter(v, std::numeric_limits<double>::infinity());
}

double StepDown(PhysType t, double v) {
  if (t == PhysType::kF32) {
    return std::nextafter(static_cast<float>(v), -std::numeric_limits<float>::infinity());
  }
  return std::nextafter(v, -std::numeric_limits<double>::infinity());
}

void ApplyBound(RangeBinding& r, bool lower, const Literal& v, bool incl) {
  const PhysType t = r.column.type;
  if (t == PhysType::kD32) {
    const int64_t d = std::get<Date>(v).days;
    lower ? Lower(r, d, incl) : Upper(r, d, incl);
  } else if (IsIntegral(t)) {
    if (v.index() == 0) {
      lower ? Lower(r, std::get<int64_t>(v), incl) : Upper(r, std::get<int64_t>(v), incl);
    } else {
      lower ? LowerFrac(r, std::get<double>(v), incl) : UpperFrac(r, std::get<double>(v), incl);
    }
  } else if (IsFloating(t)) {
    double b = FloatBound(t, v);
    if (lower) {
      if (!incl) b = StepUp(t, b);
      r.flo = std::max(r.flo, b);
    } else {
      if (!incl) b = StepDown(t, b);
      r.fhi = std::min(r.fhi, b);
    }
  } else {
    const std::string& s = std::get<std::string>(v);
    std::optional<std::string>& cur = lower ? r.slo : r.shi;
    bool& cur_incl = lower ? r.slo_incl : r.shi_incl;
    if (!cur) {
      cur = s;
      cur_incl = incl;
    } else {
      const int c = s.compare(*cur);
      if ((lower && c > 0) || (!lower && c < 0)) {
        cur = s;
        cur_incl = incl;
      } else if (c == 0) {
        cur_incl = cur_incl && incl;
      }
    }
  }
}

void ApplyNotEqual(RangeBinding& r, const Literal& v) {
  const PhysType t = r.column.type;
  if (t == PhysType::kD32) {
    r.ine.push_back(std::get<Date>(v).days);
  } else if (IsIntegral(t)) {
    if (v.index() == 0) {
      r.ine.push_back(std::get<int64_t>(v));
    } else {
      const double d = std::get<double>(v);
      if (std::floor(d) == d && std::abs(d) < 9.2e18) r.ine.push_back(static_cast<int64_t>(d));
    }
  } else if (IsFloating(t)) {
    r.fne.push_back(FloatBound(t, v));
  } else {
    r.sne.push_back(std::get<std::string>(v));
  }
}

void ApplyCmp(RangeBinding& r, CmpOp op, const Literal& v) {
  switch (op) {
    case CmpOp::kLt: ApplyBound(r, false, v, false); break;
    case CmpOp::kLe: ApplyBound(r, false, v, true); break;
    case CmpOp::kGt: ApplyBound(r, true, v, false); break;
    case CmpOp::kGe: ApplyBound(r, true, v, true); break;
    case CmpOp::kEq:
      if (IsIntegral(r.column.type) && v.index() == 1 &&
          std::floor(std::get<double>(v)) != std::get<double>(v)) {
        r.empty = true;
        break;
      }
      ApplyBound(r, true, v, true);
      ApplyBound(r, false, v, true);
      break;
    case CmpOp::kNe: ApplyNotEqual(r, v); break;
  }
}

void FinishRange(RangeBinding& r) {
  const PhysType t = r.column.type;
  if (IsIntDomain(t)) {
    if (r.ilo > r.ihi) r.empty = true;
  } else if (IsFloating(t)) {
    if (r.flo > r.fhi) r.empty = true;
  } else if (r.slo && r.shi) {
    const int c = r.slo->compare(*r.shi);
    if (c > 0 || (c == 0 && !(r.slo_incl && r.shi_incl))) r.empty = true;
  }
}

RangeBinding TermRange(const Scope& scope, const OrTerm& term) {
  RangeBinding r;
  if (const auto* c = std::get_if<CmpPred>(&term)) {
    r.column = Slot(scope, c->column);
    ApplyCmp(r, c->op, c->value);
  } else {
    const auto& b = std::get<BetweenPred>(term);
    r.column = Slot(scope, b.column);
    ApplyBound(r, true, b.lo, true);
    ApplyBound(r, false, b.hi, true);
  }
  FinishRange(r);
  return r;
}

int64_t SourceRows(const PhysicalPlan& plan, int source, const Catalog& catalog) {
  if (source == 0 && plan.derived_subplan >= 0) return kI64Max;
  const TableDescriptor* t = catalog.Find(plan.source_names[source]);
  return t ? t->row_count : 0;
}

}  // namespace

PhysicalPlan Compile(const QuerySpec& spec, const Catalog& catalog) {
  ValidationResult v = Validate(spec, catalog);
  if (!v.ok()) throw Error(v.code(), v.Message());
  std::vector<Diagnostic> diags;
  Scope scope = BuildScope(spec, catalog, &diags);

  PhysicalPlan plan;
  plan.spec = spec;
  plan.output = v.output;
  plan.source_names.push_back(spec.from[0].name());
  if (spec.from[0].subquery) {
    plan.subplans.push_back(std::make_shared<const PhysicalPlan>(Compile(*spec.from[0].subquery, catalog)));
    plan.derived_subplan = 0;
  }
  if (!spec.joins.empty()) {
    const JoinSpec& j = spec.joins[0];
    plan.source_names.push_back(j.table);
    ColumnSlot l = Slot(scope, j.left);
    ColumnSlot r = Slot(scope, j.right);
    if (l.source != 0) std::swap(l, r);
    plan.join_keys = {l, r};
  }

  // Conjuncts on a single column fold into one range binding.
  std::map<std::pair<int, int>, size_t> range_index;
  bool has_in = false;
  for (const auto& p : spec.where) {
    if (const auto* c = std::get_if<CmpPred>(&p)) {
      ColumnSlot s = Slot(scope, c->column);
      auto key = std::make_pair(s.source, s.column);
      auto it = range_index.find(key);
      if (it == range_index.end()) {
        PredicateBinding b;
        b.kind = PredicateBinding::Kind::kRange;
        b.range.column = s;
        b.source = s.source;
        it = range_index.emplace(key, plan.predicates.size()).first;
        plan.predicates.push_back(std::move(b));
      }
      ApplyCmp(plan.predicates[it->second].range, c->op, c->value);
    } else if (const auto* bt = std::get_if<BetweenPred>(&p)) {
      ColumnSlot s = Slot(scope, bt->column);
      auto key = std::make_pair(s.source, s.column);
      auto it = range_index.find(key);
      if (it == range_index.end()) {
        PredicateBinding b;
        b.kind = PredicateBinding::Kind::kRange;
        b.range.column = s;
        b.source = s.source;
        it = range_index.emplace(key, plan.predicates.size()).first;
        plan.predicates.push_back(std::move(b));
      }
      ApplyBound(plan.predicates[it->second].range, true, bt->lo, true);
      ApplyBound(plan.predicates[it->second].range, false, bt->hi, true);
    } else if (const auto* o = std::get_if<OrPred>(&p)) {
      PredicateBinding b;
      b.kind = PredicateBinding::Kind::kOr;
      for (const auto& t : o->terms) b.any.terms.push_back(TermRange(scope, t));
      b.source = b.any.terms.front().column.source;
      for (const auto& t : b.any.terms) {
        if (t.column.source != b.source) b.source = -1;
      }
      plan.predicates.push_back(std::move(b));
    } else if (const auto* cc = std::get_if<ColumnCmpPred>(&p)) {
      PredicateBinding b;
      b.kind = PredicateBinding::Kind::kColumnCmp;
      b.cmp = ColumnCmpBinding{cc->op, Slot(scope, cc->left), Slot(scope, cc->right)};
      b.source = b.cmp.left.source == b.cmp.right.source ? b.cmp.left.source : -1;
      plan.predicates.push_back(std::move(b));
    } else {
      const auto& in = std::get<IsInPred>(p);
      PredicateBinding b;
      b.kind = PredicateBinding::Kind::kIsIn;
      b.in.column = Slot(scope, in.column);
      b.in.subplan = static_cast<int>(plan.subplans.size());
      b.source = b.in.column.source;
      plan.subplans.push_back(std::make_shared<const PhysicalPlan>(Compile(*in.subquery, catalog)));
      plan.predicates.push_back(std::move(b));
      has_in = true;
    }
  }
  for (auto& b : plan.predicates) {
    if (b.kind == PredicateBinding::Kind::kRange) FinishRange(b.range);
  }

  std::vector<std::string> seen;
  for (const auto& s : spec.select) {
    ForEachAgg(s.expr, [&](const Expr& agg) {
      const std::string key = ToString(agg);
      if (std::find(seen.begin(), seen.end(), key) != seen.end()) return;
      seen.push_back(key);
      AggSlot slot;
      slot.fn = agg->agg_fn;
      slot.arg = agg->arg;
      std::vector<Diagnostic> ignored;
      if (agg->arg) slot.arg_type = *InferExprType(agg->arg, scope, &ignored);
      slot.out_type = *InferExprType(agg, scope, &ignored);
      plan.aggregates.push_back(std::move(slot));
    });
  }
  for (const auto& g : spec.group) plan.group_keys.push_back(Slot(scope, g));

  if (plan.join_keys.size() == 2) {
    plan.build_side_estimate =
        SourceRows(plan, 1, catalog) <= SourceRows(plan, 0, catalog) ? 1 : 0;
  }

  if (plan.derived_subplan >= 0) {
    plan.template_id = TemplateId::kSubqueryMaterialize;
  } else if (has_in) {
    plan.template_id = TemplateId::kIsInSemiJoin;
  } else if (!plan.join_keys.empty()) {
    plan.template_id = TemplateId::kHashJoinAgg;
  } else if (!plan.group_keys.empty()) {
    plan.template_id = TemplateId::kGroupBy;
  } else if (!plan.aggregates.empty()) {
    plan.template_id = TemplateId::kFilterAgg;
  } else {
    plan.template_id = TemplateId::kFilterProject;
  }
  return plan;
}

}  // namespace heapsql
