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

#include "heapsql/canonical.h"

#include <algorithm>


namespace heapsql {

namespace {

CmpOp Mirror(CmpOp op) {
  switch (op) {
    case CmpOp::kLt: return CmpOp::kGt;
    case CmpOp::kLe: return CmpOp::kGe;
    case CmpOp::kGt: return CmpOp::kLt;
    case CmpOp::kGe: return CmpOp::kLe;
    default: return op;
  }
}

std::string SortKey(const Predicate& p) {
  std::vector<ColumnRef> cols = PredicateColumns(p);
  std::string first = cols.empty() ? std::string() : cols.front().ToString();
  return first + '\x01' + ToString(p);
}

}  // namespace

Expr Canonicalize(const Expr& e) {
  if (!e) return e;
  switch (e->kind) {
    case ExprKind::kColumn:
    case ExprKind::kLiteral:
      return e;
    case ExprKind::kAgg:
      return MakeAgg(e->agg_fn, Canonicalize(e->arg));
    case ExprKind::kArith: {
      Expr l = Canonicalize(e->left);
      Expr r = Canonicalize(e->right);
      if ((e->arith_op == ArithOp::kAdd || e->arith_op == ArithOp::kMul) &&
          ToString(r) < ToString(l)) {
        std::swap(l, r);
      }
      return MakeArith(e->arith_op, std::move(l), std::move(r));
    }
  }
  return e;
}

Predicate Canonicalize(const Predicate& p) {
  return std::visit(
      [](const auto& x) -> Predicate {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, OrPred>) {
          OrPred out = x;
          std::vector<std::pair<std::string, OrTerm>> keyed;
          for (const auto& t : out.terms) {
            keyed.emplace_back(std::visit([](const auto& y) { return SortKey(y); }, t), t);
          }
          std::stable_sort(keyed.begin(), keyed.end(),
                           [](const auto& a, const auto& b) { return a.first < b.first; });
          out.terms.clear();
          for (auto& [_, t] : keyed) out.terms.push_back(std::move(t));
          return out;
        } else if constexpr (std::is_same_v<T, IsInPred>) {
          IsInPred out = x;
          if (x.subquery) out.subquery = std::make_shared<const QuerySpec>(Canonicalize(*x.subquery));
          return out;
        } else if constexpr (std::is_same_v<T, ColumnCmpPred>) {
          ColumnCmpPred out = x;
          if (out.right.ToString() < out.left.ToString()) {
            std::swap(out.left, out.right);
            out.op = Mirror(out.op);
          }
          return out;
        } else {
          return x;
        }
      },
      p);
}

QuerySpec Canonicalize(const QuerySpec& q) {
  QuerySpec out = q;
  for (auto& s : out.select) s.expr = Canonicalize(s.expr);
  for (auto& f : out.from) {
    if (f.subquery) f.subquery = std::make_shared<const QuerySpec>(Canonicalize(*f.subquery));
  }
  for (auto& j : out.joins) {
    if (j.right.ToString() < j.left.ToString()) std::swap(j.left, j.right);
  }
  for (auto& p : out.where) p = Canonicalize(p);
  std::vector<std::pair<std::string, Predicate>> keyed;
  keyed.reserve(out.where.size());
  for (auto& p : out.where) keyed.emplace_back(SortKey(p), std::move(p));
  std::stable_sort(keyed.begin(), keyed.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  out.where.clear();
  for (auto& [_, p] : keyed) out.where.push_back(std::move(p));
  std::sort(out.group.begin(), out.group.end(),
            [](const ColumnRef& a, const ColumnRef& b) { return a.ToString() < b.ToString(); });
  out.group.erase(std::unique(out.group.begin(), out.group.end()), out.group.end());
  return out;
}

std::string CanonicalText(const QuerySpec& q) { return ToString(Canonicalize(q)); }

bool StructurallyEqual(const QuerySpec& a, const QuerySpec& b) {
  return CanonicalText(a) == CanonicalText(b);
}

bool StructurallyEqual(const Predicate& a, const Predicate& b) {
  return ToString(Canonicalize(a)) == ToString(Canonicalize(b));
}

bool StructurallyEqual(const Expr& a, const Expr& b) {
  return ToString(Canonicalize(a)) == ToString(Canonicalize(b));
}

uint64_t Fnv1a64(std::string_view bytes) {
  uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

uint64_t Fingerprint(const QuerySpec& q) { return Fnv1a64(CanonicalText(q)); }

}  // namespace heapsql
