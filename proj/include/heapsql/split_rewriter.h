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

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "heapsql/columnar_heap.h"
#include "heapsql/query.h"
#include "heapsql/status.h"

namespace heapsql {

// Split execution: a query with a FREE column is turned into a view query
// (run once on the backend, result shipped) and follow-ups that differ only
// in predicates or grouping on that column are answered from the view.

/// Two refs name the same column when the names agree and the qualifiers
/// agree or one side is unqualified.
bool SameColumn(const ColumnRef& a, const ColumnRef& b);

/// True for a CMP/BETWEEN/OR predicate whose only column is `cfree`.
bool IsFreePredicate(const Predicate& p, const ColumnRef& cfree);

struct FreeCheck {
  bool ok = true;
  ErrorCode code = ErrorCode::kFreeRejected;
  std::string reason;
};

/// Rejects a column used in a join condition, a column-vs-column predicate,
/// an OR group, an IS IN test, or anywhere inside a subquery. With a catalog
/// the query is validated and the column must resolve (kUnknownColumn).
FreeCheck CanFree(const QuerySpec& q, const ColumnRef& col, const Catalog* catalog = nullptr);

// Where an aggregate of the original query lives in the view. Unused roles
// are empty: AVG fills sum and cnt, SUM fills sum, and so on.
struct AggMapping {
  Expr term;
  std::string sum;
  std::string cnt;
  std::string min;
  std::string max;
};

struct MVDefinition {
  std::string name;
  QuerySpec mvq;
  ColumnRef free_col;
  std::vector<AggMapping> agg_map;
  uint64_t source_fingerprint = 0;

  bool aggregated() const { return mvq.HasAggregate() || !mvq.group.empty(); }
};

/// View select terms for one aggregate: AVG(e) gives SUM(e), COUNT(e).
std::vector<Expr> RewriteAgg(const Expr& agg);

/// Throws Error(kFreeRejected) when CanFree fails.
MVDefinition GenerateMvq(const QuerySpec& q_o, const ColumnRef& cfree,
                         const Catalog* catalog = nullptr);

struct MatchReport {
  bool matched = false;
  std::array<bool, 5> conds{true, true, true, true, true};
  int first_failed = 0;  // 1..5, 0 when matched
  std::string offending;

  std::string Message() const;
};

MatchReport Matches(const QuerySpec& q_n, const MVDefinition& mv);

/// Aggregate over view columns equivalent to `agg`. Throws
/// Error(kUnmappedAggregate) when the view cannot supply it.
Expr DeriveAgg(const Expr& agg, const std::vector<AggMapping>& agg_map);

/// Throws Error(kNoMatch) with the failing condition.
QuerySpec GenerateVq(const QuerySpec& q_n, const MVDefinition& mv);

nlohmann::json MVDefinitionToJson(const MVDefinition& mv);
MVDefinition MVDefinitionFromJson(const nlohmann::json& j);

}  // namespace heapsql
