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
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "heapsql/columnar_heap.h"
#include "heapsql/hash_table.h"
#include "heapsql/query.h"
#include "heapsql/result_set.h"

namespace heapsql {

// Each query class runs through one fixed kernel template, bound at compile
// time to column positions, predicate constants and aggregate slots.
enum class TemplateId : uint8_t {
  kFilterAgg,
  kFilterProject,
  kHashJoinAgg,
  kGroupBy,
  kSubqueryMaterialize,
  kIsInSemiJoin,
};
std::string_view TemplateName(TemplateId id);

// Position of a column: source 0 is the FROM item, source 1 the joined table.
struct ColumnSlot {
  int source = 0;
  int column = 0;
  PhysType type = PhysType::kI32;
  std::string name;
};

// All conjuncts on one column folded into a single inclusive range plus a
// list of excluded values, in the column's comparison domain:
//   integral and date columns  int64 bounds (fractional literals rounded inward)
//   F32 columns                bounds rounded to float, compared as float
//   F64 columns                double bounds
//   STR columns                byte-wise string bounds
struct RangeBinding {
  ColumnSlot column;
  bool empty = false;
  int64_t ilo = std::numeric_limits<int64_t>::min();
  int64_t ihi = std::numeric_limits<int64_t>::max();
  std::vector<int64_t> ine;
  double flo = -std::numeric_limits<double>::infinity();
  double fhi = std::numeric_limits<double>::infinity();
  std::vector<double> fne;
  std::optional<std::string> slo;
  bool slo_incl = true;
  std::optional<std::string> shi;
  bool shi_incl = true;
  std::vector<std::string> sne;
};

struct OrBinding {
  std::vector<RangeBinding> terms;
};

struct ColumnCmpBinding {
  CmpOp op = CmpOp::kEq;
  ColumnSlot left;
  ColumnSlot right;
};

struct IsInBinding {
  ColumnSlot column;
  int subplan = 0;
};

struct PredicateBinding {
  enum class Kind : uint8_t { kRange, kOr, kColumnCmp, kIsIn };
  Kind kind = Kind::kRange;
  RangeBinding range;
  OrBinding any;
  ColumnCmpBinding cmp;
  IsInBinding in;
  // Source the predicate filters before any join, or -1 when it spans both.
  int source = 0;
};

struct AggSlot {
  AggFn fn = AggFn::kSum;
  Expr arg;  // null for COUNT(*)
  PhysType arg_type = PhysType::kI64;
  PhysType out_type = PhysType::kI64;
};

struct PhysicalPlan {
  TemplateId template_id = TemplateId::kFilterProject;
  QuerySpec spec;
  TableSchema output;

  // Sources: a base table name, or a derived table produced by subplan
  // `derived_subplan` (FROM subquery).
  std::vector<std::string> source_names;
  int derived_subplan = -1;

  std::vector<PredicateBinding> predicates;
  std::vector<AggSlot> aggregates;
  std::vector<ColumnSlot> group_keys;
  std::vector<ColumnSlot> join_keys;  // {from-side key, join-side key}
  // Build side chosen from unfiltered row counts; Execute re-decides after
  // local filters (see ExecStats::build_side).
  int build_side_estimate = 1;

  std::vector<std::shared_ptr<const PhysicalPlan>> subplans;

  bool aggregated() const { return !aggregates.empty() || !group_keys.empty(); }
};

struct ExecStats {
  TemplateId template_id = TemplateId::kFilterProject;
  int build_side = -1;
  uint64_t rows_scanned = 0;
  uint64_t tuples = 0;  // rows reaching the aggregate / projection stage
  uint64_t groups = 0;
  uint32_t hash_capacity = 0;
  HashTable::WriteStats hash_writes;
  size_t heap_peak = 0;
};

/// Validates and binds `spec`. Throws Error with the validation code
/// (kUnsupportedShape for more than one join or nested aggregates).
PhysicalPlan Compile(const QuerySpec& spec, const Catalog& catalog);

/// Runs a compiled plan. Intermediates live in the heap and are released
/// before returning. Throws Error(kOutOfHeap).
ResultSet Execute(const PhysicalPlan& plan, ColumnarHeap& heap, const Catalog& catalog,
                  ExecStats* stats = nullptr);

ResultSet ExecuteQuery(const QuerySpec& spec, Database& db, ExecStats* stats = nullptr);

/// Stable sort by `order` keys (ties keep input order), then cut to `limit`.
ResultSet SortLimit(ResultSet rs, const std::vector<OrderItem>& order,
                    std::optional<uint64_t> limit);

/// Copies a result set into the heap as a table and registers it.
TableDescriptor LoadResultSet(ColumnarHeap& heap, Catalog& catalog, std::string name,
                              const ResultSet& rs);

}  // namespace heapsql
