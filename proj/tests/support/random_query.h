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
#include <random>
#include <vector>

#include "heapsql/bench.h"
#include "heapsql/columnar_heap.h"
#include "heapsql/query.h"
#include "support/reference_eval.h"

namespace heapsql::testing {

// t1 (columns a_*) and t2 (columns b_*) from the synthetic generator.
TableData MakeRandomTables(uint64_t seed, size_t rows_t1, size_t rows_t2);
void LoadTables(Database& db, const TableData& tables);

// A query that passes Validate against `catalog`. `ordered` is set when the
// result order is fully determined by ORDER BY.
struct GeneratedQuery {
  QuerySpec spec;
  bool ordered = false;
};
GeneratedQuery RandomQuery(std::mt19937_64& rng, const TableData& tables, const Catalog& catalog);

// All values of `col` as seen by q_o's sources.
ColumnBuffer FreeColumnValues(const Database& db, const QuerySpec& q_o, const ColumnRef& col);

// A follow-up of q_o that only changes predicates on cfree, and optionally
// adds GROUP BY cfree or drops a select term.
GeneratedQuery RandomFollowUp(std::mt19937_64& rng, const QuerySpec& q_o, const ColumnRef& cfree,
                              const ColumnBuffer& values);

// Split scenarios over t1 / t2.
std::vector<Scenario> SyntheticSplitScenarios();

}  // namespace heapsql::testing
