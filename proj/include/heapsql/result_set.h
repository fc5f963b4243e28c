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

#include <string>
#include <string_view>
#include <vector>

#include "heapsql/column_buffer.h"
#include "heapsql/columnar_heap.h"

namespace heapsql {

// Columnar query output. Column order is the select-list order.
struct ResultSet {
  std::vector<ColumnBuffer> columns;

  size_t row_count() const { return columns.empty() ? 0 : columns.front().size(); }
  size_t column_count() const { return columns.size(); }
  const ColumnBuffer* Find(std::string_view name) const;
  TableSchema schema() const;
  size_t payload_bytes() const;

  bool operator==(const ResultSet& other) const { return columns == other.columns; }
};

/// Renders up to `max_rows` rows as an aligned text table.
std::string FormatResultSet(const ResultSet& rs, size_t max_rows = 50);

/// Same schema and the same multiset of rows. Integer, date and string cells
/// must be equal; float cells may differ by `rel_tol` relative (NaN equals
/// NaN). With `ordered` rows are compared position by position.
bool ResultsEquivalent(const ResultSet& a, const ResultSet& b, double rel_tol, bool ordered,
                       std::string* why = nullptr);

}  // namespace heapsql
