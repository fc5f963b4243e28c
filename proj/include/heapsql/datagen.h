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
#include <string>
#include <string_view>
#include <vector>

#include "heapsql/column_buffer.h"
#include "heapsql/columnar_heap.h"

namespace heapsql {

// TPC-H column layout: keys and integers I32, decimals F32, dates D32,
// text STR.
const TableSchema* TpchSchema(std::string_view table);
const std::vector<std::string>& TpchTableNames();

/// Parses pipe-delimited rows (a trailing '|' is allowed). Reads plain or
/// gzip-compressed files. Throws kIo, kArity or kConversion naming the line.
std::vector<ColumnBuffer> ReadTbl(const std::string& path, const TableSchema& schema);

TableDescriptor LoadTbl(Database& db, const std::string& name, const std::string& path,
                        const TableSchema& schema);

/// Loads every `<table>.tbl` or `<table>.tbl.gz` found in `dir`; returns the
/// names loaded.
std::vector<std::string> LoadTpchDir(Database& db, const std::string& dir);

// Seeded generic table with columns `<prefix>id` (row number), `<prefix>small`
// (kSmallCardinality values), `<prefix>large`, `<prefix>key` (join key in
// [0, kJoinKeys)), `<prefix>fval` (float in [0,1)), `<prefix>date` (7 years
// from 1992-01-01), `<prefix>cat` (5 strings), `<prefix>big` (I64) and
// `<prefix>dval` (F64).
inline constexpr int kSmallCardinality = 10;
inline constexpr int kJoinKeys = 64;
inline constexpr int kLargeRange = 100000;
inline constexpr int kDateSpanDays = 2557;
const std::vector<std::string>& SyntheticCategories();

std::vector<ColumnBuffer> GenerateSynthetic(uint64_t seed, size_t rows, std::string_view prefix);
TableDescriptor LoadSynthetic(Database& db, const std::string& name, uint64_t seed, size_t rows,
                              std::string_view prefix);

// lineitem-shaped rows with the TPC-H value domains of the columns used by
// the pricing and shipping queries.
std::vector<ColumnBuffer> GenerateLineitemLike(uint64_t seed, size_t rows);

}  // namespace heapsql
