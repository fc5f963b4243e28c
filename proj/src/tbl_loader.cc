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

#include <filesystem>
#include <map>

#include <fmt/format.h>
#include <zlib.h>

#include "heapsql/datagen.h"
#include "heapsql/status.h"

namespace heapsql {

namespace {

using P = PhysType;

const std::map<std::string, TableSchema, std::less<>>& Schemas() {
  static const std::map<std::string, TableSchema, std::less<>> kSchemas = {
      {"region", {{"r_regionkey", P::kI32}, {"r_name", P::kStr}, {"r_comment", P::kStr}}},
      {"nation",
       {{"n_nationkey", P::kI32},
        {"n_name", P::kStr},
        {"n_regionkey", P::kI32},
        {"n_comment", P::kStr}}},
      {"part",
       {{"p_partkey", P::kI32},
        {"p_name", P::kStr},
        {"p_mfgr", P::kStr},
        {"p_brand", P::kStr},
        {"p_type", P::kStr},
        {"p_size", P::kI32},
        {"p_container", P::kStr},
        {"p_retailprice", P::kF32},
        {"p_comment", P::kStr}}},
      {"supplier",
       {{"s_suppkey", P::kI32},
        {"s_name", P::kStr},
        {"s_address", P::kStr},
        {"s_nationkey", P::kI32},
        {"s_phone", P::kStr},
        {"s_acctbal", P::kF32},
        {"s_comment", P::kStr}}},
      {"partsupp",
       {{"ps_partkey", P::kI32},
        {"ps_suppkey", P::kI32},
        {"ps_availqty", P::kI32},
        {"ps_supplycost", P::kF32},
        {"ps_comment", P::kStr}}},
      {"customer",
       {{"c_custkey", P::kI32},
        {"c_name", P::kStr},
        {"c_address", P::kStr},
        {"c_nationkey", P::kI32},
        {"c_phone", P::kStr},
        {"c_acctbal", P::kF32},
        {"c_mktsegment", P::kStr},
        {"c_comment", P::kStr}}},
      {"orders",
       {{"o_orderkey", P::kI32},
        {"o_custkey", P::kI32},
        {"o_orderstatus", P::kStr},
        {"o_totalprice", P::kF32},
        {"o_orderdate", P::kD32},
        {"o_orderpriority", P::kStr},
        {"o_clerk", P::kStr},
        {"o_shippriority", P::kI32},
        {"o_comment", P::kStr}}},
      {"lineitem",
       {{"l_orderkey", P::kI32},
        {"l_partkey", P::kI32},
        {"l_suppkey", P::kI32},
        {"l_linenumber", P::kI32},
        {"l_quantity", P::kF32},
        {"l_extendedprice", P::kF32},
        {"l_discount", P::kF32},
        {"l_tax", P::kF32},
        {"l_returnflag", P::kStr},
        {"l_linestatus", P::kStr},
        {"l_shipdate", P::kD32},
        {"l_commitdate", P::kD32},
        {"l_receiptdate", P::kD32},
        {"l_shipinstruct", P::kStr},
        {"l_shipmode", P::kStr},
        {"l_comment", P::kStr}}},
  };
  return kSchemas;
}

void ParseLine(std::string_view line, size_t line_no, const TableSchema& schema,
               std::vector<ColumnBuffer>& cols) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  if (!line.empty() && line.back() == '|') line.remove_suffix(1);
  std::vector<std::string_view> cells;
  size_t start = 0;
  while (true) {
    const size_t bar = line.find('|', start);
    cells.push_back(line.substr(start, bar == std::string_view::npos ? bar : bar - start));
    if (bar == std::string_view::npos) break;
    start = bar + 1;
  }
  if (cells.size() != schema.size()) {
    throw Error(ErrorCode::kArity, fmt::format("line {}: expected {} fields, found {}", line_no,
                                               schema.size(), cells.size()));
  }
  for (size_t c = 0; c < cells.size(); ++c) {
    try {
      cols[c].AppendParsed(cells[c]);
    } catch (const Error& e) {
      throw Error(ErrorCode::kConversion,
                  fmt::format("line {}, column {}: {}", line_no, schema[c].name, e.what()));
    }
  }
}

}  // namespace

const TableSchema* TpchSchema(std::string_view table) {
  auto it = Schemas().find(table);
  return it == Schemas().end() ? nullptr : &it->second;
}

const std::vector<std::string>& TpchTableNames() {
  static const std::vector<std::string> kNames = {"region",   "nation", "part",   "supplier",
                                                  "partsupp", "customer", "orders", "lineitem"};
  return kNames;
}

std::vector<ColumnBuffer> ReadTbl(const std::string& path, const TableSchema& schema) {
  gzFile f = gzopen(path.c_str(), "rb");
  if (!f) throw Error(ErrorCode::kIo, "cannot open " + path);
  std::vector<ColumnBuffer> cols;
  for (const auto& c : schema) cols.emplace_back(c.name, c.type);
  std::string pending;
  std::vector<char> buf(1 << 16);
  size_t line_no = 0;
  try {
    while (true) {
      const int n = gzread(f, buf.data(), static_cast<unsigned>(buf.size()));
      if (n < 0) throw Error(ErrorCode::kIo, "read error in " + path);
      if (n == 0) break;
      pending.append(buf.data(), static_cast<size_t>(n));
      size_t start = 0;
      for (size_t nl; (nl = pending.find('\n', start)) != std::string::npos; start = nl + 1) {
        ++line_no;
        ParseLine(std::string_view(pending).substr(start, nl - start), line_no, schema, cols);
      }
      pending.erase(0, start);
    }
    if (!pending.empty() && pending != "\r") ParseLine(pending, ++line_no, schema, cols);
  } catch (...) {
    gzclose(f);
    throw;
  }
  gzclose(f);
  return cols;
}

TableDescriptor LoadTbl(Database& db, const std::string& name, const std::string& path,
                        const TableSchema& schema) {
  const std::vector<ColumnBuffer> cols = ReadTbl(path, schema);
  return LoadTable(db.heap, db.catalog, name, cols);
}

std::vector<std::string> LoadTpchDir(Database& db, const std::string& dir) {
  namespace fs = std::filesystem;
  std::vector<std::string> loaded;
  for (const auto& name : TpchTableNames()) {
    for (const char* ext : {".tbl", ".tbl.gz"}) {
      const fs::path p = fs::path(dir) / (name + ext);
      if (!fs::exists(p)) continue;
      LoadTbl(db, name, p.string(), *TpchSchema(name));
      loaded.push_back(name);
      break;
    }
  }
  return loaded;
}

}  // namespace heapsql
