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

#include "heapsql/columnar_heap.h"

#include <new>

#include <fmt/format.h>

#include "heapsql/status.h"

namespace heapsql {

ColumnarHeap::ColumnarHeap(size_t capacity) : capacity_(capacity) {
  if (capacity == 0) {
    throw Error(ErrorCode::kInvalidArgument, "heap capacity must be positive");
  }
  try {
    // Left uninitialized: hash-table segments tolerate stale bytes.
    data_.reset(new std::byte[capacity]);
  } catch (const std::bad_alloc&) {
    throw Error(ErrorCode::kAllocationFailed,
                fmt::format("cannot allocate a heap of {} bytes", capacity));
  }
}

size_t ColumnarHeap::Alloc(size_t nbytes, size_t align) {
  if (align != 1 && align != 4 && align != 8) {
    throw Error(ErrorCode::kInvalidArgument, fmt::format("unsupported alignment {}", align));
  }
  const size_t offset = (high_water_ + align - 1) & ~(align - 1);
  if (offset > capacity_ || nbytes > capacity_ - offset) {
    throw Error(ErrorCode::kOutOfHeap,
                fmt::format("heap exhausted: need {} bytes at offset {}, capacity {}", nbytes,
                            offset, capacity_));
  }
  high_water_ = offset + nbytes;
  return offset;
}

void ColumnarHeap::Rewind(size_t mark) {
  assert(mark <= high_water_);
  high_water_ = mark;
}

size_t ColumnDescriptor::byte_end() const {
  if (type == PhysType::kStr) return pool_base + pool_bytes;
  return base_offset + static_cast<size_t>(row_count) * FixedWidth(type);
}

const ColumnDescriptor* TableDescriptor::FindColumn(std::string_view column) const {
  for (const auto& c : columns) {
    if (c.name == column) return &c;
  }
  return nullptr;
}

void Catalog::Register(TableDescriptor table) {
  if (tables_.count(table.name)) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("table '{}' is already registered", table.name));
  }
  std::string name = table.name;
  tables_.emplace(std::move(name), std::move(table));
}

bool Catalog::Drop(std::string_view name) {
  auto it = tables_.find(name);
  if (it == tables_.end()) return false;
  tables_.erase(it);
  return true;
}

const TableDescriptor* Catalog::Find(std::string_view name) const {
  auto it = tables_.find(name);
  return it == tables_.end() ? nullptr : &it->second;
}

const TableDescriptor& Catalog::Get(std::string_view name) const {
  const TableDescriptor* t = Find(name);
  if (!t) throw Error(ErrorCode::kUnknownTable, fmt::format("unknown table '{}'", name));
  return *t;
}

std::vector<std::string> Catalog::TableNames() const {
  std::vector<std::string> names;
  names.reserve(tables_.size());
  for (const auto& [name, _] : tables_) names.push_back(name);
  return names;
}

TableDescriptor LoadTable(ColumnarHeap& heap, Catalog& catalog, std::string name,
                          std::span<const ColumnBuffer> columns) {
  if (catalog.Find(name)) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("table '{}' is already registered", name));
  }
  TableDescriptor table;
  table.name = std::move(name);
  table.row_count = columns.empty() ? 0 : static_cast<uint32_t>(columns.front().size());
  for (const auto& col : columns) {
    if (col.size() != table.row_count) {
      throw Error(ErrorCode::kInvalidArgument,
                  fmt::format("table '{}': column '{}' has {} rows, expected {}", table.name,
                              col.name(), col.size(), table.row_count));
    }
    if (table.FindColumn(col.name())) {
      throw Error(ErrorCode::kInvalidArgument,
                  fmt::format("table '{}': duplicate column '{}'", table.name, col.name()));
    }
  }
  // Allocate everything before copying so a failure leaves no partial table.
  const size_t mark = heap.high_water();
  try {
    for (const auto& col : columns) {
      ColumnDescriptor d;
      d.name = col.name();
      d.type = col.type();
      d.row_count = table.row_count;
      if (col.type() == PhysType::kStr) {
        d.base_offset = heap.Alloc(col.offsets().size_bytes(), 4);
        d.pool_bytes = col.pool().size();
        d.pool_base = heap.Alloc(d.pool_bytes, 1);
      } else {
        const size_t w = FixedWidth(col.type());
        d.base_offset = heap.Alloc(col.fixed_bytes().size(), w);
      }
      table.columns.push_back(std::move(d));
    }
  } catch (...) {
    heap.Rewind(mark);
    throw;
  }
  for (size_t i = 0; i < columns.size(); ++i) {
    const ColumnBuffer& col = columns[i];
    const ColumnDescriptor& d = table.columns[i];
    if (col.type() == PhysType::kStr) {
      if (!col.offsets().empty()) {
        std::memcpy(heap.data() + d.base_offset, col.offsets().data(),
                    col.offsets().size_bytes());
      }
      if (d.pool_bytes) std::memcpy(heap.data() + d.pool_base, col.pool().data(), d.pool_bytes);
    } else if (!col.fixed_bytes().empty()) {
      std::memcpy(heap.data() + d.base_offset, col.fixed_bytes().data(),
                  col.fixed_bytes().size());
    }
  }
  catalog.Register(table);
  return table;
}

TableDescriptor LoadTableRows(ColumnarHeap& heap, Catalog& catalog, std::string name,
                              const TableSchema& schema,
                              std::span<const std::vector<std::string>> rows) {
  std::vector<ColumnBuffer> columns;
  columns.reserve(schema.size());
  for (const auto& c : schema) {
    columns.emplace_back(c.name, c.type);
    columns.back().Reserve(rows.size());
  }
  for (size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != schema.size()) {
      throw Error(ErrorCode::kArity, fmt::format("table '{}' row {}: {} cells, expected {}",
                                                 name, r, rows[r].size(), schema.size()));
    }
    for (size_t c = 0; c < schema.size(); ++c) {
      try {
        columns[c].AppendParsed(rows[r][c]);
      } catch (const Error& e) {
        throw Error(ErrorCode::kConversion, fmt::format("table '{}' row {} column '{}': {}",
                                                        name, r, schema[c].name, e.what()));
      }
    }
  }
  return LoadTable(heap, catalog, std::move(name), columns);
}

ColumnBuffer ExportColumn(const ColumnarHeap& heap, const ColumnDescriptor& column) {
  ColumnBuffer out(column.name, column.type);
  out.Reserve(column.row_count);
  for (uint32_t rid = 0; rid < column.row_count; ++rid) {
    switch (column.type) {
      case PhysType::kI32: out.AppendI32(ReadI32(heap, column, rid)); break;
      case PhysType::kF32: out.AppendF32(ReadF32(heap, column, rid)); break;
      case PhysType::kD32: out.AppendDate(Date{ReadI32(heap, column, rid)}); break;
      case PhysType::kStr: out.AppendString(ReadStr(heap, column, rid)); break;
      case PhysType::kI64: out.AppendI64(ReadI64(heap, column, rid)); break;
      case PhysType::kF64: out.AppendF64(ReadF64(heap, column, rid)); break;
    }
  }
  return out;
}

namespace {

const ColumnDescriptor& RequireColumn(const TableDescriptor& table, std::string_view column) {
  const ColumnDescriptor* c = table.FindColumn(column);
  if (!c) {
    throw Error(ErrorCode::kUnknownColumn,
                fmt::format("table '{}' has no column '{}'", table.name, column));
  }
  return *c;
}

}  // namespace

Datum ColRead(const ColumnarHeap& heap, const TableDescriptor& table, std::string_view column,
              uint32_t rid) {
  const ColumnDescriptor& c = RequireColumn(table, column);
  switch (c.type) {
    case PhysType::kI32: return ReadI32(heap, c, rid);
    case PhysType::kF32: return ReadF32(heap, c, rid);
    case PhysType::kD32: return Date{ReadI32(heap, c, rid)};
    case PhysType::kStr: return std::string(ReadStr(heap, c, rid));
    case PhysType::kI64: return ReadI64(heap, c, rid);
    case PhysType::kF64: return ReadF64(heap, c, rid);
  }
  return {};
}

void ColWrite(ColumnarHeap& heap, const TableDescriptor& table, std::string_view column,
              uint32_t rid, const Datum& value) {
  const ColumnDescriptor& c = RequireColumn(table, column);
  if (c.type == PhysType::kStr || TypeOf(value) != c.type) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("cannot write {} into {} column '{}'", PhysTypeName(TypeOf(value)),
                            PhysTypeName(c.type), column));
  }
  assert(rid < c.row_count);
  std::byte* dst = heap.data() + c.base_offset + static_cast<size_t>(rid) * FixedWidth(c.type);
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (!std::is_same_v<T, std::string>) std::memcpy(dst, &v, sizeof(T));
      },
      value);
}

}  // namespace heapsql
