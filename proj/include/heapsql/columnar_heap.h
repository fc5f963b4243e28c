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

#include <cassert>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "heapsql/column_buffer.h"
#include "heapsql/types.h"

namespace heapsql {

// A single fixed-capacity byte region. Every table column and every runtime
// hash-table segment lives inside it; there is no growth, and running past
// the end is an OutOfHeap error. Allocation is a bump pointer; intermediates
// are released by rewinding to a mark (see HeapScope).
class ColumnarHeap {
 public:
  /// Throws Error(kInvalidArgument) for capacity 0 and Error(kAllocationFailed)
  /// when the backing region cannot be obtained.
  explicit ColumnarHeap(size_t capacity);

  ColumnarHeap(ColumnarHeap&&) noexcept = default;
  ColumnarHeap& operator=(ColumnarHeap&&) noexcept = default;
  ColumnarHeap(const ColumnarHeap&) = delete;
  ColumnarHeap& operator=(const ColumnarHeap&) = delete;

  size_t capacity() const { return capacity_; }
  size_t high_water() const { return high_water_; }

  /// Returns an offset aligned to `align` (1, 4 or 8) and advances the high
  /// water mark past `nbytes`. Throws Error(kOutOfHeap).
  size_t Alloc(size_t nbytes, size_t align);

  /// Drops every allocation made after `mark` (a previous high_water()).
  void Rewind(size_t mark);

  std::byte* data() { return data_.get(); }
  const std::byte* data() const { return data_.get(); }

  template <typename T>
  T* At(size_t offset) {
    assert(offset % alignof(T) == 0);
    return reinterpret_cast<T*>(data_.get() + offset);
  }
  template <typename T>
  const T* At(size_t offset) const {
    assert(offset % alignof(T) == 0);
    return reinterpret_cast<const T*>(data_.get() + offset);
  }

 private:
  size_t capacity_ = 0;
  size_t high_water_ = 0;
  std::unique_ptr<std::byte[]> data_;
};

// Rewinds the heap to its high water mark at construction.
class HeapScope {
 public:
  explicit HeapScope(ColumnarHeap& heap) : heap_(heap), mark_(heap.high_water()) {}
  ~HeapScope() { heap_.Rewind(mark_); }
  HeapScope(const HeapScope&) = delete;
  HeapScope& operator=(const HeapScope&) = delete;

 private:
  ColumnarHeap& heap_;
  size_t mark_;
};

struct ColumnDescriptor {
  std::string name;
  PhysType type = PhysType::kI32;
  // Fixed types: start of the value array. kStr: start of the per-row
  // uint32 offsets (relative to pool_base).
  size_t base_offset = 0;
  uint32_t row_count = 0;
  size_t pool_base = 0;
  size_t pool_bytes = 0;

  size_t byte_begin() const { return base_offset; }
  size_t byte_end() const;
};

struct TableDescriptor {
  std::string name;
  std::vector<ColumnDescriptor> columns;
  uint32_t row_count = 0;

  const ColumnDescriptor* FindColumn(std::string_view column) const;
};

class Catalog {
 public:
  /// Throws Error(kInvalidArgument) if a table of that name already exists.
  void Register(TableDescriptor table);
  bool Drop(std::string_view name);
  const TableDescriptor* Find(std::string_view name) const;
  /// Throws Error(kUnknownTable).
  const TableDescriptor& Get(std::string_view name) const;
  std::vector<std::string> TableNames() const;
  bool empty() const { return tables_.empty(); }

 private:
  std::map<std::string, TableDescriptor, std::less<>> tables_;
};

struct ColumnSchema {
  std::string name;
  PhysType type = PhysType::kI32;
};
using TableSchema = std::vector<ColumnSchema>;

/// Lays each column out end-to-end in load order and registers the table.
/// All columns must have the same number of rows.
TableDescriptor LoadTable(ColumnarHeap& heap, Catalog& catalog, std::string name,
                          std::span<const ColumnBuffer> columns);

/// Loads text cells. Conversion failures report the row and column.
TableDescriptor LoadTableRows(ColumnarHeap& heap, Catalog& catalog, std::string name,
                              const TableSchema& schema,
                              std::span<const std::vector<std::string>> rows);

/// Copies a heap column back out into an owned buffer.
ColumnBuffer ExportColumn(const ColumnarHeap& heap, const ColumnDescriptor& column);

template <typename T>
const T* ColumnValues(const ColumnarHeap& heap, const ColumnDescriptor& column) {
  assert(FixedWidth(column.type) == sizeof(T));
  return heap.At<T>(column.base_offset);
}

inline int32_t ReadI32(const ColumnarHeap& heap, const ColumnDescriptor& c, uint32_t rid) {
  assert(rid < c.row_count);
  return ColumnValues<int32_t>(heap, c)[rid];
}
inline float ReadF32(const ColumnarHeap& heap, const ColumnDescriptor& c, uint32_t rid) {
  assert(rid < c.row_count);
  return ColumnValues<float>(heap, c)[rid];
}
inline int64_t ReadI64(const ColumnarHeap& heap, const ColumnDescriptor& c, uint32_t rid) {
  assert(rid < c.row_count);
  return ColumnValues<int64_t>(heap, c)[rid];
}
inline double ReadF64(const ColumnarHeap& heap, const ColumnDescriptor& c, uint32_t rid) {
  assert(rid < c.row_count);
  return ColumnValues<double>(heap, c)[rid];
}
inline std::string_view ReadStr(const ColumnarHeap& heap, const ColumnDescriptor& c,
                                uint32_t rid) {
  assert(rid < c.row_count);
  const uint32_t off = ColumnValues<uint32_t>(heap, c)[rid];
  return std::string_view(reinterpret_cast<const char*>(heap.data() + c.pool_base + off));
}

/// Reads one cell by column name. Throws Error(kUnknownColumn).
Datum ColRead(const ColumnarHeap& heap, const TableDescriptor& table, std::string_view column,
              uint32_t rid);

/// Overwrites one fixed-width cell in place. Throws Error(kInvalidArgument)
/// for string columns or a type mismatch.
void ColWrite(ColumnarHeap& heap, const TableDescriptor& table, std::string_view column,
              uint32_t rid, const Datum& value);

// A heap plus the catalog of tables living in it: one engine session.
struct Database {
  explicit Database(size_t heap_capacity) : heap(heap_capacity) {}

  ColumnarHeap heap;
  Catalog catalog;
};

}  // namespace heapsql
