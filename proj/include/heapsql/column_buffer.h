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

#include <cstddef>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "heapsql/types.h"

namespace heapsql {

// An owned column in exactly the byte layout it has inside the heap:
// fixed-width types are a packed little-endian array; strings are a
// per-row uint32 offset array into a pool of 0-terminated strings.
//
// Used for staging ingestion, for query results, and as the unit that
// ABMV1 payloads carry.
class ColumnBuffer {
 public:
  ColumnBuffer() = default;
  ColumnBuffer(std::string name, PhysType type);

  const std::string& name() const { return name_; }
  void set_name(std::string name) { name_ = std::move(name); }
  PhysType type() const { return type_; }
  size_t size() const { return rows_; }

  void Reserve(size_t rows);

  void AppendI32(int32_t v) { AppendFixed(v); }
  void AppendF32(float v) { AppendFixed(v); }
  void AppendDate(Date v) { AppendFixed(v.days); }
  void AppendI64(int64_t v) { AppendFixed(v); }
  void AppendF64(double v) { AppendFixed(v); }
  /// Throws Error(kConversion) if `v` contains an embedded 0 byte.
  void AppendString(std::string_view v);

  /// Appends a datum of exactly this column's type; throws kInvalidArgument otherwise.
  void Append(const Datum& v);
  /// Parses text per this column's type; throws Error(kConversion).
  void AppendParsed(std::string_view text);
  /// Copies row `row` of `other` (same type) onto the end of this column.
  void AppendFrom(const ColumnBuffer& other, size_t row);

  int32_t I32(size_t row) const { return LoadFixed<int32_t>(row); }
  float F32(size_t row) const { return LoadFixed<float>(row); }
  Date D32(size_t row) const { return Date{LoadFixed<int32_t>(row)}; }
  int64_t I64(size_t row) const { return LoadFixed<int64_t>(row); }
  double F64(size_t row) const { return LoadFixed<double>(row); }
  std::string_view Str(size_t row) const;
  Datum Get(size_t row) const;

  std::span<const std::byte> fixed_bytes() const { return fixed_; }
  std::span<const uint32_t> offsets() const { return offsets_; }
  /// Raw pool including 0 terminators.
  std::string_view pool() const { return pool_; }

  /// Bytes this column occupies on the wire / in the heap (excluding padding).
  size_t payload_bytes() const;
  /// Writes the payload (fixed array, or offsets then pool) to `out`,
  /// which must be exactly payload_bytes() long.
  void WritePayload(std::span<std::byte> out) const;

  /// Rebuilds a column from a raw payload, validating the layout.
  /// Throws Error(kTruncated) when the payload is inconsistent.
  static ColumnBuffer FromPayload(std::string name, PhysType type, size_t rows,
                                  std::span<const std::byte> payload);

  /// Name, type and bit-exact payload equality.
  bool operator==(const ColumnBuffer& other) const;

 private:
  template <typename T>
  void AppendFixed(T v) {
    const size_t at = fixed_.size();
    fixed_.resize(at + sizeof(T));
    std::memcpy(fixed_.data() + at, &v, sizeof(T));
    ++rows_;
  }

  template <typename T>
  T LoadFixed(size_t row) const {
    T v;
    std::memcpy(&v, fixed_.data() + row * sizeof(T), sizeof(T));
    return v;
  }

  std::string name_;
  PhysType type_ = PhysType::kI32;
  size_t rows_ = 0;
  std::vector<std::byte> fixed_;
  std::vector<uint32_t> offsets_;
  std::string pool_;
};

}  // namespace heapsql
