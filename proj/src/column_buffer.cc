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

#include "heapsql/column_buffer.h"

#include <charconv>
#include <cmath>

#include <fmt/format.h>

#include "heapsql/status.h"

namespace heapsql {

std::string_view PhysTypeName(PhysType type) {
  switch (type) {
    case PhysType::kI32: return "I32";
    case PhysType::kF32: return "F32";
    case PhysType::kD32: return "D32";
    case PhysType::kStr: return "STR";
    case PhysType::kI64: return "I64";
    case PhysType::kF64: return "F64";
  }
  return "?";
}

std::optional<PhysType> PhysTypeFromName(std::string_view name) {
  for (uint8_t code = 0; code <= 5; ++code) {
    auto t = static_cast<PhysType>(code);
    if (PhysTypeName(t) == name) return t;
  }
  return std::nullopt;
}

std::optional<PhysType> PhysTypeFromCode(uint8_t code) {
  if (code > 5) return std::nullopt;
  return static_cast<PhysType>(code);
}

size_t FixedWidth(PhysType type) {
  switch (type) {
    case PhysType::kI32:
    case PhysType::kF32:
    case PhysType::kD32:
      return 4;
    case PhysType::kI64:
    case PhysType::kF64:
      return 8;
    case PhysType::kStr:
      return 0;
  }
  return 0;
}

std::string DatumToString(const Datum& d) {
  switch (TypeOf(d)) {
    case PhysType::kI32: return std::to_string(std::get<int32_t>(d));
    case PhysType::kF32: return fmt::format("{}", std::get<float>(d));
    case PhysType::kD32: return FormatDate(std::get<Date>(d));
    case PhysType::kStr: return std::get<std::string>(d);
    case PhysType::kI64: return std::to_string(std::get<int64_t>(d));
    case PhysType::kF64: return fmt::format("{}", std::get<double>(d));
  }
  return {};
}

ColumnBuffer::ColumnBuffer(std::string name, PhysType type)
    : name_(std::move(name)), type_(type) {}

void ColumnBuffer::Reserve(size_t rows) {
  if (type_ == PhysType::kStr) {
    offsets_.reserve(rows);
  } else {
    fixed_.reserve(rows * FixedWidth(type_));
  }
}

void ColumnBuffer::AppendString(std::string_view v) {
  if (v.find('\0') != std::string_view::npos) {
    throw Error(ErrorCode::kConversion, "string values may not contain a 0 byte");
  }
  offsets_.push_back(static_cast<uint32_t>(pool_.size()));
  pool_.append(v);
  pool_.push_back('\0');
  ++rows_;
}

void ColumnBuffer::Append(const Datum& v) {
  if (TypeOf(v) != type_) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("column '{}' is {} but value is {}", name_, PhysTypeName(type_),
                            PhysTypeName(TypeOf(v))));
  }
  switch (type_) {
    case PhysType::kI32: AppendI32(std::get<int32_t>(v)); break;
    case PhysType::kF32: AppendF32(std::get<float>(v)); break;
    case PhysType::kD32: AppendDate(std::get<Date>(v)); break;
    case PhysType::kStr: AppendString(std::get<std::string>(v)); break;
    case PhysType::kI64: AppendI64(std::get<int64_t>(v)); break;
    case PhysType::kF64: AppendF64(std::get<double>(v)); break;
  }
}

namespace {

template <typename T>
bool ParseNumber(std::string_view text, T& out) {
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc() && ptr == end;
}

}  // namespace

void ColumnBuffer::AppendParsed(std::string_view text) {
  bool ok = true;
  switch (type_) {
    case PhysType::kI32: {
      int32_t v = 0;
      ok = ParseNumber(text, v);
      if (ok) AppendI32(v);
      break;
    }
    case PhysType::kF32: {
      float v = 0;
      ok = ParseNumber(text, v) && std::isfinite(v);
      if (ok) AppendF32(v);
      break;
    }
    case PhysType::kD32: {
      auto d = TryParseDate(text);
      ok = d.has_value();
      if (ok) AppendDate(*d);
      break;
    }
    case PhysType::kStr:
      if (text.empty()) {
        throw Error(ErrorCode::kConversion, "empty cell (NULLs are not supported)");
      }
      AppendString(text);
      break;
    case PhysType::kI64: {
      int64_t v = 0;
      ok = ParseNumber(text, v);
      if (ok) AppendI64(v);
      break;
    }
    case PhysType::kF64: {
      double v = 0;
      ok = ParseNumber(text, v) && std::isfinite(v);
      if (ok) AppendF64(v);
      break;
    }
  }
  if (!ok) {
    throw Error(ErrorCode::kConversion,
                fmt::format("cannot convert '{}' to {}", text, PhysTypeName(type_)));
  }
}

void ColumnBuffer::AppendFrom(const ColumnBuffer& other, size_t row) {
  if (type_ == PhysType::kStr) {
    AppendString(other.Str(row));
    return;
  }
  const size_t w = FixedWidth(type_);
  const size_t at = fixed_.size();
  fixed_.resize(at + w);
  std::memcpy(fixed_.data() + at, other.fixed_.data() + row * w, w);
  ++rows_;
}

std::string_view ColumnBuffer::Str(size_t row) const {
  const uint32_t begin = offsets_[row];
  const uint32_t end = row + 1 < rows_ ? offsets_[row + 1] : static_cast<uint32_t>(pool_.size());
  return std::string_view(pool_).substr(begin, end - begin - 1);
}

Datum ColumnBuffer::Get(size_t row) const {
  switch (type_) {
    case PhysType::kI32: return I32(row);
    case PhysType::kF32: return F32(row);
    case PhysType::kD32: return D32(row);
    case PhysType::kStr: return std::string(Str(row));
    case PhysType::kI64: return I64(row);
    case PhysType::kF64: return F64(row);
  }
  return {};
}

size_t ColumnBuffer::payload_bytes() const {
  if (type_ == PhysType::kStr) return offsets_.size() * sizeof(uint32_t) + pool_.size();
  return fixed_.size();
}

void ColumnBuffer::WritePayload(std::span<std::byte> out) const {
  if (type_ != PhysType::kStr) {
    if (!fixed_.empty()) std::memcpy(out.data(), fixed_.data(), fixed_.size());
    return;
  }
  const size_t offset_bytes = offsets_.size() * sizeof(uint32_t);
  if (offset_bytes) std::memcpy(out.data(), offsets_.data(), offset_bytes);
  if (!pool_.empty()) std::memcpy(out.data() + offset_bytes, pool_.data(), pool_.size());
}

ColumnBuffer ColumnBuffer::FromPayload(std::string name, PhysType type, size_t rows,
                                       std::span<const std::byte> payload) {
  ColumnBuffer col(std::move(name), type);
  col.rows_ = rows;
  if (type != PhysType::kStr) {
    if (payload.size() != rows * FixedWidth(type)) {
      throw Error(ErrorCode::kTruncated,
                  fmt::format("column '{}': payload of {} bytes does not hold {} {} values",
                              col.name_, payload.size(), rows, PhysTypeName(type)));
    }
    col.fixed_.assign(payload.begin(), payload.end());
    return col;
  }
  const size_t offset_bytes = rows * sizeof(uint32_t);
  if (payload.size() < offset_bytes) {
    throw Error(ErrorCode::kTruncated,
                fmt::format("column '{}': string offsets exceed payload", col.name_));
  }
  col.offsets_.resize(rows);
  if (offset_bytes) std::memcpy(col.offsets_.data(), payload.data(), offset_bytes);
  col.pool_.assign(reinterpret_cast<const char*>(payload.data()) + offset_bytes,
                   payload.size() - offset_bytes);
  // Offsets must start at 0, increase strictly, and each string must end in a 0 byte.
  uint32_t expect = 0;
  for (size_t i = 0; i < rows; ++i) {
    if (col.offsets_[i] != expect) {
      throw Error(ErrorCode::kTruncated,
                  fmt::format("column '{}': bad string offset at row {}", col.name_, i));
    }
    const size_t term = col.pool_.find('\0', expect);
    if (term == std::string::npos) {
      throw Error(ErrorCode::kTruncated,
                  fmt::format("column '{}': unterminated string at row {}", col.name_, i));
    }
    expect = static_cast<uint32_t>(term + 1);
  }
  if (expect != col.pool_.size()) {
    throw Error(ErrorCode::kTruncated,
                fmt::format("column '{}': trailing bytes in string pool", col.name_));
  }
  return col;
}

bool ColumnBuffer::operator==(const ColumnBuffer& other) const {
  return name_ == other.name_ && type_ == other.type_ && rows_ == other.rows_ &&
         fixed_ == other.fixed_ && offsets_ == other.offsets_ && pool_ == other.pool_;
}

}  // namespace heapsql
