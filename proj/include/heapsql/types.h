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

#include <bit>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "heapsql/date.h"

namespace heapsql {

static_assert(std::endian::native == std::endian::little,
              "column payloads are laid out little-endian");

// Physical column types. The numeric values are the ABMV1 wire codes and
// also the alternative index in Datum. I64/F64 only appear in aggregate
// outputs (result sets and the view tables built from them).
enum class PhysType : uint8_t {
  kI32 = 0,
  kF32 = 1,
  kD32 = 2,
  kStr = 3,
  kI64 = 4,
  kF64 = 5,
};

// One cell value. Alternative index == static_cast<size_t>(PhysType).
using Datum = std::variant<int32_t, float, Date, std::string, int64_t, double>;

std::string_view PhysTypeName(PhysType type);
std::optional<PhysType> PhysTypeFromName(std::string_view name);
std::optional<PhysType> PhysTypeFromCode(uint8_t code);

/// Width in bytes for fixed-width types; 0 for kStr.
size_t FixedWidth(PhysType type);

inline bool IsIntegral(PhysType t) { return t == PhysType::kI32 || t == PhysType::kI64; }
inline bool IsFloating(PhysType t) { return t == PhysType::kF32 || t == PhysType::kF64; }
inline bool IsNumeric(PhysType t) { return IsIntegral(t) || IsFloating(t); }

inline PhysType TypeOf(const Datum& d) { return static_cast<PhysType>(d.index()); }

/// Human-readable rendering (dates as YYYY-MM-DD, floats round-trippable).
std::string DatumToString(const Datum& d);

}  // namespace heapsql
