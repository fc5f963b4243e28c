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
#include <optional>
#include <string>
#include <string_view>

#include "heapsql/result_set.h"
#include "heapsql/split_rewriter.h"

namespace heapsql {

// ABMV1 binary layout, all integers little-endian, no padding:
//
//   "ABMV"            4 bytes
//   version           u16 (1)
//   column count      u16
//   per column:
//     name length     u16
//     name            bytes
//     phys type       u8   (I32=0 F32=1 D32=2 STR=3 I64=4 F64=5)
//     row count       u32
//     payload length  u32
//     payload         fixed-width values, or u32 offsets then the
//                     0-terminated string pool
//   definition length u32 (0: none)
//   definition        JSON text of the view definition
//   crc32             u32 over every preceding byte
inline constexpr uint16_t kMvPayloadVersion = 1;

struct MVPayload {
  ResultSet result;
  std::optional<MVDefinition> definition;
};

/// Exact encoded size: 4 + 2 + 2 + sum(2 + name + 1 + 4 + 4 + payload) + 4 + def + 4.
size_t EncodedSize(const ResultSet& rs, size_t definition_bytes);

std::string SerializeMV(const ResultSet& rs, const MVDefinition* definition = nullptr);

/// Throws kTruncated, kBadMagic, kBadChecksum or kVersionUnsupported.
MVPayload DeserializeMV(std::string_view bytes);

/// Registers the payload as a heap table named after its definition (or
/// `name` when given).
TableDescriptor LoadMV(Database& db, const MVPayload& payload, std::string name = "");

}  // namespace heapsql
