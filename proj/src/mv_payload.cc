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

#include "heapsql/mv_payload.h"

#include <cstring>
#include <limits>

#include <fmt/format.h>
#include <zlib.h>

#include "heapsql/engine.h"
#include "heapsql/status.h"

namespace heapsql {

namespace {

constexpr char kMagic[4] = {'A', 'B', 'M', 'V'};

template <typename T>
void Put(std::string& out, T v) {
  for (size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<char>((static_cast<uint64_t>(v) >> (8 * i)) & 0xff));
  }
}

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  template <typename T>
  T Get() {
    Need(sizeof(T));
    uint64_t v = 0;
    for (size_t i = 0; i < sizeof(T); ++i) {
      v |= static_cast<uint64_t>(static_cast<uint8_t>(bytes_[pos_ + i])) << (8 * i);
    }
    pos_ += sizeof(T);
    return static_cast<T>(v);
  }

  std::string_view Take(size_t n) {
    Need(n);
    const std::string_view s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  size_t pos() const { return pos_; }

 private:
  void Need(size_t n) const {
    if (bytes_.size() - pos_ < n) {
      throw Error(ErrorCode::kTruncated,
                  fmt::format("payload truncated at byte {} (need {} more)", pos_, n));
    }
  }

  std::string_view bytes_;
  size_t pos_ = 0;
};

uint32_t Crc(std::string_view bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed in slices.
  while (!bytes.empty()) {
    const size_t n = std::min<size_t>(bytes.size(), 1u << 30);
    crc = crc32(crc, reinterpret_cast<const Bytef*>(bytes.data()), static_cast<uInt>(n));
    bytes.remove_prefix(n);
  }
  return static_cast<uint32_t>(crc);
}

}  // namespace

size_t EncodedSize(const ResultSet& rs, size_t definition_bytes) {
  size_t n = 4 + 2 + 2;
  for (const auto& c : rs.columns) n += 2 + c.name().size() + 1 + 4 + 4 + c.payload_bytes();
  return n + 4 + definition_bytes + 4;
}

std::string SerializeMV(const ResultSet& rs, const MVDefinition* definition) {
  if (rs.columns.size() > std::numeric_limits<uint16_t>::max()) {
    throw Error(ErrorCode::kInvalidArgument, "too many columns for ABMV1");
  }
  const std::string def = definition ? MVDefinitionToJson(*definition).dump() : "";
  std::string out;
  out.reserve(EncodedSize(rs, def.size()));
  out.append(kMagic, 4);
  Put<uint16_t>(out, kMvPayloadVersion);
  Put<uint16_t>(out, static_cast<uint16_t>(rs.columns.size()));
  for (const auto& c : rs.columns) {
    if (c.name().size() > std::numeric_limits<uint16_t>::max()) {
      throw Error(ErrorCode::kInvalidArgument, "column name too long for ABMV1");
    }
    const size_t bytes = c.payload_bytes();
    if (c.size() > std::numeric_limits<uint32_t>::max() ||
        bytes > std::numeric_limits<uint32_t>::max()) {
      throw Error(ErrorCode::kInvalidArgument, "column too large for ABMV1");
    }
    Put<uint16_t>(out, static_cast<uint16_t>(c.name().size()));
    out.append(c.name());
    Put<uint8_t>(out, static_cast<uint8_t>(c.type()));
    Put<uint32_t>(out, static_cast<uint32_t>(c.size()));
    Put<uint32_t>(out, static_cast<uint32_t>(bytes));
    const size_t at = out.size();
    out.resize(at + bytes);
    c.WritePayload(std::span<std::byte>(reinterpret_cast<std::byte*>(out.data() + at), bytes));
  }
  Put<uint32_t>(out, static_cast<uint32_t>(def.size()));
  out.append(def);
  Put<uint32_t>(out, Crc(out));
  return out;
}

MVPayload DeserializeMV(std::string_view bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw Error(ErrorCode::kBadMagic, "not an ABMV payload");
  }
  if (bytes.size() < 4 + 2 + 2 + 4 + 4) {
    throw Error(ErrorCode::kTruncated, fmt::format("payload of {} bytes is too short", bytes.size()));
  }
  const std::string_view body = bytes.substr(0, bytes.size() - 4);
  const uint32_t stored = Reader(bytes.substr(bytes.size() - 4)).Get<uint32_t>();
  const uint32_t actual = Crc(body);
  if (stored != actual) {
    throw Error(ErrorCode::kBadChecksum,
                fmt::format("checksum mismatch: stored {:08x}, computed {:08x}", stored, actual));
  }
  Reader r(body);
  r.Take(4);
  const uint16_t version = r.Get<uint16_t>();
  if (version != kMvPayloadVersion) {
    throw Error(ErrorCode::kVersionUnsupported, fmt::format("ABMV version {} unsupported", version));
  }
  const uint16_t ncols = r.Get<uint16_t>();
  MVPayload out;
  for (uint16_t i = 0; i < ncols; ++i) {
    const uint16_t name_len = r.Get<uint16_t>();
    std::string name(r.Take(name_len));
    const uint8_t code = r.Get<uint8_t>();
    const auto type = PhysTypeFromCode(code);
    if (!type) throw Error(ErrorCode::kTruncated, fmt::format("bad type code {}", code));
    const uint32_t rows = r.Get<uint32_t>();
    const uint32_t len = r.Get<uint32_t>();
    const std::string_view payload = r.Take(len);
    out.result.columns.push_back(ColumnBuffer::FromPayload(
        std::move(name), *type, rows,
        std::span<const std::byte>(reinterpret_cast<const std::byte*>(payload.data()), len)));
  }
  const uint32_t def_len = r.Get<uint32_t>();
  const std::string_view def = r.Take(def_len);
  if (r.pos() != body.size()) {
    throw Error(ErrorCode::kTruncated,
                fmt::format("{} trailing bytes after definition", body.size() - r.pos()));
  }
  if (def_len > 0) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(def);
    } catch (const std::exception& e) {
      throw Error(ErrorCode::kMalformedQuery, std::string("bad embedded definition: ") + e.what());
    }
    out.definition = MVDefinitionFromJson(j);
  }
  return out;
}

TableDescriptor LoadMV(Database& db, const MVPayload& payload, std::string name) {
  if (name.empty()) {
    if (!payload.definition) throw Error(ErrorCode::kInvalidArgument, "payload has no view name");
    name = payload.definition->name;
  }
  return LoadResultSet(db.heap, db.catalog, std::move(name), payload.result);
}

}  // namespace heapsql
