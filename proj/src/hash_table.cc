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

#include "heapsql/hash_table.h"

#include <algorithm>
#include <bit>

#include <fmt/format.h>

#include "heapsql/status.h"

namespace heapsql {

uint32_t HashKey(double key) {
  if (key == 0.0) key = 0.0;
  uint64_t bits;
  std::memcpy(&bits, &key, sizeof bits);
  return HashKey(static_cast<int64_t>(bits));
}

uint32_t HashBytes(std::string_view bytes) {
  // FNV-1a, finalized by the same mixer as integer keys.
  uint32_t h = 2166136261u;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 16777619u;
  }
  return Mix32(h);
}

HashTable::Sizing HashTable::SizeFor(size_t rows) {
  if (rows > (size_t{1} << 30)) {
    throw Error(ErrorCode::kInvalidArgument, fmt::format("{} rows exceed hash table limits", rows));
  }
  Sizing s;
  s.capacity = static_cast<uint32_t>(std::bit_ceil(std::max<size_t>(2 * rows, 1)));
  s.node_count = static_cast<uint32_t>(std::min<size_t>(rows, s.capacity) +
                                       (rows + kNodeCapacity - 1) / kNodeCapacity + 1);
  return s;
}

size_t HashTable::SegmentBytes(const Sizing& s) {
  return static_cast<size_t>(s.capacity) * 4 + static_cast<size_t>(s.node_count) * kNodeBytes +
         (static_cast<size_t>(s.capacity) + 7) / 8;
}

HashTable::HashTable(ColumnarHeap& heap, Sizing sizing)
    : heap_(&heap), capacity_(sizing.capacity), node_count_(sizing.node_count) {
  if (!std::has_single_bit(capacity_)) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("hash capacity {} is not a power of two", capacity_));
  }
  directory_base_ = heap.Alloc(static_cast<size_t>(capacity_) * 4, 4);
  chain_base_ = heap.Alloc(static_cast<size_t>(node_count_) * kNodeBytes, 4);
  validity_base_ = heap.Alloc(validity_bytes(), 8);
  Reset();
}

void HashTable::Reset() {
  std::memset(validity(), 0, validity_bytes());
  next_free_ = 0;
  ++stats_.reset_calls;
  stats_.last_reset_bytes = validity_bytes();
  stats_.bitmap_bytes += validity_bytes();
}

uint32_t HashTable::NewNode(uint32_t next) {
  if (next_free_ >= node_count_) {
    throw Error(ErrorCode::kChainExhausted,
                fmt::format("hash chain region exhausted ({} nodes)", node_count_));
  }
  const uint32_t ordinal = next_free_++;
  uint32_t* n = node(ordinal);
  n[0] = 0;
  n[kNodeCapacity + 1] = next;
  stats_.metadata_words += 2;
  return ordinal;
}

void HashTable::Insert(uint32_t hash, uint32_t rid) {
  const uint32_t b = Bucket(hash, mask());
  uint8_t& byte = validity()[b >> 3];
  const uint8_t bit = static_cast<uint8_t>(1u << (b & 7));
  uint32_t head;
  if (!(byte & bit)) {
    head = NewNode(0);
    directory()[b] = head + 1;
    byte |= bit;
    ++stats_.bitmap_bytes;
    ++stats_.metadata_words;
  } else {
    head = directory()[b] - 1;
    if (node(head)[0] == kNodeCapacity) {
      head = NewNode(head + 1);
      directory()[b] = head + 1;
      ++stats_.metadata_words;
    }
  }
  uint32_t* n = node(head);
  n[1 + n[0]] = rid;
  ++n[0];
  ++stats_.rid_words;
  ++stats_.metadata_words;
}

void HashTable::CollectBucket(uint32_t bucket, std::vector<uint32_t>* out) const {
  if (!BucketValid(bucket)) return;
  // Nodes are newest first; gather them, then emit oldest first.
  uint32_t chain[64];
  std::vector<uint32_t> long_chain;
  size_t count = 0;
  for (uint32_t n = directory()[bucket]; n; n = node(n - 1)[kNodeCapacity + 1]) {
    if (count < 64) {
      chain[count] = n - 1;
    } else {
      if (long_chain.empty()) long_chain.assign(chain, chain + 64);
      long_chain.push_back(n - 1);
    }
    ++count;
  }
  const uint32_t* order = long_chain.empty() ? chain : long_chain.data();
  for (size_t i = count; i-- > 0;) {
    const uint32_t* n = node(order[i]);
    out->insert(out->end(), n + 1, n + 1 + n[0]);
  }
}

void HashTable::ScribbleForTest(uint8_t byte) {
  std::memset(heap_->data() + directory_base_, byte, static_cast<size_t>(capacity_) * 4);
  std::memset(heap_->data() + chain_base_, byte, static_cast<size_t>(node_count_) * kNodeBytes);
}

}  // namespace heapsql
