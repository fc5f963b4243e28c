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
#include <string_view>
#include <vector>

#include "heapsql/columnar_heap.h"

namespace heapsql {

/// murmur3 32-bit finalizer.
inline uint32_t Mix32(uint32_t h) {
  h ^= h >> 16;
  h *= 0x85ebca6bu;
  h ^= h >> 13;
  h *= 0xc2b2ae35u;
  h ^= h >> 16;
  return h;
}

inline uint32_t HashKey(int32_t key) { return Mix32(static_cast<uint32_t>(key)); }
inline uint32_t HashKey(int64_t key) {
  const auto u = static_cast<uint64_t>(key);
  return Mix32(static_cast<uint32_t>(u) ^ Mix32(static_cast<uint32_t>(u >> 32)));
}
uint32_t HashKey(double key);  // -0.0 and 0.0 hash alike
uint32_t HashBytes(std::string_view bytes);
inline uint32_t HashCombine(uint32_t seed, uint32_t h) {
  return Mix32(seed ^ (h + 0x9e3779b9u + (seed << 6) + (seed >> 2)));
}

/// Bucket of `hash` for a directory of mask+1 buckets.
inline uint32_t Bucket(uint32_t hash, uint32_t mask) { return hash & mask; }

// Chained hash table living in a ColumnarHeap segment. It stores record ids
// only; callers re-check key equality through the ids they get back.
//
// Segment layout (all offsets into the heap):
//   directory  capacity x u32   bucket head: node ordinal + 1, 0 = none
//   chain      node_count nodes of [entry_count, rid_0 .. rid_7, next]
//              (u32 each; `next` is a node ordinal + 1, 0 ends the chain)
//   validity   ceil(capacity / 8) bytes, bit b gates bucket b
//
// A bucket is live only while its validity bit is set, so Reset() clears
// the bitmap and nothing else; directory and chain bytes go stale. New
// nodes are pushed at the bucket head, so a chain reads newest node first.
class HashTable {
 public:
  static constexpr uint32_t kNodeCapacity = 8;
  static constexpr size_t kNodeWords = kNodeCapacity + 2;
  static constexpr size_t kNodeBytes = kNodeWords * sizeof(uint32_t);

  struct Sizing {
    uint32_t capacity = 1;
    uint32_t node_count = 1;
  };

  /// capacity = smallest power of two >= 2 * rows (at least 1);
  /// node_count = min(rows, capacity) + ceil(rows / 8) + 1.
  static Sizing SizeFor(size_t rows);
  static size_t SegmentBytes(const Sizing& s);

  /// Allocates the segment and resets it. Throws Error(kOutOfHeap).
  HashTable(ColumnarHeap& heap, Sizing sizing);
  HashTable(ColumnarHeap& heap, size_t rows) : HashTable(heap, SizeFor(rows)) {}

  uint32_t capacity() const { return capacity_; }
  uint32_t mask() const { return capacity_ - 1; }
  uint32_t node_count() const { return node_count_; }
  uint32_t nodes_used() const { return next_free_; }
  size_t directory_base() const { return directory_base_; }
  size_t validity_base() const { return validity_base_; }
  size_t chain_base() const { return chain_base_; }
  size_t validity_bytes() const { return (static_cast<size_t>(capacity_) + 7) / 8; }

  /// Clears every validity bit and rewinds the node cursor.
  void Reset();

  /// Throws Error(kChainExhausted) when the chain region is full.
  void Insert(uint32_t hash, uint32_t rid);
  void InsertKey(int32_t key, uint32_t rid) { Insert(HashKey(key), rid); }

  bool BucketValid(uint32_t bucket) const {
    return (validity()[bucket >> 3] >> (bucket & 7)) & 1;
  }

  // Iterates every rid stored in one bucket (a superset of the rids whose
  // key equals the probe key).
  class Cursor {
   public:
    bool Next(uint32_t* rid);

   private:
    friend class HashTable;
    const HashTable* table_ = nullptr;
    uint32_t node_ = 0;  // ordinal + 1
    uint32_t index_ = 0;
  };

  Cursor Probe(uint32_t hash) const;
  void Prefetch(uint32_t hash) const {
    const uint32_t b = Bucket(hash, mask());
    __builtin_prefetch(validity() + (b >> 3));
    __builtin_prefetch(directory() + b);
  }
  Cursor ProbeKey(int32_t key) const { return Probe(HashKey(key)); }

  /// Appends all rids of a bucket in insertion order.
  void CollectBucket(uint32_t bucket, std::vector<uint32_t>* out) const;

  /// Visits every distinct key once: scans the validity bitmap for live
  /// buckets, then partitions each bucket's rids with `same_key(a, b)`.
  /// `on_group(rids)` receives each group's rids in insertion order.
  template <typename SameKey, typename OnGroup>
  void ScanGroups(SameKey&& same_key, OnGroup&& on_group) const {
    std::vector<uint32_t> rids;
    std::vector<uint32_t> group;
    std::vector<uint32_t> rest;
    ForEachLiveBucket([&](uint32_t bucket) {
      rids.clear();
      CollectBucket(bucket, &rids);
      while (!rids.empty()) {
        group.clear();
        rest.clear();
        const uint32_t head = rids.front();
        for (uint32_t r : rids) (same_key(head, r) ? group : rest).push_back(r);
        on_group(std::span<const uint32_t>(group));
        rids.swap(rest);
      }
    });
  }

  template <typename Fn>
  void ForEachLiveBucket(Fn&& fn) const {
    const uint8_t* bits = validity();
    const size_t nbytes = validity_bytes();
    size_t i = 0;
    for (; i + 8 <= nbytes; i += 8) {
      uint64_t word;
      std::memcpy(&word, bits + i, 8);
      while (word) {
        const int b = __builtin_ctzll(word);
        fn(static_cast<uint32_t>(i * 8 + b));
        word &= word - 1;
      }
    }
    for (; i < nbytes; ++i) {
      for (int b = 0; b < 8; ++b) {
        const uint32_t bucket = static_cast<uint32_t>(i * 8 + b);
        if (bucket < capacity_ && ((bits[i] >> b) & 1)) fn(bucket);
      }
    }
  }

  // Write instrumentation.
  struct WriteStats {
    uint64_t reset_calls = 0;
    uint64_t last_reset_bytes = 0;
    uint64_t bitmap_bytes = 0;     // bytes written into the validity bitmap
    uint64_t rid_words = 0;        // record ids written into chain nodes
    uint64_t metadata_words = 0;   // entry counts, next links, directory heads
  };
  const WriteStats& stats() const { return stats_; }

  /// Testing hook: writes garbage into the directory and chain region.
  void ScribbleForTest(uint8_t byte);

 private:
  uint32_t* directory() { return heap_->At<uint32_t>(directory_base_); }
  const uint32_t* directory() const { return heap_->At<uint32_t>(directory_base_); }
  uint32_t* node(uint32_t ordinal) {
    return heap_->At<uint32_t>(chain_base_ + static_cast<size_t>(ordinal) * kNodeBytes);
  }
  const uint32_t* node(uint32_t ordinal) const {
    return heap_->At<uint32_t>(chain_base_ + static_cast<size_t>(ordinal) * kNodeBytes);
  }
  uint8_t* validity() { return reinterpret_cast<uint8_t*>(heap_->data() + validity_base_); }
  const uint8_t* validity() const {
    return reinterpret_cast<const uint8_t*>(heap_->data() + validity_base_);
  }
  uint32_t NewNode(uint32_t next);

  ColumnarHeap* heap_;
  uint32_t capacity_;
  uint32_t node_count_;
  size_t directory_base_ = 0;
  size_t chain_base_ = 0;
  size_t validity_base_ = 0;
  uint32_t next_free_ = 0;
  WriteStats stats_;
};

inline HashTable::Cursor HashTable::Probe(uint32_t hash) const {
  Cursor c;
  c.table_ = this;
  const uint32_t b = Bucket(hash, mask());
  c.node_ = BucketValid(b) ? directory()[b] : 0;
  c.index_ = 0;
  return c;
}

inline bool HashTable::Cursor::Next(uint32_t* rid) {
  while (node_) {
    const uint32_t* n = table_->node(node_ - 1);
    if (index_ < n[0]) {
      *rid = n[1 + index_++];
      return true;
    }
    node_ = n[kNodeCapacity + 1];
    index_ = 0;
  }
  return false;
}

}  // namespace heapsql
