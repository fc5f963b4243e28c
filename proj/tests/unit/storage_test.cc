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

#include <gtest/gtest.h>

#include <algorithm>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "heapsql/column_buffer.h"
#include "heapsql/columnar_heap.h"
#include "heapsql/date.h"
#include "heapsql/hash_table.h"
#include "heapsql/status.h"

namespace heapsql {
namespace {

ErrorCode CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kInvalidArgument;
}

// Reference civil-to-days conversion by counting whole years and months.
int64_t SlowDays(int y, int m, int d) {
  auto leap = [](int yr) { return (yr % 4 == 0 && yr % 100 != 0) || yr % 400 == 0; };
  static const int kMonth[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  int64_t days = 0;
  for (int yr = 1970; yr < y; ++yr) days += leap(yr) ? 366 : 365;
  for (int yr = y; yr < 1970; ++yr) days -= leap(yr) ? 366 : 365;
  for (int mo = 1; mo < m; ++mo) days += kMonth[mo - 1] + (mo == 2 && leap(y));
  return days + d - 1;
}

TEST(Date, KnownValues) {
  EXPECT_EQ(ParseDate("1970-01-01").days, 0);
  EXPECT_EQ(ParseDate("1969-12-31").days, -1);
  EXPECT_EQ(ParseDate("1994-01-01").days, 8766);
  EXPECT_EQ(ParseDate("1992-01-01").days, 8035);
  EXPECT_EQ(ParseDate("1998-12-01").days, 10561);
  EXPECT_EQ(ParseDate("2000-02-29").days, 11016);
  EXPECT_EQ(ParseDate("1900-03-01").days, -25508);
}

TEST(Date, MatchesSlowOracleAndRoundTrips) {
  for (int y = 1890; y <= 2030; ++y) {
    for (int m = 1; m <= 12; ++m) {
      for (int d : {1, 15, 28}) {
        const int32_t days = DaysFromCivil(y, m, d);
        ASSERT_EQ(days, SlowDays(y, m, d)) << y << "-" << m << "-" << d;
        ASSERT_EQ(ParseDate(FormatDate(Date{days})).days, days);
      }
    }
  }
  for (int32_t days = -40000; days <= 40000; days += 7) {
    ASSERT_EQ(ParseDate(FormatDate(Date{days})).days, days);
  }
}

TEST(Date, RejectsMalformed) {
  for (const char* bad : {"1994-13-01", "1994-02-30", "1993-02-29", "1994-1-01", "19940101",
                          "1994-01-01x", "", "abcd-ef-gh", "1994-00-10", "1994-04-31"}) {
    EXPECT_FALSE(TryParseDate(bad).has_value()) << bad;
  }
  EXPECT_EQ(CodeOf([] { ParseDate("1994-02-30"); }), ErrorCode::kConversion);
  EXPECT_TRUE(TryParseDate("1996-02-29").has_value());
}

TEST(Heap, AllocAlignsAndRewinds) {
  ColumnarHeap heap(1024);
  EXPECT_EQ(heap.Alloc(3, 1), 0u);
  EXPECT_EQ(heap.Alloc(4, 4), 4u);
  EXPECT_EQ(heap.Alloc(8, 8), 8u);
  EXPECT_EQ(heap.high_water(), 16u);
  {
    HeapScope scope(heap);
    heap.Alloc(500, 8);
    EXPECT_EQ(heap.high_water(), 516u);
  }
  EXPECT_EQ(heap.high_water(), 16u);
}

TEST(Heap, OutOfHeapIsHardError) {
  ColumnarHeap heap(64);
  heap.Alloc(60, 1);
  EXPECT_EQ(CodeOf([&] { heap.Alloc(8, 4); }), ErrorCode::kOutOfHeap);
  EXPECT_EQ(heap.high_water(), 60u);
  EXPECT_EQ(CodeOf([] { ColumnarHeap h(0); }), ErrorCode::kInvalidArgument);
}

TEST(ColumnBuffer, StringLayoutIsOffsetsIntoZeroTerminatedPool) {
  ColumnBuffer c("s", PhysType::kStr);
  c.AppendString("ab");
  c.AppendString("");
  c.AppendString("c");
  ASSERT_EQ(c.size(), 3u);
  EXPECT_EQ(std::vector<uint32_t>(c.offsets().begin(), c.offsets().end()),
            (std::vector<uint32_t>{0, 3, 4}));
  EXPECT_EQ(c.pool(), std::string_view("ab\0\0c\0", 6));
  EXPECT_EQ(c.Str(1), "");
  EXPECT_EQ(c.Str(2), "c");
  EXPECT_EQ(c.payload_bytes(), 3 * 4 + 6u);
  EXPECT_EQ(CodeOf([&] { c.AppendString(std::string_view("x\0y", 3)); }), ErrorCode::kConversion);
}

TEST(ColumnBuffer, ParsedAppendsAndTypeChecks) {
  ColumnBuffer d("d", PhysType::kD32);
  d.AppendParsed("1994-01-01");
  EXPECT_EQ(d.D32(0).days, 8766);
  ColumnBuffer f("f", PhysType::kF32);
  f.AppendParsed("0.05");
  EXPECT_EQ(f.F32(0), 0.05f);
  ColumnBuffer i("i", PhysType::kI32);
  EXPECT_EQ(CodeOf([&] { i.AppendParsed("12x"); }), ErrorCode::kConversion);
  EXPECT_EQ(CodeOf([&] { i.AppendParsed(""); }), ErrorCode::kConversion);
  EXPECT_EQ(CodeOf([&] { i.Append(Datum{1.5}); }), ErrorCode::kInvalidArgument);
}

TEST(Catalog, LoadLaysOutColumnsInOrderAndReadsBack) {
  Database db(1 << 16);
  ColumnBuffer a("a", PhysType::kI32), s("s", PhysType::kStr), d("d", PhysType::kD32);
  for (int r = 0; r < 5; ++r) {
    a.AppendI32(r * 10);
    s.AppendString(std::string(static_cast<size_t>(r), 'x'));
    d.AppendDate(Date{r - 2});
  }
  std::vector<ColumnBuffer> cols{a, s, d};
  const TableDescriptor t = LoadTable(db.heap, db.catalog, "t", cols);
  ASSERT_EQ(t.row_count, 5u);
  EXPECT_LT(t.columns[0].base_offset, t.columns[1].base_offset);
  EXPECT_LT(t.columns[1].base_offset, t.columns[1].pool_base);
  EXPECT_LT(t.columns[1].pool_base, t.columns[2].base_offset);
  EXPECT_EQ(ReadI32(db.heap, t.columns[0], 3), 30);
  EXPECT_EQ(ReadStr(db.heap, t.columns[1], 4), "xxxx");
  EXPECT_EQ(std::get<Date>(ColRead(db.heap, t, "d", 0)).days, -2);
  ColWrite(db.heap, t, "a", 2, Datum{int32_t{-7}});
  EXPECT_EQ(ReadI32(db.heap, t.columns[0], 2), -7);
  EXPECT_EQ(ExportColumn(db.heap, t.columns[1]), s);
  EXPECT_EQ(CodeOf([&] { LoadTable(db.heap, db.catalog, "t", cols); }),
            ErrorCode::kInvalidArgument);
}

TEST(Catalog, FailedLoadLeavesNoPartialTable) {
  Database db(64);
  ColumnBuffer a("a", PhysType::kI32), b("b", PhysType::kI32);
  for (int r = 0; r < 10; ++r) {
    a.AppendI32(r);
    b.AppendI32(r);
  }
  std::vector<ColumnBuffer> cols{a, b};
  EXPECT_EQ(CodeOf([&] { LoadTable(db.heap, db.catalog, "t", cols); }), ErrorCode::kOutOfHeap);
  EXPECT_EQ(db.heap.high_water(), 0u);
  EXPECT_EQ(db.catalog.Find("t"), nullptr);
}

// Independent murmur3 finalizer.
uint32_t RefFmix32(uint32_t h) {
  h ^= h >> 16;
  h = static_cast<uint32_t>(static_cast<uint64_t>(h) * 0x85ebca6bULL);
  h ^= h >> 13;
  h = static_cast<uint32_t>(static_cast<uint64_t>(h) * 0xc2b2ae35ULL);
  h ^= h >> 16;
  return h;
}

TEST(HashTable, BucketsFollowFmix32) {
  EXPECT_EQ(HashKey(int32_t{1}), 0x514e28b7u);
  EXPECT_EQ(HashKey(int32_t{17}), 0xd8d09ee8u);
  EXPECT_EQ(HashKey(int32_t{0}), 0u);
  for (int32_t k = -1000; k < 1000; ++k) {
    ASSERT_EQ(HashKey(k), RefFmix32(static_cast<uint32_t>(k)));
  }
  EXPECT_EQ(Bucket(HashKey(int32_t{1}), 15), 7u);
  EXPECT_EQ(Bucket(HashKey(int32_t{3}), 15), 7u);
  EXPECT_EQ(Bucket(HashKey(int32_t{17}), 15), 8u);
  EXPECT_EQ(HashKey(0.0), HashKey(-0.0));
}

std::vector<uint32_t> Drain(HashTable::Cursor c) {
  std::vector<uint32_t> out;
  uint32_t rid;
  while (c.Next(&rid)) out.push_back(rid);
  return out;
}

TEST(HashTable, CollidingKeysShareAChain) {
  ColumnarHeap heap(1 << 16);
  HashTable ht(heap, HashTable::Sizing{16, 8});
  ht.Reset();
  ht.InsertKey(1, 10);
  ht.InsertKey(3, 11);
  EXPECT_TRUE(ht.BucketValid(7));
  std::vector<uint32_t> got = Drain(ht.ProbeKey(1));
  std::sort(got.begin(), got.end());
  EXPECT_EQ(got, (std::vector<uint32_t>{10, 11}));
  EXPECT_TRUE(Drain(ht.ProbeKey(17)).empty());
  EXPECT_FALSE(ht.BucketValid(8));
}

TEST(HashTable, SizingAndResetBytes) {
  EXPECT_EQ(HashTable::SizeFor(1000).capacity, 2048u);
  EXPECT_EQ(HashTable::SizeFor(1024).capacity, 2048u);
  EXPECT_EQ(HashTable::SizeFor(1025).capacity, 4096u);
  ColumnarHeap heap(size_t{64} << 20);
  HashTable ht(heap, HashTable::Sizing{1u << 21, 16});
  ht.Reset();
  EXPECT_EQ(ht.stats().last_reset_bytes, 262144u);
  EXPECT_EQ(CodeOf([&] { HashTable bad(heap, HashTable::Sizing{2621440, 16}); }),
            ErrorCode::kInvalidArgument);
  HashTable odd(heap, HashTable::Sizing{4, 4});
  odd.Reset();
  EXPECT_EQ(odd.stats().last_reset_bytes, 1u);
}

TEST(HashTable, ResetInvalidatesWithoutTouchingChains) {
  ColumnarHeap heap(1 << 16);
  HashTable ht(heap, size_t{64});
  ht.Reset();
  for (uint32_t r = 0; r < 64; ++r) ht.InsertKey(static_cast<int32_t>(r), r);
  const uint64_t rid_words = ht.stats().rid_words;
  EXPECT_EQ(rid_words, 64u);
  ht.Reset();
  EXPECT_EQ(ht.stats().rid_words, rid_words);
  for (int32_t k = 0; k < 64; ++k) EXPECT_TRUE(Drain(ht.ProbeKey(k)).empty());
}

TEST(HashTable, ChainExhaustionFailsFast) {
  ColumnarHeap heap(1 << 16);
  HashTable ht(heap, HashTable::Sizing{4, 2});
  ht.Reset();
  for (uint32_t r = 0; r < 16; ++r) ht.Insert(0, r);
  EXPECT_EQ(CodeOf([&] { ht.Insert(0, 16); }), ErrorCode::kChainExhausted);
}

// Random insert / probe / reset against a multimap oracle. Stale directory and
// chain bytes are scribbled after each reset; only the bitmap may gate them.
TEST(HashTable, PropertyAgainstMapOracle) {
  std::mt19937_64 rng(42);
  ColumnarHeap heap(size_t{16} << 20);
  const size_t rows = 4096;
  HashTable ht(heap, rows);
  ht.Reset();
  std::map<int32_t, std::multiset<uint32_t>> oracle;
  size_t inserted = 0;
  std::uniform_int_distribution<int32_t> key(-500, 500);
  for (int op = 0; op < 20000; ++op) {
    const int kind = static_cast<int>(rng() % 100);
    if (kind < 1) {
      ht.Reset();
      ht.ScribbleForTest(0xA5);
      oracle.clear();
      inserted = 0;
    } else if (kind < 50 && inserted < rows) {
      const int32_t k = key(rng);
      const auto rid = static_cast<uint32_t>(rng() % 1000000);
      ht.InsertKey(k, rid);
      oracle[k].insert(rid);
      ++inserted;
    } else {
      const int32_t k = key(rng);
      std::multiset<uint32_t> got;
      for (uint32_t r : Drain(ht.ProbeKey(k))) got.insert(r);
      const auto it = oracle.find(k);
      if (it != oracle.end()) {
        for (uint32_t r : it->second) {
          auto pos = got.find(r);
          ASSERT_NE(pos, got.end()) << "missing rid for key " << k;
          got.erase(pos);
        }
      }
      // The rest must belong to colliding keys.
      const uint32_t b = Bucket(HashKey(k), ht.mask());
      for (uint32_t r : got) {
        bool explained = false;
        for (const auto& [ok, rs] : oracle) {
          explained |= Bucket(HashKey(ok), ht.mask()) == b && rs.count(r);
        }
        ASSERT_TRUE(explained) << "phantom rid " << r;
      }
    }
  }
}

}  // namespace
}  // namespace heapsql
