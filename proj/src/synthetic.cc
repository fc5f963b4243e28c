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

#include <algorithm>
#include <cmath>
#include <random>

#include "heapsql/datagen.h"
#include "heapsql/date.h"

namespace heapsql {

namespace {

constexpr int32_t kEpoch1992 = 8035;  // 1992-01-01

int64_t Uniform(std::mt19937_64& rng, int64_t lo, int64_t hi) {
  return std::uniform_int_distribution<int64_t>(lo, hi)(rng);
}

double Unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

const std::vector<std::string>& SyntheticCategories() {
  static const std::vector<std::string> kCats = {"AUTOMOBILE", "BUILDING", "FURNITURE",
                                                 "HOUSEHOLD", "MACHINERY"};
  return kCats;
}

std::vector<ColumnBuffer> GenerateSynthetic(uint64_t seed, size_t rows, std::string_view prefix) {
  std::mt19937_64 rng(seed);
  const std::string p(prefix);
  ColumnBuffer id(p + "id", PhysType::kI32), small(p + "small", PhysType::kI32),
      large(p + "large", PhysType::kI32), key(p + "key", PhysType::kI32),
      fval(p + "fval", PhysType::kF32), date(p + "date", PhysType::kD32),
      cat(p + "cat", PhysType::kStr), big(p + "big", PhysType::kI64),
      dval(p + "dval", PhysType::kF64);

  // Every small value appears at least once when rows allow it.
  std::vector<int32_t> smalls(rows);
  for (size_t i = 0; i < rows; ++i) {
    smalls[i] = i < static_cast<size_t>(kSmallCardinality)
                    ? static_cast<int32_t>(i)
                    : static_cast<int32_t>(Uniform(rng, 0, kSmallCardinality - 1));
  }
  std::shuffle(smalls.begin(), smalls.end(), rng);

  const auto& cats = SyntheticCategories();
  for (size_t i = 0; i < rows; ++i) {
    id.AppendI32(static_cast<int32_t>(i));
    small.AppendI32(smalls[i]);
    large.AppendI32(static_cast<int32_t>(Uniform(rng, 0, kLargeRange - 1)));
    key.AppendI32(static_cast<int32_t>(Uniform(rng, 0, kJoinKeys - 1)));
    fval.AppendF32(static_cast<float>(Unit(rng)));
    date.AppendDate(Date{kEpoch1992 + static_cast<int32_t>(Uniform(rng, 0, kDateSpanDays - 1))});
    cat.AppendString(cats[static_cast<size_t>(Uniform(rng, 0, 4))]);
    big.AppendI64(Uniform(rng, -1000000000000LL, 1000000000000LL));
    dval.AppendF64(Unit(rng));
  }
  std::vector<ColumnBuffer> out;
  for (auto* c : {&id, &small, &large, &key, &fval, &date, &cat, &big, &dval}) {
    out.push_back(std::move(*c));
  }
  return out;
}

TableDescriptor LoadSynthetic(Database& db, const std::string& name, uint64_t seed, size_t rows,
                              std::string_view prefix) {
  const auto cols = GenerateSynthetic(seed, rows, prefix);
  return LoadTable(db.heap, db.catalog, name, cols);
}

std::vector<ColumnBuffer> GenerateLineitemLike(uint64_t seed, size_t rows) {
  std::mt19937_64 rng(seed);
  ColumnBuffer orderkey("l_orderkey", PhysType::kI32), quantity("l_quantity", PhysType::kF32),
      price("l_extendedprice", PhysType::kF32), discount("l_discount", PhysType::kF32),
      tax("l_tax", PhysType::kF32), flag("l_returnflag", PhysType::kStr),
      status("l_linestatus", PhysType::kStr), shipdate("l_shipdate", PhysType::kD32),
      shipmode("l_shipmode", PhysType::kStr);
  static const char* kModes[] = {"AIR", "FOB", "MAIL", "RAIL", "REG AIR", "SHIP", "TRUCK"};
  static const char* kFlags[] = {"A", "N", "R"};
  const int32_t first_ship = kEpoch1992 + 1;   // 1992-01-02
  const int32_t last_ship = 10561;             // 1998-12-01
  for (size_t i = 0; i < rows; ++i) {
    orderkey.AppendI32(static_cast<int32_t>(i / 4 + 1));
    const int64_t q = Uniform(rng, 1, 50);
    quantity.AppendF32(static_cast<float>(q));
    const double unit = 900.0 + static_cast<double>(Uniform(rng, 0, 110000)) / 100.0;
    price.AppendF32(static_cast<float>(std::round(unit * static_cast<double>(q) * 100.0) / 100.0));
    discount.AppendF32(static_cast<float>(Uniform(rng, 0, 10)) / 100.0f);
    tax.AppendF32(static_cast<float>(Uniform(rng, 0, 8)) / 100.0f);
    flag.AppendString(kFlags[Uniform(rng, 0, 2)]);
    const int32_t ship = static_cast<int32_t>(Uniform(rng, first_ship, last_ship));
    shipdate.AppendDate(Date{ship});
    status.AppendString(ship > 9298 ? "O" : "F");  // after 1995-06-17
    shipmode.AppendString(kModes[Uniform(rng, 0, 6)]);
  }
  std::vector<ColumnBuffer> out;
  for (auto* c : {&orderkey, &quantity, &price, &discount, &tax, &flag, &status, &shipdate,
                  &shipmode}) {
    out.push_back(std::move(*c));
  }
  return out;
}

}  // namespace heapsql
