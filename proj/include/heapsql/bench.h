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
#include <vector>

#include <json.hpp>

#include "heapsql/engine.h"

namespace heapsql {

// A query template plus the column the analyst frees.
struct Scenario {
  std::string id;
  std::string description;
  QuerySpec query;
  ColumnRef free;
};

/// Single-join analogs of the TPC-H exploration scenarios (Q1a ... Q21b).
std::vector<Scenario> TpchScenarios();

nlohmann::json ScenariosToJson(const std::vector<Scenario>& s);
std::vector<Scenario> ScenariosFromJson(const nlohmann::json& j);
std::vector<Scenario> LoadScenarioFile(const std::string& path);

/// Smallest k >= 1 with k*direct >= mvq + copy + k*view; nullopt when the
/// view query is not cheaper than the direct query.
std::optional<uint64_t> Breakeven(double direct_ms, double mvq_ms, double copy_ms,
                                  double view_ms);

struct BenchRecord {
  std::string id;
  std::string free_col;
  std::string rejected;  // non-empty when the column cannot be freed
  double direct_ms = 0;
  double mvq_ms = 0;
  uint64_t mv_rows = 0;
  uint64_t mv_bytes = 0;
  double copy_ms = 0;  // serialize + deserialize + client load
  double view_ms = 0;
  std::optional<uint64_t> breakeven;
  bool results_equal = false;
};

/// Runs `warmup` unmeasured and `runs` measured repetitions of each phase and
/// takes the median. The follow-up is the original query answered from the view.
BenchRecord RunScenario(Database& db, const Scenario& s, int warmup = 5, int runs = 5);

std::string FormatBenchTable(const std::vector<BenchRecord>& records);

struct MicroRecord {
  std::string name;
  std::string predicate;
  uint64_t rows = 0;
  uint64_t matched = 0;
  double ms = 0;
  double rows_per_sec = 0;
};

/// COUNT(*) filters on `o_shippriority == 0`, `o_totalprice > 555.5` and
/// `o_orderpriority == '1-URGENT'` over an orders-shaped table.
std::vector<MicroRecord> RunMicro(Database& db, const std::string& table = "orders",
                                  int warmup = 5, int runs = 5);

std::string FormatMicroTable(const std::vector<MicroRecord>& records);

}  // namespace heapsql
