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

#include <map>
#include <mutex>
#include <string>

#include <json.hpp>

#include "heapsql/engine.h"
#include "heapsql/split_rewriter.h"

namespace httplib {
class Server;
}

namespace heapsql {

/// Heap capacity from AB_HEAP_MB (default 512 MiB).
size_t HeapBytesFromEnv();

/// Result rows as JSON: {"columns":[{"name","type"}], "rows":[[...]], "row_count"}.
/// Dates are "YYYY-MM-DD"; NaN becomes null.
nlohmann::json ResultSetToJson(const ResultSet& rs);

struct FreeResponse {
  MVDefinition definition;
  ResultSet view;
  std::string payload;  // ABMV1
  double mvq_ms = 0;
};

// The warehouse side: one heap and catalog, plus the views handed out.
// Every operation holds the session lock, so at most one plan runs at a time.
class Session {
 public:
  explicit Session(size_t heap_bytes) : db_(heap_bytes) {}

  Database& db() { return db_; }
  std::mutex& mutex() { return mu_; }

  nlohmann::json CatalogJson();
  ResultSet Query(const QuerySpec& q, double* latency_ms, ExecStats* stats = nullptr);
  /// Throws Error(kFreeRejected) or a validation error.
  FreeResponse Free(const QuerySpec& q, const ColumnRef& column);
  std::map<std::string, MVDefinition> views();

 private:
  std::mutex mu_;
  Database db_;
  std::map<std::string, MVDefinition> views_;
};

/// GET /catalog, POST /query, POST /free.
void RegisterRoutes(httplib::Server& server, Session& session);

}  // namespace heapsql
