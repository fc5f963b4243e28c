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

#include <string_view>

#include "heapsql/engine.h"
#include "heapsql/mv_payload.h"
#include "heapsql/split_rewriter.h"

namespace heapsql {

// Client side of split execution: holds one shipped view in a private heap
// and answers matching follow-up queries without the base tables.
class ViewSession {
 public:
  /// Decodes an ABMV1 payload that carries a view definition.
  ViewSession(size_t heap_bytes, std::string_view payload);
  ViewSession(size_t heap_bytes, const ResultSet& view, MVDefinition definition);

  const MVDefinition& definition() const { return def_; }
  size_t view_rows() const { return rows_; }
  Database& db() { return db_; }

  MatchReport Check(const QuerySpec& q_n) const { return Matches(q_n, def_); }
  QuerySpec Rewrite(const QuerySpec& q_n) const { return GenerateVq(q_n, def_); }

  /// Throws Error(kNoMatch) naming the failing condition.
  ResultSet Run(const QuerySpec& q_n, ExecStats* stats = nullptr);

 private:
  Database db_;
  MVDefinition def_;
  size_t rows_ = 0;
};

}  // namespace heapsql
