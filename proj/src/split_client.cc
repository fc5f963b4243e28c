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

#include "heapsql/split_client.h"

#include "heapsql/status.h"

namespace heapsql {

ViewSession::ViewSession(size_t heap_bytes, std::string_view payload) : db_(heap_bytes) {
  MVPayload p = DeserializeMV(payload);
  if (!p.definition) throw Error(ErrorCode::kInvalidArgument, "payload carries no view definition");
  rows_ = LoadMV(db_, p).row_count;
  def_ = std::move(*p.definition);
}

ViewSession::ViewSession(size_t heap_bytes, const ResultSet& view, MVDefinition definition)
    : db_(heap_bytes), def_(std::move(definition)) {
  rows_ = LoadResultSet(db_.heap, db_.catalog, def_.name, view).row_count;
}

ResultSet ViewSession::Run(const QuerySpec& q_n, ExecStats* stats) {
  return ExecuteQuery(GenerateVq(q_n, def_), db_, stats);
}

}  // namespace heapsql
