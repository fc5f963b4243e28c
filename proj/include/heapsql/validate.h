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

#include <optional>
#include <string>
#include <vector>

#include "heapsql/columnar_heap.h"
#include "heapsql/query.h"
#include "heapsql/status.h"

namespace heapsql {

struct Diagnostic {
  ErrorCode code = ErrorCode::kValidation;
  std::string message;
};

struct ValidationResult {
  std::vector<Diagnostic> diagnostics;
  TableSchema output;  // filled when ok()

  bool ok() const { return diagnostics.empty(); }
  /// kUnsupportedShape if any diagnostic has it, else the first code.
  ErrorCode code() const;
  std::string Message() const;
};

// Column name resolution over the (at most two) sources of one query level.
// Unqualified names must be unique across the sources.
class Scope {
 public:
  struct Resolved {
    int source = 0;
    int column = 0;
    PhysType type = PhysType::kI32;
  };

  void AddSource(std::string name, TableSchema columns);
  size_t source_count() const { return sources_.size(); }
  const std::string& source_name(int i) const { return sources_[i].name; }
  const TableSchema& source_columns(int i) const { return sources_[i].columns; }

  /// On failure returns nullopt and sets `error`.
  std::optional<Resolved> Resolve(const ColumnRef& ref, Diagnostic* error) const;

 private:
  struct Source {
    std::string name;
    TableSchema columns;
  };
  std::vector<Source> sources_;
};

/// Result type of a literal: LitInt I64, LitFloat F64, LitDate D32, LitString STR.
PhysType LiteralType(const Literal& v);

/// Type of `e` under `scope`; appends diagnostics and returns nullopt on error.
std::optional<PhysType> InferExprType(const Expr& e, const Scope& scope,
                                      std::vector<Diagnostic>* diags);

/// Builds the scope of `spec`'s FROM/JOIN sources (validating FROM subqueries).
Scope BuildScope(const QuerySpec& spec, const Catalog& catalog, std::vector<Diagnostic>* diags);

/// Never throws; every problem becomes a diagnostic.
ValidationResult Validate(const QuerySpec& spec, const Catalog& catalog);

/// Throws Error(kValidation / kUnsupportedShape / kUnknownColumn ...) with all
/// diagnostics when `spec` is invalid.
TableSchema InferOutputSchema(const QuerySpec& spec, const Catalog& catalog);

}  // namespace heapsql
