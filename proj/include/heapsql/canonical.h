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
#include <string>
#include <string_view>

#include "heapsql/query.h"

namespace heapsql {

// Deterministic normal form. WHERE is sorted by (column, text); operands of
// + and * are ordered; OR terms are sorted; GROUP BY is sorted and
// deduplicated; column-vs-column comparisons put the smaller name on the
// left; subqueries are normalized recursively. SELECT order and aliases are
// kept. No semantic folding: `a < 5` and `a <= 4` stay distinct.
Expr Canonicalize(const Expr& e);
Predicate Canonicalize(const Predicate& p);
QuerySpec Canonicalize(const QuerySpec& q);

/// Text of the canonical form; equal strings mean equal specs.
std::string CanonicalText(const QuerySpec& q);
bool StructurallyEqual(const QuerySpec& a, const QuerySpec& b);
bool StructurallyEqual(const Predicate& a, const Predicate& b);
bool StructurallyEqual(const Expr& a, const Expr& b);

uint64_t Fnv1a64(std::string_view bytes);
/// FNV-1a 64 of CanonicalText.
uint64_t Fingerprint(const QuerySpec& q);

}  // namespace heapsql
