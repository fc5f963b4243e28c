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

#include <string>
#include <string_view>

#include <json.hpp>

#include "heapsql/query.h"

namespace heapsql {

// JSON text form of QuerySpec.
//
//   {
//     "select": [{"expr": {"kind": "Agg", "fn": "SUM", "arg": {"kind": "Arith",
//                 "op": "mul", "left": "l_extendedprice", "right": "l_discount"}},
//                 "alias": "revenue"}],
//     "from":   [{"table": "lineitem"}],
//     "joins":  [],
//     "where":  [{"kind": "Between", "column": "l_discount",
//                 "lo": {"kind": "LitFloat", "value": 0.05},
//                 "hi": {"kind": "LitFloat", "value": 0.07}}],
//     "group":  [],
//     "order":  [{"key": "revenue", "direction": "desc"}],
//     "limit":  10,
//     "free":   "l_shipdate"
//   }
//
// Column references are strings ("name" or "table.name"); inside expressions
// the object form {"kind": "ColumnRef", "column": "..."} is also accepted.
// Literals are {"kind": "LitInt"|"LitFloat"|"LitDate"|"LitString", "value": ...}
// with dates written as "YYYY-MM-DD". Predicate kinds are Cmp, Between, IsIn,
// Or and ColumnCmp; comparison ops are lt, le, gt, ge, eq, ne. Omitted lists
// are empty.

nlohmann::json LiteralToJson(const Literal& v);
nlohmann::json ExprToJson(const Expr& e);
nlohmann::json PredicateToJson(const Predicate& p);
nlohmann::json QueryToJson(const QuerySpec& q);

/// All parsers throw Error(kMalformedQuery) naming the offending field.
Literal LiteralFromJson(const nlohmann::json& j);
Expr ExprFromJson(const nlohmann::json& j);
Predicate PredicateFromJson(const nlohmann::json& j);
QuerySpec QueryFromJson(const nlohmann::json& j);

std::string SerializeQuery(const QuerySpec& q, int indent = 2);
QuerySpec ParseQuery(std::string_view text);

}  // namespace heapsql
