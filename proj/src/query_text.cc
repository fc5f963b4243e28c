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

#include "heapsql/query_text.h"

#include <fmt/format.h>

#include "heapsql/query_builder.h"
#include "heapsql/status.h"

namespace heapsql {

using nlohmann::json;

namespace {

[[noreturn]] void Malformed(const std::string& what) {
  throw Error(ErrorCode::kMalformedQuery, what);
}

const json& Field(const json& j, const char* key) {
  if (!j.is_object()) Malformed(fmt::format("expected an object with '{}'", key));
  auto it = j.find(key);
  if (it == j.end()) Malformed(fmt::format("missing field '{}' in {}", key, j.dump()));
  return *it;
}

std::string StringField(const json& j, const char* key) {
  const json& v = Field(j, key);
  if (!v.is_string()) Malformed(fmt::format("field '{}' must be a string", key));
  return v.get<std::string>();
}

ColumnRef ColumnFromJson(const json& j) {
  if (j.is_string()) return ColumnRef::Parse(j.get<std::string>());
  if (j.is_object() && j.contains("column")) return ColumnFromJson(j.at("column"));
  Malformed("expected a column reference, got " + j.dump());
}

json ColumnToJson(const ColumnRef& c) { return c.ToString(); }

json OrTermToJson(const OrTerm& t) {
  return std::visit([](const auto& x) { return PredicateToJson(Predicate(x)); }, t);
}

const json* OptionalList(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return nullptr;
  if (!it->is_array()) Malformed(fmt::format("field '{}' must be a list", key));
  return &*it;
}

}  // namespace

json LiteralToJson(const Literal& v) {
  return std::visit(
      [](const auto& x) -> json {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, int64_t>) {
          return {{"kind", "LitInt"}, {"value", x}};
        } else if constexpr (std::is_same_v<T, double>) {
          return {{"kind", "LitFloat"}, {"value", x}};
        } else if constexpr (std::is_same_v<T, Date>) {
          return {{"kind", "LitDate"}, {"value", FormatDate(x)}};
        } else {
          return {{"kind", "LitString"}, {"value", x}};
        }
      },
      v);
}

Literal LiteralFromJson(const json& j) {
  const std::string kind = StringField(j, "kind");
  const json& v = Field(j, "value");
  if (kind == "LitInt") {
    if (!v.is_number_integer()) Malformed("LitInt value must be an integer");
    return v.get<int64_t>();
  }
  if (kind == "LitFloat") {
    if (!v.is_number()) Malformed("LitFloat value must be a number");
    return v.get<double>();
  }
  if (kind == "LitDate") {
    if (!v.is_string()) Malformed("LitDate value must be a YYYY-MM-DD string");
    auto d = TryParseDate(v.get<std::string>());
    if (!d) Malformed("invalid date literal '" + v.get<std::string>() + "'");
    return *d;
  }
  if (kind == "LitString") {
    if (!v.is_string()) Malformed("LitString value must be a string");
    return v.get<std::string>();
  }
  Malformed("unknown literal kind '" + kind + "'");
}

json ExprToJson(const Expr& e) {
  if (!e) return nullptr;
  switch (e->kind) {
    case ExprKind::kColumn: return ColumnToJson(e->column);
    case ExprKind::kLiteral: return LiteralToJson(e->literal);
    case ExprKind::kArith:
      return {{"kind", "Arith"},
              {"op", ArithOpName(e->arith_op)},
              {"left", ExprToJson(e->left)},
              {"right", ExprToJson(e->right)}};
    case ExprKind::kAgg:
      return {{"kind", "Agg"}, {"fn", AggFnName(e->agg_fn)}, {"arg", ExprToJson(e->arg)}};
  }
  return nullptr;
}

Expr ExprFromJson(const json& j) {
  if (j.is_string()) return MakeColumn(ColumnRef::Parse(j.get<std::string>()));
  const std::string kind = StringField(j, "kind");
  if (kind == "ColumnRef") return MakeColumn(ColumnFromJson(Field(j, "column")));
  if (kind.rfind("Lit", 0) == 0) return MakeLiteral(LiteralFromJson(j));
  if (kind == "Arith") {
    auto op = ArithOpFromName(StringField(j, "op"));
    if (!op) Malformed("unknown arithmetic op in " + j.dump());
    return MakeArith(*op, ExprFromJson(Field(j, "left")), ExprFromJson(Field(j, "right")));
  }
  if (kind == "Agg") {
    auto fn = AggFnFromName(StringField(j, "fn"));
    if (!fn) Malformed("unknown aggregate in " + j.dump());
    auto it = j.find("arg");
    Expr arg = (it == j.end() || it->is_null()) ? nullptr : ExprFromJson(*it);
    if (!arg && *fn != AggFn::kCount) Malformed("only COUNT may omit its argument");
    return MakeAgg(*fn, std::move(arg));
  }
  Malformed("unknown expression kind '" + kind + "'");
}

json PredicateToJson(const Predicate& p) {
  return std::visit(
      [](const auto& x) -> json {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, CmpPred>) {
          return {{"kind", "Cmp"},
                  {"op", CmpOpName(x.op)},
                  {"column", ColumnToJson(x.column)},
                  {"value", LiteralToJson(x.value)}};
        } else if constexpr (std::is_same_v<T, BetweenPred>) {
          return {{"kind", "Between"},
                  {"column", ColumnToJson(x.column)},
                  {"lo", LiteralToJson(x.lo)},
                  {"hi", LiteralToJson(x.hi)}};
        } else if constexpr (std::is_same_v<T, IsInPred>) {
          return {{"kind", "IsIn"},
                  {"column", ColumnToJson(x.column)},
                  {"subquery", x.subquery ? QueryToJson(*x.subquery) : json(nullptr)}};
        } else if constexpr (std::is_same_v<T, OrPred>) {
          json terms = json::array();
          for (const auto& t : x.terms) terms.push_back(OrTermToJson(t));
          return {{"kind", "Or"}, {"terms", terms}};
        } else {
          return {{"kind", "ColumnCmp"},
                  {"op", CmpOpName(x.op)},
                  {"left", ColumnToJson(x.left)},
                  {"right", ColumnToJson(x.right)}};
        }
      },
      p);
}

Predicate PredicateFromJson(const json& j) {
  const std::string kind = StringField(j, "kind");
  if (kind == "Cmp" || kind == "ColumnCmp") {
    auto op = CmpOpFromName(StringField(j, "op"));
    if (!op) Malformed("unknown comparison op in " + j.dump());
    if (kind == "ColumnCmp") {
      return ColumnCmpPred{*op, ColumnFromJson(Field(j, "left")),
                           ColumnFromJson(Field(j, "right"))};
    }
    return CmpPred{*op, ColumnFromJson(Field(j, "column")), LiteralFromJson(Field(j, "value"))};
  }
  if (kind == "Between") {
    return BetweenPred{ColumnFromJson(Field(j, "column")), LiteralFromJson(Field(j, "lo")),
                       LiteralFromJson(Field(j, "hi"))};
  }
  if (kind == "IsIn") {
    return IsInPred{ColumnFromJson(Field(j, "column")),
                    std::make_shared<const QuerySpec>(QueryFromJson(Field(j, "subquery")))};
  }
  if (kind == "Or") {
    const json& terms = Field(j, "terms");
    if (!terms.is_array()) Malformed("Or terms must be a list");
    OrPred out;
    for (const auto& t : terms) {
      Predicate p = PredicateFromJson(t);
      if (auto* c = std::get_if<CmpPred>(&p)) {
        out.terms.emplace_back(*c);
      } else if (auto* b = std::get_if<BetweenPred>(&p)) {
        out.terms.emplace_back(*b);
      } else {
        Malformed("Or terms must be Cmp or Between");
      }
    }
    return out;
  }
  Malformed("unknown predicate kind '" + kind + "'");
}

json QueryToJson(const QuerySpec& q) {
  json j;
  json select = json::array();
  for (const auto& s : q.select) {
    json item = {{"expr", ExprToJson(s.expr)}};
    if (!s.alias.empty()) item["alias"] = s.alias;
    select.push_back(item);
  }
  j["select"] = select;
  json from = json::array();
  for (const auto& f : q.from) {
    if (f.subquery) {
      from.push_back({{"subquery", QueryToJson(*f.subquery)}, {"alias", f.alias}});
    } else {
      from.push_back({{"table", f.table}});
    }
  }
  j["from"] = from;
  json joins = json::array();
  for (const auto& jn : q.joins) {
    joins.push_back(
        {{"table", jn.table}, {"left", ColumnToJson(jn.left)}, {"right", ColumnToJson(jn.right)}});
  }
  j["joins"] = joins;
  json where = json::array();
  for (const auto& p : q.where) where.push_back(PredicateToJson(p));
  j["where"] = where;
  json group = json::array();
  for (const auto& g : q.group) group.push_back(ColumnToJson(g));
  j["group"] = group;
  json order = json::array();
  for (const auto& o : q.order) {
    order.push_back({{"key", o.key}, {"direction", o.descending ? "desc" : "asc"}});
  }
  j["order"] = order;
  if (q.limit) j["limit"] = *q.limit;
  if (q.free) j["free"] = ColumnToJson(*q.free);
  return j;
}

QuerySpec QueryFromJson(const json& j) {
  if (!j.is_object()) Malformed("a query must be a JSON object");
  QuerySpec q;
  if (const json* select = OptionalList(j, "select")) {
    for (const auto& s : *select) {
      SelectItem item;
      item.expr = ExprFromJson(Field(s, "expr"));
      if (auto it = s.find("alias"); it != s.end() && !it->is_null()) {
        if (!it->is_string()) Malformed("alias must be a string");
        item.alias = it->get<std::string>();
      }
      q.select.push_back(std::move(item));
    }
  }
  if (const json* from = OptionalList(j, "from")) {
    for (const auto& f : *from) {
      if (f.is_string()) {
        q.from.push_back(FromItem{f.get<std::string>(), nullptr, ""});
      } else if (f.is_object() && f.contains("subquery")) {
        q.from.push_back(FromItem{"",
                                  std::make_shared<const QuerySpec>(
                                      QueryFromJson(f.at("subquery"))),
                                  StringField(f, "alias")});
      } else {
        q.from.push_back(FromItem{StringField(f, "table"), nullptr, ""});
      }
    }
  }
  if (const json* joins = OptionalList(j, "joins")) {
    for (const auto& jn : *joins) {
      q.joins.push_back(JoinSpec{StringField(jn, "table"), ColumnFromJson(Field(jn, "left")),
                                 ColumnFromJson(Field(jn, "right"))});
    }
  }
  if (const json* where = OptionalList(j, "where")) {
    for (const auto& p : *where) q.where.push_back(PredicateFromJson(p));
  }
  if (const json* group = OptionalList(j, "group")) {
    for (const auto& g : *group) q.group.push_back(ColumnFromJson(g));
  }
  if (const json* order = OptionalList(j, "order")) {
    for (const auto& o : *order) {
      OrderItem item;
      if (o.is_string()) {
        item.key = o.get<std::string>();
      } else {
        item.key = StringField(o, "key");
        if (auto it = o.find("direction"); it != o.end()) {
          const std::string dir = it->is_string() ? it->get<std::string>() : "";
          if (dir != "asc" && dir != "desc") Malformed("order direction must be asc or desc");
          item.descending = dir == "desc";
        }
      }
      q.order.push_back(std::move(item));
    }
  }
  if (auto it = j.find("limit"); it != j.end() && !it->is_null()) {
    if (!it->is_number_unsigned() && !(it->is_number_integer() && it->get<int64_t>() >= 0)) {
      Malformed("limit must be a non-negative integer");
    }
    q.limit = it->get<uint64_t>();
  }
  if (auto it = j.find("free"); it != j.end() && !it->is_null()) {
    q.free = ColumnFromJson(*it);
  }
  AssignDefaultAliases(q);
  return q;
}

std::string SerializeQuery(const QuerySpec& q, int indent) {
  return QueryToJson(q).dump(indent);
}

QuerySpec ParseQuery(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    Malformed(std::string("invalid JSON: ") + e.what());
  }
  try {
    return QueryFromJson(j);
  } catch (const json::exception& e) {
    Malformed(std::string("malformed query: ") + e.what());
  }
}

}  // namespace heapsql
