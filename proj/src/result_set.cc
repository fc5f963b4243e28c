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

#include "heapsql/result_set.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

namespace heapsql {

const ColumnBuffer* ResultSet::Find(std::string_view name) const {
  for (const auto& c : columns) {
    if (c.name() == name) return &c;
  }
  return nullptr;
}

TableSchema ResultSet::schema() const {
  TableSchema out;
  for (const auto& c : columns) out.push_back({c.name(), c.type()});
  return out;
}

size_t ResultSet::payload_bytes() const {
  size_t n = 0;
  for (const auto& c : columns) n += c.payload_bytes();
  return n;
}

std::string FormatResultSet(const ResultSet& rs, size_t max_rows) {
  const size_t rows = std::min(rs.row_count(), max_rows);
  std::vector<std::vector<std::string>> cells(rs.columns.size());
  std::vector<size_t> width(rs.columns.size());
  for (size_t c = 0; c < rs.columns.size(); ++c) {
    width[c] = rs.columns[c].name().size();
    for (size_t r = 0; r < rows; ++r) {
      cells[c].push_back(DatumToString(rs.columns[c].Get(r)));
      width[c] = std::max(width[c], cells[c].back().size());
    }
  }
  std::string out;
  for (size_t c = 0; c < rs.columns.size(); ++c) {
    out += fmt::format("{}{:<{}}", c ? " | " : "", rs.columns[c].name(), width[c]);
  }
  out += "\n";
  for (size_t c = 0; c < rs.columns.size(); ++c) {
    out += (c ? "-+-" : "") + std::string(width[c], '-');
  }
  out += "\n";
  for (size_t r = 0; r < rows; ++r) {
    for (size_t c = 0; c < rs.columns.size(); ++c) {
      out += fmt::format("{}{:<{}}", c ? " | " : "", cells[c][r], width[c]);
    }
    out += "\n";
  }
  if (rows < rs.row_count()) out += fmt::format("... {} more rows\n", rs.row_count() - rows);
  out += fmt::format("({} rows)\n", rs.row_count());
  return out;
}

namespace {

bool FloatClose(double x, double y, double rel_tol) {
  if (std::isnan(x) || std::isnan(y)) return std::isnan(x) && std::isnan(y);
  if (x == y) return true;
  return std::fabs(x - y) <= rel_tol * std::max(std::fabs(x), std::fabs(y));
}

double FloatAt(const ColumnBuffer& c, size_t r) {
  return c.type() == PhysType::kF32 ? c.F32(r) : c.F64(r);
}

int CompareExact(const ColumnBuffer& c, size_t a, const ColumnBuffer& d, size_t b) {
  switch (c.type()) {
    case PhysType::kI32: return (c.I32(a) > d.I32(b)) - (c.I32(a) < d.I32(b));
    case PhysType::kD32: return (c.D32(a).days > d.D32(b).days) - (c.D32(a).days < d.D32(b).days);
    case PhysType::kI64: return (c.I64(a) > d.I64(b)) - (c.I64(a) < d.I64(b));
    case PhysType::kStr: {
      const int k = c.Str(a).compare(d.Str(b));
      return (k > 0) - (k < 0);
    }
    case PhysType::kF32:
    case PhysType::kF64: {
      const double x = FloatAt(c, a), y = FloatAt(d, b);
      if (std::isnan(x) || std::isnan(y)) return std::isnan(x) - std::isnan(y);
      return (x > y) - (x < y);
    }
  }
  return 0;
}

std::vector<size_t> RowOrder(const ResultSet& rs) {
  std::vector<size_t> perm(rs.row_count());
  std::iota(perm.begin(), perm.end(), size_t{0});
  // Exact columns first so float noise does not reorder rows.
  std::vector<const ColumnBuffer*> keys;
  for (const auto& c : rs.columns) {
    if (!IsFloating(c.type())) keys.push_back(&c);
  }
  for (const auto& c : rs.columns) {
    if (IsFloating(c.type())) keys.push_back(&c);
  }
  std::stable_sort(perm.begin(), perm.end(), [&](size_t a, size_t b) {
    for (const auto* c : keys) {
      const int k = CompareExact(*c, a, *c, b);
      if (k != 0) return k < 0;
    }
    return false;
  });
  return perm;
}

}  // namespace

bool ResultsEquivalent(const ResultSet& a, const ResultSet& b, double rel_tol, bool ordered,
                       std::string* why) {
  auto fail = [&](std::string msg) {
    if (why) *why = std::move(msg);
    return false;
  };
  if (a.column_count() != b.column_count()) {
    return fail(fmt::format("column count {} vs {}", a.column_count(), b.column_count()));
  }
  for (size_t c = 0; c < a.column_count(); ++c) {
    if (a.columns[c].name() != b.columns[c].name() || a.columns[c].type() != b.columns[c].type()) {
      return fail(fmt::format("column {}: {} {} vs {} {}", c, a.columns[c].name(),
                              PhysTypeName(a.columns[c].type()), b.columns[c].name(),
                              PhysTypeName(b.columns[c].type())));
    }
  }
  if (a.row_count() != b.row_count()) {
    return fail(fmt::format("row count {} vs {}", a.row_count(), b.row_count()));
  }
  std::vector<size_t> pa(a.row_count()), pb(b.row_count());
  if (ordered) {
    std::iota(pa.begin(), pa.end(), size_t{0});
    std::iota(pb.begin(), pb.end(), size_t{0});
  } else {
    pa = RowOrder(a);
    pb = RowOrder(b);
  }
  for (size_t i = 0; i < pa.size(); ++i) {
    for (size_t c = 0; c < a.column_count(); ++c) {
      const ColumnBuffer& x = a.columns[c];
      const ColumnBuffer& y = b.columns[c];
      const bool same = IsFloating(x.type())
                            ? FloatClose(FloatAt(x, pa[i]), FloatAt(y, pb[i]), rel_tol)
                            : CompareExact(x, pa[i], y, pb[i]) == 0;
      if (!same) {
        return fail(fmt::format("row {} column {}: {} vs {}", i, x.name(),
                                DatumToString(x.Get(pa[i])), DatumToString(y.Get(pb[i]))));
      }
    }
  }
  return true;
}

}  // namespace heapsql
