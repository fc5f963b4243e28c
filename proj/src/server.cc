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

#include "heapsql/server.h"

#include <chrono>
#include <cmath>
#include <cstdlib>

#include <fmt/format.h>
#include <httplib.h>

#include "heapsql/mv_payload.h"
#include "heapsql/query_text.h"
#include "heapsql/status.h"
#include "heapsql/validate.h"

namespace heapsql {

namespace {

using Clock = std::chrono::steady_clock;

double MsSince(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

nlohmann::json Cell(const ColumnBuffer& c, size_t row) {
  switch (c.type()) {
    case PhysType::kI32: return c.I32(row);
    case PhysType::kI64: return c.I64(row);
    case PhysType::kD32: return FormatDate(c.D32(row));
    case PhysType::kStr: return std::string(c.Str(row));
    case PhysType::kF32:
    case PhysType::kF64: {
      const double v = c.type() == PhysType::kF32 ? c.F32(row) : c.F64(row);
      if (!std::isfinite(v)) return nullptr;
      return v;
    }
  }
  return nullptr;
}

nlohmann::json ErrorBody(ErrorCode code, const std::string& message) {
  return {{"error", std::string(ErrorCodeName(code))}, {"message", message}};
}

void SendJson(httplib::Response& res, int status, const nlohmann::json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

int StatusFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kOutOfHeap:
    case ErrorCode::kChainExhausted:
    case ErrorCode::kAllocationFailed: return 507;
    case ErrorCode::kFreeRejected: return 422;
    default: return 400;
  }
}

}  // namespace

size_t HeapBytesFromEnv() {
  size_t mb = 512;
  if (const char* v = std::getenv("AB_HEAP_MB")) {
    char* end = nullptr;
    const unsigned long long n = std::strtoull(v, &end, 10);
    if (end != v && *end == '\0' && n > 0) mb = static_cast<size_t>(n);
  }
  return mb << 20;
}

nlohmann::json ResultSetToJson(const ResultSet& rs) {
  nlohmann::json cols = nlohmann::json::array();
  for (const auto& c : rs.columns) {
    cols.push_back({{"name", c.name()}, {"type", std::string(PhysTypeName(c.type()))}});
  }
  nlohmann::json rows = nlohmann::json::array();
  for (size_t r = 0; r < rs.row_count(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (const auto& c : rs.columns) row.push_back(Cell(c, r));
    rows.push_back(std::move(row));
  }
  return {{"columns", std::move(cols)}, {"rows", std::move(rows)}, {"row_count", rs.row_count()}};
}

nlohmann::json Session::CatalogJson() {
  std::lock_guard<std::mutex> lock(mu_);
  nlohmann::json tables = nlohmann::json::array();
  for (const auto& name : db_.catalog.TableNames()) {
    const TableDescriptor& t = db_.catalog.Get(name);
    nlohmann::json cols = nlohmann::json::array();
    for (const auto& c : t.columns) {
      cols.push_back({{"name", c.name}, {"type", std::string(PhysTypeName(c.type))}});
    }
    tables.push_back({{"name", name}, {"rows", t.row_count}, {"columns", std::move(cols)}});
  }
  return {{"tables", std::move(tables)}};
}

ResultSet Session::Query(const QuerySpec& q, double* latency_ms, ExecStats* stats) {
  std::lock_guard<std::mutex> lock(mu_);
  const auto t0 = Clock::now();
  ResultSet rs = ExecuteQuery(q, db_, stats);
  if (latency_ms) *latency_ms = MsSince(t0);
  return rs;
}

FreeResponse Session::Free(const QuerySpec& q, const ColumnRef& column) {
  std::lock_guard<std::mutex> lock(mu_);
  FreeResponse out;
  out.definition = GenerateMvq(q, column, &db_.catalog);
  const auto t0 = Clock::now();
  out.view = ExecuteQuery(out.definition.mvq, db_);
  out.mvq_ms = MsSince(t0);
  out.payload = SerializeMV(out.view, &out.definition);
  views_[out.definition.name] = out.definition;
  return out;
}

std::map<std::string, MVDefinition> Session::views() {
  std::lock_guard<std::mutex> lock(mu_);
  return views_;
}

void RegisterRoutes(httplib::Server& server, Session& session) {
  server.Get("/catalog", [&session](const httplib::Request&, httplib::Response& res) {
    SendJson(res, 200, session.CatalogJson());
  });

  server.Post("/query", [&session](const httplib::Request& req, httplib::Response& res) {
    QuerySpec q;
    try {
      q = ParseQuery(req.body);
    } catch (const Error& e) {
      SendJson(res, 400, ErrorBody(e.code(), e.what()));
      return;
    }
    ValidationResult v;
    {
      std::lock_guard<std::mutex> lock(session.mutex());
      v = Validate(q, session.db().catalog);
    }
    if (!v.ok()) {
      nlohmann::json body = ErrorBody(v.code(), v.Message());
      nlohmann::json diags = nlohmann::json::array();
      for (const auto& d : v.diagnostics) {
        diags.push_back({{"code", std::string(ErrorCodeName(d.code))}, {"message", d.message}});
      }
      body["diagnostics"] = std::move(diags);
      SendJson(res, 400, body);
      return;
    }
    try {
      double ms = 0;
      const ResultSet rs = session.Query(q, &ms);
      nlohmann::json body = ResultSetToJson(rs);
      body["latency_ms"] = ms;
      res.set_header("X-Latency-Ms", fmt::format("{:.3f}", ms));
      SendJson(res, 200, body);
    } catch (const Error& e) {
      SendJson(res, StatusFor(e.code()), ErrorBody(e.code(), e.what()));
    }
  });

  server.Post("/free", [&session](const httplib::Request& req, httplib::Response& res) {
    QuerySpec q;
    ColumnRef col;
    try {
      const nlohmann::json j = nlohmann::json::parse(req.body);
      if (j.is_object() && j.contains("query")) {
        q = QueryFromJson(j.at("query"));
        if (j.contains("column")) q.free = ColumnRef::Parse(j.at("column").get<std::string>());
      } else {
        q = QueryFromJson(j);
      }
      if (!q.free) throw Error(ErrorCode::kMalformedQuery, "no column to free");
      col = *q.free;
      q.free.reset();
    } catch (const Error& e) {
      SendJson(res, 400, ErrorBody(e.code(), e.what()));
      return;
    } catch (const std::exception& e) {
      SendJson(res, 400, ErrorBody(ErrorCode::kMalformedQuery, e.what()));
      return;
    }
    try {
      const FreeResponse f = session.Free(q, col);
      res.status = 200;
      res.set_header("X-MVQ-Latency-Ms", fmt::format("{:.3f}", f.mvq_ms));
      res.set_header("X-MV-Rows", std::to_string(f.view.row_count()));
      res.set_header("X-MV-Name", f.definition.name);
      res.set_content(f.payload, "application/octet-stream");
    } catch (const Error& e) {
      SendJson(res, StatusFor(e.code()), ErrorBody(e.code(), e.what()));
    }
  });
}

}  // namespace heapsql
