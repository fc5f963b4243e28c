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

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <httplib.h>

#include "heapsql/bench.h"
#include "heapsql/datagen.h"
#include "heapsql/mv_payload.h"
#include "heapsql/query_text.h"
#include "heapsql/server.h"
#include "heapsql/split_rewriter.h"
#include "heapsql/status.h"

#ifndef HEAPSQL_DEFAULT_DATA_DIR
#define HEAPSQL_DEFAULT_DATA_DIR "data/tpch-sf0.01"
#endif

namespace {

using heapsql::Database;

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw heapsql::Error(heapsql::ErrorCode::kIo, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteFile(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw heapsql::Error(heapsql::ErrorCode::kIo, "cannot write " + path);
  out << bytes;
}

void Load(heapsql::Session& s, const std::string& dir) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto names = heapsql::LoadTpchDir(s.db(), dir);
  const double ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  std::cerr << fmt::format("loaded {} tables from {} in {:.1f} ms (heap {:.1f} MiB used)\n",
                           names.size(), dir, ms, s.db().heap.high_water() / 1048576.0);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"heapsql: columnar in-heap SQL engine with split execution"};
  app.require_subcommand(1);
  std::string dir = HEAPSQL_DEFAULT_DATA_DIR;

  auto* load = app.add_subcommand("load", "Load .tbl files and print the catalog");
  std::string scale_note;
  load->add_option("--dir", dir, "Directory of <table>.tbl[.gz] files");
  load->add_option("--scale-note", scale_note, "Free-form scale factor label");

  auto* query = app.add_subcommand("query", "Run a JSON query spec");
  std::string spec_path;
  int max_rows = 50;
  query->add_option("--spec", spec_path, "Query spec file")->required();
  query->add_option("--dir", dir, "Data directory");
  query->add_option("--max-rows", max_rows, "Rows to print");

  auto* free = app.add_subcommand("free", "Build and export the view for a freed column");
  std::string column, out_path;
  free->add_option("--spec", spec_path, "Query spec file")->required();
  free->add_option("--column", column, "Column to free (defaults to the spec's free)");
  free->add_option("--out", out_path, "ABMV1 output file")->required();
  free->add_option("--dir", dir, "Data directory");

  auto* micro = app.add_subcommand("bench-micro", "Filter microbenchmarks over orders");
  micro->add_option("--dir", dir, "Data directory");

  auto* split = app.add_subcommand("bench-split", "Split-execution scenarios");
  std::string scenario_path;
  int runs = 5;
  split->add_option("--scenarios", scenario_path, "Scenario file (default: built-in set)");
  split->add_option("--dir", dir, "Data directory");
  split->add_option("--runs", runs, "Warmup and measured runs per phase");

  auto* dump = app.add_subcommand("dump-scenarios", "Write the built-in scenario set as JSON");
  dump->add_option("--out", out_path, "Output file")->required();

  auto* serve = app.add_subcommand("serve", "HTTP API: /catalog, /query, /free");
  int port = 8080;
  std::string host = "127.0.0.1";
  serve->add_option("--port", port, "Port");
  serve->add_option("--host", host, "Bind address");
  serve->add_option("--dir", dir, "Data directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*dump) {
      WriteFile(out_path, heapsql::ScenariosToJson(heapsql::TpchScenarios()).dump(2) + "\n");
      return 0;
    }
    heapsql::Session session(heapsql::HeapBytesFromEnv());
    Load(session, dir);

    if (*load) {
      if (!scale_note.empty()) std::cout << "scale: " << scale_note << "\n";
      std::cout << session.CatalogJson().dump(2) << "\n";
    } else if (*query) {
      const heapsql::QuerySpec q = heapsql::ParseQuery(ReadFile(spec_path));
      double ms = 0;
      const heapsql::ResultSet rs = session.Query(q, &ms);
      std::cout << heapsql::FormatResultSet(rs, static_cast<size_t>(max_rows));
      std::cout << fmt::format("latency: {:.3f} ms\n", ms);
    } else if (*free) {
      heapsql::QuerySpec q = heapsql::ParseQuery(ReadFile(spec_path));
      heapsql::ColumnRef col;
      if (!column.empty()) {
        col = heapsql::ColumnRef::Parse(column);
      } else if (q.free) {
        col = *q.free;
      } else {
        throw heapsql::Error(heapsql::ErrorCode::kInvalidArgument, "no column to free");
      }
      q.free.reset();
      const heapsql::FreeResponse f = session.Free(q, col);
      WriteFile(out_path, f.payload);
      std::cout << heapsql::ToSql(f.definition.mvq) << "\n";
      std::cout << fmt::format("view {}: {} rows, {} bytes, mvq {:.3f} ms\n", f.definition.name,
                               f.view.row_count(), f.payload.size(), f.mvq_ms);
    } else if (*micro) {
      std::cout << heapsql::FormatMicroTable(heapsql::RunMicro(session.db()));
    } else if (*split) {
      const auto scenarios = scenario_path.empty() ? heapsql::TpchScenarios()
                                                   : heapsql::LoadScenarioFile(scenario_path);
      std::vector<heapsql::BenchRecord> records;
      for (const auto& s : scenarios) {
        records.push_back(heapsql::RunScenario(session.db(), s, runs, runs));
      }
      std::cout << heapsql::FormatBenchTable(records);
    } else if (*serve) {
      httplib::Server server;
      heapsql::RegisterRoutes(server, session);
      std::cerr << fmt::format("listening on {}:{}\n", host, port);
      if (!server.listen(host, port)) {
        std::cerr << "cannot bind " << host << ":" << port << "\n";
        return 1;
      }
    }
  } catch (const heapsql::Error& e) {
    std::cerr << "error [" << heapsql::ErrorCodeName(e.code()) << "]: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
