// SPDX-FileCopyrightText: (c) 2026 The VectorMesh Simulator Authors
//
// SPDX-License-Identifier: Apache-2.0

// vmesh: list workloads, print schedules, simulate cells and sweep matrices.

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "vmesh/runspec.hpp"

namespace fs = std::filesystem;
using namespace vmesh;

namespace {

struct Flags {
  std::string config;
  std::vector<std::string> archs;
  std::vector<std::string> workloads;
  std::vector<int> pes;
  std::string out;
  bool trace = false;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<Index> spatial;
  std::vector<Index> tile;
  std::vector<std::size_t> axes;
};

void add_flags(CLI::App* app, Flags& f) {
  app->add_option("--config", f.config, "JSON run specification");
  app->add_option("--arch", f.archs, "vectormesh, systolic or row-stationary (repeatable)");
  app->add_option("--workload", f.workloads,
                  "catalog name, suite:classic, suite:all or gemm:M,N,K (repeatable)");
  app->add_option("--pes", f.pes, "PE count: 128 or 512 (repeatable)");
  app->add_option("--out", f.out, "output directory");
  app->add_flag("--trace", f.trace, "write per-cycle trace files");
  app->add_option("--seed", f.seed, "input data seed");
  app->add_option("--workers", f.workers, "concurrent cells");
  app->add_option("--spatial", f.spatial, "feature-map edge for catalog convolutions");
  app->add_option("--tile", f.tile, "tile extents, one per NDRange index")->delimiter(',');
  app->add_option("--axes", f.axes, "mesh row,col NDRange indices")->delimiter(',')->expected(2);
}

RunSpec resolve(const Flags& f, bool sweep_defaults) {
  RunSpec s;
  const bool from_file = !f.config.empty();
  if (from_file) s = load_run_spec(f.config);
  if (sweep_defaults && !from_file) {
    s.archs = {"vectormesh", "systolic", "row-stationary"};
    s.pes = {128, 512};
    s.workloads = {"suite:classic"};
  }
  if (!f.archs.empty()) s.archs = f.archs;
  if (!f.workloads.empty()) s.workloads = f.workloads;
  if (!f.pes.empty()) s.pes = f.pes;
  if (!f.out.empty()) s.out = f.out;
  if (f.trace) s.trace = true;
  if (f.seed) s.seed = *f.seed;
  if (f.workers) s.workers = *f.workers;
  if (f.spatial) s.spatial = *f.spatial;
  if (!f.tile.empty()) s.tile = f.tile;
  if (!f.axes.empty()) s.assignment = AxisAssignment{f.axes[0], f.axes[1]};
  for (const auto& a : s.archs)
    if (a != "vectormesh" && a != "systolic" && a != "row-stationary")
      throw ConfigError("unknown arch '" + a + "'");
  for (int p : s.pes)
    if (p != 128 && p != 512) throw ConfigError("--pes must be 128 or 512, got " + std::to_string(p));
  if (s.workers < 1) throw ConfigError("workers must be >= 1");
  return s;
}

int cmd_list(const std::string& filter, Index spatial) {
  std::cout << "name,group,type,stride,kernel,channels\n";
  for (const auto& e : catalog_entries(spatial)) {
    if (!filter.empty() && e.name.find(filter) == std::string::npos) continue;
    std::cout << e.name << ',' << e.group << ',' << to_string(e.kind) << ',' << e.stride << ',';
    if (e.kind == WorkloadKind::Gemm)
      std::cout << "-," << e.gemm_m << 'x' << e.gemm_n << 'x' << e.gemm_k << '\n';
    else
      std::cout << e.k_w << 'x' << e.k_h << ',' << e.c_in << "->" << e.c_out << '\n';
  }
  return kExitOk;
}

int cmd_schedule(const RunSpec& s) {
  for (int p : s.pes) {
    const ArchConfig cfg = resolve_vm_config(s, p);
    for (const auto& e : resolve_workloads(s)) {
      const Workload w = e.build();
      const MeshPlan plan = plan_for_mesh(w, cfg.plan_target(), s.tile, s.assignment);
      write_plan_json(std::cout, w, plan);
    }
  }
  return kExitOk;
}

struct CellFiles {
  fs::path dir, stats, manifest, trace;
};

CellFiles files_for(const RunSpec& s, const Cell& c) {
  CellFiles f;
  f.dir = fs::path(s.out) / "cells" / cell_slug(c);
  f.stats = f.dir / "stats.csv";
  f.manifest = f.dir / "manifest.json";
  f.trace = f.dir / "trace.csv";
  return f;
}

void write_manifest(const RunSpec& s, const Cell& c, const CellFiles& f, const std::string& hash) {
  std::ofstream m(f.manifest);
  m << "{\"manifest_hash\":\"" << hash << "\",\"manifest\":" << cell_manifest(s, c) << "}\n";
}

int status_code(const std::string& status) {
  if (status == "config-error") return kExitConfig;
  if (status == "unsupported") return kExitUnsupported;
  if (status == "internal-error") return kExitInternal;
  return status == "ok" ? kExitOk : kExitFailure;
}

// Runs one cell and writes its files; errors become the outcome status.
CellOutcome execute(const RunSpec& s, const Cell& c) {
  const CellFiles f = files_for(s, c);
  fs::create_directories(f.dir);
  CellOutcome o;
  o.cell = c;
  try {
    o.manifest_hash = sha256_hex(cell_manifest(s, c));
    write_manifest(s, c, f, o.manifest_hash);
    if (s.trace) {
      std::ofstream t(f.trace);
      o = run_cell(s, c, &t);
    } else {
      o = run_cell(s, c);
    }
  } catch (const ConfigError& e) {
    o.status = "config-error";
    o.message = e.what();
  } catch (const UnsupportedWorkload& e) {
    o.status = "unsupported";
    o.message = e.what();
  } catch (const InternalError& e) {
    o.status = "internal-error";
    o.message = e.what();
  }
  std::ofstream st(f.stats);
  write_stats(st, o);
  return o;
}

std::string combined_hash(std::vector<std::string> hashes) {
  std::sort(hashes.begin(), hashes.end());
  std::string all;
  for (const auto& h : hashes) all += h + '\n';
  return sha256_hex(all);
}

void write_reports(const fs::path& out, const std::vector<ReportRow>& rows,
                   const std::vector<std::string>& hashes) {
  const std::string tag = "# manifest_hash=" + combined_hash(hashes) + '\n';
  std::vector<std::pair<std::string, int>> keys;
  for (const auto& r : rows)
    if (std::find(keys.begin(), keys.end(), std::pair{r.arch, r.pes}) == keys.end())
      keys.emplace_back(r.arch, r.pes);
  std::vector<SuiteSummary> sums;
  for (const auto& [a, p] : keys) sums.push_back(summarize(rows, a, p));
  std::ofstream rep(out / "report.csv"), sum(out / "summary.csv"), roof(out / "roofline.csv");
  rep << tag;
  write_rows_csv(rep, rows);
  sum << tag;
  write_summary_csv(sum, sums);
  roof << tag;
  write_roofline_series(roof, rows);
}

int cmd_simulate(const RunSpec& s) {
  int rc = kExitOk;
  for (const Cell& c : expand_cells(s)) {
    const CellOutcome o = execute(s, c);
    if (o.status != "ok") {
      std::cerr << "vmesh: " << c.arch << " / " << c.workload.name << ": " << o.status << ": "
                << o.message << '\n';
      if (rc == kExitOk) rc = status_code(o.status);
      continue;
    }
    write_stats(std::cout, o);
  }
  return rc;
}

int cmd_sweep(const RunSpec& s) {
  const auto cells = expand_cells(s);
  std::vector<CellOutcome> outcomes(cells.size());
  std::atomic<std::size_t> next{0};
  std::mutex log_mu;
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      outcomes[i] = execute(s, cells[i]);
      std::lock_guard lock(log_mu);
      std::cerr << '[' << (i + 1) << '/' << cells.size() << "] " << cells[i].arch << ' '
                << cells[i].pes << ' ' << cells[i].workload.name << ": " << outcomes[i].status << '\n';
    }
  };
  const int n = std::min<int>(s.workers, static_cast<int>(cells.size()));
  std::vector<std::thread> pool;
  for (int t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::vector<ReportRow> rows;
  std::vector<std::string> hashes;
  int rc = kExitOk;
  for (const auto& o : outcomes) {
    hashes.push_back(o.manifest_hash);
    if (o.row) rows.push_back(*o.row);
    if (o.status == "config-error" || o.status == "internal-error") rc = kExitFailure;
  }
  if (rows.empty()) throw ConfigError("no cell of the sweep produced a result");
  write_reports(s.out, rows, hashes);
  std::cout << "wrote " << (fs::path(s.out) / "report.csv").string() << " (" << rows.size() << " of "
            << cells.size() << " cells ok)\n";
  return rc;
}

int cmd_report(const RunSpec& s) {
  const fs::path cells = fs::path(s.out) / "cells";
  if (!fs::is_directory(cells)) throw ConfigError("no cells under " + cells.string());
  std::vector<fs::path> dirs;
  for (const auto& d : fs::directory_iterator(cells))
    if (fs::exists(d.path() / "stats.csv")) dirs.push_back(d.path());
  std::sort(dirs.begin(), dirs.end());
  std::vector<ReportRow> rows;
  std::vector<std::string> hashes;
  for (const auto& d : dirs) {
    std::ifstream in(d / "stats.csv");
    std::string first;
    std::getline(in, first);
    const std::string prefix = "# manifest_hash=";
    if (first.rfind(prefix, 0) != 0) throw ConfigError("stats file without manifest hash: " + d.string());
    hashes.push_back(first.substr(prefix.size()));
    if (auto r = read_stats(in)) rows.push_back(*r);
  }
  if (rows.empty()) throw ConfigError("no successful cells under " + cells.string());
  write_reports(s.out, rows, hashes);
  std::cout << "wrote " << (fs::path(s.out) / "report.csv").string() << " (" << rows.size()
            << " rows)\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"VectorMesh accelerator simulator"};
  app.require_subcommand(1);
  Flags list_f, sched_f, sim_f, sweep_f, rep_f;
  std::string filter;
  auto* list = app.add_subcommand("list-workloads", "print the workload catalog");
  list->add_option("filter", filter, "substring of the workload name");
  list->add_option("--spatial", list_f.spatial, "feature-map edge");
  auto* sched = app.add_subcommand("schedule", "print the chosen tile and sharing plan");
  auto* sim = app.add_subcommand("simulate", "run cells and write stats files");
  auto* sweep = app.add_subcommand("sweep", "run an arch x PE x workload matrix and report");
  auto* rep = app.add_subcommand("report", "rebuild reports from existing cell stats");
  add_flags(sched, sched_f);
  add_flags(sim, sim_f);
  add_flags(sweep, sweep_f);
  add_flags(rep, rep_f);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*list) return cmd_list(filter, list_f.spatial.value_or(kDefaultSpatial));
    if (*sched) return cmd_schedule(resolve(sched_f, false));
    if (*sim) return cmd_simulate(resolve(sim_f, false));
    if (*sweep) return cmd_sweep(resolve(sweep_f, true));
    if (*rep) return cmd_report(resolve(rep_f, false));
  } catch (const ConfigError& e) {
    std::cerr << "vmesh: config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const UnsupportedWorkload& e) {
    std::cerr << "vmesh: unsupported workload: " << e.what() << '\n';
    return kExitUnsupported;
  } catch (const InternalError& e) {
    std::cerr << "vmesh: internal error: " << e.what() << '\n';
    return kExitInternal;
  } catch (const std::exception& e) {
    std::cerr << "vmesh: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitFailure;
}
