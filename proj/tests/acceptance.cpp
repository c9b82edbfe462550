// SPDX-FileCopyrightText: (c) 2026 The VectorMesh Simulator Authors
//
// SPDX-License-Identifier: Apache-2.0

// Runs the ten acceptance criteria and prints one PASS/FAIL line for each.
// Exit status is the number of failing criteria.

#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "support.hpp"
#include "vmesh/analysis.hpp"
#include "vmesh/baselines.hpp"
#include "vmesh/bfn.hpp"
#include "vmesh/catalog.hpp"
#include "vmesh/runspec.hpp"
#include "vmesh/schedule.hpp"
#include "vmesh/simcore.hpp"

using namespace vmesh;

namespace {

const std::vector<std::string> kArchs{"vectormesh", "systolic", "row-stationary"};
const std::vector<int> kSizes{128, 512};
constexpr Index kSpatial = 56;

struct Verdict {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

SimResult run_arch(const std::string& arch, int pes, const Workload& w, std::span<const InputTensor> in) {
  if (arch == "vectormesh") return simulate_vm(vm_config_for_pes(pes), w, in);
  if (arch == "systolic") return run_systolic(baseline_config(BaselineKind::Systolic, pes), w, in);
  return run_eyeriss(baseline_config(BaselineKind::RowStationary, pes), w, in);
}

MachineRates rates_for(const std::string& arch, int pes) {
  if (arch == "vectormesh") return rates_of(vm_config_for_pes(pes));
  return rates_of(baseline_config(arch == "systolic" ? BaselineKind::Systolic : BaselineKind::RowStationary, pes));
}

struct Cell {
  std::string arch;
  int pes = 0;
  Workload w;
  SimResult r;
  ReportRow row;
  bool exact = false;
};

// Every classic layer on every architecture at both sizes.
struct Matrix {
  std::vector<Cell> cells;
  std::vector<std::string> errors;
  Index vm_runs = 0;
};

Matrix run_matrix() {
  Matrix m;
  const auto suite = classic_suite(kSpatial);
  for (const auto& e : suite) {
    const Workload w = e.build();
    const auto in = random_inputs(w, 2026);
    const OutputTensor ref = eval_reference(w, in);
    for (int pes : kSizes)
      for (const auto& arch : kArchs) {
        try {
          Cell c{arch, pes, w, run_arch(arch, pes, w, in), {}, false};
          c.exact = c.r.output == ref;
          c.row = make_row(w, c.r, rates_for(arch, pes));
          if (arch == "vectormesh") ++m.vm_runs;
          m.cells.push_back(std::move(c));
        } catch (const std::exception& ex) {
          m.errors.push_back(arch + "/" + std::to_string(pes) + "/" + e.name + ": " + ex.what());
        }
      }
    std::fprintf(stderr, "  matrix: %s done\n", e.name.c_str());
  }
  return m;
}

std::vector<ReportRow> rows_of(const Matrix& m) {
  std::vector<ReportRow> rows;
  for (const auto& c : m.cells) rows.push_back(c.row);
  return rows;
}

// --- criteria ----------------------------------------------------------------

Verdict functional(const Matrix& m) {
  Verdict v;
  Index bad = 0, checked = 0;
  for (const auto& c : m.cells) {
    ++checked;
    if (!c.exact) {
      ++bad;
      v.detail += " mismatch " + c.arch + "/" + c.w.name;
    }
  }
  std::mt19937_64 rng(100);
  Index random_runs = 0;
  for (int t = 0; t < 100; ++t) {
    const Workload w = testing::random_small_workload(rng);
    const auto in = random_inputs(w, 5000 + static_cast<std::uint64_t>(t));
    const OutputTensor ref = eval_reference(w, in);
    for (const auto& arch : kArchs) {
      if (arch != "vectormesh" && !baseline_supports(w)) continue;
      ++random_runs;
      if (run_arch(arch, 128, w, in).output != ref) {
        ++bad;
        v.detail += " mismatch " + arch + "/" + w.name;
      }
    }
  }
  v.pass = bad == 0 && m.errors.empty();
  v.detail = std::to_string(checked) + " classic cells, " + std::to_string(random_runs) +
             " random runs, " + std::to_string(bad) + " mismatches, " + std::to_string(m.errors.size()) +
             " errors" + v.detail;
  return v;
}

Verdict bfn_guarantee(const Matrix& m) {
  Index patterns = 0, failures = 0;
  for (int x = 1; x <= 4; ++x) {
    const Index mod = Index{1} << x;
    std::vector<Index> o(static_cast<std::size_t>(x), 1);
    while (true) {
      for (Index a0 = 0; a0 < mod; ++a0) {
        const bfn::BankAccess a = bfn::odd_stride_addresses(a0, o, x);
        ++patterns;
        if (!bfn::check_conflict_free(a).conflict_free || !bfn::route_butterfly(a)) ++failures;
      }
      std::size_t d = 0;
      while (d < o.size() && (o[d] += 2) >= mod) o[d++] = 1;
      if (d == o.size()) break;
    }
  }
  std::mt19937_64 rng(200);
  std::uniform_int_distribution<Index> half(0, 1 << 12), base(0, Index{1} << 30);
  for (int t = 0; t < 100000; ++t) {
    std::vector<Index> o(5);
    for (auto& c : o) c = 2 * half(rng) + 1;
    const bfn::BankAccess a = bfn::odd_stride_addresses(base(rng), o, 5);
    ++patterns;
    if (!bfn::check_conflict_free(a).conflict_free || !bfn::route_butterfly(a)) ++failures;
  }
  // Machine::run verifies every lowered program and throws on a conflict.
  Index conflicts = 0;
  for (const auto& e : m.errors)
    if (e.find("conflict") != std::string::npos || e.find("route") != std::string::npos) ++conflicts;
  Verdict v;
  v.pass = failures == 0 && conflicts == 0 && m.vm_runs > 0;
  v.detail = std::to_string(patterns) + " patterns, " + std::to_string(failures) + " failures; " +
             std::to_string(m.vm_runs) + " checked runs, " + std::to_string(conflicts) + " in-run conflicts";
  return v;
}

Verdict tiler() {
  const std::vector<std::pair<Index, Index>> buffers{{2, 1},    {8, 4},    {32, 16},  {64, 64},
                                                     {100, 50}, {128, 32}, {256, 64}, {256, 256}};
  Index cases = 0, bad = 0;
  for (Index M = 1; M <= 16; ++M)
    for (Index N = 1; N <= 16; ++N)
      for (Index K = 1; K <= 16; ++K) {
        const Workload w = make_gemm(M, N, K);
        for (auto [ib, pb] : buffers) {
          Rational best(1000);
          Index best_macs = 0;
          std::vector<Index> best_ext;
          for (Index i = 1; i <= M; ++i)
            for (Index j = 1; j <= N; ++j) {
              if (i * j > pb) continue;
              for (Index k = 1; k <= K; ++k) {
                if ((i + j) * k > ib) continue;
                const Rational bw((i + j) * k, i * j * k);
                const std::vector<Index> e{i, j, k};
                if (bw < best || (bw == best && (i * j * k > best_macs || (i * j * k == best_macs && e < best_ext)))) {
                  best = bw;
                  best_macs = i * j * k;
                  best_ext = e;
                }
              }
            }
          const TileScheme s = select_tile(w, ib, pb);
          ++cases;
          if (s.bandwidth_per_mac != best || s.extents != best_ext) ++bad;
        }
      }
  return {bad == 0, std::to_string(cases) + " (gemm, buffer) cases, " + std::to_string(bad) + " differ"};
}

Verdict single_writeback(const Matrix& m) {
  Index bad = 0;
  for (const auto& c : m.cells)
    if (c.r.dram_write_bytes != c.w.output_bytes()) ++bad;
  std::mt19937_64 rng(400);
  Index runs = m.cells.size();
  for (int t = 0; t < 40; ++t) {
    const Workload w = testing::random_small_workload(rng);
    const auto in = random_inputs(w, static_cast<std::uint64_t>(t));
    for (const auto& arch : kArchs) {
      if (arch != "vectormesh" && !baseline_supports(w)) continue;
      ++runs;
      if (run_arch(arch, 512, w, in).dram_write_bytes != w.output_bytes()) ++bad;
    }
  }
  return {bad == 0, std::to_string(runs) + " runs, " + std::to_string(bad) + " with extra writes"};
}

Verdict roofline(const Matrix& m) {
  Verdict v;
  Index above = 0, compute_bound = 0, low = 0;
  for (const auto& c : m.cells) {
    if (c.row.gops > c.row.roofline_gops * (1 + 1e-9)) ++above;
    if (c.arch != "vectormesh" || memory_bound(c.w, rates_for(c.arch, c.pes))) continue;
    ++compute_bound;
    const double frac = c.row.gops / c.row.roofline_gops;
    if (frac < 0.70) {
      ++low;
      v.detail += "; " + c.w.name + "@" + std::to_string(c.pes) + " at " + fmt("%.3f", frac);
    }
  }
  v.pass = above == 0 && low == 0;
  v.detail = std::to_string(m.cells.size()) + " cells, " + std::to_string(above) + " above roofline, " +
             std::to_string(compute_bound - low) + "/" + std::to_string(compute_bound) +
             " compute-bound VM cells >= 70%" + v.detail;
  return v;
}

Verdict bands(const std::vector<ReportRow>& rows) {
  const SuiteSummary vm = summarize(rows, "vectormesh", 128), sa = summarize(rows, "systolic", 128),
                     rs = summarize(rows, "row-stationary", 128);
  const double g_sa = sa.geomean_glb / vm.geomean_glb, g_rs = rs.geomean_glb / vm.geomean_glb,
               d_sa = sa.geomean_dram / vm.geomean_dram;
  const bool ok = g_sa >= 10 && g_sa <= 30 && g_rs >= 2 && g_rs <= 6 && d_sa >= 2 && d_sa <= 8;
  return {ok, "GLB systolic/VM " + fmt("%.2f", g_sa) + " in [10,30], row-stationary/VM " + fmt("%.2f", g_rs) +
                  " in [2,6], DRAM systolic/VM " + fmt("%.2f", d_sa) + " in [2,8]"};
}

Verdict orderings(const std::vector<ReportRow>& rows) {
  auto s = [&](const char* a, int p) { return summarize(rows, a, p); };
  const auto vm5 = s("vectormesh", 512), sa5 = s("systolic", 512), rs5 = s("row-stationary", 512);
  const auto vm1 = s("vectormesh", 128), sa1 = s("systolic", 128), rs1 = s("row-stationary", 128);
  const bool glb = sa5.geomean_glb > rs5.geomean_glb && rs5.geomean_glb > vm5.geomean_glb;
  const bool ae5 = vm5.area_efficiency > sa5.area_efficiency && sa5.area_efficiency > rs5.area_efficiency;
  const bool ae1 = sa1.area_efficiency > vm1.area_efficiency && vm1.area_efficiency > rs1.area_efficiency;
  std::string d = std::string("512 GLB sys>rs>vm ") + (glb ? "holds" : "fails") + " (" + fmt("%.1f", sa5.geomean_glb) +
                  ", " + fmt("%.1f", rs5.geomean_glb) + ", " + fmt("%.1f", vm5.geomean_glb) + "); 512 area-eff vm>sys>rs " +
                  (ae5 ? "holds" : "fails") + " (" + fmt("%.2f", vm5.area_efficiency) + ", " +
                  fmt("%.2f", sa5.area_efficiency) + ", " + fmt("%.2f", rs5.area_efficiency) +
                  "); 128 area-eff sys>vm>rs " + (ae1 ? "holds" : "fails") + " (" + fmt("%.2f", sa1.area_efficiency) +
                  ", " + fmt("%.2f", vm1.area_efficiency) + ", " + fmt("%.2f", rs1.area_efficiency) + ")";
  return {glb && ae5 && ae1, d};
}

struct Degradation {
  double sa_small, sa_large, vm_small, vm_large;
  bool holds() const {
    return sa_large < sa_small && (vm_small - vm_large) < 0.5 * (sa_small - sa_large);
  }
  std::string str() const {
    return "systolic " + fmt("%.3f", sa_small) + "->" + fmt("%.3f", sa_large) + ", VM " + fmt("%.3f", vm_small) +
           "->" + fmt("%.3f", vm_large);
  }
};

Degradation degradation(const Workload& w) {
  const auto in = random_inputs(w, 8);
  return {run_arch("systolic", 128, w, in).utilization(), run_arch("systolic", 512, w, in).utilization(),
          run_arch("vectormesh", 128, w, in).utilization(), run_arch("vectormesh", 512, w, in).utilization()};
}

Verdict bubbles() {
  const Degradation main = degradation(make_gemm(64, 64, 512));
  const Degradation tiny = degradation(make_gemm(16, 16, 64));
  return {main.holds(), "GEMM 64x64x512: " + main.str() + "; GEMM 16x16x64 (informational, " +
                            (tiny.holds() ? "holds" : "does not hold") + "): " + tiny.str()};
}

Verdict breadth() {
  Verdict v;
  Index refused = 0, exact = 0, runs = 0, mem_bound = 0, near = 0;
  for (const char* name : {"FN CORR", "EV CORR", "DL ASPP D2", "DL ASPP D4"}) {
    const Workload w = find_entry(name, kSpatial)->build();
    const auto in = random_inputs(w, 9);
    const OutputTensor ref = eval_reference(w, in);
    for (const char* arch : {"systolic", "row-stationary"}) try {
        run_arch(arch, 128, w, in);
        v.detail += std::string("; ") + arch + " accepted " + name;
      } catch (const UnsupportedWorkload&) {
        ++refused;
      }
    for (int pes : kSizes) {
      const SimResult r = run_arch("vectormesh", pes, w, in);
      ++runs;
      if (r.output == ref) ++exact;
      const MachineRates m = rates_for("vectormesh", pes);
      const double frac = r.gops() / roofline_gops(w, m);
      if (memory_bound(w, m)) {
        ++mem_bound;
        if (frac >= 0.70) ++near;
      }
      v.detail += std::string("; ") + name + "@" + std::to_string(pes) + (memory_bound(w, m) ? " mem " : " cmp ") +
                  fmt("%.3f", frac);
    }
  }
  v.pass = refused == 8 && exact == runs && near == mem_bound && mem_bound > 0;
  v.detail = std::to_string(refused) + "/8 baseline refusals, " + std::to_string(exact) + "/" + std::to_string(runs) +
             " exact, " + std::to_string(near) + "/" + std::to_string(mem_bound) + " memory-bound within 30%" +
             v.detail;
  return v;
}

Verdict determinism() {
  RunSpec s;
  s.archs = kArchs;
  s.pes = kSizes;
  s.spatial = 16;
  s.workloads = {"AL CONV3", "TY CONV8", "MM 128"};
  Index files = 0, differ = 0;
  for (const auto& c : expand_cells(s)) {
    std::ostringstream a, b;
    write_stats(a, run_cell(s, c));
    write_stats(b, run_cell(s, c));
    ++files;
    if (a.str() != b.str()) ++differ;
  }
  return {differ == 0, std::to_string(files) + " stats files rewritten, " + std::to_string(differ) + " differ"};
}

}  // namespace

int main() {
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  std::fprintf(stderr, "running the classic matrix at %lld x %lld\n", static_cast<long long>(kSpatial),
               static_cast<long long>(kSpatial));
  const Matrix m = run_matrix();
  const std::vector<ReportRow> rows = rows_of(m);

  const std::vector<std::pair<int, std::function<Verdict()>>> criteria{
      {1, [&] { return functional(m); }},  {2, [&] { return bfn_guarantee(m); }},
      {3, tiler},                          {4, [&] { return single_writeback(m); }},
      {5, [&] { return roofline(m); }},    {6, [&] { return bands(rows); }},
      {7, [&] { return orderings(rows); }}, {8, bubbles},
      {9, breadth},                        {10, determinism},
  };
  int failed = 0;
  for (const auto& [n, fn] : criteria) {
    Verdict v;
    try {
      v = fn();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    if (!v.pass) ++failed;
    std::printf("%s criterion %d: %s\n", v.pass ? "PASS" : "FAIL", n, v.detail.c_str());
    std::fflush(stdout);
  }
  for (const auto& e : m.errors) std::printf("  error: %s\n", e.c_str());
  std::printf("%d of %zu criteria failed (%.0f s)\n", failed, criteria.size(),
              std::chrono::duration<double>(clock::now() - t0).count());
  return failed;
}
