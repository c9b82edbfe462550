// SPDX-FileCopyrightText: (c) 2026 The VectorMesh Simulator Authors
//
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "vmesh/runspec.hpp"

using namespace vmesh;
namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(VMESH_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("vmesh_test_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("config parsing is strict") {
  const RunSpec s = parse_run_spec(R"({"schema":1,"arch":["systolic"],"pes":[512],"workload":["MM 128"],
    "spatial":16,"machine":{"glb_bytes":65536}})");
  CHECK(s.archs == std::vector<std::string>{"systolic"});
  CHECK(s.pes == std::vector<int>{512});
  CHECK(s.spatial == 16);
  CHECK_THROWS_AS(parse_run_spec(R"({"schema":1,"colour":"red"})"), ConfigError);
  CHECK_THROWS_AS(parse_run_spec(R"({"schema":2})"), ConfigError);
  CHECK_THROWS_AS(parse_run_spec(R"({"arch":["systolic"]})"), ConfigError);
  CHECK_THROWS_AS(parse_run_spec(R"({"schema":1,"arch":["tpu"]})"), ConfigError);
  CHECK_THROWS_AS(parse_run_spec(R"({"schema":1,"machine":{"warp_size":32}})"), ConfigError);
  CHECK_THROWS_AS(parse_run_spec("{not json"), ConfigError);
  CHECK_THROWS_AS(parse_run_spec(R"({"schema":1,"schedule":{"row_dim":0}})"), ConfigError);
}

TEST_CASE("workload selectors") {
  RunSpec s;
  s.workloads = {"suite:classic"};
  CHECK(resolve_workloads(s).size() == 15);
  s.workloads = {"gemm:8,16,64"};
  const auto g = resolve_workloads(s);
  REQUIRE(g.size() == 1);
  CHECK(g[0].name == "GEMM 8x16x64");
  CHECK(g[0].build().macs() == 8 * 16 * 64);
  s.workloads = {"gemm:8,16"};
  CHECK_THROWS_AS(resolve_workloads(s), ConfigError);
  s.workloads = {"VG CONV99"};
  CHECK_THROWS_AS(resolve_workloads(s), ConfigError);
}

TEST_CASE("machine overrides are applied and validated") {
  RunSpec s;
  s.overrides = {{"glb_bytes", 65536}, {"fifo_depth_entries", 2}};
  const ArchConfig c = resolve_vm_config(s, 128);
  CHECK(c.glb_bytes == 65536);
  CHECK(c.fifo_depth_entries == 2);
  s.overrides = {{"fifo_depth_entries", 0}};
  CHECK_THROWS_AS(resolve_vm_config(s, 128), ConfigError);
  s.overrides = {{"glb_bytes", 1 << 20}};
  CHECK(resolve_baseline_config(s, BaselineKind::Systolic, 512).glb_bytes == 1 << 20);
}

TEST_CASE("manifest hash tracks the cell") {
  RunSpec s;
  s.workloads = {"MM 128"};
  const auto cells = expand_cells(s);
  REQUIRE(cells.size() == 1);
  const std::string a = sha256_hex(cell_manifest(s, cells[0]));
  CHECK(a.size() == 64);
  CHECK(a == sha256_hex(cell_manifest(s, cells[0])));
  RunSpec t = s;
  t.seed = 2;
  CHECK(a != sha256_hex(cell_manifest(t, expand_cells(t)[0])));
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("stats round trip") {
  RunSpec s;
  s.spatial = 8;
  s.workloads = {"AL CONV3"};
  const CellOutcome o = run_cell(s, expand_cells(s)[0]);
  REQUIRE(o.row);
  std::stringstream ss;
  write_stats(ss, o);
  CHECK(ss.str().rfind("# manifest_hash=" + o.manifest_hash, 0) == 0);
  std::string status;
  const auto back = read_stats(ss, &status);
  REQUIRE(back);
  CHECK(status == "ok");
  CHECK(back->cycles == o.row->cycles);
  CHECK(back->macs == o.row->macs);
  CHECK(back->stalls == o.row->stalls);
  CHECK(back->utilization == doctest::Approx(o.row->utilization).epsilon(1e-5));
}

TEST_CASE("baselines refuse correlation") {
  RunSpec s;
  s.archs = {"systolic"};
  s.spatial = 8;
  s.workloads = {"EV CORR"};
  CHECK_THROWS_AS(run_cell(s, expand_cells(s)[0]), UnsupportedWorkload);
}

TEST_CASE("exit codes") {
  const fs::path d = scratch("codes");
  CHECK(run("list-workloads") == 0);
  CHECK(run("simulate --arch vectormesh --workload 'MM 128' --spatial 8 --out " + (d / "a").string()) == 0);
  CHECK(run("simulate --arch systolic --workload 'EV CORR' --spatial 8 --out " + (d / "b").string()) == 3);
  CHECK(run("simulate --arch vectormesh --pes 100 --workload 'MM 128' --out " + (d / "c").string()) == 2);
  CHECK(run("simulate --arch vectormesh --workload 'MM 128' --tile 128,128,128 --out " + (d / "d").string()) == 2);
  CHECK(run("simulate --config " + (d / "missing.json").string()) == 2);
  CHECK(run("frobnicate") == 2);
  fs::remove_all(d);
}

TEST_CASE("repeated runs produce identical stats") {
  const fs::path d = scratch("repeat");
  const std::string args = "simulate --arch vectormesh --workload 'AL CONV3' --spatial 12 --seed 7 --out ";
  REQUIRE(run(args + (d / "x").string()) == 0);
  REQUIRE(run(args + (d / "y").string()) == 0);
  std::vector<fs::path> stats;
  for (const auto& e : fs::recursive_directory_iterator(d / "x"))
    if (e.path().filename() == "stats.csv") stats.push_back(e.path());
  REQUIRE(stats.size() == 1);
  const fs::path rel = fs::relative(stats[0], d / "x");
  CHECK(slurp(d / "x" / rel) == slurp(d / "y" / rel));
  CHECK_FALSE(slurp(d / "x" / rel).empty());
  fs::remove_all(d);
}
