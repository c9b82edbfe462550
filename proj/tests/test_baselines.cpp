// SPDX-FileCopyrightText: (c) 2026 The VectorMesh Simulator Authors
//
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "support.hpp"
#include "vmesh/baselines.hpp"
#include "vmesh/catalog.hpp"

using namespace vmesh;

namespace {

Index ceil_div(double a, double b) { return static_cast<Index>(std::ceil(a / b)); }

}  // namespace

TEST_CASE("baseline configurations") {
  const BaselineConfig s = baseline_config(BaselineKind::Systolic, 128);
  CHECK(s.pe_rows == 8);
  CHECK(s.pe_cols == 16);
  CHECK(s.local_buf_bytes_per_pe == 0);
  CHECK(s.glb_bytes == 128 * 1024);
  const BaselineConfig e = baseline_config(BaselineKind::RowStationary, 512);
  CHECK(e.pe_rows == 16);
  CHECK(e.pe_cols == 32);
  CHECK(e.local_buf_bytes_per_pe == 307);
  CHECK(e.glb_bytes == 512 * 512);
  CHECK_THROWS_AS(baseline_config(BaselineKind::Systolic, 64), ConfigError);
  BaselineConfig bad = s;
  bad.local_buf_bytes_per_pe = 64;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  BaselineConfig bad2 = e;
  bad2.local_buf_bytes_per_pe = 0;
  CHECK_THROWS_AS(bad2.validate(), ConfigError);
}

TEST_CASE("systolic closed form for one stationary tile") {
  // K x N = 8 x 16 fills the array once; 64 rows of A stream through it.
  const Workload w = make_gemm(64, 16, 8);
  const auto in = random_inputs(w, 1);
  BaselineConfig fast = baseline_config(BaselineKind::Systolic, 128);
  fast.dram_bytes_per_sec = 1e15;
  fast.glb_bytes_per_sec = 1e15;
  const SimResult f = run_systolic(fast, w, in);
  CHECK(f.output == eval_reference(w, in));
  // One cycle for the A preload, the pipeline latency, then 64 + 8 + 16 - 1.
  CHECK(f.cycles == 1 + 100 + (64 + 8 + 16 - 1));
  CHECK(f.stalls(StallCause::TileBubble) == 8 + 16 - 1);

  const BaselineConfig cfg = baseline_config(BaselineKind::Systolic, 128);
  const SimResult r = run_systolic(cfg, w, in);
  const Index preload = ceil_div(64 * 8 * 2, 32);
  const Index glb = (64 * 8 * 2 + 8 * 16 * 2) + 64 * 16 * 4;
  const Index dram = 8 * 16 * 2 + 64 * 16 * 4;
  const Index pass = std::max<Index>({64 + 8 + 16 - 1, ceil_div(static_cast<double>(glb), 128), ceil_div(static_cast<double>(dram), 32)});
  CHECK(r.cycles == preload + 100 + pass);
  CHECK(r.glb_read_bytes + r.glb_write_bytes == glb);
  CHECK(r.dram_write_bytes == 64 * 16 * 4);
}

TEST_CASE("a single MAC is all bubble") {
  const Workload w = make_gemm(1, 1, 1);
  const auto in = random_inputs(w, 2);
  const SimResult r = run_systolic(baseline_config(BaselineKind::Systolic, 128), w, in);
  CHECK(r.output == eval_reference(w, in));
  CHECK(r.utilization() < 0.001);
}

TEST_CASE("systolic bubbles grow with the array") {
  const Workload w = make_gemm(16, 16, 64);
  const auto in = random_inputs(w, 3);
  const SimResult small = run_systolic(baseline_config(BaselineKind::Systolic, 128), w, in);
  const SimResult large = run_systolic(baseline_config(BaselineKind::Systolic, 512), w, in);
  CHECK(large.utilization() < small.utilization());
  CHECK(small.output == large.output);
}

TEST_CASE("baselines reject workloads outside the GEMM view") {
  std::string why;
  for (const Workload& w : {make_correlation(4, 6, 6, 3, 3), make_depthwise(4, 8, 8, 3, 3),
                            make_conv(2, 2, 9, 9, 3, 3, 1, 2)}) {
    CHECK_FALSE(baseline_supports(w, &why));
    CHECK_FALSE(why.empty());
    const auto in = random_inputs(w, 4);
    CHECK_THROWS_AS(run_systolic(baseline_config(BaselineKind::Systolic, 128), w, in), UnsupportedWorkload);
    CHECK_THROWS_AS(run_eyeriss(baseline_config(BaselineKind::RowStationary, 128), w, in), UnsupportedWorkload);
  }
  CHECK(baseline_supports(make_conv(2, 2, 9, 9, 3, 3, 2, 1)));
}

TEST_CASE("row-stationary mapping") {
  const BaselineConfig cfg = baseline_config(BaselineKind::RowStationary, 128);
  const RowStationaryMapping one = map_row_stationary(cfg, make_conv(16, 16, 12, 12, 1, 1));
  CHECK(one.set_height == 1);
  CHECK(one.kernel_width == 1);
  const RowStationaryMapping big = map_row_stationary(cfg, make_conv(3, 48, 227, 227, 11, 11, 4));
  CHECK(big.folds >= 2);
  CHECK(big.set_height * big.folds >= 11);
  CHECK(big.set_height <= cfg.pe_rows);
  for (const auto& e : classic_suite(24)) {
    const RowStationaryMapping m = map_row_stationary(cfg, e.build());
    CHECK_MESSAGE(m.local_bytes(cfg.word_bytes, cfg.psum_bytes) <= cfg.local_buf_bytes_per_pe, e.name);
    CHECK(m.vertical_sets * m.set_height <= cfg.pe_rows);
    CHECK(m.horizontal_sets * m.set_width <= cfg.pe_cols);
  }
}

TEST_CASE("baselines are bit-exact on small classic layers") {
  for (int pes : {128, 512})
    for (const auto& e : classic_suite(12)) {
      const Workload w = e.build();
      const auto in = random_inputs(w, 5);
      const OutputTensor ref = eval_reference(w, in);
      const SimResult s = run_systolic(baseline_config(BaselineKind::Systolic, pes), w, in);
      const SimResult r = run_eyeriss(baseline_config(BaselineKind::RowStationary, pes), w, in);
      CHECK_MESSAGE(s.output == ref, e.name);
      CHECK_MESSAGE(r.output == ref, e.name);
      CHECK(s.dram_write_bytes == w.output_bytes());
      CHECK(r.dram_write_bytes == w.output_bytes());
      CHECK(s.macs == w.macs());
      CHECK(r.macs == w.macs());
    }
}

TEST_CASE("baselines are bit-exact on random supported workloads") {
  std::mt19937_64 rng(51);
  int ran = 0;
  for (int t = 0; t < 200 && ran < 60; ++t) {
    const Workload w = testing::random_small_workload(rng, true);
    if (!baseline_supports(w)) continue;
    ++ran;
    const auto in = random_inputs(w, static_cast<std::uint64_t>(t));
    const OutputTensor ref = eval_reference(w, in);
    CHECK(run_systolic(baseline_config(BaselineKind::Systolic, 128), w, in).output == ref);
    CHECK(run_eyeriss(baseline_config(BaselineKind::RowStationary, 128), w, in).output == ref);
  }
  CHECK(ran >= 30);
}

TEST_CASE("baseline runs are deterministic") {
  const auto e = find_entry("AL CONV2", 16);
  REQUIRE(e);
  const Workload w = e->build();
  const auto in = random_inputs(w, 6);
  const BaselineConfig cfg = baseline_config(BaselineKind::RowStationary, 128);
  const SimResult a = run_eyeriss(cfg, w, in), b = run_eyeriss(cfg, w, in);
  CHECK(a.cycles == b.cycles);
  CHECK(a.glb_read_bytes == b.glb_read_bytes);
  CHECK(a.stall_cycles == b.stall_cycles);
}
