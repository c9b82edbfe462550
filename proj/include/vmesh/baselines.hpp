// SPDX-FileCopyrightText: (c) 2026 The VectorMesh Simulator Authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include "vmesh/simcore.hpp"
#include "vmesh/workload.hpp"

namespace vmesh {

enum class BaselineKind { Systolic, RowStationary };

const char* to_string(BaselineKind k);

struct BaselineConfig {
  BaselineKind kind = BaselineKind::Systolic;
  int pe_rows = 8;
  int pe_cols = 16;
  Index local_buf_bytes_per_pe = 0;
  Index glb_bytes = 128 * 1024;
  double clock_hz = 2.0e8;
  double dram_bytes_per_sec = 6.4e9;
  double glb_bytes_per_sec = 2.56e10;
  int dram_latency_cycles = 100;
  int word_bytes = 2;
  int psum_bytes = 4;

  int pes() const { return pe_rows * pe_cols; }
  double dram_bytes_per_cycle() const { return dram_bytes_per_sec / clock_hz; }
  double glb_bytes_per_cycle() const { return glb_bytes_per_sec / clock_hz; }
  void validate() const;
};

/// 8x16 or 16x32 arrays; GLB of 1.0 KB (systolic) or 0.5 KB (row-stationary)
/// per PE; 0.3 KB local buffer per row-stationary PE.
BaselineConfig baseline_config(BaselineKind kind, int pes);

/// Weight-stationary systolic array over the im2col GEMM view.  Throws
/// UnsupportedWorkload for correlation, depthwise and dilated workloads.
SimResult run_systolic(const BaselineConfig& cfg, const Workload& w,
                       std::span<const InputTensor> inputs);

/// Row-stationary array: one filter row per PE, psums reduced down columns.
SimResult run_eyeriss(const BaselineConfig& cfg, const Workload& w,
                      std::span<const InputTensor> inputs);

/// Per-PE working set of the row-stationary mapping.
struct RowStationaryMapping {
  int set_height = 0;  // filter rows per PE set (after folding)
  int folds = 1;
  int set_width = 0;   // output rows per PE set
  int vertical_sets = 1;
  int horizontal_sets = 1;
  Index filters_per_pe = 1;   // p
  Index channels_per_pe = 1;  // q
  Index kernel_width = 1;
  /// Filter, input window and psum words held by one PE.
  Index local_bytes(int word_bytes, int psum_bytes) const;
};

RowStationaryMapping map_row_stationary(const BaselineConfig& cfg, const Workload& w);

/// True when the workload fits the im2col GEMM view of the baselines.
bool baseline_supports(const Workload& w, std::string* why = nullptr);

}  // namespace vmesh
