// SPDX-FileCopyrightText: (c) 2026 The VectorMesh Simulator Authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "vmesh/baselines.hpp"
#include "vmesh/simcore.hpp"

namespace vmesh {

struct MachineRates {
  int pes = 128;
  double clock_hz = 2.0e8;
  double dram_bytes_per_sec = 6.4e9;
};

MachineRates rates_of(const ArchConfig& c);
MachineRates rates_of(const BaselineConfig& c);

/// Every input and output byte touched once.
Index unique_bytes(const Workload& w);
/// Ops (2 per MAC) per unique byte.
double operational_intensity(const Workload& w);
/// 2*MACs / max(compute time, unique-byte transfer time), in GOPS.
double roofline_gops(const Workload& w, const MachineRates& m);
bool memory_bound(const Workload& w, const MachineRates& m);

enum class MemLevel { Glb, Dram };

/// Bytes read plus written at `level` per 1000 MACs.  Throws
/// std::invalid_argument when the run has no MACs.
double normalized_access(const SimResult& r, MemLevel level);

struct AreaModel {
  std::string arch;
  double mac = 0, glb = 0, local = 0, controllers = 0, bfn_fifo = 0;
  double area_factor() const { return mac + glb + local + controllers + bfn_fifo; }
};

/// Component areas for "row-stationary", "systolic" or "vectormesh".
AreaModel area_model(const std::string& arch);
/// 1 for 128 PEs, 4 for 512 PEs.
double area_multiplier(int pes);
/// P / (A * N); throws std::invalid_argument unless A * N > 0.
double area_efficiency(double mean_gops, double area_factor, double multiplier);

struct ReportRow {
  std::string arch;
  std::string workload;
  int pes = 0;
  Index cycles = 0;
  Index macs = 0;
  double utilization = 0;
  double gops = 0;
  double roofline_gops = 0;
  double intensity = 0;
  double glb_norm = 0;
  double dram_norm = 0;
  std::array<Index, kStallCauses> stalls{};
};

ReportRow make_row(const Workload& w, const SimResult& r, const MachineRates& m);

struct SuiteSummary {
  std::string arch;
  int pes = 0;
  std::size_t runs = 0;
  double mean_gops = 0;
  double geomean_gops = 0;
  double geomean_glb = 0;
  double geomean_dram = 0;
  double mean_utilization = 0;
  double area_factor = 0;
  double multiplier = 0;
  double area_efficiency = 0;  // from mean_gops
};

/// Aggregates the rows matching (arch, pes).  Throws std::invalid_argument
/// if none match.
SuiteSummary summarize(const std::vector<ReportRow>& rows, const std::string& arch, int pes);

double geometric_mean(const std::vector<double>& v);

void write_rows_csv(std::ostream& os, const std::vector<ReportRow>& rows);
void write_summary_csv(std::ostream& os, const std::vector<SuiteSummary>& s);
/// x = operational intensity, y = GOPS, one line per run plus the roof.
void write_roofline_series(std::ostream& os, const std::vector<ReportRow>& rows);

}  // namespace vmesh
