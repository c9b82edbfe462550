// SPDX-FileCopyrightText: (c) 2026 The VectorMesh Simulator Authors
//
// SPDX-License-Identifier: Apache-2.0

#include "vmesh/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace vmesh {

MachineRates rates_of(const ArchConfig& c) { return {c.pes(), c.clock_hz, c.dram_bytes_per_sec}; }

MachineRates rates_of(const BaselineConfig& c) { return {c.pes(), c.clock_hz, c.dram_bytes_per_sec}; }

Index unique_bytes(const Workload& w) { return w.input_bytes() + w.output_bytes(); }

double operational_intensity(const Workload& w) {
  return 2.0 * static_cast<double>(w.macs()) / static_cast<double>(unique_bytes(w));
}

double roofline_gops(const Workload& w, const MachineRates& m) {
  const double macs = static_cast<double>(w.macs());
  const double compute_s = macs / (m.pes * m.clock_hz);
  const double memory_s = static_cast<double>(unique_bytes(w)) / m.dram_bytes_per_sec;
  return 2.0 * macs / std::max(compute_s, memory_s) / 1e9;
}

bool memory_bound(const Workload& w, const MachineRates& m) {
  const double macs = static_cast<double>(w.macs());
  return static_cast<double>(unique_bytes(w)) / m.dram_bytes_per_sec > macs / (m.pes * m.clock_hz);
}

double normalized_access(const SimResult& r, MemLevel level) {
  if (r.macs <= 0) throw std::invalid_argument("normalized access needs at least one MAC");
  const Index bytes = level == MemLevel::Glb ? r.glb_read_bytes + r.glb_write_bytes
                                             : r.dram_read_bytes + r.dram_write_bytes;
  return 1000.0 * static_cast<double>(bytes) / static_cast<double>(r.macs);
}

AreaModel area_model(const std::string& arch) {
  if (arch == "row-stationary") return {arch, 0.08, 0.19, 0.48, 0.25, 0.00};
  if (arch == "systolic") return {arch, 0.08, 0.38, 0.00, 0.00, 0.00};
  if (arch == "vectormesh") return {arch, 0.08, 0.00, 0.67, 0.25, 0.04};
  throw ConfigError("unknown architecture '" + arch + "'");
}

double area_multiplier(int pes) {
  if (pes <= 0) throw ConfigError("PE count must be positive");
  return static_cast<double>(pes) / 128.0;
}

double area_efficiency(double mean_gops, double area_factor, double multiplier) {
  if (!(area_factor * multiplier > 0)) throw std::invalid_argument("area factor times multiplier must be > 0");
  return mean_gops / (area_factor * multiplier);
}

ReportRow make_row(const Workload& w, const SimResult& r, const MachineRates& m) {
  ReportRow row;
  row.arch = r.arch;
  row.workload = w.name;
  row.pes = r.pes;
  row.cycles = r.cycles;
  row.macs = r.macs;
  row.utilization = r.utilization();
  row.gops = r.gops();
  row.roofline_gops = roofline_gops(w, m);
  row.intensity = operational_intensity(w);
  row.glb_norm = normalized_access(r, MemLevel::Glb);
  row.dram_norm = normalized_access(r, MemLevel::Dram);
  row.stalls = r.stall_cycles;
  return row;
}

double geometric_mean(const std::vector<double>& v) {
  if (v.empty()) throw std::invalid_argument("geometric mean of an empty set");
  double s = 0;
  for (double x : v) {
    if (!(x > 0)) throw std::invalid_argument("geometric mean needs positive values");
    s += std::log(x);
  }
  return std::exp(s / static_cast<double>(v.size()));
}

SuiteSummary summarize(const std::vector<ReportRow>& rows, const std::string& arch, int pes) {
  SuiteSummary s;
  s.arch = arch;
  s.pes = pes;
  std::vector<double> gops, glb, dram;
  double util = 0;
  for (const auto& r : rows) {
    if (r.arch != arch || r.pes != pes) continue;
    gops.push_back(r.gops);
    glb.push_back(r.glb_norm);
    dram.push_back(r.dram_norm);
    util += r.utilization;
  }
  if (gops.empty()) throw std::invalid_argument("no runs for " + arch + " at " + std::to_string(pes) + " PEs");
  s.runs = gops.size();
  for (double g : gops) s.mean_gops += g;
  s.mean_gops /= static_cast<double>(gops.size());
  s.mean_utilization = util / static_cast<double>(gops.size());
  s.geomean_gops = geometric_mean(gops);
  s.geomean_glb = geometric_mean(glb);
  s.geomean_dram = geometric_mean(dram);
  s.area_factor = area_model(arch).area_factor();
  s.multiplier = area_multiplier(pes);
  s.area_efficiency = area_efficiency(s.mean_gops, s.area_factor, s.multiplier);
  return s;
}

namespace {

std::string num(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", x);
  return buf;
}

}  // namespace

void write_rows_csv(std::ostream& os, const std::vector<ReportRow>& rows) {
  os << "arch,workload,pes,cycles,macs,utilization,gops,roofline_gops,intensity,glb_per_kmac,"
        "dram_per_kmac,stall_dram,stall_glb,stall_fifo_empty,stall_fifo_full,stall_tile_bubble\n";
  for (const auto& r : rows) {
    os << r.arch << ',' << r.workload << ',' << r.pes << ',' << r.cycles << ',' << r.macs << ','
       << num(r.utilization) << ',' << num(r.gops) << ',' << num(r.roofline_gops) << ','
       << num(r.intensity) << ',' << num(r.glb_norm) << ',' << num(r.dram_norm);
    for (Index s : r.stalls) os << ',' << s;
    os << '\n';
  }
}

void write_summary_csv(std::ostream& os, const std::vector<SuiteSummary>& s) {
  os << "arch,pes,runs,mean_gops,geomean_gops,geomean_glb_per_kmac,geomean_dram_per_kmac,"
        "mean_utilization,area_factor,multiplier,area_efficiency\n";
  for (const auto& x : s)
    os << x.arch << ',' << x.pes << ',' << x.runs << ',' << num(x.mean_gops) << ','
       << num(x.geomean_gops) << ',' << num(x.geomean_glb) << ',' << num(x.geomean_dram) << ','
       << num(x.mean_utilization) << ',' << num(x.area_factor) << ',' << num(x.multiplier) << ','
       << num(x.area_efficiency) << '\n';
}

void write_roofline_series(std::ostream& os, const std::vector<ReportRow>& rows) {
  os << "series,arch,pes,workload,x_intensity,y_gops\n";
  for (const auto& r : rows) {
    os << "run," << r.arch << ',' << r.pes << ',' << r.workload << ',' << num(r.intensity) << ','
       << num(r.gops) << '\n';
    os << "roof," << r.arch << ',' << r.pes << ',' << r.workload << ',' << num(r.intensity) << ','
       << num(r.roofline_gops) << '\n';
  }
}

}  // namespace vmesh
