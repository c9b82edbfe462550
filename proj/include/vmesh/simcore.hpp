// SPDX-FileCopyrightText: (c) 2026 The VectorMesh Simulator Authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "vmesh/schedule.hpp"
#include "vmesh/workload.hpp"

namespace vmesh {

struct ArchConfig {
  int mesh_rows = 2;
  int mesh_cols = 2;
  int pes_per_teu = 32;
  Index input_buf_bytes = 16384;  // two buffers of 8 KB
  Index psum_buf_bytes = 5120;
  int fifo_depth_entries = 4;
  int fifo_entry_words = 32;
  Index glb_bytes = 2048;
  double clock_hz = 2.0e8;
  double dram_bytes_per_sec = 6.4e9;
  double glb_bytes_per_sec = 2.56e10;
  int dram_latency_cycles = 100;
  int word_bytes = 2;
  int psum_bytes = 4;

  int teus() const { return mesh_rows * mesh_cols; }
  int pes() const { return teus() * pes_per_teu; }
  double dram_bytes_per_cycle() const { return dram_bytes_per_sec / clock_hz; }
  double glb_bytes_per_cycle() const { return glb_bytes_per_sec / clock_hz; }
  /// Throws ConfigError naming the first offending field.
  void validate() const;
  /// Tiler target derived from the buffers (per step, one half of each buffer).
  PlanTarget plan_target() const;
};

/// 2x2 mesh (128 PEs) or 4x4 mesh (512 PEs).
ArchConfig vm_config_for_pes(int pes);

enum class StallCause : std::uint8_t { Dram, Glb, FifoEmpty, FifoFull, TileBubble };
inline constexpr std::size_t kStallCauses = 5;
const char* to_string(StallCause c);

struct SimResult {
  std::string arch;
  std::string workload;
  Index cycles = 0;
  Index macs = 0;
  int pes = 0;
  double clock_hz = 2.0e8;
  Index glb_read_bytes = 0;
  Index glb_write_bytes = 0;
  Index glb_fill_bytes = 0;  // DRAM -> GLB staging
  Index dram_read_bytes = 0;
  Index dram_write_bytes = 0;
  Index fifo_words_transferred = 0;
  std::array<Index, kStallCauses> stall_cycles{};
  OutputTensor output;

  double utilization() const;
  /// 2 ops per MAC.
  double gops() const;
  Index stalls(StallCause c) const { return stall_cycles[static_cast<std::size_t>(c)]; }
};

/// One record per cycle per TEU: cycle,teu,event,bytes.
struct TraceSink {
  std::ostream* os = nullptr;
  bool enabled() const { return os != nullptr; }
};

class Machine {
 public:
  explicit Machine(const ArchConfig& cfg);
  ~Machine();
  Machine(Machine&&) noexcept;
  Machine& operator=(Machine&&) noexcept;

  const ArchConfig& config() const { return cfg_; }
  int fifo_links() const;

  /// Runs the whole workload.  Throws InternalError on a bank conflict, FIFO
  /// overflow or lack of progress.
  SimResult run(const Workload& w, const TileScheme& ts, const SharingPlan& sp,
                const PeFactorization& f, std::span<const InputTensor> inputs,
                TraceSink trace = {});

  /// Advance one global cycle of the current run.  Returns false once done.
  bool step();

 private:
  struct State;
  ArchConfig cfg_;
  std::unique_ptr<State> st_;
};

Machine build_machine(const ArchConfig& cfg);

/// Plans and runs `w` on a VectorMesh machine.
SimResult simulate_vm(const ArchConfig& cfg, const Workload& w, std::span<const InputTensor> inputs,
                      TraceSink trace = {});

}  // namespace vmesh
