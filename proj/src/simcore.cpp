// SPDX-FileCopyrightText: (c) 2026 The VectorMesh Simulator Authors
//
// SPDX-License-Identifier: Apache-2.0

#include "vmesh/simcore.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <ostream>

namespace vmesh {

void ArchConfig::validate() const {
  auto need = [](bool ok, const char* field, const std::string& why) {
    if (!ok) throw ConfigError(std::string("invalid ArchConfig.") + field + ": " + why);
  };
  need(mesh_rows >= 1, "mesh_rows", "must be >= 1");
  need(mesh_cols >= 1, "mesh_cols", "must be >= 1");
  need(pes_per_teu == (1 << bfn::kBankBits), "pes_per_teu", "must be 32 (2^5 lanes)");
  need(input_buf_bytes > 0, "input_buf_bytes", "must be positive");
  need(psum_buf_bytes > 0, "psum_buf_bytes", "must be positive");
  need(fifo_depth_entries > 0, "fifo_depth_entries", "must be positive");
  need(fifo_entry_words > 0, "fifo_entry_words", "must be positive");
  need(glb_bytes >= 4 * Index{fifo_entry_words} * word_bytes, "glb_bytes",
       "must hold at least four FIFO entries");
  need(clock_hz > 0, "clock_hz", "must be positive");
  need(dram_bytes_per_sec > 0, "dram_bytes_per_sec", "must be positive");
  need(glb_bytes_per_sec > 0, "glb_bytes_per_sec", "must be positive");
  need(dram_latency_cycles >= 0, "dram_latency_cycles", "must be >= 0");
  need(word_bytes > 0, "word_bytes", "must be positive");
  need(psum_bytes > 0, "psum_bytes", "must be positive");
}

PlanTarget ArchConfig::plan_target() const {
  PlanTarget t;
  t.mesh = {mesh_rows, mesh_cols};
  // Two input buffers, each double-buffered: one half of each per step.
  t.per_tensor_words = input_buf_bytes / 4 / word_bytes;
  t.input_buf_words = 2 * t.per_tensor_words;
  t.psum_words = psum_buf_bytes / psum_bytes;
  t.dram_bytes_per_cycle = dram_bytes_per_cycle();
  t.glb_bytes_per_cycle = glb_bytes_per_cycle();
  t.word_bytes = word_bytes;
  t.psum_bytes = psum_bytes;
  return t;
}

ArchConfig vm_config_for_pes(int pes) {
  ArchConfig c;
  if (pes == 128) {
    c.mesh_rows = c.mesh_cols = 2;
  } else if (pes == 512) {
    c.mesh_rows = c.mesh_cols = 4;
  } else {
    throw ConfigError("VectorMesh configurations exist for 128 and 512 PEs, got " + std::to_string(pes));
  }
  return c;
}

const char* to_string(StallCause c) {
  switch (c) {
    case StallCause::Dram: return "dram";
    case StallCause::Glb: return "glb";
    case StallCause::FifoEmpty: return "fifo-empty";
    case StallCause::FifoFull: return "fifo-full";
    case StallCause::TileBubble: return "tile-bubble";
  }
  return "?";
}

double SimResult::utilization() const {
  if (cycles == 0 || pes == 0) return 0.0;
  return static_cast<double>(macs) / (static_cast<double>(cycles) * pes);
}

double SimResult::gops() const {
  if (cycles == 0) return 0.0;
  return 2.0 * static_cast<double>(macs) / (static_cast<double>(cycles) / clock_hz) / 1e9;
}

Machine build_machine(const ArchConfig& cfg) { return Machine(cfg); }

int Machine::fifo_links() const {
  // Bidirectional links between horizontal and vertical neighbours.
  return cfg_.mesh_rows * (cfg_.mesh_cols - 1) + cfg_.mesh_cols * (cfg_.mesh_rows - 1);
}

}  // namespace vmesh
