// SPDX-FileCopyrightText: (c) 2026 The VectorMesh Simulator Authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "vmesh/workload.hpp"

namespace vmesh::bfn {

inline constexpr int kBankBits = 5;

/// One request word per PE.  Inactive lanes (masked tail of a tile) carry no
/// request and never conflict.
struct BankAccess {
  int bank_bits = kBankBits;
  std::vector<Index> addresses;
  std::vector<bool> active;  // empty means all lanes active

  int lanes() const { return 1 << bank_bits; }
  int bank(std::size_t lane) const {
    return static_cast<int>(addresses[lane] & ((Index{1} << bank_bits) - 1));
  }
  bool is_active(std::size_t lane) const { return active.empty() || active[lane]; }
};

struct ConflictReport {
  bool conflict_free = false;
  /// Bank serving each lane (-1 for inactive lanes).
  std::vector<int> bank_of_lane;
  /// Banks touched by two or more distinct addresses.
  std::vector<int> conflicting_banks;
};

/// A single cycle suffices iff every bank is asked for at most one distinct
/// address; lanes requesting the same address are served by multicast.
ConflictReport check_conflict_free(const BankAccess& a);

/// A_N = A_0 + sum_i 2^i * o_i * b_i(N) for every lane N of a 2^X-wide group.
/// Throws std::invalid_argument if any coefficient is even.
BankAccess odd_stride_addresses(Index a0, std::span<const Index> odd_coefs, int bank_bits);

/// Output-port source selection of one 2x2 switch.
enum class Source : std::uint8_t { None, Upper, Lower };

struct SwitchSetting {
  Source out_upper = Source::None;
  Source out_lower = Source::None;
};

/// Stage s pairs ports (p, p ^ 2^s); settings[s][k] is the k-th switch of the
/// stage in ascending order of its upper port.
struct ButterflyRoute {
  int bank_bits = kBankBits;
  std::vector<std::vector<SwitchSetting>> settings;
};

/// Switch settings that deliver every active lane its word, stage order bit 0
/// first.  Empty when two distinct words collide on a link.
std::optional<ButterflyRoute> route_butterfly(const BankAccess& a);

/// Push the bank output words (one per bank, indexed by bank) through the
/// configured switches; returns what each lane receives (0 when none).
std::vector<Index> simulate_butterfly(const ButterflyRoute& route, std::span<const Index> bank_words);

/// Placement of a tile tensor inside a banked buffer: address = sum coord * pitch.
struct BankLayout {
  std::vector<Index> extents;
  std::vector<Index> pitches;

  Index live_words() const;
  Index padded_words() const;
  Index padding_words() const { return padded_words() - live_words(); }
  /// Extra words inserted per buffer row (outermost pitch minus dense pitch).
  Index max_row_padding() const;
  Index address(std::span<const Index> coord) const;
};

/// Per tensor dimension, the exact 2-adic valuation its pitch must have so that
/// every lowered access is of odd-stride form; nullopt leaves it free.
struct AccessFamily {
  std::vector<std::optional<int>> pitch_valuation;

  static AccessFamily row_fetch(std::size_t rank);
  static AccessFamily broadcast(std::size_t rank);
  /// Windowed fetch whose lanes walk dimension `dim` (unit pitch valuation 0).
  static AccessFamily strided_window(std::size_t rank, std::size_t dim);
};

/// Smallest padding of the dense row-major layout satisfying `family`.
/// Throws InternalError when a constraint cannot be met.
BankLayout layout_pad_shuffle(std::span<const Index> tile_shape, const AccessFamily& family);

/// Smallest value >= n whose 2-adic valuation is exactly v.
Index next_with_valuation(Index n, int v);
int valuation(Index n);

/// Per-bank request counts accumulated over cycles, for the debug dump.
class BankHeatMap {
 public:
  explicit BankHeatMap(int bank_bits = kBankBits) : counts_(std::size_t{1} << bank_bits, 0) {}
  void record(const BankAccess& a);
  void write(std::ostream& os) const;
  const std::vector<std::uint64_t>& counts() const { return counts_; }

 private:
  std::vector<std::uint64_t> counts_;
  std::uint64_t cycles_ = 0;
};

}  // namespace vmesh::bfn
