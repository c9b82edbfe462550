// SPDX-FileCopyrightText: (c) 2026 The VectorMesh Simulator Authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <boost/rational.hpp>

#include "vmesh/bfn.hpp"
#include "vmesh/workload.hpp"

namespace vmesh {

using Rational = boost::rational<Index>;

std::string to_string(const Rational& r);

struct TileScheme {
  std::vector<Index> extents;
  std::vector<Index> input_footprints;  // words, bounding box of each image
  Index psum_words = 0;
  Rational bandwidth_per_mac{0};

  Index macs_per_tile() const;
  Index input_words() const;
  /// Number of tiles along every NDRange dimension (edge tiles included).
  std::vector<Index> tile_counts(const NDRange& r) const;
};

/// Words touched by tensor `t` over a tile box with the given extents.
Index tile_footprint(const TensorRef& t, std::span<const Index> extents);
Index psum_footprint(const Workload& w, std::span<const Index> extents);
TileScheme make_scheme(const Workload& w, std::vector<Index> extents);

struct TileSearch {
  Index input_buf_words = 0;
  Index psum_buf_words = 0;
  /// Cap on any single tensor footprint (one operand per physical buffer).
  std::optional<Index> per_tensor_words;
  /// Every extent 1..E instead of divisors plus powers of two.  Ranges of at
  /// most kExhaustiveTilePoints points are always searched exhaustively.
  bool exhaustive = false;
};

inline constexpr Index kExhaustiveTilePoints = Index{1} << 20;

/// Candidate extents along one dimension of extent `e`.
std::vector<Index> candidate_extents(Index e, bool exhaustive);

std::vector<TileScheme> enumerate_tiles(const Workload& w, const TileSearch& s);
std::vector<TileScheme> enumerate_tiles(const Workload& w, Index input_buf_words, Index psum_buf_words);
/// Minimal bandwidth_per_mac; ties by larger tile MAC count, then the
/// lexicographically smaller extent vector.  Throws ConfigError if nothing fits.
TileScheme select_tile(const Workload& w, const TileSearch& s);
TileScheme select_tile(const Workload& w, Index input_buf_words, Index psum_buf_words);
/// True when `a` is preferred over `b` under the select_tile ordering.
bool better_scheme(const TileScheme& a, const TileScheme& b);

// ---------------------------------------------------------------------------
// Mesh sharing

struct MeshShape {
  int rows = 1;
  int cols = 1;
  int teus() const { return rows * cols; }
};

/// Which parallel NDRange index walks the mesh rows / columns.
struct AxisAssignment {
  std::size_t row_dim = 0;
  std::size_t col_dim = 1;
};

/// Default: the two parallel indices with the most tiles (ties by larger extent).
AxisAssignment default_assignment(const Workload& w, const TileScheme& s);

struct TeuTile {
  bool active = false;
  std::vector<Index> lo;   // tile origin, full NDRange rank
  std::vector<Index> ext;  // tile extents (clipped at the NDRange edge)
};

/// One phase: every TEU works on the same temporal block of its own tile.
struct Phase {
  Index super_tile = 0;
  Index step = 0;
  int active_rows = 0;
  int active_cols = 0;
  /// Column whose TEUs fetch horizontally shared tensors this phase.
  int h_fetch_col = 0;
  /// Row whose TEUs fetch vertically shared tensors this phase.
  int v_fetch_row = 0;
};

struct SharingPlan {
  MeshShape mesh;
  AxisAssignment assignment;
  /// Tensor identical across a mesh row (forwarded over E/W FIFOs).
  std::vector<bool> horizontal;
  /// Tensor identical across a mesh column (forwarded over N/S FIFOs).
  std::vector<bool> vertical;
  std::vector<Index> tile_counts;
  Index super_tiles = 0;
  Index steps = 0;
  bool generalized_phase_rule = true;

  Index phases() const { return super_tiles * steps; }
  Phase phase(Index k) const;
  /// Tile handled by TEU (r, c) during super tile `st` and temporal `step`.
  TeuTile tile_of(const Workload& w, const TileScheme& s, Index st, Index step, int r, int c) const;
};

SharingPlan sharing_axes(const Workload& w, const TileScheme& s, MeshShape mesh,
                         AxisAssignment assignment);

// ---------------------------------------------------------------------------
// TEU lowering

/// Lane bits from bit 0 upward: dimension `dim` takes `bits` consecutive bits.
struct PeFactorization {
  struct Part {
    std::size_t dim;
    int bits;
  };
  std::vector<Part> parts;

  int total_bits() const;
  Index factor(std::size_t dim) const;
  int bit_offset(std::size_t dim) const;
  std::string to_string() const;
};

/// {dim, factor} pairs from the low lane bits upward; factors of 1 are dropped.
PeFactorization make_factorization(std::initializer_list<std::pair<std::size_t, int>> parts);

/// All ordered factorizations of 2^bits lanes over the parallel indices.
std::vector<PeFactorization> all_factorizations(std::size_t parallel_count, int bits);

struct TEUProgram {
  std::vector<Index> tile;
  PeFactorization factorization;
  int lane_bits = bfn::kBankBits;
  std::vector<Index> groups;  // lane groups per parallel dim
  Index lane_groups = 0;
  Index temporal_points = 0;
  std::vector<bfn::BankLayout> layouts;      // per input tensor, over its tile box
  std::vector<std::vector<Index>> coef;      // per input tensor, per NDRange dim
  std::vector<Index> box_origin_offset;      // per tensor, offset of tile-local coordinate 0
  Index padding_words = 0;

  Index cycles() const { return lane_groups * temporal_points; }
  double lane_utilization() const;
  /// Addresses issued to buffer `tensor` in `cycle` (temporal point major).
  bfn::BankAccess access(std::size_t tensor, Index cycle) const;
  /// Output slot (tile-local linear psum index) of each lane, -1 when masked.
  std::vector<Index> psum_slots(Index cycle) const;
};

/// Required pitch valuations for `t` under `f`; nullopt when no layout exists.
std::optional<bfn::AccessFamily> access_family(const TensorRef& t, const PeFactorization& f);

/// Throws InternalError if the factorization does not have 2^5 lanes or a
/// tensor cannot be laid out conflict-free.
TEUProgram lower_to_teu(const Workload& w, const TileScheme& s, const PeFactorization& f);

/// Every distinct address pattern of the program (lane groups at temporal
/// point 0; other points are translations) passes the bank check and routes
/// through the butterfly.  Returns the number of patterns checked.
Index verify_program(const TEUProgram& p);

// ---------------------------------------------------------------------------
// Mesh-aware planning

struct PlanTarget {
  MeshShape mesh;
  Index input_buf_words = 4096;  // per step, both operands
  Index per_tensor_words = 2048;
  Index psum_words = 1280;
  double dram_bytes_per_cycle = 32.0;
  double glb_bytes_per_cycle = 128.0;
  int word_bytes = 2;
  int psum_bytes = 4;
};

struct MeshPlan {
  TileScheme scheme;
  AxisAssignment assignment;
  SharingPlan sharing;
  PeFactorization factorization;
  double estimated_cycles = 0;
};

/// Chooses tile, axis assignment and lane factorization by modelled cycles.
/// `forced_tile` / `forced_assignment` pin those choices.
MeshPlan plan_for_mesh(const Workload& w, const PlanTarget& target,
                       std::optional<std::vector<Index>> forced_tile = std::nullopt,
                       std::optional<AxisAssignment> forced_assignment = std::nullopt);

void write_plan_json(std::ostream& os, const Workload& w, const MeshPlan& p);

}  // namespace vmesh
