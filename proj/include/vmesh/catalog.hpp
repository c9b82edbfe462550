// SPDX-FileCopyrightText: (c) 2026 The VectorMesh Simulator Authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "vmesh/workload.hpp"

namespace vmesh {

inline constexpr Index kDefaultSpatial = 56;

/// One catalog record.  Convolution entries use (stride, k_w, k_h, c_in, c_out,
/// spatial); correlation entries reuse c_in, spatial (output size) and k_w/k_h
/// as the displacement window; GEMM entries use (gemm_m, gemm_n, gemm_k).
struct CatalogEntry {
  std::string name;
  WorkloadKind kind = WorkloadKind::Conv;
  std::string group;  // "classic", "modern", "matching", "gemm"
  Index stride = 1;
  Index k_w = 1, k_h = 1;
  Index c_in = 1, c_out = 1;
  Index spatial = kDefaultSpatial;
  Index dilation = 1;
  Index gemm_m = 0, gemm_n = 0, gemm_k = 0;

  Workload build() const;
  bool operator==(const CatalogEntry&) const = default;
};

/// Every catalog entry; `spatial` overrides the input feature-map size of
/// convolution layers (output size for correlation).
std::vector<CatalogEntry> catalog_entries(Index spatial = kDefaultSpatial);
std::vector<Workload> catalog(Index spatial = kDefaultSpatial);
/// The classic CNN benchmark suite only.
std::vector<CatalogEntry> classic_suite(Index spatial = kDefaultSpatial);

std::optional<CatalogEntry> find_entry(const std::string& name, Index spatial = kDefaultSpatial);

/// JSON-lines serialization, one record per layer.
void write_catalog(std::ostream& os, const std::vector<CatalogEntry>& entries);
std::vector<CatalogEntry> read_catalog(std::istream& is);

}  // namespace vmesh
