// SPDX-FileCopyrightText: (c) 2026 The VectorMesh Simulator Authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "vmesh/analysis.hpp"
#include "vmesh/baselines.hpp"
#include "vmesh/catalog.hpp"
#include "vmesh/simcore.hpp"

namespace vmesh {

inline constexpr int kRunSpecSchema = 1;

/// Process exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitConfig = 2,
  kExitUnsupported = 3,
  kExitInternal = 4,
};

struct Override {
  std::string key;
  double value = 0;
};

struct RunSpec {
  int schema = kRunSpecSchema;
  std::vector<std::string> archs{"vectormesh"};
  std::vector<int> pes{128};
  /// Catalog names; "suite:classic" and "suite:all" expand to groups and
  /// "gemm:M,N,K" builds a matrix product.
  std::vector<std::string> workloads;
  std::vector<CatalogEntry> inline_workloads;
  Index spatial = 56;
  std::uint64_t seed = 1;
  std::optional<std::vector<Index>> tile;
  std::optional<AxisAssignment> assignment;
  std::vector<Override> overrides;  // machine fields by name
  std::string out = "out";
  bool trace = false;
  int workers = 1;
};

/// Throws ConfigError on unknown keys, bad types or a schema mismatch.
RunSpec parse_run_spec(const std::string& json_text);
RunSpec load_run_spec(const std::string& path);

/// Resolved workload list (catalog lookups plus inline entries, in order).
std::vector<CatalogEntry> resolve_workloads(const RunSpec& s);

ArchConfig resolve_vm_config(const RunSpec& s, int pes);
BaselineConfig resolve_baseline_config(const RunSpec& s, BaselineKind kind, int pes);

/// One fully resolved simulation.
struct Cell {
  std::string arch;
  int pes = 128;
  CatalogEntry workload;
};

std::vector<Cell> expand_cells(const RunSpec& s);

/// Canonical text of everything that determines a cell's result.
std::string cell_manifest(const RunSpec& s, const Cell& c);
std::string sha256_hex(const std::string& data);

struct CellOutcome {
  Cell cell;
  std::string manifest_hash;
  std::string status = "ok";  // ok | unsupported | config-error | internal-error
  std::string message;
  std::optional<ReportRow> row;
  std::optional<SimResult> result;
};

/// Runs one cell; trace records go to `trace` when non-null.  Errors are
/// propagated as exceptions.
CellOutcome run_cell(const RunSpec& s, const Cell& c, std::ostream* trace = nullptr);

/// Stats file: comment line with the manifest hash, then key,value rows.
void write_stats(std::ostream& os, const CellOutcome& o);
/// Parses a stats file written by write_stats back into a report row.
std::optional<ReportRow> read_stats(std::istream& is, std::string* status = nullptr);

std::string output_digest(const OutputTensor& t);
std::string cell_slug(const Cell& c);

}  // namespace vmesh
