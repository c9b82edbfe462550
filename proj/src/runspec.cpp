// SPDX-FileCopyrightText: (c) 2026 The VectorMesh Simulator Authors
//
// SPDX-License-Identifier: Apache-2.0

#include "vmesh/runspec.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>
#include <openssl/evp.h>

namespace vmesh {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

const std::set<std::string> kVmKeys = {"mesh_rows",         "mesh_cols",          "input_buf_bytes",
                                       "psum_buf_bytes",    "fifo_depth_entries", "fifo_entry_words",
                                       "glb_bytes",         "clock_hz",           "dram_bytes_per_sec",
                                       "glb_bytes_per_sec", "dram_latency_cycles"};
const std::set<std::string> kBaselineKeys = {"pe_rows",         "pe_cols",           "local_buf_bytes_per_pe",
                                             "glb_bytes",       "clock_hz",          "dram_bytes_per_sec",
                                             "glb_bytes_per_sec", "dram_latency_cycles"};

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [k, v] : j.items()) {
    (void)v;
    if (!allowed.count(k)) throw ConfigError("unknown key '" + k + "' in " + where);
  }
}

template <typename T>
std::vector<T> one_or_many(const json& j, const std::string& key) {
  try {
    if (j.is_array()) return j.get<std::vector<T>>();
    return {j.get<T>()};
  } catch (const json::exception& e) {
    throw ConfigError("bad value for '" + key + "': " + e.what());
  }
}

template <typename T>
T get_as(const json& j, const std::string& key) {
  try {
    return j.get<T>();
  } catch (const json::exception& e) {
    throw ConfigError("bad value for '" + key + "': " + e.what());
  }
}

CatalogEntry parse_inline(const json& j) {
  check_keys(j, {"name", "type", "group", "stride", "kernel", "channels", "spatial", "dilation", "gemm"},
             "inline workload");
  std::istringstream line(j.dump());
  try {
    auto v = read_catalog(line);
    if (v.size() != 1) throw ConfigError("inline workload did not parse");
    return v.front();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("inline workload: ") + e.what());
  }
}

bool known_arch(const std::string& a) {
  return a == "vectormesh" || a == "systolic" || a == "row-stationary";
}

ordered_json vm_json(const ArchConfig& c) {
  ordered_json j;
  j["mesh_rows"] = c.mesh_rows;
  j["mesh_cols"] = c.mesh_cols;
  j["pes_per_teu"] = c.pes_per_teu;
  j["input_buf_bytes"] = c.input_buf_bytes;
  j["psum_buf_bytes"] = c.psum_buf_bytes;
  j["fifo_depth_entries"] = c.fifo_depth_entries;
  j["fifo_entry_words"] = c.fifo_entry_words;
  j["glb_bytes"] = c.glb_bytes;
  j["clock_hz"] = c.clock_hz;
  j["dram_bytes_per_sec"] = c.dram_bytes_per_sec;
  j["glb_bytes_per_sec"] = c.glb_bytes_per_sec;
  j["dram_latency_cycles"] = c.dram_latency_cycles;
  j["word_bytes"] = c.word_bytes;
  j["psum_bytes"] = c.psum_bytes;
  return j;
}

ordered_json baseline_json(const BaselineConfig& c) {
  ordered_json j;
  j["kind"] = to_string(c.kind);
  j["pe_rows"] = c.pe_rows;
  j["pe_cols"] = c.pe_cols;
  j["local_buf_bytes_per_pe"] = c.local_buf_bytes_per_pe;
  j["glb_bytes"] = c.glb_bytes;
  j["clock_hz"] = c.clock_hz;
  j["dram_bytes_per_sec"] = c.dram_bytes_per_sec;
  j["glb_bytes_per_sec"] = c.glb_bytes_per_sec;
  j["dram_latency_cycles"] = c.dram_latency_cycles;
  j["word_bytes"] = c.word_bytes;
  j["psum_bytes"] = c.psum_bytes;
  return j;
}

BaselineKind baseline_kind(const std::string& arch) {
  return arch == "systolic" ? BaselineKind::Systolic : BaselineKind::RowStationary;
}

std::string stall_key(std::size_t i) {
  std::string k = std::string("stall_") + to_string(static_cast<StallCause>(i));
  std::replace(k.begin(), k.end(), '-', '_');
  return k;
}

// "gemm:M,N,K"
CatalogEntry gemm_selector(const std::string& sel) {
  CatalogEntry g;
  g.kind = WorkloadKind::Gemm;
  g.group = "gemm";
  char tail = 0;
  long long m = 0, n = 0, k = 0;
  if (std::sscanf(sel.c_str() + 5, "%lld,%lld,%lld%c", &m, &n, &k, &tail) != 3 || m < 1 || n < 1 || k < 1)
    throw ConfigError("bad GEMM selector '" + sel + "' (expected gemm:M,N,K)");
  g.gemm_m = m;
  g.gemm_n = n;
  g.gemm_k = k;
  g.name = "GEMM " + std::to_string(m) + "x" + std::to_string(n) + "x" + std::to_string(k);
  return g;
}

}  // namespace

RunSpec parse_run_spec(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  check_keys(j,
             {"schema", "arch", "pes", "workload", "inline_workloads", "spatial", "seed", "schedule",
              "machine", "out", "trace", "workers"},
             "config");
  if (!j.contains("schema")) throw ConfigError("config is missing 'schema'");
  RunSpec s;
  s.schema = get_as<int>(j["schema"], "schema");
  if (s.schema != kRunSpecSchema)
    throw ConfigError("unsupported config schema " + std::to_string(s.schema) + " (expected " +
                      std::to_string(kRunSpecSchema) + ")");
  if (j.contains("arch")) s.archs = one_or_many<std::string>(j["arch"], "arch");
  if (j.contains("pes")) s.pes = one_or_many<int>(j["pes"], "pes");
  if (j.contains("workload")) s.workloads = one_or_many<std::string>(j["workload"], "workload");
  if (j.contains("inline_workloads")) {
    if (!j["inline_workloads"].is_array()) throw ConfigError("'inline_workloads' must be an array");
    for (const auto& e : j["inline_workloads"]) s.inline_workloads.push_back(parse_inline(e));
  }
  if (j.contains("spatial")) s.spatial = get_as<Index>(j["spatial"], "spatial");
  if (j.contains("seed")) s.seed = get_as<std::uint64_t>(j["seed"], "seed");
  if (j.contains("schedule")) {
    const json& sc = j["schedule"];
    check_keys(sc, {"tile", "row_dim", "col_dim"}, "schedule");
    if (sc.contains("tile")) s.tile = get_as<std::vector<Index>>(sc["tile"], "schedule.tile");
    if (sc.contains("row_dim") != sc.contains("col_dim"))
      throw ConfigError("schedule needs both row_dim and col_dim");
    if (sc.contains("row_dim"))
      s.assignment = AxisAssignment{get_as<std::size_t>(sc["row_dim"], "schedule.row_dim"),
                                    get_as<std::size_t>(sc["col_dim"], "schedule.col_dim")};
  }
  if (j.contains("machine")) {
    std::set<std::string> allowed = kVmKeys;
    allowed.insert(kBaselineKeys.begin(), kBaselineKeys.end());
    check_keys(j["machine"], allowed, "machine");
    for (const auto& [k, v] : j["machine"].items())
      s.overrides.push_back({k, get_as<double>(v, "machine." + k)});
  }
  if (j.contains("out")) s.out = get_as<std::string>(j["out"], "out");
  if (j.contains("trace")) s.trace = get_as<bool>(j["trace"], "trace");
  if (j.contains("workers")) s.workers = get_as<int>(j["workers"], "workers");
  for (const auto& a : s.archs)
    if (!known_arch(a)) throw ConfigError("unknown arch '" + a + "'");
  if (s.workers < 1) throw ConfigError("workers must be >= 1");
  if (s.spatial < 1) throw ConfigError("spatial must be >= 1");
  return s;
}

RunSpec load_run_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_run_spec(ss.str());
}

std::vector<CatalogEntry> resolve_workloads(const RunSpec& s) {
  std::vector<CatalogEntry> out;
  for (const auto& name : s.workloads) {
    if (name == "suite:classic") {
      for (auto& e : classic_suite(s.spatial)) out.push_back(e);
    } else if (name == "suite:all") {
      for (auto& e : catalog_entries(s.spatial)) out.push_back(e);
    } else if (name.rfind("gemm:", 0) == 0) {
      out.push_back(gemm_selector(name));
    } else if (auto e = find_entry(name, s.spatial)) {
      out.push_back(*e);
    } else {
      throw ConfigError("unknown workload '" + name + "' (see list-workloads)");
    }
  }
  for (const auto& e : s.inline_workloads) out.push_back(e);
  if (out.empty()) throw ConfigError("no workload selected");
  return out;
}

ArchConfig resolve_vm_config(const RunSpec& s, int pes) {
  ArchConfig c = vm_config_for_pes(pes);
  for (const auto& o : s.overrides) {
    if (!kVmKeys.count(o.key)) continue;
    const auto iv = static_cast<Index>(o.value);
    if (o.key == "mesh_rows") c.mesh_rows = static_cast<int>(iv);
    else if (o.key == "mesh_cols") c.mesh_cols = static_cast<int>(iv);
    else if (o.key == "input_buf_bytes") c.input_buf_bytes = iv;
    else if (o.key == "psum_buf_bytes") c.psum_buf_bytes = iv;
    else if (o.key == "fifo_depth_entries") c.fifo_depth_entries = static_cast<int>(iv);
    else if (o.key == "fifo_entry_words") c.fifo_entry_words = static_cast<int>(iv);
    else if (o.key == "glb_bytes") c.glb_bytes = iv;
    else if (o.key == "clock_hz") c.clock_hz = o.value;
    else if (o.key == "dram_bytes_per_sec") c.dram_bytes_per_sec = o.value;
    else if (o.key == "glb_bytes_per_sec") c.glb_bytes_per_sec = o.value;
    else if (o.key == "dram_latency_cycles") c.dram_latency_cycles = static_cast<int>(iv);
  }
  c.validate();
  return c;
}

BaselineConfig resolve_baseline_config(const RunSpec& s, BaselineKind kind, int pes) {
  BaselineConfig c = baseline_config(kind, pes);
  for (const auto& o : s.overrides) {
    if (!kBaselineKeys.count(o.key)) continue;
    const auto iv = static_cast<Index>(o.value);
    if (o.key == "pe_rows") c.pe_rows = static_cast<int>(iv);
    else if (o.key == "pe_cols") c.pe_cols = static_cast<int>(iv);
    else if (o.key == "local_buf_bytes_per_pe") {
      if (kind == BaselineKind::RowStationary) c.local_buf_bytes_per_pe = iv;
    } else if (o.key == "glb_bytes") c.glb_bytes = iv;
    else if (o.key == "clock_hz") c.clock_hz = o.value;
    else if (o.key == "dram_bytes_per_sec") c.dram_bytes_per_sec = o.value;
    else if (o.key == "glb_bytes_per_sec") c.glb_bytes_per_sec = o.value;
    else if (o.key == "dram_latency_cycles") c.dram_latency_cycles = static_cast<int>(iv);
  }
  c.validate();
  return c;
}

std::vector<Cell> expand_cells(const RunSpec& s) {
  std::vector<Cell> cells;
  const auto wl = resolve_workloads(s);
  for (const auto& a : s.archs)
    for (int p : s.pes)
      for (const auto& e : wl) cells.push_back({a, p, e});
  return cells;
}

std::string cell_manifest(const RunSpec& s, const Cell& c) {
  ordered_json m;
  m["tool"] = "vmesh";
  m["schema"] = s.schema;
  m["arch"] = c.arch;
  m["pes"] = c.pes;
  if (c.arch == "vectormesh") m["machine"] = vm_json(resolve_vm_config(s, c.pes));
  else m["machine"] = baseline_json(resolve_baseline_config(s, baseline_kind(c.arch), c.pes));
  std::ostringstream e;
  write_catalog(e, {c.workload});
  m["workload"] = ordered_json::parse(e.str());
  m["seed"] = s.seed;
  if (c.arch == "vectormesh" && (s.tile || s.assignment)) {
    ordered_json sc;
    if (s.tile) sc["tile"] = *s.tile;
    if (s.assignment) {
      sc["row_dim"] = s.assignment->row_dim;
      sc["col_dim"] = s.assignment->col_dim;
    }
    m["schedule"] = sc;
  }
  return m.dump();
}

std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw InternalError("SHA-256 digest failed");
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", md[i]);
    hex += buf;
  }
  return hex;
}

std::string output_digest(const OutputTensor& t) {
  std::string bytes(reinterpret_cast<const char*>(t.data.data()), t.data.size() * sizeof(t.data[0]));
  return sha256_hex(bytes);
}

std::string cell_slug(const Cell& c) {
  std::string name;
  for (char ch : c.workload.name) name += (std::isalnum(static_cast<unsigned char>(ch)) ? ch : '_');
  return c.arch + "_" + std::to_string(c.pes) + "_" + name;
}

CellOutcome run_cell(const RunSpec& s, const Cell& c, std::ostream* trace) {
  CellOutcome o;
  o.cell = c;
  o.manifest_hash = sha256_hex(cell_manifest(s, c));
  const Workload w = c.workload.build();
  const auto inputs = random_inputs(w, s.seed);
  if (trace) *trace << "# manifest_hash=" << o.manifest_hash << '\n';
  SimResult r;
  MachineRates rates;
  if (c.arch == "vectormesh") {
    const ArchConfig cfg = resolve_vm_config(s, c.pes);
    Machine m = build_machine(cfg);
    const MeshPlan plan = plan_for_mesh(w, cfg.plan_target(), s.tile, s.assignment);
    r = m.run(w, plan.scheme, plan.sharing, plan.factorization, inputs, TraceSink{trace});
    rates = rates_of(cfg);
  } else {
    const BaselineConfig cfg = resolve_baseline_config(s, baseline_kind(c.arch), c.pes);
    r = c.arch == "systolic" ? run_systolic(cfg, w, inputs) : run_eyeriss(cfg, w, inputs);
    rates = rates_of(cfg);
  }
  o.row = make_row(w, r, rates);
  o.result = std::move(r);
  return o;
}

void write_stats(std::ostream& os, const CellOutcome& o) {
  os << "# manifest_hash=" << o.manifest_hash << '\n';
  os << "key,value\n";
  os << "status," << o.status << '\n';
  os << "arch," << o.cell.arch << '\n';
  os << "workload," << o.cell.workload.name << '\n';
  os << "pes," << o.cell.pes << '\n';
  if (!o.message.empty()) os << "message," << o.message << '\n';
  if (!o.row || !o.result) return;
  const auto& r = *o.result;
  const auto& row = *o.row;
  char buf[64];
  auto f = [&](double x) {
    std::snprintf(buf, sizeof buf, "%.6f", x);
    return std::string(buf);
  };
  os << "cycles," << r.cycles << '\n'
     << "macs," << r.macs << '\n'
     << "utilization," << f(row.utilization) << '\n'
     << "gops," << f(row.gops) << '\n'
     << "roofline_gops," << f(row.roofline_gops) << '\n'
     << "intensity," << f(row.intensity) << '\n'
     << "glb_read_bytes," << r.glb_read_bytes << '\n'
     << "glb_write_bytes," << r.glb_write_bytes << '\n'
     << "glb_fill_bytes," << r.glb_fill_bytes << '\n'
     << "dram_read_bytes," << r.dram_read_bytes << '\n'
     << "dram_write_bytes," << r.dram_write_bytes << '\n'
     << "fifo_words_transferred," << r.fifo_words_transferred << '\n'
     << "glb_per_kmac," << f(row.glb_norm) << '\n'
     << "dram_per_kmac," << f(row.dram_norm) << '\n';
  for (std::size_t i = 0; i < kStallCauses; ++i)
    os << stall_key(i) << ',' << r.stall_cycles[i] << '\n';
  os << "output_sha256," << output_digest(r.output) << '\n';
}

std::optional<ReportRow> read_stats(std::istream& is, std::string* status) {
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) continue;
    kv[line.substr(0, comma)] = line.substr(comma + 1);
  }
  if (status) *status = kv.count("status") ? kv["status"] : "";
  if (kv["status"] != "ok" || !kv.count("cycles")) return std::nullopt;
  try {
    ReportRow r;
    r.arch = kv.at("arch");
    r.workload = kv.at("workload");
    r.pes = std::stoi(kv.at("pes"));
    r.cycles = std::stoll(kv.at("cycles"));
    r.macs = std::stoll(kv.at("macs"));
    r.utilization = std::stod(kv.at("utilization"));
    r.gops = std::stod(kv.at("gops"));
    r.roofline_gops = std::stod(kv.at("roofline_gops"));
    r.intensity = std::stod(kv.at("intensity"));
    r.glb_norm = std::stod(kv.at("glb_per_kmac"));
    r.dram_norm = std::stod(kv.at("dram_per_kmac"));
    for (std::size_t i = 0; i < kStallCauses; ++i)
      r.stalls[i] = std::stoll(kv.at(stall_key(i)));
    return r;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("malformed stats file: ") + e.what());
  }
}

}  // namespace vmesh
