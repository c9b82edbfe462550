// SPDX-FileCopyrightText: (c) 2026 The VectorMesh Simulator Authors
//
// SPDX-License-Identifier: Apache-2.0

#include "vmesh/baselines.hpp"

#include <algorithm>
#include <cmath>

namespace vmesh {

const char* to_string(BaselineKind k) {
  return k == BaselineKind::Systolic ? "systolic" : "row-stationary";
}

void BaselineConfig::validate() const {
  auto need = [](bool ok, const char* field, const std::string& why) {
    if (!ok) throw ConfigError(std::string("invalid BaselineConfig.") + field + ": " + why);
  };
  need(pe_rows >= 1, "pe_rows", "must be >= 1");
  need(pe_cols >= 1, "pe_cols", "must be >= 1");
  if (kind == BaselineKind::Systolic)
    need(local_buf_bytes_per_pe == 0, "local_buf_bytes_per_pe", "systolic PEs have no local buffer");
  else
    need(local_buf_bytes_per_pe > 0, "local_buf_bytes_per_pe", "row-stationary PEs need a local buffer");
  need(glb_bytes > 0, "glb_bytes", "must be positive");
  need(clock_hz > 0, "clock_hz", "must be positive");
  need(dram_bytes_per_sec > 0, "dram_bytes_per_sec", "must be positive");
  need(glb_bytes_per_sec > 0, "glb_bytes_per_sec", "must be positive");
  need(dram_latency_cycles >= 0, "dram_latency_cycles", "must be >= 0");
  need(word_bytes > 0, "word_bytes", "must be positive");
  need(psum_bytes > 0, "psum_bytes", "must be positive");
}

BaselineConfig baseline_config(BaselineKind kind, int pes) {
  BaselineConfig c;
  c.kind = kind;
  if (pes == 128) {
    c.pe_rows = 8;
    c.pe_cols = 16;
  } else if (pes == 512) {
    c.pe_rows = 16;
    c.pe_cols = 32;
  } else {
    throw ConfigError("baseline arrays exist for 128 and 512 PEs, got " + std::to_string(pes));
  }
  if (kind == BaselineKind::Systolic) {
    c.glb_bytes = Index{1024} * pes;
    c.local_buf_bytes_per_pe = 0;
  } else {
    c.glb_bytes = Index{512} * pes;
    c.local_buf_bytes_per_pe = 307;  // 0.3 KB
  }
  return c;
}

bool baseline_supports(const Workload& w, std::string* why) {
  auto no = [&](const std::string& m) {
    if (why) *why = m;
    return false;
  };
  if (w.kind == WorkloadKind::Correlation)
    return no("correlation has no stationary operand in the im2col GEMM view");
  if (w.kind == WorkloadKind::Depthwise)
    return no("depthwise convolution does not lower to a single im2col GEMM");
  if (w.kind == WorkloadKind::Conv && w.conv.dilation > 1)
    return no("dilated convolution is not supported by the baseline dataflow models");
  if (w.inputs.size() != 2) return no("baselines need exactly two input tensors");
  for (std::size_t d = 0; d < w.parallel_count; ++d) {
    const bool s = w.inputs[0].map.independent_of(d);
    const bool t = w.inputs[1].map.independent_of(d);
    if (s == t) return no("parallel index " + std::to_string(d) + " does not split into GEMM rows or columns");
  }
  return true;
}

namespace {

void require_support(const Workload& w) {
  std::string why;
  if (!baseline_supports(w, &why)) throw UnsupportedWorkload(w.name + ": " + why);
}

// Separable address tables of the im2col GEMM view: tensor 0 streams along
// rows m, tensor 1 is stationary along columns n, k is the reduction.
struct GemmView {
  Index M = 1, N = 1, K = 1;
  std::vector<Index> s_base, o_m;  // per m
  std::vector<Index> t_base, o_n;  // per n
  std::vector<Index> s_off, t_off;  // per k

  GemmView(const Workload& w) {
    const LinearAccess s = linearize(w.inputs[0].map, w.inputs[0].shape);
    const LinearAccess t = linearize(w.inputs[1].map, w.inputs[1].shape);
    const std::vector<Index> ost = OutputTensor(w.output_shape).strides();
    std::vector<std::size_t> md, nd, kd;
    for (std::size_t d = 0; d < w.parallel_count; ++d)
      (w.inputs[0].map.independent_of(d) ? nd : md).push_back(d);
    for (std::size_t d = w.parallel_count; d < w.ndrange.rank(); ++d) kd.push_back(d);

    auto build = [&](const std::vector<std::size_t>& dims, auto&& emit) {
      Index n = 1;
      for (std::size_t d : dims) n *= w.ndrange.extents[d];
      std::vector<Index> x(dims.size(), 0);
      for (Index i = 0; i < n; ++i) {
        emit(dims, x);
        for (std::size_t j = dims.size(); j-- > 0;) {
          if (++x[j] < w.ndrange.extents[dims[j]]) break;
          x[j] = 0;
        }
      }
      return n;
    };
    M = build(md, [&](const auto& dims, const auto& x) {
      Index a = s.base, o = 0;
      for (std::size_t j = 0; j < dims.size(); ++j) {
        a += s.coef[dims[j]] * x[j];
        o += ost[dims[j]] * x[j];
      }
      s_base.push_back(a);
      o_m.push_back(o);
    });
    N = build(nd, [&](const auto& dims, const auto& x) {
      Index a = t.base, o = 0;
      for (std::size_t j = 0; j < dims.size(); ++j) {
        a += t.coef[dims[j]] * x[j];
        o += ost[dims[j]] * x[j];
      }
      t_base.push_back(a);
      o_n.push_back(o);
    });
    K = build(kd, [&](const auto& dims, const auto& x) {
      Index a = 0, b = 0;
      for (std::size_t j = 0; j < dims.size(); ++j) {
        a += s.coef[dims[j]] * x[j];
        b += t.coef[dims[j]] * x[j];
      }
      s_off.push_back(a);
      t_off.push_back(b);
    });
  }

  void accumulate(std::span<const InputTensor> in, Index m0, Index m1, Index n0, Index n1, Index k0,
                  Index k1, OutputTensor& out) const {
    const std::int32_t* S = in[0].data.data();
    const std::int32_t* T = in[1].data.data();
    for (Index m = m0; m < m1; ++m) {
      const std::int32_t* sp = S + s_base[static_cast<std::size_t>(m)];
      for (Index n = n0; n < n1; ++n) {
        const std::int32_t* tp = T + t_base[static_cast<std::size_t>(n)];
        std::int64_t acc = 0;
        for (Index k = k0; k < k1; ++k)
          acc += static_cast<std::int64_t>(sp[s_off[static_cast<std::size_t>(k)]]) *
                 tp[t_off[static_cast<std::size_t>(k)]];
        out.data[static_cast<std::size_t>(o_m[static_cast<std::size_t>(m)] +
                                          o_n[static_cast<std::size_t>(n)])] += acc;
      }
    }
  }
};

SimResult blank_result(const BaselineConfig& cfg, const Workload& w) {
  SimResult r;
  r.arch = to_string(cfg.kind);
  r.workload = w.name;
  r.pes = cfg.pes();
  r.clock_hz = cfg.clock_hz;
  r.output = OutputTensor(w.output_shape);
  return r;
}

Index ceil_div(Index a, Index b) { return (a + b - 1) / b; }

Index elements(const TensorRef& t) {
  Index n = 1;
  for (Index e : t.shape) n *= e;
  return n;
}

// Charge one pass: `busy` issue cycles plus `fill` skew cycles, bounded below
// by the GLB and DRAM transfer times of the pass.
void charge(SimResult& r, const BaselineConfig& cfg, Index busy, Index fill, Index glb_bytes,
            Index dram_bytes) {
  const Index glb = static_cast<Index>(std::ceil(static_cast<double>(glb_bytes) / cfg.glb_bytes_per_cycle()));
  const Index dram = static_cast<Index>(std::ceil(static_cast<double>(dram_bytes) / cfg.dram_bytes_per_cycle()));
  const Index mem = std::max(glb, dram);
  const Index cycles = std::max(busy + fill, mem);
  r.cycles += cycles;
  r.stall_cycles[static_cast<std::size_t>(StallCause::TileBubble)] += std::min(fill, cycles - busy);
  if (mem > busy + fill)
    r.stall_cycles[static_cast<std::size_t>(dram >= glb ? StallCause::Dram : StallCause::Glb)] +=
        mem - busy - fill;
}

}  // namespace

SimResult run_systolic(const BaselineConfig& cfg, const Workload& w, std::span<const InputTensor> inputs) {
  cfg.validate();
  require_support(w);
  check_input_shapes(w, inputs);
  const GemmView v(w);
  SimResult r = blank_result(cfg, w);
  const Index R = cfg.pe_rows, C = cfg.pe_cols;
  const Index wb = cfg.word_bytes, pb = cfg.psum_bytes;

  // A streamed tensor that fits half the GLB is loaded once; otherwise every
  // pass re-reads its im2col rows from DRAM.
  const Index stream_bytes = elements(w.inputs[0]) * wb;
  const bool resident = stream_bytes <= cfg.glb_bytes / 2;
  if (resident) {
    r.dram_read_bytes += stream_bytes;
    r.glb_fill_bytes += stream_bytes;
    charge(r, cfg, 0, 0, 0, stream_bytes);
  }
  r.cycles += cfg.dram_latency_cycles;
  r.stall_cycles[static_cast<std::size_t>(StallCause::Dram)] += cfg.dram_latency_cycles;

  for (Index n0 = 0; n0 < v.N; n0 += C) {
    const Index nt = std::min(C, v.N - n0);
    const Index mg = std::max<Index>(1, (cfg.glb_bytes / 2) / (nt * pb));
    for (Index m0 = 0; m0 < v.M; m0 += mg) {
      const Index mb = std::min(mg, v.M - m0);
      for (Index k0 = 0; k0 < v.K; k0 += R) {
        const Index kt = std::min(R, v.K - k0);
        const bool first = k0 == 0, last = k0 + kt == v.K;
        Index glb_rd = mb * kt * wb + kt * nt * wb + (first ? 0 : mb * nt * pb);
        Index glb_wr = mb * nt * pb;
        Index dram_rd = kt * nt * wb + (resident ? 0 : mb * kt * wb);
        Index dram_wr = last ? mb * nt * pb : 0;
        r.glb_read_bytes += glb_rd;
        r.glb_write_bytes += glb_wr;
        r.dram_read_bytes += dram_rd;
        r.glb_fill_bytes += dram_rd;
        r.dram_write_bytes += dram_wr;
        charge(r, cfg, mb, R + C - 1, glb_rd + glb_wr, dram_rd + dram_wr);
        v.accumulate(inputs, m0, m0 + mb, n0, n0 + nt, k0, k0 + kt, r.output);
        r.macs += mb * nt * kt;
      }
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// Row stationary

Index RowStationaryMapping::local_bytes(int word_bytes, int psum_bytes) const {
  return filters_per_pe * channels_per_pe * kernel_width * word_bytes +
         channels_per_pe * kernel_width * word_bytes + filters_per_pe * psum_bytes;
}

namespace {

// Convolution geometry seen by the row-stationary array; a GEMM is a 1x1
// convolution over a single-column image.
struct RsShape {
  int filt = 0, ow = -1, oh = 0, ci = 0, kw = -1, kh = -1;
  Index C_o = 1, o_w = 1, o_h = 1, C_i = 1, k_w = 1, k_h = 1, stride = 1, dilation = 1;

  explicit RsShape(const Workload& w) {
    const auto& e = w.ndrange.extents;
    if (w.kind == WorkloadKind::Gemm) {
      oh = 0;
      filt = 1;
      ci = 2;
    } else {
      filt = 0;
      ow = 1;
      oh = 2;
      ci = 3;
      kw = 4;
      kh = 5;
      stride = w.conv.stride;
      dilation = w.conv.dilation;
    }
    C_o = e[static_cast<std::size_t>(filt)];
    o_h = e[static_cast<std::size_t>(oh)];
    C_i = e[static_cast<std::size_t>(ci)];
    if (ow >= 0) o_w = e[static_cast<std::size_t>(ow)];
    if (kw >= 0) k_w = e[static_cast<std::size_t>(kw)];
    if (kh >= 0) k_h = e[static_cast<std::size_t>(kh)];
  }
  Index in_cols() const { return (o_w - 1) * stride + (k_w - 1) * dilation + 1; }
};

struct PassCost {
  Index busy = 0, fill = 0, glb = 0, dram = 0, macs = 0;
};

struct RsPlan {
  RowStationaryMapping m;
  bool inputs_resident = false;
  bool weights_resident = false;
};

PassCost rs_pass(const BaselineConfig& cfg, const RsShape& g, const RsPlan& pl, Index f_act,
                 Index e_act, Index q_act, Index kh_act, bool first, bool last) {
  const auto& m = pl.m;
  const Index wb = cfg.word_bytes, pb = cfg.psum_bytes;
  PassCost c;
  c.busy = ceil_div(f_act, m.horizontal_sets) * ceil_div(q_act, m.vertical_sets) * g.k_w * g.o_w;
  c.fill = m.set_height + m.set_width - 1;
  const Index weights = f_act * q_act * kh_act * g.k_w * wb;
  const Index span = (e_act - 1) * g.stride + (kh_act - 1) * g.dilation + 1;
  const Index in = q_act * span * g.in_cols() * wb;  // multicast: one GLB read per word
  const Index ps = f_act * e_act * g.o_w * pb;
  c.glb = weights + in + ps + (first ? 0 : ps);
  c.dram = (pl.weights_resident ? 0 : weights) + (pl.inputs_resident ? 0 : in) + (last ? ps : 0);
  c.macs = f_act * q_act * e_act * g.o_w * g.k_w * kh_act;
  return c;
}

Index pass_cycles(const BaselineConfig& cfg, const PassCost& c) {
  const double mem = std::max(static_cast<double>(c.glb) / cfg.glb_bytes_per_cycle(),
                              static_cast<double>(c.dram) / cfg.dram_bytes_per_cycle());
  return std::max(c.busy + c.fill, static_cast<Index>(std::ceil(mem)));
}

RsPlan plan_rs(const BaselineConfig& cfg, const Workload& w) {
  const RsShape g(w);
  RsPlan pl;
  auto& m = pl.m;
  m.kernel_width = g.k_w;
  m.folds = static_cast<int>(ceil_div(g.k_h, cfg.pe_rows));
  m.set_height = static_cast<int>(ceil_div(g.k_h, m.folds));
  m.vertical_sets = cfg.pe_rows / m.set_height;
  m.set_width = static_cast<int>(std::min<Index>(g.o_h, cfg.pe_cols));
  m.horizontal_sets = cfg.pe_cols / m.set_width;
  pl.inputs_resident = elements(w.inputs[0]) * cfg.word_bytes <= cfg.glb_bytes / 2;
  pl.weights_resident = elements(w.inputs[1]) * cfg.word_bytes <= cfg.glb_bytes / 4;

  const Index u = m.horizontal_sets, v = m.vertical_sets;
  double best_cost = -1;
  Index best_glb = 0;
  for (Index p = 1; p <= ceil_div(g.C_o, u); ++p) {
    if (u * p * m.set_width * g.o_w * cfg.psum_bytes > cfg.glb_bytes / 4 && p > 1) break;
    for (Index q = 1; q <= ceil_div(g.C_i, v); ++q) {
      RowStationaryMapping t = m;
      t.filters_per_pe = p;
      t.channels_per_pe = q;
      if (t.local_bytes(cfg.word_bytes, cfg.psum_bytes) > cfg.local_buf_bytes_per_pe) break;
      RsPlan trial = pl;
      trial.m = t;
      const Index passes = ceil_div(g.C_o, u * p) * ceil_div(g.o_h, m.set_width) *
                           ceil_div(g.C_i, v * q) * m.folds;
      const PassCost c = rs_pass(cfg, g, trial, u * p, m.set_width, v * q, m.set_height, false, false);
      const double cost = static_cast<double>(passes) * static_cast<double>(pass_cycles(cfg, c));
      const Index glb = passes * c.glb;
      if (best_cost < 0 || cost < best_cost || (cost == best_cost && glb < best_glb)) {
        best_cost = cost;
        best_glb = glb;
        pl.m = t;
      }
    }
  }
  if (best_cost < 0)
    throw ConfigError(w.name + ": row-stationary local buffer of " +
                      std::to_string(cfg.local_buf_bytes_per_pe) + " bytes cannot hold one filter row");
  return pl;
}

}  // namespace

RowStationaryMapping map_row_stationary(const BaselineConfig& cfg, const Workload& w) {
  cfg.validate();
  require_support(w);
  return plan_rs(cfg, w).m;
}

SimResult run_eyeriss(const BaselineConfig& cfg, const Workload& w, std::span<const InputTensor> inputs) {
  cfg.validate();
  require_support(w);
  check_input_shapes(w, inputs);
  const RsShape g(w);
  const RsPlan pl = plan_rs(cfg, w);
  const auto& m = pl.m;
  SimResult r = blank_result(cfg, w);

  Index preload = 0;
  if (pl.inputs_resident) preload += elements(w.inputs[0]) * cfg.word_bytes;
  if (pl.weights_resident) preload += elements(w.inputs[1]) * cfg.word_bytes;
  r.dram_read_bytes += preload;
  r.glb_fill_bytes += preload;
  charge(r, cfg, 0, 0, 0, preload);
  r.cycles += cfg.dram_latency_cycles;
  r.stall_cycles[static_cast<std::size_t>(StallCause::Dram)] += cfg.dram_latency_cycles;

  const Index F = m.horizontal_sets * m.filters_per_pe;
  const Index Q = m.vertical_sets * m.channels_per_pe;
  const Index E = m.set_width, H = m.set_height;
  const std::size_t rank = w.ndrange.rank();
  std::vector<Index> lo(rank, 0), ext(w.ndrange.extents.begin(), w.ndrange.extents.end());
  auto set = [&](int dim, Index a, Index n) {
    if (dim < 0) return;
    lo[static_cast<std::size_t>(dim)] = a;
    ext[static_cast<std::size_t>(dim)] = n;
  };

  for (Index f0 = 0; f0 < g.C_o; f0 += F) {
    const Index fa = std::min(F, g.C_o - f0);
    for (Index e0 = 0; e0 < g.o_h; e0 += E) {
      const Index ea = std::min(E, g.o_h - e0);
      for (Index c0 = 0; c0 < g.C_i; c0 += Q) {
        const Index qa = std::min(Q, g.C_i - c0);
        for (int fold = 0; fold < m.folds; ++fold) {
          const Index h0 = fold * H;
          const Index ha = std::min(H, g.k_h - h0);
          const bool first = c0 == 0 && fold == 0;
          const bool last = c0 + qa == g.C_i && fold + 1 == m.folds;
          const PassCost c = rs_pass(cfg, g, pl, fa, ea, qa, ha, first, last);
          const Index ps = fa * ea * g.o_w * cfg.psum_bytes;
          r.glb_read_bytes += c.glb - ps;
          r.glb_write_bytes += ps;
          r.dram_read_bytes += c.dram - (last ? ps : 0);
          r.glb_fill_bytes += c.dram - (last ? ps : 0);
          r.dram_write_bytes += last ? ps : 0;
          charge(r, cfg, c.busy, c.fill, c.glb, c.dram);
          set(g.filt, f0, fa);
          set(g.oh, e0, ea);
          set(g.ci, c0, qa);
          set(g.kh, h0, ha);
          accumulate_box(w, inputs, lo, ext, r.output);
          r.macs += c.macs;
        }
      }
    }
  }
  return r;
}

}  // namespace vmesh
