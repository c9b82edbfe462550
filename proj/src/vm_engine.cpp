// SPDX-FileCopyrightText: (c) 2026 The VectorMesh Simulator Authors
//
// SPDX-License-Identifier: Apache-2.0

// Cycle engine of the VectorMesh machine.

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <ostream>

#include "vmesh/simcore.hpp"

namespace vmesh {

namespace {

enum Dir : int { kN = 0, kS = 1, kW = 2, kE = 3 };
constexpr int kOpposite[4] = {kS, kN, kE, kW};
constexpr int kTensors = 2;

struct Pkt {
  Index phase;
  int tensor;
  Index bytes;
  Index arrive = 0;
};

// Static description of one TEU's work in one phase.
struct TeuPhase {
  bool active = false;
  bool last_step = false;
  Index compute_cycles = 0;
  Index macs = 0;
  Index drain_bytes = 0;
  std::array<Index, kTensors> bytes{};     // footprint bytes per tensor
  std::array<std::int8_t, kTensors> parent{};  // -1 GLB root, else incoming dir
  std::array<std::uint8_t, kTensors> children{};  // bitmask of outgoing dirs
  Index need = 0;       // entries to receive
  Index need_root = 0;  // entries read from the GLB
};

enum class TeuState : std::uint8_t { Wait, Compute, Drain, Finished };

struct Teu {
  int r = 0, c = 0;
  Index cur = 0;
  Index released = 0;
  TeuState state = TeuState::Wait;
  Index rem = 0;
  Index drain_rem = 0;
  bool skipped = false;
  std::array<Index, 2> recv{};
  std::array<Index, 2> recv_root{};
  std::array<Index, 2> fwd_pending{};
  std::deque<Pkt> glbq;
  std::array<std::deque<Pkt>, 4> outq;
  std::array<std::deque<Pkt>, 4> fifo;  // link toward neighbour in that direction
  bool push_blocked = false;
  Index moved_bytes = 0;
};

}  // namespace

struct Machine::State {
  const ArchConfig& cfg;
  const Workload& w;
  const TileScheme& ts;
  const SharingPlan& sp;
  const PeFactorization& f;
  std::span<const InputTensor> inputs;
  TraceSink trace;

  int rows, cols, nteu;
  Index phases;
  Index entry_bytes;
  std::vector<TeuPhase> tp;  // phases x teus
  std::vector<Index> lo, ext;  // phases x teus x rank
  std::vector<Teu> teus;
  SimResult res;
  Index cycle = 0;
  bool done = false;

  // DRAM channel.
  double dram_tokens = 0;
  double dram_cap = 0;
  Index dram_inflight_bytes = 0;
  Index dram_inflight_limit = 0;
  std::deque<Pkt> dram_pipe;  // arrive = ready cycle, tensor = teu id
  struct PktTeu {
    Pkt p;
    int teu;
  };
  std::deque<PktTeu> dram_q;
  Index write_q = 0;
  Index write_cap = 0;
  Index glb_in_occ = 0;
  Index glb_in_cap = 0;
  int glb_rr = 0;

  // Prefetch stream cursor.
  Index s_phase = 0;
  int s_tensor = 0, s_teu = 0;
  Index s_off = 0;

  std::map<std::vector<Index>, Index> program_cycles;
  Index idle_cycles = 0;

  State(const ArchConfig& c, const Workload& wl, const TileScheme& s, const SharingPlan& plan,
        const PeFactorization& fac, std::span<const InputTensor> in, TraceSink tr)
      : cfg(c), w(wl), ts(s), sp(plan), f(fac), inputs(in), trace(tr) {}

  TeuPhase& at(Index k, int t) { return tp[static_cast<std::size_t>(k * nteu + t)]; }
  int id(int r, int c) const { return r * cols + c; }

  Index cycles_for(const std::vector<Index>& e) {
    auto it = program_cycles.find(e);
    if (it != program_cycles.end()) return it->second;
    TileScheme clipped = make_scheme(w, e);
    const TEUProgram prog = lower_to_teu(w, clipped, f);
    verify_program(prog);
    program_cycles.emplace(e, prog.cycles());
    return prog.cycles();
  }

  void setup();
  void cycle_once();
  void dram_stage(bool& activity);
  void glb_stage(bool& activity);
  void fifo_stage(bool& activity);
  void compute_stage(bool& activity);
  void receive(Teu& t, int tid, const Pkt& p, bool from_glb);
  void release(Teu& t, int tid);
  StallCause wait_cause(Teu& t, int tid);
  void skip_ahead();
  bool next_stream(PktTeu& out);
};

void Machine::State::setup() {
  if (w.inputs.size() != kTensors) throw InternalError("the machine expects two input tensors");
  rows = cfg.mesh_rows;
  cols = cfg.mesh_cols;
  nteu = rows * cols;
  phases = sp.phases();
  entry_bytes = Index{cfg.fifo_entry_words} * cfg.word_bytes;
  const std::size_t rank = w.ndrange.rank();
  tp.assign(static_cast<std::size_t>(phases * nteu), {});
  lo.assign(static_cast<std::size_t>(phases * nteu) * rank, 0);
  ext.assign(static_cast<std::size_t>(phases * nteu) * rank, 0);

  std::vector<Index> e(rank);
  for (Index k = 0; k < phases; ++k) {
    const Phase ph = sp.phase(k);
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) {
        const int t = id(r, c);
        TeuPhase& x = at(k, t);
        const TeuTile tile = sp.tile_of(w, ts, ph.super_tile, ph.step, r, c);
        x.active = tile.active && r < ph.active_rows && c < ph.active_cols;
        if (!x.active) continue;
        const std::size_t base = static_cast<std::size_t>(k * nteu + t) * rank;
        std::copy(tile.lo.begin(), tile.lo.end(), lo.begin() + static_cast<std::ptrdiff_t>(base));
        std::copy(tile.ext.begin(), tile.ext.end(), ext.begin() + static_cast<std::ptrdiff_t>(base));
        e = tile.ext;
        x.last_step = ph.step == sp.steps - 1;
        x.compute_cycles = cycles_for(e);
        x.macs = 1;
        for (Index v : e) x.macs *= v;
        x.drain_bytes = x.last_step ? psum_footprint(w, e) * cfg.psum_bytes : 0;
        for (int i = 0; i < kTensors; ++i) {
          x.bytes[static_cast<std::size_t>(i)] =
              tile_footprint(w.inputs[static_cast<std::size_t>(i)], e) * cfg.word_bytes;
          const bool h = sp.horizontal[static_cast<std::size_t>(i)];
          const bool v = sp.vertical[static_cast<std::size_t>(i)];
          int root_r = r, root_c = c;
          if (h) root_c = ph.h_fetch_col;
          if (v) root_r = ph.v_fetch_row;
          std::int8_t par = -1;
          if (r != root_r || c != root_c) {
            if (h && r == root_r) par = static_cast<std::int8_t>(c < root_c ? kE : kW);
            else if (v && r != root_r) par = static_cast<std::int8_t>(r < root_r ? kS : kN);
            else par = static_cast<std::int8_t>(c < root_c ? kE : kW);
          }
          x.parent[static_cast<std::size_t>(i)] = par;
          const Index n = (x.bytes[static_cast<std::size_t>(i)] + entry_bytes - 1) / entry_bytes;
          x.need += n;
          if (par < 0) x.need_root += n;
        }
      }
    // Children are the inverse of the parent links.
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) {
        TeuPhase& x = at(k, id(r, c));
        if (!x.active) continue;
        for (int i = 0; i < kTensors; ++i) {
          const int d = x.parent[static_cast<std::size_t>(i)];
          if (d < 0) continue;
          const int pr = r + (d == kS) - (d == kN);
          const int pc = c + (d == kE) - (d == kW);
          TeuPhase& p = at(k, id(pr, pc));
          if (!p.active) throw InternalError("sharing chain passes through an idle TEU");
          p.children[static_cast<std::size_t>(i)] |= static_cast<std::uint8_t>(1u << kOpposite[d]);
        }
      }
  }

  teus.assign(static_cast<std::size_t>(nteu), {});
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      teus[static_cast<std::size_t>(id(r, c))].r = r;
      teus[static_cast<std::size_t>(id(r, c))].c = c;
    }

  const double bpc = cfg.dram_bytes_per_cycle();
  dram_cap = std::max(static_cast<double>(entry_bytes), 2.0 * bpc);
  dram_tokens = 0;
  dram_inflight_limit = std::max<Index>(entry_bytes, static_cast<Index>(std::ceil(bpc * cfg.dram_latency_cycles)));
  write_cap = cfg.glb_bytes / 4;
  glb_in_cap = cfg.glb_bytes - write_cap;

  res = SimResult{};
  res.workload = w.name;
  res.arch = "vectormesh";
  res.pes = cfg.pes();
  res.clock_hz = cfg.clock_hz;
  res.output = OutputTensor(w.output_shape);
}

bool Machine::State::next_stream(PktTeu& out) {
  while (s_phase < phases) {
    const TeuPhase& x = at(s_phase, s_teu);
    if (x.active && x.parent[static_cast<std::size_t>(s_tensor)] < 0) {
      const Index total = x.bytes[static_cast<std::size_t>(s_tensor)];
      if (s_off < total) {
        out.p = Pkt{s_phase, s_tensor, std::min(entry_bytes, total - s_off)};
        out.teu = s_teu;
        return true;
      }
    }
    s_off = 0;
    if (++s_teu == nteu) {
      s_teu = 0;
      if (++s_tensor == kTensors) {
        s_tensor = 0;
        ++s_phase;
      }
    }
  }
  return false;
}

void Machine::State::dram_stage(bool& activity) {
  dram_tokens = std::min(dram_cap, dram_tokens + cfg.dram_bytes_per_cycle());
  // Writes first.
  if (write_q > 0 && dram_tokens >= 1.0) {
    const Index n = std::min<Index>(write_q, static_cast<Index>(dram_tokens));
    write_q -= n;
    dram_tokens -= static_cast<double>(n);
    res.dram_write_bytes += n;
    activity = true;
  }
  PktTeu nx;
  while (next_stream(nx)) {
    if (dram_tokens < static_cast<double>(nx.p.bytes)) break;
    if (dram_inflight_bytes + nx.p.bytes > dram_inflight_limit) break;
    dram_tokens -= static_cast<double>(nx.p.bytes);
    dram_inflight_bytes += nx.p.bytes;
    res.dram_read_bytes += nx.p.bytes;
    nx.p.arrive = cycle + cfg.dram_latency_cycles;
    dram_q.push_back(nx);
    s_off += nx.p.bytes;
    activity = true;
  }
  // Returns land in the GLB once staging space is free.
  while (!dram_q.empty() && dram_q.front().p.arrive <= cycle &&
         glb_in_occ + dram_q.front().p.bytes <= glb_in_cap) {
    const PktTeu& d = dram_q.front();
    glb_in_occ += d.p.bytes;
    dram_inflight_bytes -= d.p.bytes;
    res.glb_fill_bytes += d.p.bytes;
    teus[static_cast<std::size_t>(d.teu)].glbq.push_back(d.p);
    dram_q.pop_front();
    activity = true;
  }
}

void Machine::State::glb_stage(bool& activity) {
  double budget = cfg.glb_bytes_per_cycle();
  for (int n = 0; n < nteu && budget > 0; ++n) {
    const int tid = (glb_rr + n) % nteu;
    Teu& t = teus[static_cast<std::size_t>(tid)];
    if (t.state == TeuState::Drain && t.drain_rem > 0) {
      const Index chunk = std::min({entry_bytes, t.drain_rem, write_cap - write_q,
                                    static_cast<Index>(budget)});
      if (chunk <= 0) continue;
      t.drain_rem -= chunk;
      write_q += chunk;
      res.glb_write_bytes += chunk;
      budget -= static_cast<double>(chunk);
      t.moved_bytes += chunk;
      activity = true;
      continue;
    }
    if (t.glbq.empty()) continue;
    const Pkt p = t.glbq.front();
    if (p.phase >= t.released + 2 || static_cast<double>(p.bytes) > budget) continue;
    t.glbq.pop_front();
    glb_in_occ -= p.bytes;
    res.glb_read_bytes += p.bytes;
    budget -= static_cast<double>(p.bytes);
    t.moved_bytes += p.bytes;
    receive(t, tid, p, true);
    activity = true;
  }
  glb_rr = (glb_rr + 1) % std::max(1, nteu);
}

void Machine::State::receive(Teu& t, int tid, const Pkt& p, bool from_glb) {
  const std::size_t h = static_cast<std::size_t>(p.phase % 2);
  ++t.recv[h];
  if (from_glb) ++t.recv_root[h];
  const std::uint8_t kids = at(p.phase, tid).children[static_cast<std::size_t>(p.tensor)];
  for (int d = 0; d < 4; ++d)
    if (kids & (1u << d)) {
      t.outq[static_cast<std::size_t>(d)].push_back(p);
      ++t.fwd_pending[h];
    }
}

void Machine::State::fifo_stage(bool& activity) {
  // Receivers pop entries that arrived in an earlier cycle.
  for (int tid = 0; tid < nteu; ++tid) {
    Teu& t = teus[static_cast<std::size_t>(tid)];
    for (int d = 0; d < 4; ++d) {
      const int nr = t.r + (d == kS) - (d == kN);
      const int nc = t.c + (d == kE) - (d == kW);
      if (nr < 0 || nr >= rows || nc < 0 || nc >= cols) continue;
      auto& q = teus[static_cast<std::size_t>(id(nr, nc))].fifo[static_cast<std::size_t>(kOpposite[d])];
      if (q.empty()) continue;
      const Pkt p = q.front();
      if (p.arrive >= cycle || p.phase >= t.released + 2) continue;
      q.pop_front();
      receive(t, tid, p, false);
      activity = true;
    }
  }
  // Senders push at most one entry per direction.
  for (auto& t : teus) {
    t.push_blocked = false;
    for (std::size_t d = 0; d < 4; ++d) {
      if (t.outq[d].empty()) continue;
      if (static_cast<int>(t.fifo[d].size()) >= cfg.fifo_depth_entries) {
        t.push_blocked = true;
        continue;
      }
      Pkt p = t.outq[d].front();
      t.outq[d].pop_front();
      p.arrive = cycle;
      t.fifo[d].push_back(p);
      if (static_cast<int>(t.fifo[d].size()) > cfg.fifo_depth_entries)
        throw InternalError("FIFO overflow");
      --t.fwd_pending[static_cast<std::size_t>(p.phase % 2)];
      res.fifo_words_transferred += p.bytes / cfg.word_bytes;
      t.moved_bytes += p.bytes;
      activity = true;
    }
  }
}

void Machine::State::release(Teu& t, int tid) {
  (void)tid;
  while (t.released < phases) {
    const Index k = t.released;
    const bool computed = k < t.cur || (k == t.cur && t.state == TeuState::Drain);
    const std::size_t h = static_cast<std::size_t>(k % 2);
    if (!computed || t.fwd_pending[h] != 0) break;
    t.recv[h] = 0;
    t.recv_root[h] = 0;
    ++t.released;
  }
}

StallCause Machine::State::wait_cause(Teu& t, int tid) {
  if (t.state == TeuState::Finished || t.skipped) return StallCause::TileBubble;
  if (t.state == TeuState::Drain) return write_q >= write_cap ? StallCause::Dram : StallCause::Glb;
  if (t.push_blocked) return StallCause::FifoFull;
  const TeuPhase& x = at(t.cur, tid);
  const std::size_t h = static_cast<std::size_t>(t.cur % 2);
  if (t.recv_root[h] < x.need_root)
    return (!t.glbq.empty() && t.glbq.front().phase == t.cur) ? StallCause::Glb : StallCause::Dram;
  return StallCause::FifoEmpty;
}

void Machine::State::compute_stage(bool& activity) {
  for (int tid = 0; tid < nteu; ++tid) {
    Teu& t = teus[static_cast<std::size_t>(tid)];
    bool issued = false;
    if (t.state == TeuState::Drain && t.drain_rem == 0) {
      ++t.cur;
      t.state = t.cur == phases ? TeuState::Finished : TeuState::Wait;
      activity = true;
    }
    while (t.state == TeuState::Wait && !at(t.cur, tid).active) {
      t.skipped = true;
      ++t.cur;
      if (t.cur == phases) t.state = TeuState::Finished;
      activity = true;
    }
    if (t.state == TeuState::Wait) {
      const TeuPhase& x = at(t.cur, tid);
      if (t.recv[static_cast<std::size_t>(t.cur % 2)] == x.need && t.cur < t.released + 2) {
        t.state = TeuState::Compute;
        t.rem = x.compute_cycles;
        t.skipped = false;
        activity = true;
      }
    }
    if (t.state == TeuState::Compute && !t.push_blocked) {
      issued = true;
      if (--t.rem == 0) {
        const TeuPhase& x = at(t.cur, tid);
        const std::size_t rank = w.ndrange.rank();
        const std::size_t base = static_cast<std::size_t>(t.cur * nteu + tid) * rank;
        accumulate_box(w, inputs, std::span<const Index>(lo.data() + base, rank),
                       std::span<const Index>(ext.data() + base, rank), res.output);
        res.macs += x.macs;
        if (x.last_step) {
          t.state = TeuState::Drain;
          t.drain_rem = x.drain_bytes;
        } else {
          ++t.cur;
          t.state = t.cur == phases ? TeuState::Finished : TeuState::Wait;
        }
        activity = true;
      }
    }
    release(t, tid);
    StallCause cause = StallCause::TileBubble;
    if (!issued) {
      cause = wait_cause(t, tid);
      ++res.stall_cycles[static_cast<std::size_t>(cause)];
    }
    if (trace.enabled()) {
      *trace.os << cycle << ',' << tid << ',' << (issued ? "mac" : to_string(cause)) << ','
                << t.moved_bytes << '\n';
    }
    t.moved_bytes = 0;
  }
}

void Machine::State::skip_ahead() {
  // Nothing but compute can change until the earliest TEU finishes its phase
  // or the next DRAM return lands.
  if (dram_tokens < dram_cap || write_q > 0) return;
  Index d = -1;
  for (const auto& t : teus)
    if (t.state == TeuState::Compute && !t.push_blocked) d = d < 0 ? t.rem - 1 : std::min(d, t.rem - 1);
  if (!dram_q.empty()) {
    const Index gap = dram_q.front().p.arrive - cycle - 1;
    if (glb_in_occ + dram_q.front().p.bytes <= glb_in_cap) d = d < 0 ? gap : std::min(d, gap);
  }
  if (d <= 0) return;
  for (int tid = 0; tid < nteu; ++tid) {
    Teu& t = teus[static_cast<std::size_t>(tid)];
    if (t.state == TeuState::Compute && !t.push_blocked) t.rem -= d;
    else res.stall_cycles[static_cast<std::size_t>(wait_cause(t, tid))] += d;
  }
  cycle += d;
}

void Machine::State::cycle_once() {
  bool activity = false;
  dram_stage(activity);
  glb_stage(activity);
  fifo_stage(activity);
  compute_stage(activity);
  ++cycle;

  bool all_done = write_q == 0;
  for (const auto& t : teus) all_done = all_done && t.state == TeuState::Finished;
  if (all_done) {
    done = true;
    return;
  }
  if (activity) {
    idle_cycles = 0;
  } else {
    bool computing = false;
    for (const auto& t : teus) computing = computing || (t.state == TeuState::Compute && !t.push_blocked);
    if (!computing && dram_q.empty() && ++idle_cycles > 4 * (cfg.dram_latency_cycles + 64))
      throw InternalError("simulation made no progress at cycle " + std::to_string(cycle));
    if (!trace.enabled()) skip_ahead();
  }
}

Machine::Machine(const ArchConfig& cfg) : cfg_(cfg) { cfg_.validate(); }
Machine::~Machine() = default;
Machine::Machine(Machine&&) noexcept = default;
Machine& Machine::operator=(Machine&&) noexcept = default;

bool Machine::step() {
  if (!st_ || st_->done) return false;
  st_->cycle_once();
  return !st_->done;
}

SimResult Machine::run(const Workload& w, const TileScheme& ts, const SharingPlan& sp,
                       const PeFactorization& f, std::span<const InputTensor> inputs, TraceSink trace) {
  check_input_shapes(w, inputs);
  if (sp.mesh.rows != cfg_.mesh_rows || sp.mesh.cols != cfg_.mesh_cols)
    throw ConfigError("sharing plan mesh does not match the machine");
  if (ts.psum_words * cfg_.psum_bytes > cfg_.psum_buf_bytes)
    throw ConfigError("tile psum face exceeds the PSum buffer");
  st_ = std::make_unique<State>(cfg_, w, ts, sp, f, inputs, trace);
  st_->setup();
  if (trace.enabled()) *trace.os << "cycle,teu,event,bytes\n";
  while (step()) {
  }
  SimResult r = std::move(st_->res);
  r.cycles = st_->cycle;
  st_.reset();
  return r;
}

SimResult simulate_vm(const ArchConfig& cfg, const Workload& w, std::span<const InputTensor> inputs,
                      TraceSink trace) {
  Machine m = build_machine(cfg);
  const MeshPlan plan = plan_for_mesh(w, cfg.plan_target());
  return m.run(w, plan.scheme, plan.sharing, plan.factorization, inputs, trace);
}

}  // namespace vmesh
