// SPDX-FileCopyrightText: (c) 2026 The VectorMesh Simulator Authors
//
// SPDX-License-Identifier: Apache-2.0

#include "vmesh/schedule.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace vmesh {

std::string to_string(const Rational& r) {
  std::ostringstream os;
  os << r.numerator() << '/' << r.denominator();
  return os.str();
}

Index TileScheme::macs_per_tile() const {
  Index n = 1;
  for (Index e : extents) n *= e;
  return n;
}

Index TileScheme::input_words() const {
  Index n = 0;
  for (Index f : input_footprints) n += f;
  return n;
}

std::vector<Index> TileScheme::tile_counts(const NDRange& r) const {
  std::vector<Index> n(extents.size());
  for (std::size_t d = 0; d < extents.size(); ++d)
    n[d] = (r.extents[d] + extents[d] - 1) / extents[d];
  return n;
}

Index tile_footprint(const TensorRef& t, std::span<const Index> extents) {
  Index words = 1;
  for (const auto& row : t.map.matrix) {
    Index span = 1;
    for (std::size_t d = 0; d < row.size(); ++d) {
      const Index c = row[d] < 0 ? -row[d] : row[d];
      span += c * (extents[d] - 1);
    }
    words *= span;
  }
  return words;
}

Index psum_footprint(const Workload& w, std::span<const Index> extents) {
  Index n = 1;
  for (std::size_t d = 0; d < w.parallel_count; ++d) n *= extents[d];
  return n;
}

TileScheme make_scheme(const Workload& w, std::vector<Index> extents) {
  if (extents.size() != w.ndrange.rank()) throw ConfigError("tile rank does not match the NDRange");
  for (std::size_t d = 0; d < extents.size(); ++d)
    if (extents[d] < 1 || extents[d] > w.ndrange.extents[d])
      throw ConfigError("tile extent out of range on index " + std::to_string(d));
  TileScheme s;
  s.extents = std::move(extents);
  for (const auto& t : w.inputs) s.input_footprints.push_back(tile_footprint(t, s.extents));
  s.psum_words = psum_footprint(w, s.extents);
  s.bandwidth_per_mac = Rational(s.input_words(), s.macs_per_tile());
  return s;
}

std::vector<Index> candidate_extents(Index e, bool exhaustive) {
  std::set<Index> c;
  if (exhaustive) {
    for (Index x = 1; x <= e; ++x) c.insert(x);
  } else {
    for (Index x = 1; x * x <= e; ++x)
      if (e % x == 0) {
        c.insert(x);
        c.insert(e / x);
      }
    for (Index p = 1; p <= e; p *= 2) c.insert(p);
  }
  return {c.begin(), c.end()};
}

bool better_scheme(const TileScheme& a, const TileScheme& b) {
  if (a.bandwidth_per_mac != b.bandwidth_per_mac) return a.bandwidth_per_mac < b.bandwidth_per_mac;
  const Index ma = a.macs_per_tile(), mb = b.macs_per_tile();
  if (ma != mb) return ma > mb;
  return a.extents < b.extents;
}

namespace {

bool fits(const TileScheme& s, const TileSearch& q) {
  if (s.psum_words > q.psum_buf_words) return false;
  if (s.input_words() > q.input_buf_words) return false;
  if (q.per_tensor_words)
    for (Index f : s.input_footprints)
      if (f > *q.per_tensor_words) return false;
  return true;
}

template <typename Fn>
void for_each_extent_vector(const std::vector<std::vector<Index>>& cands, Fn&& fn) {
  std::vector<std::size_t> idx(cands.size(), 0);
  std::vector<Index> ext(cands.size());
  if (std::any_of(cands.begin(), cands.end(), [](const auto& c) { return c.empty(); })) return;
  while (true) {
    for (std::size_t d = 0; d < cands.size(); ++d) ext[d] = cands[d][idx[d]];
    fn(ext);
    std::size_t d = cands.size();
    while (d-- > 0) {
      if (++idx[d] < cands[d].size()) break;
      idx[d] = 0;
    }
    if (d == static_cast<std::size_t>(-1)) return;
  }
}

void check_search(const TileSearch& s) {
  if (s.input_buf_words <= 0 || s.psum_buf_words <= 0)
    throw ConfigError("buffer capacities must be positive");
}

std::vector<std::vector<Index>> search_candidates(const Workload& w, const TileSearch& s) {
  // Small ranges are cheap enough to search over every extent.
  const bool all = s.exhaustive || w.ndrange.points() <= kExhaustiveTilePoints;
  std::vector<std::vector<Index>> cands;
  for (Index e : w.ndrange.extents) cands.push_back(candidate_extents(e, all));
  return cands;
}

}  // namespace

std::vector<TileScheme> enumerate_tiles(const Workload& w, const TileSearch& s) {
  check_search(s);
  const auto cands = search_candidates(w, s);
  std::vector<TileScheme> out;
  for_each_extent_vector(cands, [&](const std::vector<Index>& ext) {
    TileScheme t = make_scheme(w, ext);
    if (fits(t, s)) out.push_back(std::move(t));
  });
  return out;
}

std::vector<TileScheme> enumerate_tiles(const Workload& w, Index input_buf_words, Index psum_buf_words) {
  return enumerate_tiles(w, TileSearch{input_buf_words, psum_buf_words, std::nullopt, false});
}

TileScheme select_tile(const Workload& w, const TileSearch& s) {
  check_search(s);
  const auto cands = search_candidates(w, s);
  std::optional<TileScheme> best;
  for_each_extent_vector(cands, [&](const std::vector<Index>& ext) {
    TileScheme t = make_scheme(w, ext);
    if (!fits(t, s)) return;
    if (!best || better_scheme(t, *best)) best = std::move(t);
  });
  if (!best)
    throw ConfigError(w.name + ": no tile fits input buffer of " + std::to_string(s.input_buf_words) +
                      " words and psum buffer of " + std::to_string(s.psum_buf_words) + " words");
  return *best;
}

TileScheme select_tile(const Workload& w, Index input_buf_words, Index psum_buf_words) {
  return select_tile(w, TileSearch{input_buf_words, psum_buf_words, std::nullopt, false});
}

// ---------------------------------------------------------------------------

AxisAssignment default_assignment(const Workload& w, const TileScheme& s) {
  const auto n = s.tile_counts(w.ndrange);
  std::vector<std::size_t> dims(w.parallel_count);
  for (std::size_t d = 0; d < dims.size(); ++d) dims[d] = d;
  std::stable_sort(dims.begin(), dims.end(), [&](std::size_t a, std::size_t b) {
    if (n[a] != n[b]) return n[a] > n[b];
    return w.ndrange.extents[a] > w.ndrange.extents[b];
  });
  if (dims.size() < 2) throw ConfigError(w.name + ": mesh sharing needs two parallel indices");
  return {dims[0], dims[1]};
}

SharingPlan sharing_axes(const Workload& w, const TileScheme& s, MeshShape mesh,
                         AxisAssignment assignment) {
  if (mesh.rows < 1 || mesh.cols < 1) throw ConfigError("mesh dimensions must be >= 1");
  if (!w.is_parallel(assignment.row_dim) || !w.is_parallel(assignment.col_dim))
    throw ConfigError("invalid assignment: mesh axes must map to parallel indices");
  if (assignment.row_dim == assignment.col_dim)
    throw ConfigError("invalid assignment: mesh rows and columns need distinct indices");

  SharingPlan p;
  p.mesh = mesh;
  p.assignment = assignment;
  p.tile_counts = s.tile_counts(w.ndrange);
  for (const auto& t : w.inputs) {
    p.horizontal.push_back(mesh.cols > 1 && t.map.independent_of(assignment.col_dim));
    p.vertical.push_back(mesh.rows > 1 && t.map.independent_of(assignment.row_dim));
  }
  Index other = 1;
  for (std::size_t d = 0; d < w.parallel_count; ++d)
    if (d != assignment.row_dim && d != assignment.col_dim) other *= p.tile_counts[d];
  const Index sr = (p.tile_counts[assignment.row_dim] + mesh.rows - 1) / mesh.rows;
  const Index sc = (p.tile_counts[assignment.col_dim] + mesh.cols - 1) / mesh.cols;
  p.super_tiles = other * sr * sc;
  p.steps = 1;
  for (std::size_t d = w.parallel_count; d < w.ndrange.rank(); ++d) p.steps *= p.tile_counts[d];
  return p;
}

Phase SharingPlan::phase(Index k) const {
  Phase ph;
  ph.super_tile = k / steps;
  ph.step = k % steps;
  const Index sc_n = (tile_counts[assignment.col_dim] + mesh.cols - 1) / mesh.cols;
  const Index sr_n = (tile_counts[assignment.row_dim] + mesh.rows - 1) / mesh.rows;
  const Index sc = ph.super_tile % sc_n;
  const Index sr = (ph.super_tile / sc_n) % sr_n;
  ph.active_rows = static_cast<int>(std::min<Index>(mesh.rows, tile_counts[assignment.row_dim] - sr * mesh.rows));
  ph.active_cols = static_cast<int>(std::min<Index>(mesh.cols, tile_counts[assignment.col_dim] - sc * mesh.cols));
  // Fetch duty rotates with the temporal step so GLB traffic spreads over
  // the mesh edge instead of pinning one TEU.
  ph.h_fetch_col = static_cast<int>(ph.step % ph.active_cols);
  ph.v_fetch_row = static_cast<int>(ph.step % ph.active_rows);
  return ph;
}

TeuTile SharingPlan::tile_of(const Workload& w, const TileScheme& s, Index st, Index step, int r,
                             int c) const {
  const std::size_t rank = w.ndrange.rank();
  const Index sc_n = (tile_counts[assignment.col_dim] + mesh.cols - 1) / mesh.cols;
  const Index sr_n = (tile_counts[assignment.row_dim] + mesh.rows - 1) / mesh.rows;
  std::vector<Index> t(rank, 0);
  Index rest = st;
  t[assignment.col_dim] = (rest % sc_n) * mesh.cols + c;
  rest /= sc_n;
  t[assignment.row_dim] = (rest % sr_n) * mesh.rows + r;
  rest /= sr_n;
  for (std::size_t d = w.parallel_count; d-- > 0;) {
    if (d == assignment.row_dim || d == assignment.col_dim) continue;
    t[d] = rest % tile_counts[d];
    rest /= tile_counts[d];
  }
  Index srest = step;
  for (std::size_t d = rank; d-- > w.parallel_count;) {
    t[d] = srest % tile_counts[d];
    srest /= tile_counts[d];
  }
  TeuTile out;
  out.active = t[assignment.row_dim] < tile_counts[assignment.row_dim] &&
               t[assignment.col_dim] < tile_counts[assignment.col_dim];
  out.lo.resize(rank);
  out.ext.resize(rank);
  for (std::size_t d = 0; d < rank; ++d) {
    out.lo[d] = t[d] * s.extents[d];
    out.ext[d] = std::max<Index>(0, std::min(s.extents[d], w.ndrange.extents[d] - out.lo[d]));
  }
  return out;
}

// ---------------------------------------------------------------------------

int PeFactorization::total_bits() const {
  int b = 0;
  for (const auto& p : parts) b += p.bits;
  return b;
}

Index PeFactorization::factor(std::size_t dim) const {
  for (const auto& p : parts)
    if (p.dim == dim) return Index{1} << p.bits;
  return 1;
}

int PeFactorization::bit_offset(std::size_t dim) const {
  int off = 0;
  for (const auto& p : parts) {
    if (p.dim == dim) return off;
    off += p.bits;
  }
  return -1;
}

std::string PeFactorization::to_string() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < parts.size(); ++i)
    os << (i ? "," : "") << "d" << parts[i].dim << ":" << (1 << parts[i].bits);
  return os.str();
}

PeFactorization make_factorization(std::initializer_list<std::pair<std::size_t, int>> parts) {
  PeFactorization f;
  for (const auto& [dim, factor] : parts) {
    if (factor <= 1) continue;
    const int bits = bfn::valuation(factor);
    if ((Index{1} << bits) != factor) throw ConfigError("PE factors must be powers of two");
    f.parts.push_back({dim, bits});
  }
  return f;
}

std::vector<PeFactorization> all_factorizations(std::size_t parallel_count, int bits) {
  std::vector<PeFactorization> out;
  PeFactorization cur;
  std::vector<bool> used(parallel_count, false);
  std::function<void(int)> rec = [&](int left) {
    if (left == 0) {
      out.push_back(cur);
      return;
    }
    for (std::size_t d = 0; d < parallel_count; ++d) {
      if (used[d]) continue;
      used[d] = true;
      for (int b = 1; b <= left; ++b) {
        cur.parts.push_back({d, b});
        rec(left - b);
        cur.parts.pop_back();
      }
      used[d] = false;
    }
  };
  rec(bits);
  return out;
}

double TEUProgram::lane_utilization() const {
  Index face = 1;
  for (std::size_t i = 0; i < groups.size(); ++i) face *= tile[i];
  return static_cast<double>(face) / static_cast<double>(lane_groups << lane_bits);
}

std::optional<bfn::AccessFamily> access_family(const TensorRef& t, const PeFactorization& f) {
  bfn::AccessFamily fam = bfn::AccessFamily::broadcast(t.shape.size());
  for (const auto& part : f.parts) {
    const int s = f.bit_offset(part.dim);
    int rows_touching = 0;
    for (std::size_t r = 0; r < t.shape.size(); ++r) {
      const Index m = t.map.matrix[r][part.dim];
      if (m == 0) continue;
      ++rows_touching;
      const int v = s - bfn::valuation(m < 0 ? -m : m);
      if (v < 0) return std::nullopt;
      auto& want = fam.pitch_valuation[r];
      if (want && *want != v) return std::nullopt;
      want = v;
    }
    if (rows_touching > 1) return std::nullopt;
  }
  return fam;
}

namespace {

// Tensor-coordinate box of a tile image and the shift of its origin.
void image_box(const TensorRef& t, std::span<const Index> ext, std::vector<Index>& box,
               std::vector<Index>& lo) {
  box.assign(t.shape.size(), 1);
  lo.assign(t.shape.size(), 0);
  for (std::size_t r = 0; r < t.shape.size(); ++r)
    for (std::size_t d = 0; d < ext.size(); ++d) {
      const Index span = t.map.matrix[r][d] * (ext[d] - 1);
      if (span < 0) lo[r] += span;
      box[r] += span < 0 ? -span : span;
    }
}

}  // namespace

TEUProgram lower_to_teu(const Workload& w, const TileScheme& s, const PeFactorization& f) {
  if (f.total_bits() != bfn::kBankBits)
    throw InternalError("PE factorization must cover exactly 32 lanes, got " + f.to_string());
  for (const auto& p : f.parts)
    if (!w.is_parallel(p.dim)) throw InternalError("PE factorization uses a temporal index");

  TEUProgram prog;
  prog.tile = s.extents;
  prog.factorization = f;
  prog.lane_groups = 1;
  for (std::size_t d = 0; d < w.parallel_count; ++d) {
    const Index p = f.factor(d);
    prog.groups.push_back((s.extents[d] + p - 1) / p);
    prog.lane_groups *= prog.groups.back();
  }
  prog.temporal_points = 1;
  for (std::size_t d = w.parallel_count; d < w.ndrange.rank(); ++d) prog.temporal_points *= s.extents[d];

  for (const auto& t : w.inputs) {
    const auto fam = access_family(t, f);
    if (!fam) throw InternalError("no conflict-free layout for " + t.name + " under " + f.to_string());
    std::vector<Index> box, lo;
    image_box(t, s.extents, box, lo);
    bfn::BankLayout layout = bfn::layout_pad_shuffle(box, *fam);
    std::vector<Index> c(w.ndrange.rank(), 0);
    Index base = 0;
    for (std::size_t r = 0; r < box.size(); ++r) {
      base -= layout.pitches[r] * lo[r];
      for (std::size_t d = 0; d < c.size(); ++d) c[d] += layout.pitches[r] * t.map.matrix[r][d];
    }
    prog.padding_words += layout.padding_words();
    prog.layouts.push_back(std::move(layout));
    prog.coef.push_back(std::move(c));
    prog.box_origin_offset.push_back(base);
  }
  return prog;
}

namespace {

// Tile-local point of every lane for (group, temporal point); masked lanes
// get active = false.
void lane_points(const TEUProgram& p, Index cycle, std::size_t par,
                 std::vector<std::vector<Index>>& pts, std::vector<bool>& active) {
  const std::size_t rank = p.tile.size();
  const int lanes = 1 << p.lane_bits;
  Index g = cycle % p.lane_groups;
  Index tau = cycle / p.lane_groups;
  std::vector<Index> base(rank, 0);
  for (std::size_t d = par; d-- > 0;) {
    base[d] = (g % p.groups[d]) * p.factorization.factor(d);
    g /= p.groups[d];
  }
  for (std::size_t d = rank; d-- > par;) {
    base[d] = tau % p.tile[d];
    tau /= p.tile[d];
  }
  pts.assign(static_cast<std::size_t>(lanes), base);
  active.assign(static_cast<std::size_t>(lanes), true);
  for (int lane = 0; lane < lanes; ++lane) {
    auto& pt = pts[static_cast<std::size_t>(lane)];
    for (const auto& part : p.factorization.parts) {
      const int off = p.factorization.bit_offset(part.dim);
      pt[part.dim] += (lane >> off) & ((1 << part.bits) - 1);
    }
    for (std::size_t d = 0; d < par; ++d)
      if (pt[d] >= p.tile[d]) active[static_cast<std::size_t>(lane)] = false;
  }
}

}  // namespace

bfn::BankAccess TEUProgram::access(std::size_t tensor, Index cycle) const {
  std::vector<std::vector<Index>> pts;
  bfn::BankAccess a;
  a.bank_bits = lane_bits;
  lane_points(*this, cycle, groups.size(), pts, a.active);
  a.addresses.resize(pts.size());
  for (std::size_t lane = 0; lane < pts.size(); ++lane) {
    Index addr = box_origin_offset[tensor];
    for (std::size_t d = 0; d < pts[lane].size(); ++d) addr += coef[tensor][d] * pts[lane][d];
    a.addresses[lane] = addr;
  }
  return a;
}

std::vector<Index> TEUProgram::psum_slots(Index cycle) const {
  std::vector<std::vector<Index>> pts;
  std::vector<bool> active;
  lane_points(*this, cycle, groups.size(), pts, active);
  std::vector<Index> out(pts.size(), -1);
  for (std::size_t lane = 0; lane < pts.size(); ++lane) {
    if (!active[lane]) continue;
    Index slot = 0;
    for (std::size_t d = 0; d < groups.size(); ++d) slot = slot * tile[d] + pts[lane][d];
    out[lane] = slot;
  }
  return out;
}

Index verify_program(const TEUProgram& p) {
  Index checked = 0;
  for (std::size_t t = 0; t < p.layouts.size(); ++t)
    for (Index g = 0; g < p.lane_groups; ++g) {
      const auto a = p.access(t, g);
      if (!bfn::check_conflict_free(a).conflict_free)
        throw InternalError("bank conflict in lowered program (tensor " + std::to_string(t) +
                            ", lane group " + std::to_string(g) + ")");
      if (!bfn::route_butterfly(a))
        throw InternalError("butterfly cannot route lowered access (tensor " + std::to_string(t) + ")");
      ++checked;
    }
  return checked;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<Index> parallel_candidates(Index e, int mesh_dim) {
  std::set<Index> c;
  for (Index k = 1; k <= std::min<Index>(e, 48); ++k) c.insert((e + k - 1) / k);
  for (Index k = 1; k <= 8; ++k) {
    const Index per = (e + k * mesh_dim - 1) / (k * mesh_dim);
    c.insert(per);
    for (Index m = 2; m <= 32; m *= 2) c.insert(std::min(e, (per + m - 1) / m * m));
  }
  for (Index p = 1; p <= e; p *= 2) c.insert(p);
  return {c.begin(), c.end()};
}

std::vector<Index> temporal_candidates(const Workload& w, std::size_t d) {
  const Index e = w.ndrange.extents[d];
  // Kernel window indices are either kept whole or walked one row at a time.
  const bool window = (w.kind == WorkloadKind::Conv || w.kind == WorkloadKind::Depthwise) && d >= 4;
  if (window) return e == 1 ? std::vector<Index>{1} : std::vector<Index>{1, e};
  return candidate_extents(e, false);
}

struct Candidate {
  double cost = 0;
  TileScheme scheme;
  AxisAssignment assignment;
  PeFactorization fact;
};

bool better_candidate(const Candidate& a, const Candidate& b) {
  if (a.cost != b.cost) return a.cost < b.cost;
  return better_scheme(a.scheme, b.scheme);
}

}  // namespace

MeshPlan plan_for_mesh(const Workload& w, const PlanTarget& target,
                       std::optional<std::vector<Index>> forced_tile,
                       std::optional<AxisAssignment> forced_assignment) {
  const std::size_t rank = w.ndrange.rank(), par = w.parallel_count;
  const MeshShape mesh = target.mesh;

  if (forced_assignment) {
    const auto& a = *forced_assignment;
    if (a.row_dim >= par || a.col_dim >= par)
      throw ConfigError("invalid assignment: mesh axes must map to parallel indices");
    if (a.row_dim == a.col_dim)
      throw ConfigError("invalid assignment: mesh rows and columns need distinct indices");
  }
  if (forced_tile) {
    const TileScheme s = make_scheme(w, *forced_tile);
    if (s.psum_words > target.psum_words)
      throw ConfigError(w.name + ": tile psum face of " + std::to_string(s.psum_words) +
                        " words exceeds the psum buffer of " + std::to_string(target.psum_words) +
                        " words");
    Index live = 0;
    for (std::size_t i = 0; i < w.inputs.size(); ++i) {
      if (s.input_footprints[i] > target.per_tensor_words)
        throw ConfigError(w.name + ": tile footprint of " + w.inputs[i].name + " is " +
                          std::to_string(s.input_footprints[i]) + " words, exceeds the " +
                          std::to_string(target.per_tensor_words) + "-word tensor buffer");
      live += s.input_footprints[i];
    }
    if (live > target.input_buf_words)
      throw ConfigError(w.name + ": tile input footprints total " + std::to_string(live) +
                        " words, exceed the input buffer of " + std::to_string(target.input_buf_words) +
                        " words");
  }

  std::vector<AxisAssignment> assignments;
  if (forced_assignment) {
    assignments.push_back(*forced_assignment);
  } else {
    for (std::size_t a = 0; a < par; ++a)
      for (std::size_t b = 0; b < par; ++b)
        if (a != b) assignments.push_back({a, b});
  }

  std::vector<std::vector<Index>> pc(par), tc;
  for (std::size_t d = 0; d < par; ++d) {
    if (forced_tile) {
      pc[d] = {(*forced_tile)[d]};
      continue;
    }
    int md = 1;
    for (const auto& a : assignments) {
      if (a.row_dim == d) md = std::max(md, mesh.rows);
      if (a.col_dim == d) md = std::max(md, mesh.cols);
    }
    pc[d] = parallel_candidates(w.ndrange.extents[d], md);
  }
  for (std::size_t d = par; d < rank; ++d)
    tc.push_back(forced_tile ? std::vector<Index>{(*forced_tile)[d]} : temporal_candidates(w, d));

  const auto facts = all_factorizations(par, bfn::kBankBits);
  const double out_bytes = static_cast<double>(w.output_elements()) * target.psum_bytes;

  std::optional<Candidate> best;
  std::vector<Index> ext(rank);
  for_each_extent_vector(pc, [&](const std::vector<Index>& face) {
    Index psum = 1;
    for (Index e : face) psum *= e;
    if (psum > target.psum_words) return;

    // Lane factorizations with the fewest lane groups for this face.
    Index min_groups = -1;
    std::vector<const PeFactorization*> good;
    for (const auto& f : facts) {
      Index g = 1;
      for (std::size_t d = 0; d < par; ++d) g *= (face[d] + f.factor(d) - 1) / f.factor(d);
      if (min_groups < 0 || g < min_groups) {
        min_groups = g;
        good.clear();
      }
      if (g == min_groups) good.push_back(&f);
    }

    for_each_extent_vector(tc, [&](const std::vector<Index>& temp) {
      std::copy(face.begin(), face.end(), ext.begin());
      std::copy(temp.begin(), temp.end(), ext.begin() + static_cast<std::ptrdiff_t>(par));
      Index live = 0;
      for (const auto& t : w.inputs) {
        const Index fp = tile_footprint(t, ext);
        if (fp > target.per_tensor_words) return;
        live += fp;
      }
      if (live > target.input_buf_words) return;

      const PeFactorization* chosen = nullptr;
      Index chosen_words = 0;
      std::vector<Index> box, lo;
      for (const PeFactorization* f : good) {
        Index words = 0;
        bool ok = true;
        for (const auto& t : w.inputs) {
          const auto fam = access_family(t, *f);
          if (!fam) {
            ok = false;
            break;
          }
          image_box(t, ext, box, lo);
          const Index padded = bfn::layout_pad_shuffle(box, *fam).padded_words();
          if (padded > target.per_tensor_words) {
            ok = false;
            break;
          }
          words += padded;
        }
        if (!ok || words > target.input_buf_words) continue;
        if (!chosen || words < chosen_words) {
          chosen = f;
          chosen_words = words;
        }
      }
      if (!chosen) return;

      TileScheme scheme = make_scheme(w, ext);
      const auto n = scheme.tile_counts(w.ndrange);
      Index steps = 1, tpoints = 1;
      for (std::size_t d = par; d < rank; ++d) {
        steps *= n[d];
        tpoints *= ext[d];
      }
      const double step_cycles = static_cast<double>(min_groups * tpoints);

      for (const auto& a : assignments) {
        Index other = 1;
        for (std::size_t d = 0; d < par; ++d)
          if (d != a.row_dim && d != a.col_dim) other *= n[d];
        const Index sr = (n[a.row_dim] + mesh.rows - 1) / mesh.rows;
        const Index sc = (n[a.col_dim] + mesh.cols - 1) / mesh.cols;
        const double st = static_cast<double>(other * sr * sc);
        const double r_eff = static_cast<double>(std::min<Index>(mesh.rows, n[a.row_dim]));
        const double c_eff = static_cast<double>(std::min<Index>(mesh.cols, n[a.col_dim]));
        double phase_bytes = 0;
        for (std::size_t i = 0; i < w.inputs.size(); ++i) {
          const bool h = mesh.cols > 1 && w.inputs[i].map.independent_of(a.col_dim);
          const bool v = mesh.rows > 1 && w.inputs[i].map.independent_of(a.row_dim);
          const double copies = (h ? 1.0 : c_eff) * (v ? 1.0 : r_eff);
          phase_bytes += static_cast<double>(scheme.input_footprints[i]) * target.word_bytes * copies;
        }
        const double traffic = st * static_cast<double>(steps) * phase_bytes + out_bytes;
        const double drain = static_cast<double>(psum) * target.psum_bytes * r_eff * c_eff /
                             target.dram_bytes_per_cycle;
        const double compute = st * static_cast<double>(steps) * step_cycles + st * drain;
        const double cost = std::max({compute, traffic / target.dram_bytes_per_cycle,
                                      traffic / target.glb_bytes_per_cycle});
        Candidate c{cost, scheme, a, *chosen};
        if (!best || better_candidate(c, *best)) best = std::move(c);
      }
    });
  });

  if (!best)
    throw ConfigError(w.name + ": no tile fits the TEU buffers (input " +
                      std::to_string(target.input_buf_words) + " words, psum " +
                      std::to_string(target.psum_words) + " words)");
  MeshPlan plan;
  plan.scheme = best->scheme;
  plan.assignment = best->assignment;
  plan.factorization = best->fact;
  plan.sharing = sharing_axes(w, plan.scheme, mesh, plan.assignment);
  plan.estimated_cycles = best->cost;
  return plan;
}

void write_plan_json(std::ostream& os, const Workload& w, const MeshPlan& p) {
  os << "{\n  \"workload\": \"" << w.name << "\",\n  \"tile\": [";
  for (std::size_t d = 0; d < p.scheme.extents.size(); ++d) os << (d ? ", " : "") << p.scheme.extents[d];
  os << "],\n  \"input_footprints\": [";
  for (std::size_t i = 0; i < p.scheme.input_footprints.size(); ++i)
    os << (i ? ", " : "") << p.scheme.input_footprints[i];
  os << "],\n  \"psum_words\": " << p.scheme.psum_words << ",\n  \"bandwidth_per_mac\": \""
     << to_string(p.scheme.bandwidth_per_mac) << "\",\n  \"mesh\": [" << p.sharing.mesh.rows << ", "
     << p.sharing.mesh.cols << "],\n  \"row_dim\": " << p.assignment.row_dim
     << ",\n  \"col_dim\": " << p.assignment.col_dim << ",\n  \"shared\": [";
  for (std::size_t i = 0; i < w.inputs.size(); ++i)
    os << (i ? ", " : "") << "{\"tensor\": \"" << w.inputs[i].name << "\", \"horizontal\": "
       << (p.sharing.horizontal[i] ? "true" : "false")
       << ", \"vertical\": " << (p.sharing.vertical[i] ? "true" : "false") << "}";
  os << "],\n  \"super_tiles\": " << p.sharing.super_tiles << ",\n  \"steps\": " << p.sharing.steps
     << ",\n  \"pe_factorization\": \"" << p.factorization.to_string()
     << "\",\n  \"phase_rule\": \"rotating-fetcher (generalized)\"\n}\n";
}

}  // namespace vmesh
