// SPDX-FileCopyrightText: (c) 2026 The VectorMesh Simulator Authors
//
// SPDX-License-Identifier: Apache-2.0

#include "vmesh/workload.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <random>

namespace vmesh {

namespace {

Index checked_mul(Index a, Index b) {
  if (a != 0 && b > std::numeric_limits<Index>::max() / a)
    throw ConfigError("NDRange point count overflows 64 bits");
  return a * b;
}

IndexMap zero_map(std::size_t out_rank, std::size_t in_rank) {
  IndexMap m;
  m.matrix.assign(out_rank, std::vector<Index>(in_rank, 0));
  m.offset.assign(out_rank, 0);
  return m;
}

Index product(std::span<const Index> v) {
  Index p = 1;
  for (Index e : v) p = checked_mul(p, e);
  return p;
}

}  // namespace

NDRange::NDRange(std::vector<Index> e) : extents(std::move(e)) {
  for (Index x : extents)
    if (x < 1) throw ConfigError("NDRange extent must be >= 1");
  (void)points();
}

Index NDRange::points() const { return product(extents); }

std::vector<Index> IndexMap::apply(std::span<const Index> point) const {
  std::vector<Index> out(offset);
  for (std::size_t r = 0; r < matrix.size(); ++r)
    for (std::size_t d = 0; d < point.size(); ++d) out[r] += matrix[r][d] * point[d];
  return out;
}

std::vector<Index> IndexMap::jacobian_column(std::size_t dim) const {
  std::vector<Index> col;
  col.reserve(matrix.size());
  for (const auto& row : matrix) col.push_back(row.at(dim));
  return col;
}

bool IndexMap::independent_of(std::size_t dim) const {
  const auto col = jacobian_column(dim);
  return std::all_of(col.begin(), col.end(), [](Index c) { return c == 0; });
}

std::string to_string(WorkloadKind k) {
  switch (k) {
    case WorkloadKind::Gemm: return "gemm";
    case WorkloadKind::Conv: return "conv";
    case WorkloadKind::Depthwise: return "depthwise";
    case WorkloadKind::Correlation: return "correlation";
  }
  return "unknown";
}

WorkloadKind workload_kind_from_string(const std::string& s) {
  if (s == "gemm") return WorkloadKind::Gemm;
  if (s == "conv") return WorkloadKind::Conv;
  if (s == "depthwise") return WorkloadKind::Depthwise;
  if (s == "correlation") return WorkloadKind::Correlation;
  throw ConfigError("unknown workload type '" + s + "'");
}

Index Workload::output_elements() const { return product(output_shape); }

Index Workload::input_bytes() const {
  Index b = 0;
  for (const auto& t : inputs) b += product(t.shape) * t.elem_bytes;
  return b;
}

void Workload::validate() const {
  if (parallel_count > ndrange.rank()) throw ConfigError(name + ": parallel_count exceeds rank");
  if (output_shape.size() != parallel_count)
    throw ConfigError(name + ": output rank must equal the parallel index count");
  for (std::size_t d = 0; d < parallel_count; ++d)
    if (output_shape[d] != ndrange.extents[d])
      throw ConfigError(name + ": output shape must match the parallel extents");
  // Affine maps attain their extremes at box corners, so checking the
  // per-row min/max is exact.
  for (const auto& t : inputs) {
    if (t.map.out_rank() != t.shape.size() || t.map.in_rank() != ndrange.rank())
      throw ConfigError(name + ": index map rank mismatch for " + t.name);
    for (std::size_t r = 0; r < t.shape.size(); ++r) {
      Index lo = t.map.offset[r], hi = t.map.offset[r];
      for (std::size_t d = 0; d < ndrange.rank(); ++d) {
        const Index span = t.map.matrix[r][d] * (ndrange.extents[d] - 1);
        (span < 0 ? lo : hi) += span;
      }
      if (lo < 0 || hi >= t.shape[r])
        throw ConfigError(name + ": index map of " + t.name + " leaves the tensor");
    }
  }
}

Index conv_output_extent(Index in, Index k, Index stride, Index dilation) {
  const Index span = in - dilation * (k - 1) - 1;
  if (span < 0) return 0;
  return span / stride + 1;
}

Workload make_gemm(Index M, Index N, Index K) {
  if (M < 1 || N < 1 || K < 1) throw ConfigError("GEMM extents must be >= 1");
  Workload w;
  w.name = "gemm_" + std::to_string(M) + "x" + std::to_string(N) + "x" + std::to_string(K);
  w.kind = WorkloadKind::Gemm;
  w.ndrange = NDRange({M, N, K});
  w.parallel_count = 2;
  // A(i, k)
  IndexMap a = zero_map(2, 3);
  a.matrix[0][0] = 1;
  a.matrix[1][2] = 1;
  // B(k, j)
  IndexMap b = zero_map(2, 3);
  b.matrix[0][2] = 1;
  b.matrix[1][1] = 1;
  w.inputs = {{"A", {M, K}, a, 2}, {"B", {K, N}, b, 2}};
  w.output_shape = {M, N};
  w.validate();
  return w;
}

Workload make_conv(Index c_in, Index c_out, Index in_w, Index in_h, Index k_w, Index k_h,
                   Index stride, Index dilation) {
  for (Index v : {c_in, c_out, in_w, in_h, k_w, k_h, stride, dilation})
    if (v < 1) throw ConfigError("convolution parameters must be >= 1");
  const Index o_w = conv_output_extent(in_w, k_w, stride, dilation);
  const Index o_h = conv_output_extent(in_h, k_h, stride, dilation);
  if (o_w < 1 || o_h < 1) throw ConfigError("invalid convolution geometry: output extent < 1");

  Workload w;
  w.name = "conv";
  w.kind = WorkloadKind::Conv;
  // (i, j, k, l, m, n) = (C_o, o_w, o_h, C_i, k_w, k_h)
  w.ndrange = NDRange({c_out, o_w, o_h, c_in, k_w, k_h});
  w.parallel_count = 3;
  IndexMap in = zero_map(3, 6);
  in.matrix[0][3] = 1;
  in.matrix[1][1] = stride;
  in.matrix[1][4] = dilation;
  in.matrix[2][2] = stride;
  in.matrix[2][5] = dilation;
  IndexMap ker = zero_map(4, 6);
  ker.matrix[0][0] = 1;
  ker.matrix[1][3] = 1;
  ker.matrix[2][4] = 1;
  ker.matrix[3][5] = 1;
  w.inputs = {{"I", {c_in, in_w, in_h}, in, 2}, {"K", {c_out, c_in, k_w, k_h}, ker, 2}};
  w.output_shape = {c_out, o_w, o_h};
  w.conv = {c_in, c_out, in_w, in_h, k_w, k_h, stride, dilation, o_w, o_h};
  w.validate();
  return w;
}

Workload make_depthwise(Index channels, Index in_w, Index in_h, Index k_w, Index k_h,
                        Index stride, Index dilation) {
  Workload w = make_conv(1, channels, in_w, in_h, k_w, k_h, stride, dilation);
  w.kind = WorkloadKind::Depthwise;
  // I(i + l, ...) with l of extent 1; the kernel keeps its (C, 1, k_w, k_h) shape.
  w.inputs[0].map.matrix[0][0] = 1;
  w.inputs[0].shape[0] = channels;
  w.conv.c_in = channels;
  w.validate();
  return w;
}

Workload make_correlation(Index c_in, Index o_w, Index o_h, Index s_w, Index s_h) {
  for (Index v : {c_in, o_w, o_h, s_w, s_h})
    if (v < 1) throw ConfigError("correlation parameters must be >= 1");
  Workload w;
  w.name = "corr";
  w.kind = WorkloadKind::Correlation;
  // (i, j, k, l, m) = (displacement w, displacement h, pixel w, pixel h, channel)
  w.ndrange = NDRange({s_w, s_h, o_w, o_h, c_in});
  w.parallel_count = 4;
  IndexMap cur = zero_map(3, 5);
  cur.matrix[0][4] = 1;
  cur.matrix[1][2] = 1;
  cur.matrix[2][3] = 1;
  IndexMap ref = zero_map(3, 5);
  ref.matrix[0][4] = 1;
  ref.matrix[1][0] = 1;
  ref.matrix[1][2] = 1;
  ref.matrix[2][1] = 1;
  ref.matrix[2][3] = 1;
  w.inputs = {{"I1", {c_in, o_w, o_h}, cur, 2},
              {"I2", {c_in, o_w + s_w - 1, o_h + s_h - 1}, ref, 2}};
  w.output_shape = {s_w, s_h, o_w, o_h};
  w.zero_padded_reference = true;
  w.validate();
  return w;
}

InputTensor pad_reference(const InputTensor& ref, Index s_w, Index s_h) {
  if (ref.shape.size() != 3) throw ConfigError("reference map must be rank 3");
  InputTensor out({ref.shape[0], ref.shape[1] + s_w - 1, ref.shape[2] + s_h - 1});
  const Index pw = (s_w - 1) / 2, ph = (s_h - 1) / 2;
  for (Index c = 0; c < ref.shape[0]; ++c)
    for (Index x = 0; x < ref.shape[1]; ++x)
      for (Index y = 0; y < ref.shape[2]; ++y)
        out.data[static_cast<std::size_t>((c * out.shape[1] + x + pw) * out.shape[2] + y + ph)] =
            ref.data[static_cast<std::size_t>((c * ref.shape[1] + x) * ref.shape[2] + y)];
  return out;
}

std::vector<InputTensor> random_inputs(const Workload& w, std::uint64_t seed, int lo, int hi) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> dist(lo, hi);
  std::vector<InputTensor> out;
  for (const auto& t : w.inputs) {
    InputTensor x(t.shape);
    for (auto& v : x.data) v = dist(rng);
    out.push_back(std::move(x));
  }
  return out;
}

void check_input_shapes(const Workload& w, std::span<const InputTensor> inputs) {
  if (inputs.size() != w.inputs.size())
    throw ConfigError(w.name + ": expected " + std::to_string(w.inputs.size()) + " input tensors");
  for (std::size_t t = 0; t < inputs.size(); ++t)
    if (inputs[t].shape != w.inputs[t].shape)
      throw ConfigError(w.name + ": shape mismatch for input " + w.inputs[t].name);
}

LinearAccess linearize(const IndexMap& map, std::span<const Index> tensor_shape) {
  std::vector<Index> st(tensor_shape.size(), 1);
  for (std::size_t r = tensor_shape.size(); r-- > 1;) st[r - 1] = st[r] * tensor_shape[r];
  LinearAccess la;
  la.coef.assign(map.in_rank(), 0);
  for (std::size_t r = 0; r < map.out_rank(); ++r) {
    la.base += st[r] * map.offset[r];
    for (std::size_t d = 0; d < map.in_rank(); ++d) la.coef[d] += st[r] * map.matrix[r][d];
  }
  return la;
}

OutputTensor eval_reference(const Workload& w, std::span<const InputTensor> inputs) {
  check_input_shapes(w, inputs);
  if (w.inputs.size() != 2) throw ConfigError("eval_reference expects two input tensors");
  const std::size_t rank = w.ndrange.rank(), par = w.parallel_count;
  const LinearAccess a = linearize(w.inputs[0].map, w.inputs[0].shape);
  const LinearAccess b = linearize(w.inputs[1].map, w.inputs[1].shape);

  // Offsets of every temporal point, enumerated once.
  std::vector<Index> toff_a{0}, toff_b{0};
  for (std::size_t d = par; d < rank; ++d) {
    std::vector<Index> na, nb;
    na.reserve(toff_a.size() * w.ndrange.extents[d]);
    nb.reserve(na.capacity());
    for (std::size_t t = 0; t < toff_a.size(); ++t)
      for (Index x = 0; x < w.ndrange.extents[d]; ++x) {
        na.push_back(toff_a[t] + x * a.coef[d]);
        nb.push_back(toff_b[t] + x * b.coef[d]);
      }
    toff_a.swap(na);
    toff_b.swap(nb);
  }

  OutputTensor out(w.output_shape);
  const std::int32_t* da = inputs[0].data.data();
  const std::int32_t* db = inputs[1].data.data();
  std::vector<Index> p(par, 0);
  const std::size_t ntemp = toff_a.size();
  for (Index o = 0; o < out.size(); ++o) {
    Index ba = a.base, bb = b.base;
    for (std::size_t d = 0; d < par; ++d) {
      ba += p[d] * a.coef[d];
      bb += p[d] * b.coef[d];
    }
    std::int64_t acc = 0;
    for (std::size_t t = 0; t < ntemp; ++t)
      acc += static_cast<std::int64_t>(da[ba + toff_a[t]]) * db[bb + toff_b[t]];
    out.data[static_cast<std::size_t>(o)] = acc;
    for (std::size_t d = par; d-- > 0;) {
      if (++p[d] < w.output_shape[d]) break;
      p[d] = 0;
    }
  }
  return out;
}

void accumulate_box(const Workload& w, std::span<const InputTensor> inputs,
                    std::span<const Index> lo, std::span<const Index> ext, OutputTensor& out) {
  const std::size_t rank = w.ndrange.rank(), par = w.parallel_count;
  const LinearAccess a = linearize(w.inputs[0].map, w.inputs[0].shape);
  const LinearAccess b = linearize(w.inputs[1].map, w.inputs[1].shape);
  const std::vector<Index> ost = out.strides();

  // Iterate the parallel face outermost, the temporal box as a flat gather.
  std::vector<Index> ta, tb;
  {
    Index n = 1;
    for (std::size_t d = par; d < rank; ++d) n *= ext[d];
    ta.reserve(static_cast<std::size_t>(n));
    tb.reserve(static_cast<std::size_t>(n));
    std::vector<Index> q(rank, 0);
    Index base_a = a.base, base_b = b.base;
    for (std::size_t d = par; d < rank; ++d) {
      base_a += lo[d] * a.coef[d];
      base_b += lo[d] * b.coef[d];
    }
    for (Index i = 0; i < n; ++i) {
      Index oa = base_a, ob = base_b;
      for (std::size_t d = par; d < rank; ++d) {
        oa += q[d] * a.coef[d];
        ob += q[d] * b.coef[d];
      }
      ta.push_back(oa);
      tb.push_back(ob);
      for (std::size_t d = rank; d-- > par;) {
        if (++q[d] < ext[d]) break;
        q[d] = 0;
      }
    }
  }
  const std::int32_t* da = inputs[0].data.data();
  const std::int32_t* db = inputs[1].data.data();
  Index face = 1;
  for (std::size_t d = 0; d < par; ++d) face *= ext[d];
  std::vector<Index> p(par, 0);
  for (Index f = 0; f < face; ++f) {
    Index pa = 0, pb = 0, po = 0;
    for (std::size_t d = 0; d < par; ++d) {
      const Index x = lo[d] + p[d];
      pa += x * a.coef[d];
      pb += x * b.coef[d];
      po += x * ost[d];
    }
    std::int64_t acc = 0;
    const std::size_t nt = ta.size();
    for (std::size_t t = 0; t < nt; ++t)
      acc += static_cast<std::int64_t>(da[pa + ta[t]]) * db[pb + tb[t]];
    out.data[static_cast<std::size_t>(po)] += acc;
    for (std::size_t d = par; d-- > 0;) {
      if (++p[d] < ext[d]) break;
      p[d] = 0;
    }
  }
}

}  // namespace vmesh
