// SPDX-FileCopyrightText: (c) 2026 The VectorMesh Simulator Authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace vmesh {

using Index = std::int64_t;

// Error raised for malformed shapes, geometries and configurations.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A workload that an architecture model cannot execute.
class UnsupportedWorkload : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A broken internal contract (scheduler bug, bank conflict, FIFO overflow).
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Dense row-major tensor. Inputs use 32-bit storage for 16-bit words,
/// outputs use 64-bit accumulators so every reduction is exact.
template <typename T>
struct Tensor {
  std::vector<Index> shape;
  std::vector<T> data;

  Tensor() = default;
  explicit Tensor(std::vector<Index> s) : shape(std::move(s)) {
    Index n = 1;
    for (Index e : shape) n *= e;
    data.assign(static_cast<std::size_t>(n), T{});
  }

  Index size() const { return static_cast<Index>(data.size()); }

  /// Row-major strides, innermost stride 1.
  std::vector<Index> strides() const {
    std::vector<Index> st(shape.size(), 1);
    for (std::size_t r = shape.size(); r-- > 1;) st[r - 1] = st[r] * shape[r];
    return st;
  }

  bool operator==(const Tensor&) const = default;
};

using InputTensor = Tensor<std::int32_t>;
using OutputTensor = Tensor<std::int64_t>;

struct NDRange {
  std::vector<Index> extents;

  NDRange() = default;
  explicit NDRange(std::vector<Index> e);

  std::size_t rank() const { return extents.size(); }
  /// Total point count; throws ConfigError on overflow.
  Index points() const;
};

/// coordinate = matrix * point + offset, one matrix row per tensor dimension.
struct IndexMap {
  std::vector<std::vector<Index>> matrix;
  std::vector<Index> offset;

  std::size_t out_rank() const { return matrix.size(); }
  std::size_t in_rank() const { return matrix.empty() ? 0 : matrix.front().size(); }

  std::vector<Index> apply(std::span<const Index> point) const;
  /// Column `dim` of the coefficient matrix, i.e. d(coordinate)/d(point[dim]).
  std::vector<Index> jacobian_column(std::size_t dim) const;
  bool independent_of(std::size_t dim) const;
};

struct TensorRef {
  std::string name;
  std::vector<Index> shape;
  IndexMap map;
  int elem_bytes = 2;
};

enum class WorkloadKind { Gemm, Conv, Depthwise, Correlation };

std::string to_string(WorkloadKind k);
WorkloadKind workload_kind_from_string(const std::string& s);

/// Geometry recorded alongside convolution-family workloads.
struct ConvGeometry {
  Index c_in = 0, c_out = 0, in_w = 0, in_h = 0, k_w = 0, k_h = 0;
  Index stride = 1, dilation = 1;
  Index out_w = 0, out_h = 0;
};

/// Unified tensor form: output(parallel indices) = sum over temporal indices of
/// the product of every mapped input element.  Indices [0, parallel_count)
/// address the output tensor directly, in order.
struct Workload {
  std::string name;
  WorkloadKind kind = WorkloadKind::Gemm;
  NDRange ndrange;
  std::size_t parallel_count = 0;
  std::vector<TensorRef> inputs;
  std::vector<Index> output_shape;
  int output_elem_bytes = 4;
  ConvGeometry conv;     // valid for Conv / Depthwise
  bool zero_padded_reference = false;  // correlation reference tensor

  Index macs() const { return ndrange.points(); }
  bool is_parallel(std::size_t dim) const { return dim < parallel_count; }
  Index output_elements() const;
  Index input_bytes() const;
  Index output_bytes() const { return output_elements() * output_elem_bytes; }

  /// Throws ConfigError if any map leaves its tensor for some NDRange point.
  void validate() const;
};

Workload make_gemm(Index M, Index N, Index K);
Workload make_conv(Index c_in, Index c_out, Index in_w, Index in_h, Index k_w, Index k_h,
                   Index stride = 1, Index dilation = 1);
/// Depthwise convolution: one input channel per output channel, the group loop
/// folded into the parallel channel index.
Workload make_depthwise(Index channels, Index in_w, Index in_h, Index k_w, Index k_h,
                        Index stride = 1, Index dilation = 1);
/// Spatial correlation over an (s_w x s_h) displacement window.  The reference
/// tensor is declared with its zero-padded shape (c_in, o_w+s_w-1, o_h+s_h-1).
Workload make_correlation(Index c_in, Index o_w, Index o_h, Index s_w, Index s_h);

/// Output extent of a strided, dilated window along one axis; < 1 means invalid.
Index conv_output_extent(Index in, Index k, Index stride, Index dilation);

/// Embed an unpadded (c, o_w, o_h) map centred in the padded reference shape.
InputTensor pad_reference(const InputTensor& ref, Index s_w, Index s_h);

/// Deterministic small-valued random inputs for every input tensor.
std::vector<InputTensor> random_inputs(const Workload& w, std::uint64_t seed, int lo = -8,
                                       int hi = 7);

/// Brute-force functional oracle over the full NDRange.
OutputTensor eval_reference(const Workload& w, std::span<const InputTensor> inputs);

/// Precomputed linear form of an IndexMap against a row-major tensor:
/// flat address = base + sum_d coef[d] * point[d].
struct LinearAccess {
  Index base = 0;
  std::vector<Index> coef;
};
LinearAccess linearize(const IndexMap& map, std::span<const Index> tensor_shape);

/// Multiply-accumulate the box [lo, lo+ext) of the NDRange into `out`.
/// The caller guarantees the box lies inside the NDRange.
void accumulate_box(const Workload& w, std::span<const InputTensor> inputs,
                    std::span<const Index> lo, std::span<const Index> ext, OutputTensor& out);

void check_input_shapes(const Workload& w, std::span<const InputTensor> inputs);

}  // namespace vmesh
