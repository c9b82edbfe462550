// SPDX-FileCopyrightText: (c) 2026 The VectorMesh Simulator Authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <random>
#include <string>

#include "vmesh/workload.hpp"

namespace vmesh::testing {

/// Random workload of any kind with every NDRange extent <= 8.
inline Workload random_small_workload(std::mt19937_64& rng, bool conv_like_only = false) {
  auto pick = [&](Index lo, Index hi) { return std::uniform_int_distribution<Index>(lo, hi)(rng); };
  const int kind = conv_like_only ? static_cast<int>(pick(0, 1)) : static_cast<int>(pick(0, 3));
  Workload w;
  if (kind == 0) {
    w = make_gemm(pick(1, 8), pick(1, 8), pick(1, 8));
  } else if (kind == 1 || kind == 2) {
    const Index k_w = pick(1, 3), k_h = pick(1, 3), stride = pick(1, 2), dil = pick(1, 2);
    const Index o_w = pick(1, 8), o_h = pick(1, 8);
    const Index in_w = stride * (o_w - 1) + dil * (k_w - 1) + 1;
    const Index in_h = stride * (o_h - 1) + dil * (k_h - 1) + 1;
    if (kind == 1)
      w = make_conv(pick(1, 8), pick(1, 8), in_w, in_h, k_w, k_h, stride, dil);
    else
      w = make_depthwise(pick(1, 8), in_w, in_h, k_w, k_h, stride, dil);
  } else {
    w = make_correlation(pick(1, 8), pick(1, 8), pick(1, 8), pick(1, 5), pick(1, 5));
  }
  w.name += "_r" + std::to_string(rng() % 100000);
  return w;
}

/// Plain nested-loop reference for GEMM, independent of the IndexMap machinery.
inline OutputTensor naive_gemm(const InputTensor& a, const InputTensor& b) {
  const Index m = a.shape[0], k = a.shape[1], n = b.shape[1];
  OutputTensor c({m, n});
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < n; ++j) {
      std::int64_t s = 0;
      for (Index x = 0; x < k; ++x)
        s += std::int64_t{a.data[static_cast<std::size_t>(i * k + x)]} * b.data[static_cast<std::size_t>(x * n + j)];
      c.data[static_cast<std::size_t>(i * n + j)] = s;
    }
  return c;
}

}  // namespace vmesh::testing
