// SPDX-License-Identifier: Apache-2.0
#pragma once

// Hot loops behind the tensor API. Each kernel has an OpenMP version used by
// the library and a plain serial version kept as a test oracle and benchmark
// baseline. Parallel kernels partition work independently of the thread
// count, so results are bitwise identical for any OMP_NUM_THREADS.

#include "lpvtr/tensor.hpp"

namespace lpvtr::kernels {

/// Left singular vectors and singular values of a matrix-like operator.
struct LeftSvd {
  Matrix u;      // L x m, column-orthonormal
  Vector sigma;  // m values, nonincreasing
};

/// Flips columns so that the first significant entry (magnitude above 1e-12
/// of the column's max) is positive. Returns the applied signs.
Vector normalize_column_signs(Matrix& m);

Tensor mode_product(const Tensor& t, const Matrix& q, std::size_t mode);
Tensor contract(const Tensor& t, const Tensor& s, std::size_t mode_t,
                std::size_t mode_s);

/// Left SVD of unfold(T, mode) without materializing the unfolding: the
/// transpose of the unfolding is streamed through a blocked TSQR and the
/// small triangular factor is decomposed. All-zero rows are skipped.
LeftSvd unfold_left_svd(const Tensor& t, std::size_t mode);

namespace serial {

Tensor mode_product(const Tensor& t, const Matrix& q, std::size_t mode);
Tensor contract(const Tensor& t, const Tensor& s, std::size_t mode_t,
                std::size_t mode_s);
/// Materializes the unfolding and runs a two-sided Jacobi SVD.
LeftSvd unfold_left_svd(const Tensor& t, std::size_t mode);

}  // namespace serial

}  // namespace lpvtr::kernels
