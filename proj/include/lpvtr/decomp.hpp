// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "lpvtr/kernels.hpp"
#include "lpvtr/tensor.hpp"

namespace lpvtr {

/// Thin SVD A = U diag(sigma) V^T with columns of U sign-normalized.
struct MatrixSvd {
  Matrix u;
  Vector sigma;
  Matrix v;
};

MatrixSvd matrix_svd(const Matrix& a);

/// Moore-Penrose inverse; singular values below tol * sigma_max are dropped.
Matrix pinv(const Matrix& a, double tol = 1e-12);

/// Number of singular values >= tol * sigma_max (0 for a zero matrix).
std::size_t numerical_rank(const Vector& sigma, double tol);

/// Column-orthonormal basis of the sum of the column spaces.
Matrix orth_union(const std::vector<Matrix>& blocks, double tol = 1e-10);

/// Largest principal angle (radians) between two column spaces.
/// Returns pi/2 when the spaces have different dimensions.
double max_principal_angle(const Matrix& a, const Matrix& b);

/// Extends orthonormal columns to k orthonormal columns (k <= rows).
Matrix complete_basis(const Matrix& q, std::size_t k);

struct HosvdResult {
  Tensor core;
  std::vector<Matrix> factors;       // L_n x R_n
  std::vector<Vector> mode_sigmas;   // all singular values of unfold(T, n)
};

/// HOSVD keeping, per mode, the singular vectors with sigma >= tol *
/// sigma_max (at least one column per mode).
HosvdResult hosvd(const Tensor& t, double tol = kDefaultRankTol);

/// Mode factors only (no core). Entry k holds the truncated SVD of mode
/// modes[k].
std::vector<kernels::LeftSvd> hosvd_factors(const Tensor& t,
                                            const std::vector<std::size_t>& modes,
                                            double tol);

/// core x_1 Q_1 x_2 ... x_N Q_N.
Tensor reconstruct(const Tensor& core, const std::vector<Matrix>& factors);

struct HosvdTruncation {
  Tensor approx;
  HosvdResult result;
  double error_bound = 0.0;  // sqrt of the discarded squared sigmas
};

HosvdTruncation hosvd_truncate(const Tensor& t, const std::vector<std::size_t>& ranks);

struct TsvdOptions {
  double tol = 1e-10;
  int max_iters = 1000;
  int restarts = 5;
  std::uint64_t seed = 0;
};

struct TsvdResult {
  Vector sigmas;                     // R values
  std::vector<Matrix> vectors;       // per mode: L_n x R
  Vector residual_norms;             // ||T - sum_{j<=i} sigma_j phi^(j)||
  std::vector<bool> converged;
  std::vector<int> iterations;
};

/// Sequential constrained rank-1 maximization by alternating power
/// iteration. Stops early when the remaining constrained maximum is zero.
TsvdResult tsvd(const Tensor& t, std::size_t r, const TsvdOptions& opts = {});

/// sum_i sigma_i phi_1^(i) x ... x phi_N^(i) over the first r components.
Tensor tsvd_reconstruct(const TsvdResult& res, std::size_t r);

}  // namespace lpvtr
