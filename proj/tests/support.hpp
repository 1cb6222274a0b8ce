// SPDX-License-Identifier: Apache-2.0
// Seeded generators and brute-force oracles shared by the test binaries.
#pragma once

#include <cmath>
#include <random>

#include "lpvtr/lpv_model.hpp"

namespace lpvtr::test {

using Index = Eigen::Index;

struct Rng {
  std::mt19937_64 gen;
  explicit Rng(std::uint64_t seed, std::uint64_t salt = 0) {
    std::seed_seq seq{seed, salt};
    gen.seed(seq);
  }
  double normal() { return std::normal_distribution<double>()(gen); }
  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(gen); }
  std::size_t index(std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(gen);
  }
  Matrix matrix(Index r, Index c) {
    Matrix m(r, c);
    for (Index j = 0; j < c; ++j)
      for (Index i = 0; i < r; ++i) m(i, j) = normal();
    return m;
  }
  Vector vector(Index n) { return matrix(n, 1).col(0); }
  Tensor tensor(Dims dims) {
    Tensor t(std::move(dims));
    for (auto& v : t.data()) v = normal();
    return t;
  }
  /// n x k with orthonormal columns.
  Matrix orthonormal(Index n, Index k) {
    Eigen::HouseholderQR<Matrix> qr(matrix(n, k));
    return qr.householderQ() * Matrix::Identity(n, k);
  }
};

/// sum_i sigma_i q_0(:,i) x ... x q_{N-1}(:,i) with random orthonormal
/// factor columns: a diagonalizable tensor with known singular values.
struct Planted {
  Tensor t;
  std::vector<Matrix> factors;
};

inline Planted planted(Rng& rng, const Dims& dims, const std::vector<double>& sigmas) {
  Planted p{Tensor(dims), {}};
  const auto r = static_cast<Index>(sigmas.size());
  for (auto d : dims) p.factors.push_back(rng.orthonormal(static_cast<Index>(d), r));
  for (Index i = 0; i < r; ++i) {
    std::vector<Vector> vs;
    for (const auto& q : p.factors) vs.push_back(q.col(i));
    p.t += sigmas[static_cast<std::size_t>(i)] * outer_product(vs);
  }
  return p;
}

/// Random affine model whose frozen A matrices are contractive for |p| <= 1.
inline AffineLpvSs random_model(Rng& rng, std::size_t nx, std::size_t nu, std::size_t ny,
                                std::size_t np, bool affine = true) {
  auto m = AffineLpvSs::zeros(nx, nu, ny, np, affine);
  const double k = static_cast<double>(m.channels());
  m.A = rng.tensor(m.A.dims()) * (0.5 / (std::sqrt(static_cast<double>(nx)) * k));
  m.B = rng.tensor(m.B.dims());
  m.C = rng.tensor(m.C.dims());
  m.D = rng.tensor(m.D.dims());
  return m;
}

/// Entry (i_0, ..., i_{N-1}) by explicit stride arithmetic.
inline double entry(const Tensor& t, const Dims& idx) {
  std::size_t lin = 0, stride = 1;
  for (std::size_t k = 0; k < idx.size(); ++k) {
    lin += idx[k] * stride;
    stride *= t.dim(k);
  }
  return t[lin];
}

/// Visits every multi-index of `dims`, mode 0 fastest.
template <class F>
void for_each_index(const Dims& dims, F&& f) {
  Dims idx(dims.size(), 0);
  const std::size_t total = dims_product(dims);
  for (std::size_t n = 0; n < total; ++n) {
    f(idx);
    for (std::size_t k = 0; k < dims.size(); ++k) {
      if (++idx[k] < dims[k]) break;
      idx[k] = 0;
    }
  }
}

/// Largest principal angle between two column spaces, as asin of the
/// spectral norm of the part of Q_b outside im(Q_a).
inline double subspace_angle(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) return M_PI / 2;
  const Matrix qa = Eigen::JacobiSVD<Matrix>(a, Eigen::ComputeThinU).matrixU();
  const Matrix qb = Eigen::JacobiSVD<Matrix>(b, Eigen::ComputeThinU).matrixU();
  const Matrix rest = qb - qa * (qa.transpose() * qb);
  const double s = Eigen::JacobiSVD<Matrix>(rest).singularValues()(0);
  return std::asin(std::min(1.0, s));
}

}  // namespace lpvtr::test
