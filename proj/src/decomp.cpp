// SPDX-License-Identifier: Apache-2.0
#include "lpvtr/decomp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace lpvtr {

using Index = Eigen::Index;

MatrixSvd matrix_svd(const Matrix& a) {
  if (!a.allFinite()) throw NumericalError("matrix_svd: non-finite input");
  if (a.rows() == 0 || a.cols() == 0) {
    const Index m = std::min(a.rows(), a.cols());
    return {Matrix::Zero(a.rows(), m), Vector::Zero(m), Matrix::Zero(a.cols(), m)};
  }
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  MatrixSvd out{svd.matrixU(), svd.singularValues(), svd.matrixV()};
  const Vector signs = kernels::normalize_column_signs(out.u);
  out.v = out.v * signs.asDiagonal();
  return out;
}

Matrix pinv(const Matrix& a, double tol) {
  const auto s = matrix_svd(a);
  Matrix out = Matrix::Zero(a.cols(), a.rows());
  if (s.sigma.size() == 0 || s.sigma[0] == 0.0) return out;
  const double cut = tol * s.sigma[0];
  for (Index i = 0; i < s.sigma.size(); ++i)
    if (s.sigma[i] > cut)
      out.noalias() += s.v.col(i) * (s.u.col(i).transpose() / s.sigma[i]);
  return out;
}

std::size_t numerical_rank(const Vector& sigma, double tol) {
  if (sigma.size() == 0 || sigma[0] == 0.0) return 0;
  std::size_t r = 0;
  for (Index i = 0; i < sigma.size(); ++i)
    if (sigma[i] >= tol * sigma[0]) ++r;
  return r;
}

Matrix orth_union(const std::vector<Matrix>& blocks, double tol) {
  if (blocks.empty()) throw DimensionError("orth_union: no blocks");
  const Index rows = blocks.front().rows();
  Index cols = 0;
  for (const auto& b : blocks) {
    if (b.rows() != rows) throw DimensionError("orth_union: row counts differ");
    cols += b.cols();
  }
  if (cols == 0) return Matrix(rows, 0);
  Matrix all(rows, cols);
  Index c = 0;
  for (const auto& b : blocks) {
    all.middleCols(c, b.cols()) = b;
    c += b.cols();
  }
  const auto s = matrix_svd(all);
  const auto r = static_cast<Index>(numerical_rank(s.sigma, tol));
  return s.u.leftCols(r);
}

namespace {

Matrix orthonormalize(const Matrix& a) {
  if (a.cols() == 0) return a;
  Eigen::HouseholderQR<Matrix> qr(a);
  return qr.householderQ() * Matrix::Identity(a.rows(), a.cols());
}

}  // namespace

double max_principal_angle(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows())
    throw DimensionError("max_principal_angle: row counts differ");
  if (a.cols() != b.cols()) return std::numbers::pi / 2;
  if (a.cols() == 0) return 0.0;
  const Matrix qa = orthonormalize(a);
  const Matrix qb = orthonormalize(b);
  const Matrix resid = qa - qb * (qb.transpose() * qa);
  Eigen::JacobiSVD<Matrix> svd(resid);
  const double s = std::min(1.0, svd.singularValues()[0]);
  return std::asin(s);
}

Matrix complete_basis(const Matrix& q, std::size_t k) {
  const Index rows = q.rows();
  if (static_cast<Index>(k) > rows)
    throw DimensionError("complete_basis: more columns than rows");
  if (static_cast<Index>(k) <= q.cols()) return q.leftCols(static_cast<Index>(k));
  Matrix out(rows, static_cast<Index>(k));
  out.leftCols(q.cols()) = q;
  Index filled = q.cols();
  // Gram-Schmidt the standard basis against the current columns.
  for (Index e = 0; e < rows && filled < static_cast<Index>(k); ++e) {
    Vector v = Vector::Unit(rows, e);
    for (int pass = 0; pass < 2; ++pass)
      v -= out.leftCols(filled) * (out.leftCols(filled).transpose() * v);
    const double nv = v.norm();
    if (nv > 1e-8) out.col(filled++) = v / nv;
  }
  return out;
}

std::vector<kernels::LeftSvd> hosvd_factors(const Tensor& t,
                                            const std::vector<std::size_t>& modes,
                                            double tol) {
  std::vector<kernels::LeftSvd> out;
  out.reserve(modes.size());
  for (auto n : modes) {
    auto s = kernels::unfold_left_svd(t, n);
    const auto r = std::max<std::size_t>(1, numerical_rank(s.sigma, tol));
    s.u = s.u.leftCols(static_cast<Index>(r)).eval();
    out.push_back(std::move(s));
  }
  return out;
}

Tensor reconstruct(const Tensor& core, const std::vector<Matrix>& factors) {
  if (factors.size() != core.order())
    throw DimensionError("reconstruct: factor count does not match core order");
  Tensor out = core;
  for (std::size_t n = 0; n < factors.size(); ++n)
    out = mode_product(out, factors[n], n);
  return out;
}

HosvdResult hosvd(const Tensor& t, double tol) {
  if (!t.all_finite()) throw NumericalError("hosvd: non-finite input");
  std::vector<std::size_t> modes(t.order());
  for (std::size_t n = 0; n < modes.size(); ++n) modes[n] = n;
  auto svds = hosvd_factors(t, modes, tol);
  HosvdResult res;
  res.core = t;
  for (std::size_t n = 0; n < svds.size(); ++n) {
    res.core = mode_product(res.core, svds[n].u.transpose(), n);
    res.factors.push_back(std::move(svds[n].u));
    res.mode_sigmas.push_back(std::move(svds[n].sigma));
  }
  return res;
}

HosvdTruncation hosvd_truncate(const Tensor& t, const std::vector<std::size_t>& ranks) {
  if (ranks.size() != t.order())
    throw DimensionError("hosvd_truncate: one rank per mode required");
  for (std::size_t n = 0; n < ranks.size(); ++n)
    if (ranks[n] < 1 || ranks[n] > t.dim(n))
      throw DimensionError("hosvd_truncate: rank " + std::to_string(ranks[n]) +
                           " out of range for mode " + std::to_string(n));
  HosvdTruncation out;
  double tail = 0.0;
  out.result.core = t;
  for (std::size_t n = 0; n < t.order(); ++n) {
    auto s = kernels::unfold_left_svd(t, n);
    const auto r = static_cast<Index>(ranks[n]);
    for (Index i = r; i < s.sigma.size(); ++i) tail += s.sigma[i] * s.sigma[i];
    Matrix q = complete_basis(s.u, ranks[n]);
    out.result.core = mode_product(out.result.core, q.transpose(), n);
    out.result.factors.push_back(std::move(q));
    out.result.mode_sigmas.push_back(std::move(s.sigma));
  }
  out.approx = reconstruct(out.result.core, out.result.factors);
  out.error_bound = std::sqrt(tail);
  return out;
}

namespace {

// Contracts every mode except `skip` with the given vectors.
Vector contract_except(const Tensor& t, const std::vector<Vector>& v,
                       std::size_t skip) {
  // Contract the largest modes first to shrink the working tensor fastest.
  std::vector<std::size_t> order;
  for (std::size_t n = 0; n < t.order(); ++n)
    if (n != skip) order.push_back(n);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return t.dim(a) > t.dim(b) || (t.dim(a) == t.dim(b) && a < b);
  });
  if (order.empty()) return Eigen::Map<const Vector>(t.data().data(), static_cast<Index>(t.size()));
  Tensor w = mode_product(t, v[order[0]].transpose(), order[0]);
  for (std::size_t k = 1; k < order.size(); ++k)
    w = mode_product(w, v[order[k]].transpose(), order[k]);
  return Eigen::Map<const Vector>(w.data().data(),
                                  static_cast<Index>(w.size()));
}

struct Candidate {
  std::vector<Vector> vecs;
  double sigma = 0.0;
  bool converged = false;
  int iters = 0;
};

Candidate power_iterate(const Tensor& t, std::vector<Vector> vecs,
                        const std::vector<Matrix>& prev, const TsvdOptions& o) {
  const std::size_t order = t.order();
  Candidate c;
  double sigma_old = -1.0;
  for (int it = 1; it <= o.max_iters; ++it) {
    double sigma = 0.0;
    for (std::size_t n = 0; n < order; ++n) {
      Vector g = contract_except(t, vecs, n);
      if (prev[n].cols() > 0) {
        g -= prev[n] * (prev[n].transpose() * g);
        g -= prev[n] * (prev[n].transpose() * g);
      }
      sigma = g.norm();
      if (sigma == 0.0) {
        c.vecs = std::move(vecs);
        c.sigma = 0.0;
        c.converged = true;
        c.iters = it;
        return c;
      }
      vecs[n] = g / sigma;
    }
    c.iters = it;
    if (std::abs(sigma - sigma_old) <= o.tol * sigma) {
      c.converged = true;
      sigma_old = sigma;
      break;
    }
    sigma_old = sigma;
  }
  c.vecs = std::move(vecs);
  c.sigma = sigma_old;
  return c;
}

}  // namespace

TsvdResult tsvd(const Tensor& t, std::size_t r, const TsvdOptions& opts) {
  if (r < 1) throw DimensionError("tsvd: r must be >= 1");
  const std::size_t order = t.order();
  for (std::size_t n = 0; n < order; ++n)
    if (r > t.dim(n))
      throw DimensionError("tsvd: r = " + std::to_string(r) +
                           " exceeds mode " + std::to_string(n) + " size " +
                           std::to_string(t.dim(n)));
  if (!t.all_finite()) throw NumericalError("tsvd: non-finite input");

  // U_n Sigma_n for each mode, so that P G_n P = (P U S)(P U S)^T.
  std::vector<Matrix> gram_factor(order);
  for (std::size_t n = 0; n < order; ++n) {
    const auto s = kernels::unfold_left_svd(t, n);
    gram_factor[n] = s.u * s.sigma.asDiagonal();
  }

  TsvdResult res;
  std::vector<Matrix> prev(order);
  for (std::size_t n = 0; n < order; ++n)
    prev[n] = Matrix(static_cast<Index>(t.dim(n)), 0);
  std::vector<double> sigmas;
  std::vector<double> residuals;
  Tensor resid = t;

  for (std::size_t i = 0; i < r; ++i) {
    const int starts = 1 + std::max(0, opts.restarts);
    std::vector<std::vector<Vector>> inits(static_cast<std::size_t>(starts));
    bool exhausted = false;
    for (std::size_t n = 0; n < order && !exhausted; ++n) {
      Matrix pg = gram_factor[n];
      if (prev[n].cols() > 0) pg -= prev[n] * (prev[n].transpose() * pg);
      const auto s = matrix_svd(pg);
      if (s.sigma.size() == 0 || s.sigma[0] <= 1e-14 * gram_factor[n].norm()) {
        exhausted = true;
        break;
      }
      inits[0].push_back(s.u.col(0));
    }
    if (exhausted) break;
    for (int k = 1; k < starts; ++k) {
      std::seed_seq seq{opts.seed, static_cast<std::uint64_t>(i),
                        static_cast<std::uint64_t>(k)};
      std::mt19937_64 rng(seq);
      std::normal_distribution<double> nd;
      for (std::size_t n = 0; n < order; ++n) {
        Vector v(static_cast<Index>(t.dim(n)));
        for (Index j = 0; j < v.size(); ++j) v[j] = nd(rng);
        if (prev[n].cols() > 0) v -= prev[n] * (prev[n].transpose() * v);
        const double nv = v.norm();
        inits[static_cast<std::size_t>(k)].push_back(
            nv > 0 ? Vector(v / nv) : inits[0][n]);
      }
    }

    std::vector<Candidate> cands(static_cast<std::size_t>(starts));
#pragma omp parallel for schedule(dynamic, 1)
    for (int k = 0; k < starts; ++k)
      cands[static_cast<std::size_t>(k)] =
          power_iterate(t, inits[static_cast<std::size_t>(k)], prev, opts);

    std::size_t best = 0;
    for (std::size_t k = 1; k < cands.size(); ++k)
      if (cands[k].sigma > cands[best].sigma) best = k;
    Candidate& c = cands[best];
    if (c.sigma == 0.0) break;

    // Sign convention on all modes but the last; the last absorbs the sign
    // so that the multilinear value equals +sigma.
    for (std::size_t n = 0; n + 1 < order; ++n) {
      Matrix col = c.vecs[n];
      kernels::normalize_column_signs(col);
      c.vecs[n] = col.col(0);
    }
    const Vector g = contract_except(t, c.vecs, order - 1);
    const double value = g.dot(c.vecs[order - 1]);
    if (value < 0) c.vecs[order - 1] *= -1.0;
    const double sigma = std::abs(value);

    for (std::size_t n = 0; n < order; ++n) {
      prev[n].conservativeResize(Eigen::NoChange, prev[n].cols() + 1);
      prev[n].col(prev[n].cols() - 1) = c.vecs[n];
    }
    resid -= outer_product(std::span<const Vector>(c.vecs)) * sigma;
    sigmas.push_back(sigma);
    residuals.push_back(frobenius(resid));
    res.converged.push_back(c.converged);
    res.iterations.push_back(c.iters);
  }

  res.sigmas = Eigen::Map<const Vector>(sigmas.data(), static_cast<Index>(sigmas.size()));
  res.residual_norms =
      Eigen::Map<const Vector>(residuals.data(), static_cast<Index>(residuals.size()));
  res.vectors = std::move(prev);
  return res;
}

Tensor tsvd_reconstruct(const TsvdResult& res, std::size_t r) {
  if (res.vectors.empty()) throw DimensionError("tsvd_reconstruct: empty result");
  Dims dims;
  for (const auto& v : res.vectors) dims.push_back(static_cast<std::size_t>(v.rows()));
  Tensor out(dims);
  const auto count = std::min<std::size_t>(r, static_cast<std::size_t>(res.sigmas.size()));
  for (std::size_t i = 0; i < count; ++i) {
    std::vector<Vector> vs;
    for (const auto& v : res.vectors) vs.push_back(v.col(static_cast<Index>(i)));
    out += outer_product(std::span<const Vector>(vs)) * res.sigmas[static_cast<Index>(i)];
  }
  return out;
}

}  // namespace lpvtr
