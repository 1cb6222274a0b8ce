// SPDX-License-Identifier: Apache-2.0
#include "lpvtr/kernels.hpp"

#include <algorithm>
#include <cstdint>

#include <omp.h>

namespace lpvtr::kernels {

namespace {

using Index = Eigen::Index;
using ConstMap = Eigen::Map<const Matrix>;
using MutMap = Eigen::Map<Matrix>;
using StridedConstMap =
    Eigen::Map<const Matrix, 0, Eigen::OuterStride<Eigen::Dynamic>>;

struct ModeView {
  std::size_t left = 1;
  std::size_t len = 1;
  std::size_t right = 1;
};

ModeView mode_view(const Tensor& t, std::size_t mode) {
  const auto& d = t.dims();
  const std::size_t len = t.dim(mode);
  return {dims_product(std::span(d).first(mode)), len,
          dims_product(std::span(d).subspan(mode + 1))};
}

constexpr std::int64_t kRowChunk = 2048;

}  // namespace

Vector normalize_column_signs(Matrix& m) {
  Vector signs = Vector::Ones(m.cols());
  for (Index j = 0; j < m.cols(); ++j) {
    const double mx = m.col(j).cwiseAbs().maxCoeff();
    if (mx == 0.0) continue;
    for (Index i = 0; i < m.rows(); ++i) {
      if (std::abs(m(i, j)) > 1e-12 * mx) {
        if (m(i, j) < 0) {
          m.col(j) *= -1.0;
          signs[j] = -1.0;
        }
        break;
      }
    }
  }
  return signs;
}

Tensor mode_product(const Tensor& t, const Matrix& q, std::size_t mode) {
  const auto v = mode_view(t, mode);
  if (static_cast<std::size_t>(q.cols()) != v.len)
    throw DimensionError("mode_product: matrix has " +
                         std::to_string(q.cols()) + " columns, mode " +
                         std::to_string(mode) + " has size " +
                         std::to_string(v.len));
  if (q.rows() == 0) throw DimensionError("mode_product: empty matrix");
  Dims out_dims = t.dims();
  out_dims[mode] = static_cast<std::size_t>(q.rows());
  Tensor out(out_dims);
  const std::size_t rows_out = static_cast<std::size_t>(q.rows());
  const Matrix qt = q.transpose();

  const double* src = t.data().data();
  double* dst = out.data().data();
  const auto chunks =
      static_cast<std::int64_t>((v.left + kRowChunk - 1) / kRowChunk);
  const auto items = static_cast<std::int64_t>(v.right) * chunks;

  // Slab r of the input is a (left x len) column-major block; the matching
  // output slab is (left x rows_out). Rows are split in fixed chunks.
#pragma omp parallel for schedule(static)
  for (std::int64_t item = 0; item < items; ++item) {
    const auto r = static_cast<std::size_t>(item / chunks);
    const auto c = static_cast<std::size_t>(item % chunks);
    const std::size_t row0 = c * kRowChunk;
    const std::size_t nrows = std::min<std::size_t>(kRowChunk, v.left - row0);
    StridedConstMap in(src + r * v.left * v.len + row0,
                       static_cast<Index>(nrows), static_cast<Index>(v.len),
                       Eigen::OuterStride<>(static_cast<Index>(v.left)));
    Eigen::Map<Matrix, 0, Eigen::OuterStride<Eigen::Dynamic>> res(
        dst + r * v.left * rows_out + row0, static_cast<Index>(nrows),
        static_cast<Index>(rows_out),
        Eigen::OuterStride<>(static_cast<Index>(v.left)));
    res.noalias() = in * qt;
  }
  return out;
}

Tensor contract(const Tensor& t, const Tensor& s, std::size_t mode_t,
                std::size_t mode_s) {
  const auto vt = mode_view(t, mode_t);
  const auto vs = mode_view(s, mode_s);
  if (vt.len != vs.len)
    throw DimensionError("contract: mode sizes differ (" +
                         std::to_string(vt.len) + " vs " +
                         std::to_string(vs.len) + ")");

  Dims out_dims;
  for (std::size_t k = 0; k < t.order(); ++k)
    if (k != mode_t) out_dims.push_back(t.dims()[k]);
  for (std::size_t k = 0; k < s.order(); ++k)
    if (k != mode_s) out_dims.push_back(s.dims()[k]);
  if (out_dims.empty()) out_dims.push_back(1);

  const std::size_t tp = vt.left * vt.right;
  const std::size_t sp = vs.left * vs.right;
  const std::size_t len = vt.len;

  // Tmat(a + A b, l) = T[a + A (l + L b)]
  Matrix tmat;
  if (vt.right == 1) {
    tmat = ConstMap(t.data().data(), static_cast<Index>(vt.left),
                    static_cast<Index>(len));
  } else {
    tmat.resize(static_cast<Index>(tp), static_cast<Index>(len));
    const double* src = t.data().data();
    for (std::size_t b = 0; b < vt.right; ++b)
      for (std::size_t l = 0; l < len; ++l)
        for (std::size_t a = 0; a < vt.left; ++a)
          tmat(static_cast<Index>(a + vt.left * b), static_cast<Index>(l)) =
              src[a + vt.left * (l + len * b)];
  }

  // Smat(l, c + C d) = S[c + C (l + L d)]
  Matrix smat_store;
  const double* sdata = s.data().data();
  if (vs.left != 1) {
    smat_store.resize(static_cast<Index>(len), static_cast<Index>(sp));
    for (std::size_t d = 0; d < vs.right; ++d)
      for (std::size_t l = 0; l < len; ++l)
        for (std::size_t c = 0; c < vs.left; ++c)
          smat_store(static_cast<Index>(l),
                     static_cast<Index>(c + vs.left * d)) =
              sdata[c + vs.left * (l + len * d)];
    sdata = smat_store.data();
  }
  ConstMap smat(sdata, static_cast<Index>(len), static_cast<Index>(sp));

  Tensor out(out_dims);
  MutMap res(out.data().data(), static_cast<Index>(tp), static_cast<Index>(sp));

  // Column blocks of S; all-zero columns of S leave zero result columns.
  constexpr std::int64_t kColBlock = 256;
  const auto blocks =
      static_cast<std::int64_t>((sp + kColBlock - 1) / kColBlock);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t blk = 0; blk < blocks; ++blk) {
    const Index c0 = blk * kColBlock;
    const Index nc = std::min<Index>(kColBlock, static_cast<Index>(sp) - c0);
    std::vector<Index> nz;
    nz.reserve(static_cast<std::size_t>(nc));
    for (Index j = c0; j < c0 + nc; ++j)
      if (!smat.col(j).isZero(0.0)) nz.push_back(j);
    if (nz.empty()) continue;
    if (static_cast<Index>(nz.size()) == nc) {
      res.middleCols(c0, nc).noalias() = tmat * smat.middleCols(c0, nc);
      continue;
    }
    Matrix sub(static_cast<Index>(len), static_cast<Index>(nz.size()));
    for (std::size_t k = 0; k < nz.size(); ++k)
      sub.col(static_cast<Index>(k)) = smat.col(nz[k]);
    const Matrix prod = tmat * sub;
    for (std::size_t k = 0; k < nz.size(); ++k)
      res.col(nz[k]) = prod.col(static_cast<Index>(k));
  }
  return out;
}

namespace {

// Folds `block` into the running triangular factor `r` (both with L columns).
void tsqr_merge(Matrix& r, const Eigen::Ref<const Matrix>& block) {
  if (block.rows() == 0) return;
  Matrix stacked(r.rows() + block.rows(), block.cols());
  stacked << r, block;
  Eigen::HouseholderQR<Matrix> qr(stacked);
  const Index m = std::min(stacked.rows(), stacked.cols());
  r = qr.matrixQR().topRows(m).triangularView<Eigen::Upper>();
}

}  // namespace

LeftSvd unfold_left_svd(const Tensor& t, std::size_t mode) {
  const auto v = mode_view(t, mode);
  const std::size_t rows_total = v.left * v.right;  // rows of unfold^T
  const std::size_t len = v.len;
  const Index lcols = static_cast<Index>(len);
  const double* src = t.data().data();

  // Work split depends only on the problem size.
  const std::size_t target_rows = std::max<std::size_t>(8 * len, 4096);
  const std::size_t parts = std::clamp<std::size_t>(
      (rows_total + target_rows - 1) / target_rows, 1, 64);
  const std::size_t per_part = (rows_total + parts - 1) / parts;
  const Index cap = static_cast<Index>(std::max<std::size_t>(4 * len, 512));

  std::vector<Matrix> partial(parts, Matrix(0, lcols));

#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t p = 0; p < static_cast<std::int64_t>(parts); ++p) {
    const std::size_t begin = static_cast<std::size_t>(p) * per_part;
    const std::size_t end = std::min(rows_total, begin + per_part);
    Matrix& r = partial[static_cast<std::size_t>(p)];
    Matrix buf(cap, lcols);
    Index fill = 0;
    for (std::size_t rho = begin; rho < end; ++rho) {
      const std::size_t a = rho % v.left;
      const std::size_t slab = rho / v.left;
      const double* base = src + a + v.left * len * slab;
      bool nonzero = false;
      for (std::size_t l = 0; l < len; ++l) {
        const double x = base[l * v.left];
        buf(fill, static_cast<Index>(l)) = x;
        nonzero = nonzero || x != 0.0;
      }
      if (!nonzero) continue;
      if (++fill == cap) {
        tsqr_merge(r, buf);
        fill = 0;
      }
    }
    tsqr_merge(r, buf.topRows(fill));
  }

  Matrix r(0, lcols);
  for (const auto& pr : partial) tsqr_merge(r, pr);

  const std::size_t m_full = std::min(len, rows_total);
  LeftSvd out;
  if (r.rows() == 0) {
    out.u = Matrix::Identity(lcols, static_cast<Index>(m_full));
    out.sigma = Vector::Zero(static_cast<Index>(m_full));
    return out;
  }
  Eigen::JacobiSVD<Matrix> svd(r, Eigen::ComputeFullV);
  const Index m = std::min<Index>(static_cast<Index>(m_full),
                                  svd.singularValues().size());
  out.sigma = svd.singularValues().head(m);
  out.u = svd.matrixV().leftCols(m);
  if (m < static_cast<Index>(m_full)) {
    // Rows skipped as zero: pad with orthonormal completion and zero sigmas.
    const Index extra = static_cast<Index>(m_full) - m;
    Matrix full = svd.matrixV();
    out.u.conservativeResize(Eigen::NoChange, static_cast<Index>(m_full));
    out.u.rightCols(extra) = full.middleCols(m, extra);
    out.sigma.conservativeResize(static_cast<Index>(m_full));
    out.sigma.tail(extra).setZero();
  }
  normalize_column_signs(out.u);
  return out;
}

namespace serial {

Tensor mode_product(const Tensor& t, const Matrix& q, std::size_t mode) {
  const auto v = mode_view(t, mode);
  if (static_cast<std::size_t>(q.cols()) != v.len)
    throw DimensionError("mode_product: dimension mismatch");
  Dims out_dims = t.dims();
  const auto rows_out = static_cast<std::size_t>(q.rows());
  out_dims[mode] = rows_out;
  Tensor out(out_dims);
  const auto src = t.data();
  auto dst = out.data();
  for (std::size_t r = 0; r < v.right; ++r)
    for (std::size_t k = 0; k < rows_out; ++k)
      for (std::size_t a = 0; a < v.left; ++a) {
        double acc = 0.0;
        for (std::size_t l = 0; l < v.len; ++l)
          acc += src[a + v.left * (l + v.len * r)] *
                 q(static_cast<Index>(k), static_cast<Index>(l));
        dst[a + v.left * (k + rows_out * r)] = acc;
      }
  return out;
}

Tensor contract(const Tensor& t, const Tensor& s, std::size_t mode_t,
                std::size_t mode_s) {
  const auto vt = mode_view(t, mode_t);
  const auto vs = mode_view(s, mode_s);
  if (vt.len != vs.len) throw DimensionError("contract: dimension mismatch");
  Dims out_dims;
  for (std::size_t k = 0; k < t.order(); ++k)
    if (k != mode_t) out_dims.push_back(t.dims()[k]);
  for (std::size_t k = 0; k < s.order(); ++k)
    if (k != mode_s) out_dims.push_back(s.dims()[k]);
  if (out_dims.empty()) out_dims.push_back(1);
  Tensor out(out_dims);
  const auto a_src = t.data();
  const auto b_src = s.data();
  auto dst = out.data();
  const std::size_t tp = vt.left * vt.right;
  for (std::size_t d = 0; d < vs.right; ++d)
    for (std::size_t c = 0; c < vs.left; ++c)
      for (std::size_t b = 0; b < vt.right; ++b)
        for (std::size_t a = 0; a < vt.left; ++a) {
          double acc = 0.0;
          for (std::size_t l = 0; l < vt.len; ++l)
            acc += a_src[a + vt.left * (l + vt.len * b)] *
                   b_src[c + vs.left * (l + vs.len * d)];
          dst[(a + vt.left * b) + tp * (c + vs.left * d)] = acc;
        }
  return out;
}

LeftSvd unfold_left_svd(const Tensor& t, std::size_t mode) {
  const Matrix x = unfold(t, mode);
  Eigen::JacobiSVD<Matrix> svd(x, Eigen::ComputeThinU);
  LeftSvd out{svd.matrixU(), svd.singularValues()};
  normalize_column_signs(out.u);
  return out;
}

}  // namespace serial

}  // namespace lpvtr::kernels
