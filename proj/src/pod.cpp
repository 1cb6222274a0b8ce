// SPDX-License-Identifier: Apache-2.0
#include "lpvtr/pod.hpp"

#include <algorithm>
#include <cmath>

namespace lpvtr {

using Index = Eigen::Index;

SnapshotSet snapshot_matrices(const Trajectory& tr) {
  return snapshot_matrices(std::vector<Trajectory>{tr});
}

SnapshotSet snapshot_matrices(const std::vector<Trajectory>& trs) {
  if (trs.empty()) throw DimensionError("snapshot_matrices: no trajectories");
  Index cols = 0, dcols = 0;
  for (const auto& tr : trs) {
    if (tr.length() < 2)
      throw DimensionError("snapshot_matrices: trajectory needs at least 2 samples");
    if (tr.x.rows() != trs[0].x.rows() || tr.p.rows() != trs[0].p.rows())
      throw DimensionError("snapshot_matrices: trajectories differ in width");
    cols += static_cast<Index>(tr.length());
    dcols += static_cast<Index>(tr.length()) - 1;
  }
  SnapshotSet s;
  s.Mx.resize(trs[0].x.rows(), cols);
  s.Mp.resize(trs[0].p.rows(), cols);
  s.Md.resize(trs[0].x.rows(), dcols);
  Index c = 0, d = 0;
  for (const auto& tr : trs) {
    const auto n = static_cast<Index>(tr.length());
    s.Mx.middleCols(c, n) = tr.x;
    s.Mp.middleCols(c, n) = tr.p;
    s.Md.middleCols(d, n - 1) = tr.x.rightCols(n - 1) - tr.x.leftCols(n - 1);
    c += n;
    d += n - 1;
    if (!s.source.empty()) s.source += "+";
    s.source += tr.label;
  }
  return s;
}

std::string to_string(PodVariant v) {
  switch (v) {
    case PodVariant::Matrix: return "matrix";
    case PodVariant::Weighted: return "weighted";
    case PodVariant::Tsvd: return "tsvd";
    default: return "hosvd";
  }
}

std::string to_string(PodResidual r) {
  return r == PodResidual::Galerkin ? "galerkin" : "delta";
}

PodVariant parse_pod_variant(const std::string& s) {
  if (s == "matrix") return PodVariant::Matrix;
  if (s == "weighted") return PodVariant::Weighted;
  if (s == "tsvd") return PodVariant::Tsvd;
  if (s == "hosvd") return PodVariant::Hosvd;
  throw std::invalid_argument("unknown POD variant '" + s + "'");
}

PodResidual parse_pod_residual(const std::string& s) {
  if (s == "galerkin") return PodResidual::Galerkin;
  if (s == "delta") return PodResidual::Delta;
  throw std::invalid_argument("unknown residual choice '" + s + "'");
}

namespace {

constexpr double kPodRankTol = 1e-10;

Matrix leading(const MatrixSvd& s, std::size_t r, const char* what) {
  const auto rank = numerical_rank(s.sigma, kPodRankTol);
  if (r > rank)
    throw NumericalError(std::string("requested ") + what + " = " +
                         std::to_string(r) + " exceeds the numerical rank " +
                         std::to_string(rank) + " of the data");
  return s.u.leftCols(static_cast<Index>(r));
}

void check_ranks(const SnapshotSet& snap, std::size_t rx, std::size_t rp) {
  if (rx < 1 || rx > static_cast<std::size_t>(snap.Mx.rows()))
    throw DimensionError("r_x must be in [1, n_x]");
  if (rp < 1 || rp > static_cast<std::size_t>(snap.Mp.rows()))
    throw DimensionError("r_p must be in [1, n_p]");
}

ProjectionTriple make_triple(const SnapshotSet& snap, Matrix v, Matrix z,
                             PodResidual residual, const std::string& tag) {
  ProjectionTriple p;
  if (residual == PodResidual::Delta) {
    p.W = leading(matrix_svd(snap.Md), static_cast<std::size_t>(v.cols()), "r_x (increments)");
  } else {
    p.W = v;
  }
  p.V = std::move(v);
  p.Z = std::move(z);
  p.z_includes_affine = false;
  p.provenance = "pod-" + tag;
  return p;
}

}  // namespace

PodResult pod_matrix(const SnapshotSet& snap, std::size_t rx, std::size_t rp,
                     PodResidual residual) {
  check_ranks(snap, rx, rp);
  const auto sx = matrix_svd(snap.Mx);
  const auto sp = matrix_svd(snap.Mp);
  PodResult out;
  out.proj = make_triple(snap, leading(sx, rx, "r_x"), leading(sp, rp, "r_p"),
                         residual, "matrix");
  out.spectrum_x = sx.sigma.cwiseAbs2();
  out.spectrum_p = sp.sigma.cwiseAbs2();
  return out;
}

WeightedMatrices weighted_matrices(const SnapshotSet& snap) {
  if (snap.Mx.cols() != snap.Mp.cols())
    throw DimensionError("weighted_matrices: column counts differ");
  const Vector wx = snap.Mp.colwise().squaredNorm().transpose();
  const Vector wp = snap.Mx.colwise().squaredNorm().transpose();
  WeightedMatrices w;
  w.Mx = snap.Mx * wx.asDiagonal() * snap.Mx.transpose();
  w.Mp = snap.Mp * wp.asDiagonal() * snap.Mp.transpose();
  // Exact symmetry regardless of summation order.
  w.Mx = (0.5 * (w.Mx + w.Mx.transpose())).eval();
  w.Mp = (0.5 * (w.Mp + w.Mp.transpose())).eval();
  return w;
}

PodResult pod_weighted(const SnapshotSet& snap, std::size_t rx, std::size_t rp,
                       PodResidual residual) {
  check_ranks(snap, rx, rp);
  const auto w = weighted_matrices(snap);
  const auto ex = matrix_svd(w.Mx);
  const auto ep = matrix_svd(w.Mp);
  PodResult out;
  out.proj = make_triple(snap, leading(ex, rx, "r_x"), leading(ep, rp, "r_p"),
                         residual, "weighted");
  out.spectrum_x = ex.sigma;
  out.spectrum_p = ep.sigma;
  return out;
}

Tensor joint_tensor(const SnapshotSet& snap) {
  if (snap.Mx.cols() != snap.Mp.cols())
    throw DimensionError("joint_tensor: column counts differ");
  const auto nx = static_cast<std::size_t>(snap.Mx.rows());
  const auto np = static_cast<std::size_t>(snap.Mp.rows());
  const auto n = static_cast<std::size_t>(snap.Mx.cols());
  Tensor t({nx, np, n});
  auto data = t.data();
  for (std::size_t k = 0; k < n; ++k) {
    Eigen::Map<Matrix> slice(data.data() + k * nx * np, static_cast<Index>(nx),
                             static_cast<Index>(np));
    slice.noalias() = snap.Mx.col(static_cast<Index>(k)) *
                      snap.Mp.col(static_cast<Index>(k)).transpose();
  }
  return t;
}

PodResult pod_tensor(const SnapshotSet& snap, std::size_t rx, std::size_t rp,
                     Decomp decomp, PodResidual residual,
                     const TsvdOptions& tsvd_opts) {
  check_ranks(snap, rx, rp);
  const Tensor m = joint_tensor(snap);
  PodResult out;
  Matrix v, z;
  if (decomp == Decomp::Hosvd) {
    const auto fx = kernels::unfold_left_svd(m, 0);
    const auto fp = kernels::unfold_left_svd(m, 1);
    v = leading({fx.u, fx.sigma, Matrix()}, rx, "r_x");
    z = leading({fp.u, fp.sigma, Matrix()}, rp, "r_p");
    out.spectrum_x = fx.sigma;
    out.spectrum_p = fp.sigma;
  } else {
    const std::size_t r = std::max(rx, rp);
    const auto res = tsvd(m, r, tsvd_opts);
    if (static_cast<std::size_t>(res.sigmas.size()) < r)
      throw NumericalError("TSVD found only " + std::to_string(res.sigmas.size()) +
                           " nonzero components, " + std::to_string(r) +
                           " requested");
    v = res.vectors[0].leftCols(static_cast<Index>(rx));
    z = res.vectors[1].leftCols(static_cast<Index>(rp));
    out.spectrum_x = out.spectrum_p = res.sigmas;
  }
  out.proj = make_triple(snap, std::move(v), std::move(z), residual, to_string(
      decomp == Decomp::Hosvd ? PodVariant::Hosvd : PodVariant::Tsvd));
  return out;
}

PodResult pod_reduce(const SnapshotSet& snap, PodVariant variant, std::size_t rx,
                     std::size_t rp, PodResidual residual) {
  switch (variant) {
    case PodVariant::Matrix: return pod_matrix(snap, rx, rp, residual);
    case PodVariant::Weighted: return pod_weighted(snap, rx, rp, residual);
    case PodVariant::Tsvd: return pod_tensor(snap, rx, rp, Decomp::Tsvd, residual);
    default: return pod_tensor(snap, rx, rp, Decomp::Hosvd, residual);
  }
}

CostBreakdown cost_from_signals(const Matrix& x, const Matrix& p,
                                const Matrix& xhat, const Matrix& phat) {
  if (x.rows() != xhat.rows() || p.rows() != phat.rows() ||
      x.cols() != xhat.cols() || p.cols() != phat.cols() || x.cols() != p.cols())
    throw DimensionError("cost evaluation: signal shapes differ");
  CostBreakdown c;
  for (Index t = 0; t < x.cols(); ++t) {
    const Vector dx = x.col(t) - xhat.col(t);
    const Vector dp = p.col(t) - phat.col(t);
    const double xx = x.col(t).squaredNorm();
    const double pp = p.col(t).squaredNorm();
    const double ex = dx.squaredNorm();
    const double ep = dp.squaredNorm();
    c.Jx += ex;
    c.Jp += ep;
    // x p^T - x̂ p̂^T = dx p^T + x̂ dp^T, expanded without cancelling large terms.
    const double jxp = ex * pp + xhat.col(t).squaredNorm() * ep +
                       2.0 * dx.dot(xhat.col(t)) * p.col(t).dot(dp);
    c.Jxp += std::max(0.0, jxp);
    c.energy += xx * pp;
    c.Jxp_A += ex * pp;
    c.Jxp_B += xx * ep;
    c.Jxp_C += ex * ep;
  }
  return c;
}

namespace {

Matrix orth_projector_apply(const Matrix& basis, const Matrix& data) {
  if (basis.cols() == 0) return Matrix::Zero(data.rows(), data.cols());
  Eigen::ColPivHouseholderQR<Matrix> qr(basis);
  const Matrix q = qr.householderQ() * Matrix::Identity(basis.rows(), qr.rank());
  return q * (q.transpose() * data);
}

}  // namespace

CostBreakdown cost_projection(const SnapshotSet& snap, const Matrix& V,
                              const Matrix& Z) {
  if (V.rows() != snap.Mx.rows() || Z.rows() != snap.Mp.rows())
    throw DimensionError("cost_projection: basis row counts do not match data");
  return cost_from_signals(snap.Mx, snap.Mp, orth_projector_apply(V, snap.Mx),
                           orth_projector_apply(Z, snap.Mp));
}

CostBreakdown cost_closed_loop(const Trajectory& ref, const Trajectory& rom,
                               const ProjectionTriple& proj) {
  const Index n = std::min<Index>(static_cast<Index>(ref.length()),
                                  static_cast<Index>(rom.length()));
  Matrix p = ref.p.leftCols(n);
  if (proj.Z.rows() == p.rows() + 1) {
    Matrix pbar(p.rows() + 1, n);
    pbar.row(0).setOnes();
    pbar.bottomRows(p.rows()) = p;
    p = std::move(pbar);
  }
  auto c = cost_from_signals(ref.x.leftCols(n), p, proj.V * rom.x.leftCols(n),
                             proj.Z * rom.p.leftCols(n));
  c.closed_loop = true;
  return c;
}

double spectrum_tail(const Vector& spectrum, std::size_t r) {
  double tail = 0.0;
  for (Index i = static_cast<Index>(r); i < spectrum.size(); ++i) tail += spectrum[i];
  return tail;
}

BoundsReport verify_bounds(const CostBreakdown& c, double tail_x, double tail_p,
                           double rel_tol) {
  BoundsReport b;
  const double scale =
      std::max({c.energy, c.Jxp, c.Jxp_A, c.Jxp_B, tail_x, tail_p, 1e-300});
  const double slack = rel_tol * scale;
  b.cross_margin = c.Jxp_A + c.Jxp_B - c.Jxp;
  b.cross_term = b.cross_margin >= -slack;
  b.coupling_margin = std::min({c.Jxp_C, std::min(c.Jxp_A, c.Jxp_B) - c.Jxp_C});
  b.coupling = b.coupling_margin >= -slack;
  b.sandwich_margin = std::min(c.Jxp - std::max(tail_x, tail_p),
                               tail_x + tail_p - c.Jxp);
  b.sandwich = b.sandwich_margin >= -slack;
  return b;
}

}  // namespace lpvtr
