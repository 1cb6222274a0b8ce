// SPDX-License-Identifier: Apache-2.0
#include "lpvtr/projection.hpp"

#include <limits>
#include <memory>
#include <sstream>

#include "lpvtr/decomp.hpp"

namespace lpvtr {

using Index = Eigen::Index;

namespace {

bool z_on_full_channels(const AffineLpvSs& m, const ProjectionTriple& proj) {
  return proj.z_includes_affine || !m.affine;
}

void check_shapes(const AffineLpvSs& m, const ProjectionTriple& proj) {
  const auto nx = static_cast<Index>(m.nx());
  if (proj.V.rows() != nx || proj.W.rows() != nx)
    throw DimensionError("projection: V and W need " + std::to_string(nx) +
                         " rows");
  if (proj.V.cols() != proj.W.cols() || proj.V.cols() == 0)
    throw DimensionError("projection: V and W need the same positive width");
  const auto zrows = static_cast<Index>(z_on_full_channels(m, proj)
                                            ? m.channels()
                                            : m.np());
  if (proj.Z.rows() != zrows)
    throw DimensionError("projection: Z has " + std::to_string(proj.Z.rows()) +
                         " rows, expected " + std::to_string(zrows));
  if (z_on_full_channels(m, proj) && proj.Z.cols() == 0)
    throw DimensionError("projection: Z must keep at least one channel");
}

}  // namespace

Matrix extended_z(const AffineLpvSs& m, const ProjectionTriple& proj) {
  if (z_on_full_channels(m, proj)) return proj.Z;
  Matrix zbar = Matrix::Zero(proj.Z.rows() + 1, proj.Z.cols() + 1);
  zbar(0, 0) = 1.0;
  zbar.bottomRightCorner(proj.Z.rows(), proj.Z.cols()) = proj.Z;
  return zbar;
}

ReducedModel petrov_galerkin(const AffineLpvSs& m, const ProjectionTriple& proj,
                             const SchedulingMap& eta) {
  m.validate();
  check_shapes(m, proj);
  if (eta && eta.np() != m.np())
    throw DimensionError("projection: scheduling map width mismatch");

  ReducedModel out;
  const Matrix wtv = proj.W.transpose() * proj.V;
  const auto s = matrix_svd(wtv);
  const double smin = s.sigma[s.sigma.size() - 1];
  out.cond_wtv = smin > 0 ? s.sigma[0] / smin : std::numeric_limits<double>::infinity();
  if (!(out.cond_wtv <= kCondFail)) {
    std::ostringstream os;
    os << "W^T V is singular (condition number " << out.cond_wtv << ")";
    throw NumericalError(os.str());
  }
  if (out.cond_wtv > kCondWarn) {
    std::ostringstream os;
    os << "W^T V is ill-conditioned (condition number " << out.cond_wtv << ")";
    out.warnings.push_back(os.str());
  }
  if (proj.Z.cols() > 0) {
    const auto zs = matrix_svd(proj.Z);
    if (numerical_rank(zs.sigma, kPinvTol) < static_cast<std::size_t>(proj.Z.cols()))
      throw NumericalError("projection: Z is rank deficient");
  }

  const Matrix left = wtv.fullPivLu().solve(proj.W.transpose());
  const Matrix zbar = extended_z(m, proj);
  const Matrix vt = proj.V.transpose();
  const Matrix zt = zbar.transpose();

  out.model.affine = !z_on_full_channels(m, proj);
  out.model.A = mode_product(mode_product(mode_product(m.A, left, 0), vt, 1), zt, 2);
  out.model.B = mode_product(mode_product(m.B, left, 0), zt, 2);
  out.model.C = mode_product(mode_product(m.C, vt, 1), zt, 2);
  out.model.D = mode_product(m.D, zt, 2);

  if (eta) {
    MapComposition comp;
    comp.z_pinv = pinv(proj.Z, kPinvTol);
    comp.v = proj.V;
    comp.includes_affine = z_on_full_channels(m, proj) && m.affine;
    comp.inner = std::make_shared<const SchedulingMap>(eta);
    const bool lift = comp.includes_affine;
    SchedulingMap reduced(
        static_cast<std::size_t>(proj.Z.cols()),
        [zp = comp.z_pinv, v = comp.v, inner = comp.inner, lift](
            const Vector& xr, const Vector& u) -> Vector {
          const Vector p = (*inner)(v * xr, u);
          if (!lift) return zp * p;
          Vector pbar(p.size() + 1);
          pbar[0] = 1.0;
          pbar.tail(p.size()) = p;
          return zp * pbar;
        });
    reduced.set_composition(std::move(comp));
    out.eta = std::move(reduced);
  }
  return out;
}

Matrix reduce_scheduling(const AffineLpvSs& m, const ProjectionTriple& proj,
                         const Matrix& p) {
  check_shapes(m, proj);
  const Matrix zp = pinv(proj.Z, kPinvTol);
  if (!(proj.z_includes_affine && m.affine)) return zp * p;
  Matrix pbar(p.rows() + 1, p.cols());
  pbar.row(0).setOnes();
  pbar.bottomRows(p.rows()) = p;
  return zp * pbar;
}

SignalProjection project_signal(const Matrix& basis, const Vector& s) {
  if (basis.rows() != s.size())
    throw DimensionError("project_signal: length mismatch");
  SignalProjection out;
  if (basis.cols() == 0) {
    out.coords = Vector(0);
    out.reconstruction = Vector::Zero(s.size());
    out.residual_norm = s.norm();
    return out;
  }
  Eigen::ColPivHouseholderQR<Matrix> qr(basis);
  qr.setThreshold(1e-12);
  if (qr.rank() < basis.cols())
    throw NumericalError("project_signal: basis is rank deficient");
  out.coords = qr.solve(s);
  out.reconstruction = basis * out.coords;
  out.residual_norm = (s - out.reconstruction).norm();
  return out;
}

}  // namespace lpvtr
