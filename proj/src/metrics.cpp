// SPDX-License-Identifier: Apache-2.0
#include "lpvtr/metrics.hpp"

namespace lpvtr {

using Index = Eigen::Index;

double nrmse(const Matrix& y_ref, const Matrix& y_hat) {
  if (y_ref.rows() != y_hat.rows() || y_ref.cols() != y_hat.cols())
    throw DimensionError("nrmse: sequences differ in shape");
  if (y_ref.cols() < 2) throw DimensionError("nrmse needs at least 2 samples");
  const Vector mean = y_ref.rowwise().mean();
  const double den = (y_ref.colwise() - mean).norm();
  if (!(den > 0)) throw NumericalError("nrmse: reference output is constant");
  return (y_ref - y_hat).norm() / den * 100.0;
}

Trajectory impulse_response(const AffineLpvSs& m, const SchedulingMap& eta,
                            std::size_t n, std::size_t channel) {
  if (channel >= m.nu()) throw DimensionError("impulse channel out of range");
  Matrix u = Matrix::Zero(static_cast<Index>(m.nu()), static_cast<Index>(n));
  u(static_cast<Index>(channel), 0) = 1.0;
  return simulate(m, eta, u, Vector::Zero(static_cast<Index>(m.nx())));
}

Matrix impulse_error(const Trajectory& fom, const Trajectory& rom) {
  if (fom.y.rows() != rom.y.rows())
    throw DimensionError("impulse_error: output widths differ");
  const Index n = std::min(fom.y.cols(), rom.y.cols());
  return (fom.y.leftCols(n) - rom.y.leftCols(n)).cwiseAbs();
}

std::size_t matched_samples(const Trajectory& fom, const Trajectory& rom,
                            double rel_tol) {
  const Matrix err = impulse_error(fom, rom);
  const double scale = fom.y.cwiseAbs().maxCoeff();
  const double tol = rel_tol * scale;
  std::size_t count = 0;
  for (Index t = 0; t < err.cols(); ++t) {
    if (err.col(t).maxCoeff() > tol) break;
    ++count;
  }
  return count;
}

}  // namespace lpvtr
