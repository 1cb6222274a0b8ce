// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "lpvtr/lpv_model.hpp"

namespace lpvtr {

/// Trial basis V, test basis W and scheduling basis Z.
///
/// With z_includes_affine, Z has one row per channel of p̄ (constant channel
/// included) and the reduced model has no separate constant channel.
/// Otherwise Z acts on p only and is extended as blkdiag(1, Z).
struct ProjectionTriple {
  Matrix V;
  Matrix W;
  Matrix Z;
  bool z_includes_affine = false;
  std::string provenance;

  std::size_t rx() const { return static_cast<std::size_t>(V.cols()); }
  std::size_t rp() const { return static_cast<std::size_t>(Z.cols()); }
};

inline constexpr double kCondWarn = 1e8;
inline constexpr double kCondFail = 1e12;
inline constexpr double kPinvTol = 1e-12;

struct ReducedModel {
  AffineLpvSs model;
  SchedulingMap eta;
  double cond_wtv = 1.0;
  std::vector<std::string> warnings;
};

/// Scheduling extension matrix applied to mode 3 of the system tensors.
Matrix extended_z(const AffineLpvSs& m, const ProjectionTriple& proj);

ReducedModel petrov_galerkin(const AffineLpvSs& m, const ProjectionTriple& proj,
                             const SchedulingMap& eta);

/// Reduced scheduling sequence for an explicit full sequence p (np x N).
Matrix reduce_scheduling(const AffineLpvSs& m, const ProjectionTriple& proj,
                         const Matrix& p);

struct SignalProjection {
  Vector coords;
  Vector reconstruction;
  double residual_norm = 0.0;
};

/// Least-squares coordinates of s in the column space of P.
SignalProjection project_signal(const Matrix& basis, const Vector& s);

}  // namespace lpvtr
