// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "lpvtr/decomp.hpp"
#include "lpvtr/projection.hpp"
#include "lpvtr/tmm.hpp"

namespace lpvtr {

/// Columns are time samples.
struct SnapshotSet {
  Matrix Mx;  // nx x N
  Matrix Mp;  // np x N
  Matrix Md;  // nx x (N - 1), x(k+1) - x(k)
  std::string source;
};

SnapshotSet snapshot_matrices(const Trajectory& tr);
/// Columns of several trajectories side by side; increments never straddle
/// two trajectories.
SnapshotSet snapshot_matrices(const std::vector<Trajectory>& trs);

enum class PodResidual { Galerkin, Delta };
enum class PodVariant { Matrix, Weighted, Tsvd, Hosvd };

std::string to_string(PodVariant v);
std::string to_string(PodResidual r);
PodVariant parse_pod_variant(const std::string& s);
PodResidual parse_pod_residual(const std::string& s);

/// Projection plus the spectra the bases were taken from (squared singular
/// values for the matrix variant, eigenvalues for the weighted variant,
/// mode singular values or TSVD sigmas for the tensor variants).
struct PodResult {
  ProjectionTriple proj;
  Vector spectrum_x;
  Vector spectrum_p;
};

PodResult pod_matrix(const SnapshotSet& snap, std::size_t rx, std::size_t rp,
                     PodResidual residual = PodResidual::Galerkin);

struct WeightedMatrices {
  Matrix Mx;  // sum ||p||^2 x x^T
  Matrix Mp;  // sum ||x||^2 p p^T
};

WeightedMatrices weighted_matrices(const SnapshotSet& snap);

PodResult pod_weighted(const SnapshotSet& snap, std::size_t rx, std::size_t rp,
                       PodResidual residual = PodResidual::Galerkin);

/// nx x np x N tensor whose slice t is x(t) p(t)^T.
Tensor joint_tensor(const SnapshotSet& snap);

PodResult pod_tensor(const SnapshotSet& snap, std::size_t rx, std::size_t rp,
                     Decomp decomp, PodResidual residual = PodResidual::Galerkin,
                     const TsvdOptions& tsvd_opts = {});

PodResult pod_reduce(const SnapshotSet& snap, PodVariant variant, std::size_t rx,
                     std::size_t rp, PodResidual residual = PodResidual::Galerkin);

struct CostBreakdown {
  double Jx = 0, Jp = 0, Jxp = 0;
  double Jxp_A = 0, Jxp_B = 0, Jxp_C = 0;
  double energy = 0;  // sum ||x||^2 ||p||^2, the scale of Jxp
  bool closed_loop = false;
};

/// Costs from explicit approximations x̂(t), p̂(t) (same shapes as Mx, Mp).
CostBreakdown cost_from_signals(const Matrix& x, const Matrix& p,
                                const Matrix& xhat, const Matrix& phat);

/// Projection-only costs: x̂ and p̂ are orthogonal projections onto im(V),
/// im(Z).
CostBreakdown cost_projection(const SnapshotSet& snap, const Matrix& V,
                              const Matrix& Z);

/// Closed-loop costs: x̂ = V x_r(t), p̂ = Z p_r(t) from a reduced simulation
/// over the same input as the reference. Compared over the common prefix.
CostBreakdown cost_closed_loop(const Trajectory& ref, const Trajectory& rom,
                               const ProjectionTriple& proj);

/// Sum of entries of a nonincreasing spectrum after the first r.
double spectrum_tail(const Vector& spectrum, std::size_t r);

struct BoundsReport {
  bool cross_term = false;   // Jxp <= A + B
  bool coupling = false;     // 0 <= C <= min(A, B)
  bool sandwich = false;     // max(tails) <= Jxp <= sum(tails)
  double cross_margin = 0;
  double coupling_margin = 0;
  double sandwich_margin = 0;
};

/// Checks the three inequalities with a slack of `rel_tol` times the data
/// energy or the largest quantity involved, whichever is larger. `tail_x`, `tail_p` are the discarded
/// eigenvalue sums of the weighted matrices.
BoundsReport verify_bounds(const CostBreakdown& c, double tail_x, double tail_p,
                           double rel_tol = 1e-10);

}  // namespace lpvtr
