// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "lpvtr/decomp.hpp"
#include "lpvtr/projection.hpp"

namespace lpvtr {

enum class Decomp { Tsvd, Hosvd };
enum class TmmMode { Reachability, Observability, Hankel };

std::string to_string(Decomp d);
std::string to_string(TmmMode m);
Decomp parse_decomp(const std::string& s);
TmmMode parse_tmm_mode(const std::string& s);

/// Thrown when the horizon would need more scalars than the budget allows.
class MemoryBudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown by the Hankel mode when rank(R_n), rank(O_n) and rank(O_n^T R_n)
/// differ.
class RankConditionError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

inline constexpr std::size_t kDefaultMemoryBudget = 200'000'000;

struct TmmOptions {
  double tol = 1e-8;                   // TSVD sigma retention, relative
  double rank_tol = kDefaultRankTol;   // HOSVD numerical rank per unfolding
  std::size_t memory_budget = kDefaultMemoryBudget;
  TsvdOptions tsvd;
};

/// Scalar count of the horizon-k reachability / observability tensor.
std::size_t reachability_size(const AffineLpvSs& m, std::size_t k);
std::size_t observability_size(const AffineLpvSs& m, std::size_t k);

/// (nx, K, ..., K, nu) with k+1 scheduling modes; mode 1 carries the most
/// recent scheduling step.
Tensor reachability_tensor(const AffineLpvSs& m, std::size_t k,
                           std::size_t budget = kDefaultMemoryBudget);
/// (ny, K, ..., K, nx) with k+1 scheduling modes.
Tensor observability_tensor(const AffineLpvSs& m, std::size_t k,
                            std::size_t budget = kDefaultMemoryBudget);

/// Column-orthonormal bases accumulated over horizons 0..n.
struct SpacePair {
  Matrix state;  // R_n or O_n
  Matrix sched;  // P_n or Q_n, rows = channels of p̄
  std::vector<std::vector<Vector>> sigmas;  // [horizon][mode] kept values
};

SpacePair reach_spaces(const AffineLpvSs& m, std::size_t n, Decomp decomp,
                       const TmmOptions& opts = {});
SpacePair obsv_spaces(const AffineLpvSs& m, std::size_t n, Decomp decomp,
                      const TmmOptions& opts = {});

/// Scheduling dimension as reported in tables: the column count of Z minus
/// one when the pure constant channel e_0 lies in span(Z).
std::size_t reported_rp(const Matrix& z, bool z_includes_affine);

struct TmmResult {
  ReducedModel reduced;
  ProjectionTriple proj;
  SpacePair reach;
  SpacePair obsv;
  std::size_t rx = 0;
  std::size_t rp = 0;
};

TmmResult tmm_reduce(const AffineLpvSs& m, TmmMode mode, Decomp decomp,
                     std::size_t n, const SchedulingMap& eta,
                     const TmmOptions& opts = {});

}  // namespace lpvtr
