// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>

#include "lpvtr/tensor.hpp"

namespace lpvtr {

/// Discrete-time LPV-SS model with affine scheduling dependence:
///   x(t+1) = A(p̄) x + B(p̄) u,  y = C(p̄) x + D(p̄) u,
/// where A(p̄) = sum_i p̄_i A_i is the contraction of A's third mode with p̄.
/// With `affine` set, p̄ = (1, p) and slice 0 is the constant term; otherwise
/// p̄ = p.
struct AffineLpvSs {
  Tensor A;  // nx x nx x K
  Tensor B;  // nx x nu x K
  Tensor C;  // ny x nx x K
  Tensor D;  // ny x nu x K
  bool affine = true;

  std::size_t nx() const { return A.dim(0); }
  std::size_t nu() const { return B.dim(1); }
  std::size_t ny() const { return C.dim(0); }
  std::size_t channels() const { return A.dim(2); }
  std::size_t np() const { return channels() - (affine ? 1 : 0); }

  /// Throws DimensionError / NumericalError if the tensors are inconsistent.
  void validate() const;

  /// Zero model with the given sizes.
  static AffineLpvSs zeros(std::size_t nx, std::size_t nu, std::size_t ny,
                           std::size_t np, bool affine = true);
};

struct SystemMatrices {
  Matrix A, B, C, D;
};

/// p̄ for the model's convention.
Vector extend_scheduling(const AffineLpvSs& m, const Vector& p);

SystemMatrices eval_matrices(const AffineLpvSs& m, const Vector& p);

/// Total scalar count of the four tensors.
std::size_t param_count(const AffineLpvSs& m);

class SchedulingMap;

/// How a reduced scheduling map was built from a full one:
/// p_r = z_pinv * [1; eta(V x_r, u)] when includes_affine (and the inner map
/// feeds an affine model), else p_r = z_pinv * eta(V x_r, u).
struct MapComposition {
  Matrix z_pinv;
  Matrix v;
  bool includes_affine = false;
  std::shared_ptr<const SchedulingMap> inner;
};

/// Evaluatable scheduling map p = eta(x, u).
class SchedulingMap {
 public:
  using Fn = std::function<Vector(const Vector& x, const Vector& u)>;

  SchedulingMap() = default;
  SchedulingMap(std::size_t np, Fn fn) : np_(np), fn_(std::move(fn)) {}

  std::size_t np() const { return np_; }
  Vector operator()(const Vector& x, const Vector& u) const;
  explicit operator bool() const { return static_cast<bool>(fn_); }

  const std::optional<MapComposition>& composition() const { return comp_; }
  void set_composition(MapComposition c) { comp_ = std::move(c); }

  /// Map that ignores its arguments and returns column t of `p`, with t
  /// advancing on every call.
  static SchedulingMap replay(const Matrix& p);

 private:
  std::size_t np_ = 0;
  Fn fn_;
  std::optional<MapComposition> comp_;
};

struct Trajectory {
  double td = 1.0;
  Matrix u;  // nu x N
  Matrix p;  // np x N
  Matrix x;  // nx x N
  Matrix y;  // ny x N
  std::string label;
  std::optional<std::size_t> diverged_at;

  std::size_t length() const { return static_cast<std::size_t>(u.cols()); }
  bool diverged() const { return diverged_at.has_value(); }
};

inline constexpr double kDivergenceBound = 1e12;

/// Simulation with an explicit scheduling sequence p (np x N).
Trajectory simulate(const AffineLpvSs& m, const Matrix& p, const Matrix& u,
                    const Vector& x0, double td = 1.0);

/// Closed-loop simulation, p(t) = eta(x(t), u(t)) evaluated before the
/// state update. On divergence the trajectory is truncated after the last
/// finite sample and `diverged_at` records the failing step.
Trajectory simulate(const AffineLpvSs& m, const SchedulingMap& eta,
                    const Matrix& u, const Vector& x0, double td = 1.0);

/// h_m = C(p(t)) A(p(t-1)) ... A(p(t-m+1)) B(p(t-m)); window columns are
/// p(t-m), ..., p(t). Lag 0 returns D(p(t)).
Matrix markov_coefficient(const AffineLpvSs& m, const Matrix& window,
                          std::size_t lag);

void write_trajectory_csv(std::ostream& os, const Trajectory& tr);
void write_trajectory_csv(const std::string& path, const Trajectory& tr);
Trajectory read_trajectory_csv(std::istream& is);
Trajectory read_trajectory_csv(const std::string& path);

}  // namespace lpvtr
