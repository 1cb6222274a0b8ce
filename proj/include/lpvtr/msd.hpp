// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lpvtr/lpv_model.hpp"

namespace lpvtr {

struct MsdParams {
  double m = 0.1;   // kg, every mass
  double ka = 0.5;  // N/m
  double kb = 0.5;  // cubic stiffness coefficient
  double b = 1.0;   // Ns/m
};

/// A spring between mass i and mass j (0-based), or between mass i and the
/// wall when j < 0. Elongation is q_i - q_j (q_i for wall springs).
struct Spring {
  int i = 0;
  int j = -1;
  bool wall() const { return j < 0; }
};

/// Chain of M masses, each tied to the wall and to its neighbours by a
/// spring and a damper. Springs touching the last Mp masses carry an extra
/// cubic term. Input force acts on the last mass; output is its position.
struct MsdChain {
  int M = 1;
  int Mp = 1;
  MsdParams params;
  std::vector<Spring> nonlinear;  // scheduling channel order

  std::size_t nx() const { return static_cast<std::size_t>(2 * M); }
  std::size_t np() const { return nonlinear.size(); }
  bool pair_nonlinear(int lo) const;   // spring between lo and lo + 1
  bool wall_nonlinear(int i) const;
};

MsdChain build_msd(int M, int Mp, const MsdParams& params = {});

/// F_{i,j}: force of the (i, j) interconnection, as it enters mass i's
/// equation with a minus sign. Requires |i - j| == 1.
double pair_force(const MsdChain& c, int i, int j, const Vector& q,
                  const Vector& qdot);
/// F_i: wall connection force on mass i.
double wall_force(const MsdChain& c, int i, const Vector& q, const Vector& qdot);

Vector msd_rhs(const MsdChain& c, const Vector& q, const Vector& qdot, double u);

/// Kinetic plus spring potential energy.
double msd_energy(const MsdChain& c, const Vector& q, const Vector& qdot);

/// Squared elongation of every nonlinear spring; x = (q, qdot).
SchedulingMap msd_scheduling_map(const MsdChain& c);

/// Continuous-time affine LPV form (x' = A(p̄) x + B u, y = C x).
AffineLpvSs embed_lpv(const MsdChain& c);

/// Forward Euler: A_0 -> I + Td A_0, A_i -> Td A_i, B -> Td B.
AffineLpvSs discretize_euler(const AffineLpvSs& ct, double td);

/// Fixed-step RK4 with the input held over each step. u is 1 x N.
Trajectory simulate_nl(const MsdChain& c, const Matrix& u, const Vector& x0,
                       double td);
/// RK4 with `substeps` equal steps per sample (used for convergence checks).
Trajectory simulate_nl(const MsdChain& c, const Matrix& u, const Vector& x0,
                       double td, int substeps);

enum class InputKind { Reduction, Validation, Extrapolation };
std::string to_string(InputKind k);

struct InputRecipe {
  double amplitude = 1.0;     // peak of each part for red/val
  double extra_factor = 3.0;  // peak multiplier for extrapolation
  int step_segments = 4;
  int sine_count = 10;
  double min_freq = 0.1;      // rad/s
  double max_freq_td = 0.2;   // upper bound is max_freq_td / Td rad/s
};

/// First half: seeded step train; second half: seeded multisine.
Matrix gen_input(InputKind kind, std::uint64_t seed, std::size_t n, double td,
                 double amplitude_scale = 1.0, const InputRecipe& recipe = {});

struct DatasetConfig {
  std::size_t N = 10000;
  double td = 0.001;
  std::uint64_t seed_red = 1;
  std::uint64_t seed_val = 2;
  std::uint64_t seed_extra = 3;
  double amplitude_scale = 1.0;
  InputRecipe recipe;
};

struct DatasetBundle {
  Trajectory red, val, extra;
};

/// Nonlinear reference datasets from x0 = 0.
DatasetBundle make_datasets(const MsdChain& c, const DatasetConfig& cfg);

}  // namespace lpvtr
