// SPDX-License-Identifier: Apache-2.0
#include "lpvtr/selftest.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <random>

#include "lpvtr/decomp.hpp"
#include "lpvtr/metrics.hpp"
#include "lpvtr/msd.hpp"
#include "lpvtr/pod.hpp"
#include "lpvtr/projection.hpp"
#include "lpvtr/tmm.hpp"

namespace lpvtr {

using Index = Eigen::Index;

namespace {

struct Rng {
  std::mt19937_64 gen;
  explicit Rng(std::uint64_t seed, std::uint64_t salt) {
    std::seed_seq seq{seed, salt};
    gen.seed(seq);
  }
  double normal() { return std::normal_distribution<double>()(gen); }
  Matrix matrix(Index r, Index c) {
    Matrix m(r, c);
    for (Index j = 0; j < c; ++j)
      for (Index i = 0; i < r; ++i) m(i, j) = normal();
    return m;
  }
  Tensor tensor(Dims dims) {
    Tensor t(std::move(dims));
    for (auto& v : t.data()) v = normal();
    return t;
  }
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

AffineLpvSs random_model(Rng& rng, std::size_t nx, std::size_t np) {
  auto m = AffineLpvSs::zeros(nx, 1, 1, np, true);
  m.A = rng.tensor(m.A.dims()) * (0.4 / std::sqrt(static_cast<double>(nx * (np + 1))));
  m.B = rng.tensor(m.B.dims());
  m.C = rng.tensor(m.C.dims());
  m.D = rng.tensor(m.D.dims());
  return m;
}

SelftestCase identity_projection(std::uint64_t seed) {
  Rng rng(seed, 1);
  const auto m = random_model(rng, 4, 2);
  ProjectionTriple proj{Matrix::Identity(4, 4), Matrix::Identity(4, 4),
                        Matrix::Identity(2, 2), false, "identity"};
  const Matrix p = rng.matrix(2, 100);
  const Matrix u = rng.matrix(1, 100);
  const auto full = simulate(m, p, u, Vector::Zero(4));
  const auto red = petrov_galerkin(m, proj, SchedulingMap());
  const auto rom = simulate(red.model, reduce_scheduling(m, proj, p), u, Vector::Zero(4));
  const double err = (full.y - rom.y).cwiseAbs().maxCoeff();
  return {"identity projection", err < 1e-9, "max |dy| = " + num(err)};
}

SelftestCase tsvd_planted(std::uint64_t seed) {
  Rng rng(seed, 2);
  const Dims dims{5, 4, 6};
  std::vector<Matrix> q;
  for (auto d : dims)
    q.push_back(Eigen::HouseholderQR<Matrix>(rng.matrix(static_cast<Index>(d), 3))
                    .householderQ() * Matrix::Identity(static_cast<Index>(d), 3));
  const double planted[3] = {5.0, 2.0, 0.5};
  Tensor t(dims);
  for (int i = 0; i < 3; ++i)
    t += planted[i] * outer_product({Vector(q[0].col(i)), Vector(q[1].col(i)),
                                     Vector(q[2].col(i))});
  TsvdOptions opts;
  opts.seed = seed;
  const auto res = tsvd(t, 3, opts);
  double err = 0;
  for (int i = 0; i < 3; ++i) err = std::max(err, std::abs(res.sigmas[i] - planted[i]));
  return {"tsvd planted sigmas", err < 1e-6, "max sigma error = " + num(err)};
}

SelftestCase hosvd_roundtrip(std::uint64_t seed) {
  Rng rng(seed, 3);
  const Tensor t = rng.tensor({4, 3, 5, 2});
  const auto h = hosvd(t);
  const double err = frobenius(reconstruct(h.core, h.factors) - t) / frobenius(t);
  return {"hosvd reconstruction", err < 1e-10, "relative error = " + num(err)};
}

SelftestCase krylov(std::uint64_t seed) {
  Rng rng(seed, 4);
  auto m = random_model(rng, 5, 0);
  TmmOptions opts;
  const auto sp = reach_spaces(m, 2, Decomp::Hosvd, opts);
  const Matrix a = unfold(m.A, 0);
  const Matrix b = unfold(m.B, 0);
  Matrix k(5, 3);
  k << b, a * b, a * a * b;
  const double ang = max_principal_angle(sp.state, orth_union({k}));
  return {"krylov specialization", ang < 1e-8, "max angle = " + num(ang)};
}

SelftestCase pod_tail(std::uint64_t seed) {
  Rng rng(seed, 5);
  SnapshotSet snap;
  snap.Mx = rng.matrix(6, 40);
  snap.Mp = rng.matrix(3, 40);
  snap.Md = snap.Mx.rightCols(39) - snap.Mx.leftCols(39);
  const auto pr = pod_matrix(snap, 2, 1);
  const auto c = cost_projection(snap, pr.proj.V, pr.proj.Z);
  const Eigen::JacobiSVD<Matrix> svd(snap.Mx);
  const double tail = svd.singularValues().tail(4).squaredNorm();
  const double rel = std::abs(c.Jx - tail) / tail;
  return {"pod tail formula", rel < 1e-8, "relative gap = " + num(rel)};
}

SelftestCase msd_physics(std::uint64_t seed) {
  Rng rng(seed, 6);
  const auto c = build_msd(4, 2);
  double worst_newton = 0, worst_power = 0;
  bool dissipative = true;
  for (int trial = 0; trial < 20; ++trial) {
    const Vector q = rng.matrix(4, 1);
    const Vector v = rng.matrix(4, 1);
    for (int i = 0; i + 1 < 4; ++i)
      worst_newton = std::max(worst_newton, std::abs(pair_force(c, i, i + 1, q, v) +
                                                     pair_force(c, i + 1, i, q, v)));
    // dE/dt along the unforced flow equals minus the damper dissipation.
    const Vector acc = msd_rhs(c, q, v, 0.0);
    const double h = 1e-6;
    const double de = (msd_energy(c, q + h * v, v + h * acc) -
                       msd_energy(c, q - h * v, v - h * acc)) / (2 * h);
    double diss = 0;
    for (int i = 0; i < 4; ++i) diss += c.params.b * v[i] * v[i];
    for (int i = 0; i + 1 < 4; ++i) diss += c.params.b * std::pow(v[i + 1] - v[i], 2);
    worst_power = std::max(worst_power, std::abs(de + diss) / std::max(1.0, diss));
    dissipative = dissipative && de <= 1e-6 * std::max(1.0, diss);
  }
  const bool ok = worst_newton < 1e-12 && worst_power < 1e-5 && dissipative;
  return {"msd physics", ok,
          "newton " + num(worst_newton) + ", power balance " + num(worst_power)};
}

SelftestCase embedding(std::uint64_t seed) {
  const auto c = build_msd(3, 1);
  const double td = 0.001;
  const auto fom = discretize_euler(embed_lpv(c), td);
  const Matrix u = gen_input(InputKind::Reduction, seed, 2000, td);
  const auto nl = simulate_nl(c, u, Vector::Zero(6), td);
  const auto lpv = simulate(fom, msd_scheduling_map(c), u, Vector::Zero(6), td);
  const double e = nrmse(nl.y, lpv.y);
  return {"embedding co-simulation", e < 1.0, "nrmse = " + num(e) + "%"};
}

}  // namespace

std::vector<SelftestCase> run_selftest(std::uint64_t seed) {
  const std::vector<std::function<SelftestCase(std::uint64_t)>> suites{
      identity_projection, tsvd_planted, hosvd_roundtrip, krylov,
      pod_tail,            msd_physics,  embedding};
  std::vector<SelftestCase> out;
  for (const auto& s : suites) {
    try {
      out.push_back(s(seed));
    } catch (const std::exception& e) {
      out.push_back({"suite error", false, e.what()});
    }
  }
  return out;
}

}  // namespace lpvtr
