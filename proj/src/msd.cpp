// SPDX-License-Identifier: Apache-2.0
#include "lpvtr/msd.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace lpvtr {

using Index = Eigen::Index;

bool MsdChain::pair_nonlinear(int lo) const { return lo + 1 >= M - Mp; }
bool MsdChain::wall_nonlinear(int i) const { return i >= M - Mp; }

MsdChain build_msd(int M, int Mp, const MsdParams& params) {
  if (M < 1) throw std::invalid_argument("MSD chain needs at least one mass");
  if (Mp < 1 || Mp > M) throw std::invalid_argument("MSD chain needs 1 <= Mp <= M");
  if (!(params.m > 0 && params.ka > 0 && params.kb > 0 && params.b > 0))
    throw std::invalid_argument("MSD parameters must be positive");
  MsdChain c;
  c.M = M;
  c.Mp = Mp;
  c.params = params;
  for (int i = 0; i < M; ++i)
    if (c.wall_nonlinear(i)) c.nonlinear.push_back({i, -1});
  for (int lo = 0; lo + 1 < M; ++lo)
    if (c.pair_nonlinear(lo)) c.nonlinear.push_back({lo + 1, lo});
  return c;
}

double pair_force(const MsdChain& c, int i, int j, const Vector& q,
                  const Vector& qdot) {
  if (std::abs(i - j) != 1 || i < 0 || j < 0 || i >= c.M || j >= c.M)
    throw std::invalid_argument("pair_force needs adjacent masses");
  const double e = q[i] - q[j];
  double f = c.params.ka * e + c.params.b * (qdot[i] - qdot[j]);
  if (c.pair_nonlinear(std::min(i, j))) f += c.params.kb * e * e * e;
  return f;
}

double wall_force(const MsdChain& c, int i, const Vector& q, const Vector& qdot) {
  double f = c.params.ka * q[i] + c.params.b * qdot[i];
  if (c.wall_nonlinear(i)) f += c.params.kb * q[i] * q[i] * q[i];
  return f;
}

Vector msd_rhs(const MsdChain& c, const Vector& q, const Vector& qdot, double u) {
  Vector acc(c.M);
  for (int i = 0; i < c.M; ++i) {
    double f = -wall_force(c, i, q, qdot);
    if (i > 0) f -= pair_force(c, i, i - 1, q, qdot);
    if (i + 1 < c.M) f -= pair_force(c, i, i + 1, q, qdot);
    if (i == c.M - 1) f += u;
    acc[i] = f / c.params.m;
  }
  return acc;
}

double msd_energy(const MsdChain& c, const Vector& q, const Vector& qdot) {
  const auto& p = c.params;
  double e = 0.5 * p.m * qdot.squaredNorm();
  const auto spring = [&](double d, bool nl) {
    e += 0.5 * p.ka * d * d;
    if (nl) e += 0.25 * p.kb * d * d * d * d;
  };
  for (int i = 0; i < c.M; ++i) spring(q[i], c.wall_nonlinear(i));
  for (int lo = 0; lo + 1 < c.M; ++lo) spring(q[lo + 1] - q[lo], c.pair_nonlinear(lo));
  return e;
}

SchedulingMap msd_scheduling_map(const MsdChain& c) {
  return SchedulingMap(c.np(), [springs = c.nonlinear](const Vector& x, const Vector&) {
    Vector p(static_cast<Index>(springs.size()));
    for (std::size_t k = 0; k < springs.size(); ++k) {
      const auto& s = springs[k];
      const double e = s.wall() ? x[s.i] : x[s.i] - x[s.j];
      p[static_cast<Index>(k)] = e * e;
    }
    return p;
  });
}

AffineLpvSs embed_lpv(const MsdChain& c) {
  const auto M = static_cast<std::size_t>(c.M);
  const std::size_t nx = 2 * M;
  auto sys = AffineLpvSs::zeros(nx, 1, 1, c.np(), true);
  const auto& p = c.params;
  const auto a = [&](std::size_t r, std::size_t col, std::size_t k) -> double& {
    return sys.A.at({r, col, k});
  };
  for (std::size_t i = 0; i < M; ++i) a(i, M + i, 0) = 1.0;
  for (std::size_t i = 0; i < M; ++i) {
    const std::size_t row = M + i;
    a(row, i, 0) -= p.ka / p.m;
    a(row, M + i, 0) -= p.b / p.m;
    for (std::size_t j : {i - 1, i + 1}) {
      if (j >= M) continue;  // wraps for i == 0
      a(row, i, 0) -= p.ka / p.m;
      a(row, j, 0) += p.ka / p.m;
      a(row, M + i, 0) -= p.b / p.m;
      a(row, M + j, 0) += p.b / p.m;
    }
  }
  for (std::size_t k = 0; k < c.nonlinear.size(); ++k) {
    const auto& s = c.nonlinear[k];
    const auto i = static_cast<std::size_t>(s.i);
    const double g = p.kb / p.m;
    if (s.wall()) {
      a(M + i, i, k + 1) = -g;
    } else {
      const auto j = static_cast<std::size_t>(s.j);
      // Cubic force k_b e^3 = (k_b p_k) e with e = q_i - q_j.
      a(M + i, i, k + 1) -= g;
      a(M + i, j, k + 1) += g;
      a(M + j, i, k + 1) += g;
      a(M + j, j, k + 1) -= g;
    }
  }
  sys.B.at({nx - 1, 0, 0}) = 1.0 / p.m;
  sys.C.at({0, M - 1, 0}) = 1.0;
  return sys;
}

AffineLpvSs discretize_euler(const AffineLpvSs& ct, double td) {
  if (!(td > 0)) throw std::invalid_argument("sampling time must be positive");
  ct.validate();
  if (!ct.affine)
    throw std::invalid_argument("Euler discretization needs an affine model");
  AffineLpvSs dt = ct;
  dt.A *= td;
  dt.B *= td;
  for (std::size_t i = 0; i < ct.nx(); ++i) dt.A.at({i, i, 0}) += 1.0;
  return dt;
}

namespace {

Vector nl_field(const MsdChain& c, const Vector& x, double u) {
  const Index M = c.M;
  Vector dx(2 * M);
  dx.head(M) = x.tail(M);
  dx.tail(M) = msd_rhs(c, x.head(M), x.tail(M), u);
  return dx;
}

}  // namespace

Trajectory simulate_nl(const MsdChain& c, const Matrix& u, const Vector& x0,
                       double td) {
  return simulate_nl(c, u, x0, td, 1);
}

Trajectory simulate_nl(const MsdChain& c, const Matrix& u, const Vector& x0,
                       double td, int substeps) {
  if (u.rows() != 1) throw DimensionError("MSD input must have one channel");
  if (u.cols() < 1) throw DimensionError("simulate_nl needs at least one step");
  if (x0.size() != static_cast<Index>(c.nx()))
    throw DimensionError("initial state length mismatch");
  if (substeps < 1) throw std::invalid_argument("substeps must be >= 1");
  const auto eta = msd_scheduling_map(c);
  const Index n = u.cols();
  Trajectory tr;
  tr.td = td;
  tr.u = u;
  tr.p.resize(static_cast<Index>(c.np()), n);
  tr.x.resize(static_cast<Index>(c.nx()), n);
  tr.y.resize(1, n);
  const double h = td / substeps;
  Vector x = x0;
  for (Index t = 0; t < n; ++t) {
    const double ut = u(0, t);
    tr.x.col(t) = x;
    tr.p.col(t) = eta(x, u.col(t));
    tr.y(0, t) = x[c.M - 1];
    for (int s = 0; s < substeps; ++s) {
      const Vector k1 = nl_field(c, x, ut);
      const Vector k2 = nl_field(c, x + 0.5 * h * k1, ut);
      const Vector k3 = nl_field(c, x + 0.5 * h * k2, ut);
      const Vector k4 = nl_field(c, x + h * k3, ut);
      x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    if (!x.allFinite() || x.norm() > kDivergenceBound) {
      tr.diverged_at = static_cast<std::size_t>(t + 1);
      for (Matrix* m : {&tr.u, &tr.p, &tr.x, &tr.y})
        m->conservativeResize(Eigen::NoChange, t + 1);
      break;
    }
  }
  return tr;
}

std::string to_string(InputKind k) {
  switch (k) {
    case InputKind::Reduction: return "red";
    case InputKind::Validation: return "val";
    default: return "extra";
  }
}

Matrix gen_input(InputKind kind, std::uint64_t seed, std::size_t n, double td,
                 double amplitude_scale, const InputRecipe& recipe) {
  if (n < 1) throw std::invalid_argument("gen_input needs n >= 1");
  if (!(td > 0)) throw std::invalid_argument("sampling time must be positive");
  std::seed_seq seq{seed};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);

  const double peak = recipe.amplitude * amplitude_scale *
                      (kind == InputKind::Extrapolation ? recipe.extra_factor : 1.0);
  Matrix u = Matrix::Zero(1, static_cast<Index>(n));
  const std::size_t n1 = (n + 1) / 2;

  const int segs = std::max(1, recipe.step_segments);
  std::vector<double> levels(static_cast<std::size_t>(segs));
  for (auto& l : levels) l = unit(rng);
  double lmax = 0.0;
  for (double l : levels) lmax = std::max(lmax, std::abs(l));
  for (std::size_t t = 0; t < n1; ++t) {
    const auto s = std::min<std::size_t>(t * static_cast<std::size_t>(segs) / n1,
                                         static_cast<std::size_t>(segs - 1));
    u(0, static_cast<Index>(t)) = lmax > 0 ? levels[s] / lmax : 0.0;
  }

  const double fmin = std::log(recipe.min_freq);
  const double fmax = std::log(recipe.max_freq_td / td);
  std::uniform_real_distribution<double> logf(fmin, fmax);
  std::vector<double> freq(static_cast<std::size_t>(recipe.sine_count));
  std::vector<double> ph(freq.size());
  for (std::size_t k = 0; k < freq.size(); ++k) {
    freq[k] = std::exp(logf(rng));
    ph[k] = phase(rng);
  }
  double smax = 0.0;
  for (std::size_t t = n1; t < n; ++t) {
    double v = 0.0;
    for (std::size_t k = 0; k < freq.size(); ++k)
      v += std::sin(freq[k] * static_cast<double>(t) * td + ph[k]);
    u(0, static_cast<Index>(t)) = v;
    smax = std::max(smax, std::abs(v));
  }
  if (smax > 0)
    for (std::size_t t = n1; t < n; ++t) u(0, static_cast<Index>(t)) /= smax;

  u *= peak;
  return u;
}

DatasetBundle make_datasets(const MsdChain& c, const DatasetConfig& cfg) {
  const Vector x0 = Vector::Zero(static_cast<Index>(c.nx()));
  const auto one = [&](InputKind kind, std::uint64_t seed) {
    auto tr = simulate_nl(c, gen_input(kind, seed, cfg.N, cfg.td,
                                       cfg.amplitude_scale, cfg.recipe),
                          x0, cfg.td);
    tr.label = to_string(kind);
    return tr;
  };
  DatasetBundle b;
  b.red = one(InputKind::Reduction, cfg.seed_red);
  b.val = one(InputKind::Validation, cfg.seed_val);
  b.extra = one(InputKind::Extrapolation, cfg.seed_extra);
  return b;
}

}  // namespace lpvtr
