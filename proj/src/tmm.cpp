// SPDX-License-Identifier: Apache-2.0
#include "lpvtr/tmm.hpp"

#include <algorithm>
#include <limits>

namespace lpvtr {

using Index = Eigen::Index;

std::string to_string(Decomp d) { return d == Decomp::Tsvd ? "tsvd" : "hosvd"; }

std::string to_string(TmmMode m) {
  switch (m) {
    case TmmMode::Reachability: return "R";
    case TmmMode::Observability: return "O";
    default: return "H";
  }
}

Decomp parse_decomp(const std::string& s) {
  if (s == "tsvd" || s == "TSVD") return Decomp::Tsvd;
  if (s == "hosvd" || s == "HOSVD") return Decomp::Hosvd;
  throw std::invalid_argument("unknown decomposition '" + s + "'");
}

TmmMode parse_tmm_mode(const std::string& s) {
  if (s == "R" || s == "r") return TmmMode::Reachability;
  if (s == "O" || s == "o") return TmmMode::Observability;
  if (s == "H" || s == "h") return TmmMode::Hankel;
  throw std::invalid_argument("unknown TMM mode '" + s + "'");
}

namespace {

std::size_t checked_size(std::size_t outer, std::size_t k_channels,
                         std::size_t k) {
  long double total = static_cast<long double>(outer);
  for (std::size_t i = 0; i <= k; ++i) total *= static_cast<long double>(k_channels);
  if (total > static_cast<long double>(std::numeric_limits<std::size_t>::max()))
    return std::numeric_limits<std::size_t>::max();
  return static_cast<std::size_t>(total);
}

void check_budget(std::size_t need, std::size_t budget, const char* what,
                  std::size_t k) {
  if (need > budget)
    throw MemoryBudgetError(std::string(what) + " tensor at horizon " +
                            std::to_string(k) + " needs " + std::to_string(need) +
                            " scalars, budget is " + std::to_string(budget));
}

}  // namespace

std::size_t reachability_size(const AffineLpvSs& m, std::size_t k) {
  return checked_size(m.nx() * m.nu(), m.channels(), k);
}

std::size_t observability_size(const AffineLpvSs& m, std::size_t k) {
  return checked_size(m.ny() * m.nx(), m.channels(), k);
}

Tensor reachability_tensor(const AffineLpvSs& m, std::size_t k,
                           std::size_t budget) {
  m.validate();
  check_budget(reachability_size(m, k), budget, "reachability", k);
  Tensor r = m.B.permuted({0, 2, 1});
  for (std::size_t i = 1; i <= k; ++i) r = contract(m.A, r, 1, 0);
  return r;
}

Tensor observability_tensor(const AffineLpvSs& m, std::size_t k,
                            std::size_t budget) {
  m.validate();
  check_budget(observability_size(m, k), budget, "observability", k);
  Tensor o = m.C.permuted({0, 2, 1});
  if (k == 0) return o;
  const Tensor a_swapped = m.A.permuted({0, 2, 1});
  for (std::size_t i = 1; i <= k; ++i) o = contract(o, a_swapped, o.order() - 1, 0);
  return o;
}

namespace {

// Singular vectors of the state mode and every scheduling mode of `t`.
void collect(const Tensor& t, std::size_t state_mode, Decomp decomp,
             const TmmOptions& opts, std::vector<Matrix>& state_blocks,
             std::vector<Matrix>& sched_blocks, std::vector<Vector>& sigmas) {
  const std::size_t sched_modes = t.order() - 2;
  if (t.is_zero()) return;
  if (decomp == Decomp::Hosvd) {
    std::vector<std::size_t> modes{state_mode};
    for (std::size_t j = 1; j <= sched_modes; ++j) modes.push_back(j);
    auto svds = hosvd_factors(t, modes, opts.rank_tol);
    for (std::size_t i = 0; i < svds.size(); ++i) {
      const auto r = svds[i].u.cols();
      sigmas.push_back(svds[i].sigma.head(r));
      (i == 0 ? state_blocks : sched_blocks).push_back(std::move(svds[i].u));
    }
    return;
  }
  std::size_t r = std::numeric_limits<std::size_t>::max();
  for (std::size_t n = 0; n < t.order(); ++n)
    r = std::min(r, mode_rank(t, n, opts.tol));
  if (r == 0) return;
  const auto res = tsvd(t, r, opts.tsvd);
  if (res.sigmas.size() == 0) return;
  Index keep = 0;
  while (keep < res.sigmas.size() && res.sigmas[keep] >= opts.tol * res.sigmas[0])
    ++keep;
  sigmas.push_back(res.sigmas.head(keep));
  state_blocks.push_back(res.vectors[state_mode].leftCols(keep));
  for (std::size_t j = 1; j <= sched_modes; ++j)
    sched_blocks.push_back(res.vectors[j].leftCols(keep));
}

SpacePair spaces(const AffineLpvSs& m, std::size_t n, Decomp decomp,
                 const TmmOptions& opts, bool reach) {
  m.validate();
  // Fail before any work if the final horizon is out of budget.
  check_budget(reach ? reachability_size(m, n) : observability_size(m, n),
               opts.memory_budget, reach ? "reachability" : "observability", n);
  std::vector<Matrix> state_blocks, sched_blocks;
  SpacePair out;
  Tensor t = reach ? m.B.permuted({0, 2, 1}) : m.C.permuted({0, 2, 1});
  const Tensor a_swapped = reach ? Tensor() : m.A.permuted({0, 2, 1});
  for (std::size_t k = 0; k <= n; ++k) {
    if (k > 0) {
      // Release the previous horizon before allocating the next.
      Tensor next = reach ? contract(m.A, t, 1, 0)
                          : contract(t, a_swapped, t.order() - 1, 0);
      t = Tensor();
      t = std::move(next);
    }
    std::vector<Vector> sig;
    collect(t, reach ? 0 : t.order() - 1, decomp, opts, state_blocks,
            sched_blocks, sig);
    out.sigmas.push_back(std::move(sig));
  }
  state_blocks.insert(state_blocks.begin(), Matrix(static_cast<Index>(m.nx()), 0));
  sched_blocks.insert(sched_blocks.begin(),
                      Matrix(static_cast<Index>(m.channels()), 0));
  const double union_tol = decomp == Decomp::Hosvd ? opts.rank_tol : opts.tol;
  out.state = orth_union(state_blocks, union_tol);
  out.sched = orth_union(sched_blocks, union_tol);
  return out;
}

}  // namespace

SpacePair reach_spaces(const AffineLpvSs& m, std::size_t n, Decomp decomp,
                       const TmmOptions& opts) {
  return spaces(m, n, decomp, opts, true);
}

SpacePair obsv_spaces(const AffineLpvSs& m, std::size_t n, Decomp decomp,
                      const TmmOptions& opts) {
  return spaces(m, n, decomp, opts, false);
}

std::size_t reported_rp(const Matrix& z, bool z_includes_affine) {
  const auto cols = static_cast<std::size_t>(z.cols());
  if (!z_includes_affine || cols == 0) return cols;
  const Vector e0 = Vector::Unit(z.rows(), 0);
  const double dist = (e0 - z * (z.transpose() * e0)).norm();
  return dist < 1e-8 ? cols - 1 : cols;
}

TmmResult tmm_reduce(const AffineLpvSs& m, TmmMode mode, Decomp decomp,
                     std::size_t n, const SchedulingMap& eta,
                     const TmmOptions& opts) {
  TmmResult out;
  ProjectionTriple& proj = out.proj;
  proj.z_includes_affine = true;
  proj.provenance = "tmm-" + to_string(mode);

  if (mode != TmmMode::Observability) out.reach = reach_spaces(m, n, decomp, opts);
  if (mode != TmmMode::Reachability) out.obsv = obsv_spaces(m, n, decomp, opts);

  switch (mode) {
    case TmmMode::Reachability:
      proj.V = proj.W = out.reach.state;
      proj.Z = out.reach.sched;
      break;
    case TmmMode::Observability:
      proj.V = proj.W = out.obsv.state;
      proj.Z = out.obsv.sched;
      break;
    case TmmMode::Hankel: {
      const Matrix& rn = out.reach.state;
      const Matrix& on = out.obsv.state;
      const Matrix h = on.transpose() * rn;
      const auto s = matrix_svd(h);
      const auto rank_h = numerical_rank(s.sigma, opts.tol);
      if (static_cast<Index>(rank_h) != rn.cols() || rn.cols() != on.cols())
        throw RankConditionError(
            "rank condition not satisfied: rank(R_n) = " +
            std::to_string(rn.cols()) + ", rank(O_n) = " +
            std::to_string(on.cols()) + ", rank(O_n^T R_n) = " +
            std::to_string(rank_h));
      const Vector inv_sqrt = s.sigma.cwiseSqrt().cwiseInverse();
      proj.V = rn * s.v * inv_sqrt.asDiagonal();  // R_n R^{-1}
      proj.W = on * s.u * inv_sqrt.asDiagonal();  // O_n O^{-T}
      proj.Z = orth_union({out.reach.sched, out.obsv.sched}, opts.tol);
      break;
    }
  }
  if (proj.V.cols() == 0)
    throw NumericalError("TMM produced an empty state basis");
  if (proj.Z.cols() == 0)
    throw NumericalError("TMM produced an empty scheduling basis");
  out.reduced = petrov_galerkin(m, proj, eta);
  out.rx = proj.rx();
  out.rp = reported_rp(proj.Z, proj.z_includes_affine);
  return out;
}

}  // namespace lpvtr
