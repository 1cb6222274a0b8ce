// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include "lpvtr/decomp.hpp"
#include "lpvtr/pod.hpp"
#include "support.hpp"

using namespace lpvtr;
using namespace lpvtr::test;

namespace {

Trajectory random_traj(Rng& rng, Index nx, Index np, Index n) {
  Trajectory tr;
  tr.x = rng.matrix(nx, n);
  tr.p = rng.matrix(np, n);
  tr.u = rng.matrix(1, n);
  tr.y = rng.matrix(1, n);
  tr.label = "r";
  return tr;
}

SnapshotSet random_snap(Rng& rng, Index nx, Index np, Index n) {
  return snapshot_matrices(random_traj(rng, nx, np, n));
}

// Weighted matrices by an explicit per-sample sum.
WeightedMatrices weighted_oracle(const SnapshotSet& s) {
  WeightedMatrices w{Matrix::Zero(s.Mx.rows(), s.Mx.rows()), Matrix::Zero(s.Mp.rows(), s.Mp.rows())};
  for (Index t = 0; t < s.Mx.cols(); ++t) {
    const Vector x = s.Mx.col(t), p = s.Mp.col(t);
    w.Mx += p.squaredNorm() * x * x.transpose();
    w.Mp += x.squaredNorm() * p * p.transpose();
  }
  return w;
}

// Double-sum form of the joint cost with orthogonal projections.
double joint_cost_oracle(const SnapshotSet& s, const Matrix& v, const Matrix& z) {
  double j = 0;
  for (Index t = 0; t < s.Mx.cols(); ++t) {
    const Vector x = s.Mx.col(t), p = s.Mp.col(t);
    const Vector xh = v * (v.transpose() * x), ph = z * (z.transpose() * p);
    const Matrix d = x * p.transpose() - xh * ph.transpose();
    for (Index i = 0; i < d.rows(); ++i)
      for (Index k = 0; k < d.cols(); ++k) j += d(i, k) * d(i, k);
  }
  return j;
}

double sym_eig_tail(const Matrix& m, std::size_t r) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  const Vector ev = es.eigenvalues().reverse();
  return ev.tail(ev.size() - static_cast<Index>(r)).sum();
}

}  // namespace

TEST_SUITE("pod") {
  TEST_CASE("snapshot matrices stack trajectories") {
    Rng rng(1);
    const auto a = random_traj(rng, 3, 2, 5), b = random_traj(rng, 3, 2, 4);
    const auto s = snapshot_matrices(std::vector<Trajectory>{a, b});
    CHECK(s.Mx.cols() == 9);
    CHECK(s.Md.cols() == 7);
    CHECK(s.Mx.leftCols(5) == a.x);
    CHECK(s.Mp.rightCols(4) == b.p);
    CHECK(s.Md.col(4) == b.x.col(1) - b.x.col(0));
    CHECK(s.source == "r+r");
    auto c = random_traj(rng, 2, 2, 4);
    CHECK_THROWS_AS(snapshot_matrices(std::vector<Trajectory>{a, c}), DimensionError);
  }

  TEST_CASE("matrix POD residual equals the SVD tail") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      Rng rng(seed, 2);
      const auto s = random_snap(rng, 6, 4, 50);
      const auto res = pod_matrix(s, 3, 2);
      const auto c = cost_projection(s, res.proj.V, res.proj.Z);
      CHECK(c.Jx == doctest::Approx(spectrum_tail(res.spectrum_x, 3)).epsilon(1e-10));
      CHECK(c.Jp == doctest::Approx(spectrum_tail(res.spectrum_p, 2)).epsilon(1e-10));
      // Squared singular values are the Gram eigenvalues.
      CHECK(spectrum_tail(res.spectrum_x, 3) ==
            doctest::Approx(sym_eig_tail(s.Mx * s.Mx.transpose(), 3)).epsilon(1e-9));
    }
  }

  TEST_CASE("weighted matrices match the per-sample sum") {
    Rng rng(3);
    const auto s = random_snap(rng, 5, 3, 40);
    const auto w = weighted_matrices(s), o = weighted_oracle(s);
    CHECK((w.Mx - o.Mx).norm() < 1e-10 * o.Mx.norm());
    CHECK((w.Mp - o.Mp).norm() < 1e-10 * o.Mp.norm());
    CHECK(w.Mx == w.Mx.transpose());
  }

  TEST_CASE("weighted POD cross terms equal the eigenvalue tails") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      Rng rng(seed, 4);
      const auto s = random_snap(rng, 6, 4, 60);
      const auto res = pod_weighted(s, 2, 2);
      const auto c = cost_projection(s, res.proj.V, res.proj.Z);
      const auto w = weighted_matrices(s);
      CHECK(c.Jxp_A == doctest::Approx(sym_eig_tail(w.Mx, 2)).epsilon(1e-9));
      CHECK(c.Jxp_B == doctest::Approx(sym_eig_tail(w.Mp, 2)).epsilon(1e-9));
    }
  }

  TEST_CASE("joint tensor slices are outer products") {
    Rng rng(5);
    const auto s = random_snap(rng, 3, 2, 4);
    const auto t = joint_tensor(s);
    CHECK(t.dims() == Dims{3, 2, 4});
    for_each_index(t.dims(), [&](const Dims& i) {
      CHECK(entry(t, i) == doctest::Approx(s.Mx(static_cast<Index>(i[0]), static_cast<Index>(i[2])) *
                                           s.Mp(static_cast<Index>(i[1]), static_cast<Index>(i[2]))));
    });
  }

  TEST_CASE("HOSVD factors of the joint tensor equal the weighted eigenvectors") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      Rng rng(seed, 6);
      const auto s = random_snap(rng, 5, 3, 30);
      const auto h = pod_tensor(s, 3, 2, Decomp::Hosvd);
      const auto w = pod_weighted(s, 3, 2);
      CHECK(subspace_angle(h.proj.V, w.proj.V) < 1e-7);
      CHECK(subspace_angle(h.proj.Z, w.proj.Z) < 1e-7);
      // sigma^2 of the unfolding are the weighted eigenvalues.
      CHECK(h.spectrum_x.head(3).cwiseAbs2().isApprox(w.spectrum_x.head(3), 1e-9));
    }
  }

  TEST_CASE("rank-one data is recovered by every variant") {
    Rng rng(7);
    const Vector a = rng.vector(4).normalized(), b = rng.vector(3).normalized();
    SnapshotSet s;
    s.Mx = a * rng.matrix(1, 20);
    s.Mp = b * rng.matrix(1, 20);
    s.Md = s.Mx.rightCols(19) - s.Mx.leftCols(19);
    for (auto v : {PodVariant::Matrix, PodVariant::Weighted, PodVariant::Hosvd, PodVariant::Tsvd}) {
      const auto res = pod_reduce(s, v, 1, 1);
      CHECK(std::abs(res.proj.V.col(0).dot(a)) == doctest::Approx(1).epsilon(1e-8));
      CHECK(std::abs(res.proj.Z.col(0).dot(b)) == doctest::Approx(1).epsilon(1e-8));
      const auto c = cost_projection(s, res.proj.V, res.proj.Z);
      CHECK(c.Jxp < 1e-16 * s.Mx.squaredNorm() * s.Mp.squaredNorm() + 1e-20);
    }
  }

  TEST_CASE("joint cost decomposes as A + B - C") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      Rng rng(seed, 8);
      const auto s = random_snap(rng, 5, 3, 25);
      const Matrix v = rng.orthonormal(5, 2), z = rng.orthonormal(3, 2);
      const auto c = cost_projection(s, v, z);
      const double oracle = joint_cost_oracle(s, v, z);
      CHECK(c.Jxp == doctest::Approx(oracle).epsilon(1e-10));
      CHECK(c.Jxp == doctest::Approx(c.Jxp_A + c.Jxp_B - c.Jxp_C).epsilon(1e-10));
    }
  }

  TEST_CASE("cost bounds hold over random data") {
    int cross = 0, coupling = 0, sandwich = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      Rng rng(seed, 9);
      const Index nx = static_cast<Index>(rng.index(2, 8)), np = static_cast<Index>(rng.index(2, 6));
      const auto s = random_snap(rng, nx, np, static_cast<Index>(rng.index(10, 80)));
      const auto rx = rng.index(1, static_cast<std::size_t>(nx));
      const auto rp = rng.index(1, static_cast<std::size_t>(np));
      const auto res = pod_weighted(s, rx, rp);
      const auto c = cost_projection(s, res.proj.V, res.proj.Z);
      const auto b = verify_bounds(c, spectrum_tail(res.spectrum_x, rx),
                                   spectrum_tail(res.spectrum_p, rp), 1e-9);
      cross += b.cross_term;
      coupling += b.coupling;
      sandwich += b.sandwich;
      // Cross and coupling hold for arbitrary orthonormal bases too.
      const auto r = cost_projection(s, rng.orthonormal(nx, static_cast<Index>(rx)),
                                     rng.orthonormal(np, static_cast<Index>(rp)));
      const auto br = verify_bounds(r, 0, 0, 1e-9);
      CHECK(br.cross_term);
      CHECK(br.coupling);
    }
    CHECK(cross == 100);
    CHECK(coupling == 100);
    CHECK(sandwich == 100);
  }

  TEST_CASE("zero scheduling data gives zero weights") {
    Rng rng(10);
    SnapshotSet s;
    s.Mx = rng.matrix(4, 10);
    s.Mp = Matrix::Zero(2, 10);
    s.Md = s.Mx.rightCols(9) - s.Mx.leftCols(9);
    const auto w = weighted_matrices(s);
    CHECK(w.Mx.norm() == 0);
    CHECK(w.Mp.norm() == 0);
    CHECK_THROWS_AS(pod_weighted(s, 2, 1), NumericalError);
    CHECK_THROWS_AS(pod_matrix(s, 2, 1), NumericalError);
    const auto c = cost_projection(s, rng.orthonormal(4, 2), rng.orthonormal(2, 1));
    CHECK(c.Jxp == 0);
    CHECK(c.Jp == 0);
  }

  TEST_CASE("rank requests are validated") {
    Rng rng(11);
    const auto s = random_snap(rng, 4, 2, 3);
    CHECK_THROWS_AS(pod_matrix(s, 0, 1), DimensionError);
    CHECK_THROWS_AS(pod_matrix(s, 5, 1), DimensionError);
    CHECK_THROWS_AS(pod_matrix(s, 2, 3), DimensionError);
    // Three samples: rank 3 < 4 requested.
    CHECK_THROWS_AS(pod_matrix(s, 4, 1), NumericalError);
  }

  TEST_CASE("delta residual uses increment directions") {
    Rng rng(12);
    const auto s = random_snap(rng, 5, 2, 30);
    const auto res = pod_matrix(s, 2, 1, PodResidual::Delta);
    const auto sd = matrix_svd(s.Md);
    CHECK(subspace_angle(res.proj.W, sd.u.leftCols(2)) < 1e-10);
    CHECK(pod_matrix(s, 2, 1).proj.W == pod_matrix(s, 2, 1).proj.V);
  }

  TEST_CASE("closed-loop cost with perfect reconstruction is zero") {
    Rng rng(13);
    auto ref = random_traj(rng, 3, 2, 10);
    Trajectory rom = ref;
    ProjectionTriple proj;
    proj.V = Matrix::Identity(3, 3);
    proj.W = proj.V;
    proj.Z = Matrix::Identity(2, 2);
    const auto c = cost_closed_loop(ref, rom, proj);
    CHECK(c.closed_loop);
    CHECK(c.Jx == 0);
    CHECK(c.Jxp == 0);
  }

  TEST_CASE("variant parsing") {
    CHECK(parse_pod_variant("weighted") == PodVariant::Weighted);
    CHECK(to_string(PodVariant::Tsvd) == "tsvd");
    CHECK(parse_pod_residual("delta") == PodResidual::Delta);
    CHECK_THROWS_AS(parse_pod_variant("cp"), std::invalid_argument);
  }
}
