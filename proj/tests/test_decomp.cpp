// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <algorithm>
#include <limits>

#include "lpvtr/decomp.hpp"
#include "support.hpp"

using namespace lpvtr;
using namespace lpvtr::test;

namespace {

double orth_defect(const Matrix& q) {
  const Index r = q.cols();
  return (q.transpose() * q - Matrix::Identity(r, r)).cwiseAbs().maxCoeff();
}

Tensor superdiagonal(const std::vector<double>& d, std::size_t order) {
  Tensor t(Dims(order, d.size()));
  for (std::size_t i = 0; i < d.size(); ++i) t.at(Dims(order, i)) = d[i];
  return t;
}

}  // namespace

TEST_SUITE("decomp") {
  TEST_CASE("matrix svd") {
    const auto id = matrix_svd(Matrix::Identity(3, 3));
    CHECK(id.sigma.isApproxToConstant(1.0));
    Matrix d = Matrix::Zero(3, 3);
    d.diagonal() << 3, 2, 1;
    CHECK((matrix_svd(d).sigma - Vector::LinSpaced(3, 3, 1)).norm() < 1e-14);
    Rng rng(1);
    const Matrix a = rng.matrix(5, 3);
    const auto s = matrix_svd(a);
    CHECK((s.u * s.sigma.asDiagonal() * s.v.transpose() - a).norm() < 1e-12 * a.norm());
    CHECK(orth_defect(s.u) < 1e-12);
    CHECK(orth_defect(s.v) < 1e-12);
    for (Index i = 1; i < s.sigma.size(); ++i) CHECK(s.sigma[i] <= s.sigma[i - 1]);
    Matrix bad = a;
    bad(0, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(matrix_svd(bad), NumericalError);
  }

  TEST_CASE("pinv satisfies the Penrose conditions on rank-deficient input") {
    Rng rng(2);
    const Matrix a = rng.matrix(6, 2) * rng.matrix(2, 4);
    const Matrix p = pinv(a);
    CHECK((a * p * a - a).norm() < 1e-10);
    CHECK((p * a * p - p).norm() < 1e-10);
    CHECK(((a * p).transpose() - a * p).norm() < 1e-10);
    CHECK(((p * a).transpose() - p * a).norm() < 1e-10);
  }

  TEST_CASE("orth_union") {
    const Matrix e1 = Vector::Unit(3, 0), e2 = Vector::Unit(3, 1);
    CHECK(orth_union({e1, e1}).cols() == 1);
    const Matrix plane = orth_union({e1, e2});
    CHECK(plane.cols() == 2);
    CHECK(plane.row(2).norm() < 1e-15);
    CHECK_THROWS(orth_union({}));
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      Rng rng(seed, 3);
      const Matrix a = rng.matrix(8, 2), b = rng.matrix(8, 3);
      const Matrix c = a.leftCols(1) + b.col(0);  // dependent block
      const Matrix q = orth_union({a, b, c});
      CHECK(q.cols() == 5);
      CHECK(orth_defect(q) < 1e-12);
      for (const Matrix* m : {&a, &b, &c})
        CHECK((*m - q * (q.transpose() * *m)).norm() < 1e-10 * m->norm());
    }
  }

  TEST_CASE("principal angles") {
    Rng rng(4);
    const Matrix a = rng.matrix(6, 3);
    CHECK(max_principal_angle(a, a * rng.matrix(3, 3)) < 1e-8);
    CHECK(max_principal_angle(Vector::Unit(3, 0), Vector::Unit(3, 1)) ==
          doctest::Approx(M_PI / 2));
    Matrix b(2, 1);
    b << 1, 1;
    CHECK(max_principal_angle(Vector::Unit(2, 0), b) == doctest::Approx(M_PI / 4));
    CHECK(max_principal_angle(a, a.leftCols(2)) == doctest::Approx(M_PI / 2));
  }

  TEST_CASE("complete_basis extends orthonormally") {
    Rng rng(5);
    const Matrix q = rng.orthonormal(6, 2);
    const Matrix full = complete_basis(q, 5);
    CHECK(full.cols() == 5);
    CHECK(orth_defect(full) < 1e-12);
    CHECK((full.leftCols(2) - q).norm() < 1e-14);
  }

  TEST_CASE("hosvd special cases") {
    Rng rng(6);
    const Vector u = rng.vector(3), v = rng.vector(4), w = rng.vector(2);
    const auto h = hosvd(outer_product({u, v, w}));
    CHECK(h.core.dims() == Dims{1, 1, 1});
    CHECK(std::abs(h.core[0]) == doctest::Approx(u.norm() * v.norm() * w.norm()));
    const Matrix m = rng.matrix(4, 3);
    const auto h2 = hosvd(Tensor::from_matrix(m));
    const auto s = matrix_svd(m);
    CHECK(h2.mode_sigmas[0].head(3).isApprox(s.sigma, 1e-12));
    CHECK(max_principal_angle(h2.factors[0], s.u) < 1e-8);
  }

  TEST_CASE("hosvd reconstructs and factors are orthonormal") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      Rng rng(seed, 7);
      const Tensor t = rng.tensor({4, 3, 5});
      const auto h = hosvd(t);
      CHECK(frobenius(reconstruct(h.core, h.factors) - t) < 1e-10 * frobenius(t));
      for (std::size_t n = 0; n < 3; ++n) {
        CHECK(orth_defect(h.factors[n]) < 1e-12);
        // Mode sigmas equal the singular values of the unfolding.
        const Vector s = Eigen::JacobiSVD<Matrix>(unfold(t, n)).singularValues();
        CHECK((h.mode_sigmas[n].head(s.size()) - s).cwiseAbs().maxCoeff() < 1e-12 * s[0]);
      }
    }
  }

  TEST_CASE("hosvd truncation") {
    Rng rng(8);
    const Tensor t = rng.tensor({4, 3, 5});
    CHECK(frobenius(hosvd_truncate(t, {4, 3, 5}).approx - t) < 1e-10 * frobenius(t));
    const Tensor r1 = outer_product({rng.vector(4), rng.vector(3)});
    CHECK(frobenius(hosvd_truncate(r1, {1, 1}).approx - r1) < 1e-12 * frobenius(r1));
    const Tensor sd = superdiagonal({3, 2, 1}, 3);
    const auto tr = hosvd_truncate(sd, {1, 1, 1});
    CHECK(frobenius(tr.approx - sd) == doctest::Approx(std::sqrt(5.0)).epsilon(1e-12));
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      Rng r(seed, 9);
      const Tensor x = r.tensor({5, 4, 3});
      const auto tx = hosvd_truncate(x, {2, 3, 2});
      // Quasi-optimality: error <= sqrt of all discarded mode sigmas squared.
      double bound = 0;
      const std::size_t keep[3] = {2, 3, 2};
      for (std::size_t n = 0; n < 3; ++n) {
        const Vector s = Eigen::JacobiSVD<Matrix>(unfold(x, n)).singularValues();
        bound += s.tail(s.size() - static_cast<Index>(keep[n])).squaredNorm();
      }
      CHECK(frobenius(tx.approx - x) <= std::sqrt(bound) * (1 + 1e-12));
    }
    CHECK_THROWS(hosvd_truncate(t, {5, 3, 5}));
    CHECK_THROWS(hosvd_truncate(t, {0, 3, 5}));
  }

  TEST_CASE("tsvd on a superdiagonal tensor recovers sigmas and basis vectors") {
    const auto res = tsvd(superdiagonal({3, 2, 1}, 3), 3);
    REQUIRE(res.sigmas.size() == 3);
    CHECK(res.sigmas[0] == doctest::Approx(3).epsilon(1e-10));
    CHECK(res.sigmas[1] == doctest::Approx(2).epsilon(1e-10));
    CHECK(res.sigmas[2] == doctest::Approx(1).epsilon(1e-10));
    for (const auto& q : res.vectors)
      CHECK((q.cwiseAbs() - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-8);
  }

  TEST_CASE("tsvd matrix specialization and rank-1 recovery") {
    Rng rng(10);
    const Matrix m = rng.matrix(5, 4);
    const auto res = tsvd(Tensor::from_matrix(m), 4);
    const Vector s = matrix_svd(m).sigma;
    CHECK((res.sigmas - s).cwiseAbs().maxCoeff() < 1e-8);
    const Tensor r1 = outer_product({rng.vector(3), rng.vector(4), rng.vector(2)});
    const auto one = tsvd(r1, 1);
    CHECK(frobenius(tsvd_reconstruct(one, 1) - r1) < 1e-10 * frobenius(r1));
    CHECK(one.residual_norms[0] < 1e-10 * frobenius(r1));
  }

  TEST_CASE("tsvd planted tensors: sigmas and optimal truncation error") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      Rng rng(seed, 11);
      const std::vector<double> sig{4.0, 2.5, 1.0};
      const auto p = planted(rng, {5, 4, 6}, sig);
      TsvdOptions opts;
      opts.seed = seed;
      const auto res = tsvd(p.t, 3, opts);
      for (std::size_t i = 0; i < 3; ++i)
        CHECK(res.sigmas[static_cast<Index>(i)] == doctest::Approx(sig[i]).epsilon(1e-8));
      for (std::size_t r = 1; r <= 3; ++r) {
        double tail = 0;
        for (std::size_t i = r; i < 3; ++i) tail += sig[i] * sig[i];
        const double err = frobenius(tsvd_reconstruct(res, r) - p.t);
        CHECK(err * err == doctest::Approx(tail).epsilon(1e-8));
      }
    }
  }

  TEST_CASE("tsvd invariants on generic tensors") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      Rng rng(seed, 12);
      const Tensor t = rng.tensor({4, 3, 5});
      TsvdOptions opts;
      opts.seed = seed;
      const auto res = tsvd(t, 3, opts);
      CHECK(res.sigmas[0] <= frobenius(t) * (1 + 1e-12));
      for (Index i = 1; i < res.sigmas.size(); ++i)
        CHECK(res.sigmas[i] <= res.sigmas[i - 1] * (1 + 1e-10));
      for (const auto& q : res.vectors) {
        for (Index i = 0; i < q.cols(); ++i) CHECK(std::abs(q.col(i).norm() - 1) < 1e-12);
        CHECK(orth_defect(q) < 1e-8);
      }
    }
  }

  TEST_CASE("tsvd is deterministic for a seed") {
    Rng rng(13);
    const Tensor t = rng.tensor({4, 4, 4});
    TsvdOptions opts;
    opts.seed = 42;
    const auto a = tsvd(t, 3, opts), b = tsvd(t, 3, opts);
    CHECK(a.sigmas == b.sigmas);
    for (std::size_t n = 0; n < 3; ++n) CHECK(a.vectors[n] == b.vectors[n]);
  }

  TEST_CASE("tsvd rejects more components than a mode allows") {
    Rng rng(14);
    CHECK_THROWS(tsvd(rng.tensor({2, 5, 5}), 3));
    CHECK_THROWS(tsvd(rng.tensor({2, 5, 5}), 0));
  }
}
