// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include "lpvtr/kernels.hpp"
#include "lpvtr/tensor.hpp"
#include "support.hpp"

using namespace lpvtr;
using namespace lpvtr::test;

namespace {

// The n-mode product by brute force over every output index.
Tensor mode_product_oracle(const Tensor& t, const Matrix& q, std::size_t n) {
  Dims out = t.dims();
  out[n] = static_cast<std::size_t>(q.rows());
  Tensor r(out);
  for_each_index(out, [&](const Dims& idx) {
    double s = 0;
    Dims src = idx;
    for (std::size_t j = 0; j < t.dim(n); ++j) {
      src[n] = j;
      s += q(static_cast<Index>(idx[n]), static_cast<Index>(j)) * entry(t, src);
    }
    r.at(idx) = s;
  });
  return r;
}

Tensor contract_oracle(const Tensor& t, const Tensor& s, std::size_t i, std::size_t k) {
  Dims out;
  for (std::size_t m = 0; m < t.order(); ++m)
    if (m != i) out.push_back(t.dim(m));
  for (std::size_t m = 0; m < s.order(); ++m)
    if (m != k) out.push_back(s.dim(m));
  if (out.empty()) out.push_back(1);
  Tensor r(out);
  for_each_index(out, [&](const Dims& idx) {
    double acc = 0;
    for (std::size_t c = 0; c < t.dim(i); ++c) {
      Dims ti, si;
      std::size_t pos = 0;
      for (std::size_t m = 0; m < t.order(); ++m) ti.push_back(m == i ? c : idx[pos++]);
      for (std::size_t m = 0; m < s.order(); ++m) si.push_back(m == k ? c : idx[pos++]);
      acc += entry(t, ti) * entry(s, si);
    }
    r.at(idx) = acc;
  });
  return r;
}

double max_abs_diff(const Tensor& a, const Tensor& b) {
  REQUIRE(a.dims() == b.dims());
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_SUITE("tensor") {
  TEST_CASE("construction enforces positive dims and storage size") {
    CHECK_THROWS_AS(Tensor(Dims{2, 0}), DimensionError);
    CHECK_THROWS_AS(Tensor(Dims{}), DimensionError);
    CHECK_THROWS_AS(Tensor(Dims{2, 2}, std::vector<double>(3)), DimensionError);
    Tensor t(Dims{2, 3, 4});
    CHECK(t.size() == 24);
    CHECK(t.is_zero());
  }

  TEST_CASE("linear layout is mode-0 fastest") {
    Tensor t(Dims{2, 3, 4});
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = static_cast<double>(i);
    CHECK(t.at({1, 0, 0}) == 1.0);
    CHECK(t.at({0, 1, 0}) == 2.0);
    CHECK(t.at({0, 0, 1}) == 6.0);
    CHECK(t.at({1, 2, 3}) == 1 + 2 * 2 + 6 * 3);
  }

  TEST_CASE("outer product of basis vectors and scalars") {
    const Tensor e = outer_product({Vector::Unit(2, 0), Vector::Unit(2, 1)});
    CHECK(e.at({0, 1}) == 1.0);
    CHECK(frobenius(e) == 1.0);
    Vector a(1), b(1), c(1);
    a << 2;
    b << 3;
    c << 4;
    const Tensor s = outer_product({a, b, c});
    CHECK(s.dims() == Dims{1, 1, 1});
    CHECK(s[0] == 24.0);
    CHECK_THROWS_AS(outer_product(std::span<const Vector>{}), DimensionError);
  }

  TEST_CASE("outer product matches the entrywise product formula") {
    Vector u(2), v(2), w(2);
    u << 1, 2;
    v << 1, 1;
    w << 1, -1;
    const Tensor t = outer_product({u, v, w});
    for_each_index(t.dims(), [&](const Dims& i) {
      CHECK(entry(t, i) == u[static_cast<Index>(i[0])] * v[static_cast<Index>(i[1])] *
                               w[static_cast<Index>(i[2])]);
    });
  }

  TEST_CASE("mode product special cases") {
    Rng rng(1);
    const Tensor t = rng.tensor({3, 4, 2});
    for (std::size_t n = 0; n < 3; ++n) {
      const auto d = static_cast<Index>(t.dim(n));
      CHECK(max_abs_diff(mode_product(t, Matrix::Identity(d, d), n), t) == 0.0);
    }
    Tensor ones(Dims{2, 2, 2}, std::vector<double>(8, 1.0));
    const Tensor r = mode_product(ones, Matrix::Ones(1, 2), 0);
    CHECK(r.dims() == Dims{1, 2, 2});
    for (double v : r.data()) CHECK(v == 2.0);
    CHECK_THROWS_AS(mode_product(t, Matrix::Ones(2, 5), 1), DimensionError);
    CHECK_THROWS_AS(mode_product(t, Matrix::Ones(2, 2), 3), DimensionError);
  }

  TEST_CASE("mode product matches the loop oracle, parallel and serial") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      Rng rng(seed);
      const Tensor t = rng.tensor({3, 4, 2});
      for (std::size_t n = 0; n < 3; ++n) {
        const Matrix q = rng.matrix(5, static_cast<Index>(t.dim(n)));
        const Tensor want = mode_product_oracle(t, q, n);
        CHECK(max_abs_diff(mode_product(t, q, n), want) < 1e-12);
        CHECK(max_abs_diff(kernels::serial::mode_product(t, q, n), want) < 1e-12);
      }
    }
  }

  TEST_CASE("mode product associativity along a mode") {
    Rng rng(2);
    const Tensor t = rng.tensor({3, 4, 5});
    const Matrix q = rng.matrix(6, 4), p = rng.matrix(2, 6);
    const Tensor a = mode_product(mode_product(t, q, 1), p, 1);
    const Tensor b = mode_product(t, p * q, 1);
    CHECK(frobenius(a - b) <= 1e-12 * frobenius(b));
  }

  TEST_CASE("contract matches the loop oracle") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      Rng rng(seed, 7);
      const Tensor t = rng.tensor({2, 3, 2});
      const Tensor s = rng.tensor({3, 2, 2});
      const Tensor want = contract_oracle(t, s, 1, 0);
      CHECK(max_abs_diff(contract(t, s, 1, 0), want) < 1e-12);
      CHECK(max_abs_diff(kernels::serial::contract(t, s, 1, 0), want) < 1e-12);
      const Tensor u = rng.tensor({2, 4});
      CHECK(max_abs_diff(contract(t, u, 2, 0), contract_oracle(t, u, 2, 0)) < 1e-12);
    }
  }

  TEST_CASE("contract with a unit vector slices and specializes to matmul") {
    Rng rng(3);
    const Tensor t = rng.tensor({3, 4, 2});
    const Tensor e = Tensor::from_vector(Vector::Unit(4, 2));
    const Tensor slice = contract(t, e, 1, 0);
    CHECK(slice.dims() == Dims{3, 2});
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t k = 0; k < 2; ++k) CHECK(slice.at({i, k}) == t.at({i, 2, k}));
    const Matrix a = rng.matrix(3, 4), b = rng.matrix(4, 5);
    const Matrix ab = contract(Tensor::from_matrix(a), Tensor::from_matrix(b), 1, 0).to_matrix();
    CHECK((ab - a * b).cwiseAbs().maxCoeff() < 1e-12);
    CHECK_THROWS_AS(contract(t, rng.tensor({5, 2}), 1, 0), DimensionError);
  }

  TEST_CASE("inner product and norm") {
    Rng rng(4);
    const Tensor e11 = outer_product({Vector::Unit(2, 0), Vector::Unit(2, 0)});
    const Tensor e22 = outer_product({Vector::Unit(2, 1), Vector::Unit(2, 1)});
    CHECK(inner(e11, e22) == 0.0);
    CHECK(frobenius(Tensor(Dims{3, 3})) == 0.0);
    const Vector u = rng.vector(3), v = rng.vector(2), w = rng.vector(4);
    CHECK(frobenius(outer_product({u, v, w})) ==
          doctest::Approx(u.norm() * v.norm() * w.norm()).epsilon(1e-14));
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      Rng r(seed, 9);
      const Tensor a = r.tensor({2, 3, 4}), b = r.tensor({2, 3, 4});
      double dot = 0, sq = 0;
      for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        sq += a[i] * a[i];
      }
      CHECK(inner(a, b) == doctest::Approx(dot).epsilon(1e-13));
      CHECK(frobenius(a) == doctest::Approx(std::sqrt(sq)).epsilon(1e-13));
      CHECK(inner(a, a) == doctest::Approx(sq).epsilon(1e-13));
      CHECK(std::abs(inner(a, b)) <= frobenius(a) * frobenius(b));
    }
    CHECK_THROWS_AS(inner(e11, rng.tensor({2, 3})), DimensionError);
  }

  TEST_CASE("unfold column order and fold round trip") {
    Rng rng(5);
    const Matrix m = rng.matrix(3, 4);
    const Tensor t2 = Tensor::from_matrix(m);
    CHECK(unfold(t2, 0) == m);
    CHECK(unfold(t2, 1) == m.transpose());
    const Tensor t = rng.tensor({2, 3, 4, 2});
    for (std::size_t n = 0; n < t.order(); ++n) {
      const Matrix u = unfold(t, n);
      CHECK(u.rows() == static_cast<Index>(t.dim(n)));
      // Column index: remaining modes ascending, lowest fastest.
      for_each_index(t.dims(), [&](const Dims& idx) {
        std::size_t col = 0, stride = 1;
        for (std::size_t k = 0; k < t.order(); ++k) {
          if (k == n) continue;
          col += idx[k] * stride;
          stride *= t.dim(k);
        }
        CHECK(u(static_cast<Index>(idx[n]), static_cast<Index>(col)) == entry(t, idx));
      });
      CHECK(fold(u, n, t.dims()) == t);
    }
  }

  TEST_CASE("permuted moves modes") {
    Rng rng(6);
    const Tensor t = rng.tensor({2, 3, 4});
    const Tensor p = t.permuted({2, 0, 1});
    CHECK(p.dims() == Dims{4, 2, 3});
    for_each_index(t.dims(), [&](const Dims& i) {
      CHECK(p.at({i[2], i[0], i[1]}) == entry(t, i));
    });
  }

  TEST_CASE("mode and modal rank") {
    Rng rng(7);
    const Tensor r1 = outer_product({rng.vector(3), rng.vector(4), rng.vector(2)});
    CHECK(modal_rank(r1) == std::vector<std::size_t>{1, 1, 1});
    CHECK(modal_rank(Tensor(Dims{3, 3, 3})) == std::vector<std::size_t>{0, 0, 0});
    Tensor sd(Dims{3, 3, 3});
    sd.at({0, 0, 0}) = 3;
    sd.at({1, 1, 1}) = 2;
    sd.at({2, 2, 2}) = 1;
    CHECK(modal_rank(sd) == std::vector<std::size_t>{3, 3, 3});
    // Oracle: count singular values of the unfolding above tol * max.
    const Tensor t = rng.tensor({4, 2, 3});
    for (std::size_t n = 0; n < 3; ++n) {
      const Vector s = Eigen::JacobiSVD<Matrix>(unfold(t, n)).singularValues();
      std::size_t k = 0;
      for (Index i = 0; i < s.size(); ++i) k += s[i] >= 1e-10 * s[0];
      CHECK(mode_rank(t, n) == k);
    }
  }

  TEST_CASE("parallel left SVD of an unfolding matches the serial reference") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      Rng rng(seed, 11);
      const Tensor t = rng.tensor({5, 6, 7, 3});
      for (std::size_t n = 0; n < t.order(); ++n) {
        const auto a = kernels::unfold_left_svd(t, n);
        const auto b = kernels::serial::unfold_left_svd(t, n);
        CHECK((a.sigma - b.sigma).cwiseAbs().maxCoeff() < 1e-10 * b.sigma[0]);
        const Index r = a.u.cols();
        CHECK((a.u.transpose() * a.u - Matrix::Identity(r, r)).cwiseAbs().maxCoeff() < 1e-12);
        CHECK(subspace_angle(a.u, b.u) < 1e-8);
      }
    }
  }
}
