// SPDX-License-Identifier: Apache-2.0
// OpenMP kernels against their serial references.
#include <benchmark/benchmark.h>

#include <random>

#include "lpvtr/kernels.hpp"

using namespace lpvtr;

namespace {

Tensor random_tensor(Dims dims, std::uint64_t seed) {
  Tensor t(std::move(dims));
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> n;
  for (auto& v : t.data()) v = n(gen);
  return t;
}

Matrix random_matrix(Eigen::Index r, Eigen::Index c, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> n;
  Matrix m(r, c);
  for (Eigen::Index j = 0; j < c; ++j)
    for (Eigen::Index i = 0; i < r; ++i) m(i, j) = n(gen);
  return m;
}

template <auto Fn>
void BM_ModeProduct(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  const Tensor t = random_tensor({d, d, d}, 1);
  const Matrix q = random_matrix(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d), 2);
  for (auto _ : state) benchmark::DoNotOptimize(Fn(t, q, 1));
}

template <auto Fn>
void BM_Contract(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  const Tensor a = random_tensor({d, d, d}, 3);
  const Tensor r = random_tensor({d, d, d, 1}, 4);
  for (auto _ : state) benchmark::DoNotOptimize(Fn(a, r, 1, 0));
}

template <auto Fn>
void BM_UnfoldSvd(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  const Tensor t = random_tensor({d, d, d}, 5);
  for (auto _ : state) benchmark::DoNotOptimize(Fn(t, 1));
}

}  // namespace

BENCHMARK(BM_ModeProduct<kernels::mode_product>)->Name("mode_product/parallel")->Arg(32)->Arg(64);
BENCHMARK(BM_ModeProduct<kernels::serial::mode_product>)->Name("mode_product/serial")->Arg(32)->Arg(64);
BENCHMARK(BM_Contract<kernels::contract>)->Name("contract/parallel")->Arg(16)->Arg(32);
BENCHMARK(BM_Contract<kernels::serial::contract>)->Name("contract/serial")->Arg(16)->Arg(32);
BENCHMARK(BM_UnfoldSvd<kernels::unfold_left_svd>)->Name("unfold_left_svd/parallel")->Arg(16)->Arg(32);
BENCHMARK(BM_UnfoldSvd<kernels::serial::unfold_left_svd>)->Name("unfold_left_svd/serial")->Arg(16)->Arg(32);

BENCHMARK_MAIN();
