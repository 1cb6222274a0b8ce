// SPDX-License-Identifier: Apache-2.0
#include "lpvtr/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "lpvtr/kernels.hpp"

namespace lpvtr {

std::size_t dims_product(std::span<const std::size_t> dims) {
  return std::accumulate(dims.begin(), dims.end(), std::size_t{1},
                         std::multiplies<>());
}

std::string dims_to_string(std::span<const std::size_t> dims) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (i) os << ", ";
    os << dims[i];
  }
  os << ')';
  return os.str();
}

namespace {

void check_dims(const Dims& dims) {
  if (dims.empty()) throw DimensionError("tensor must have order >= 1");
  for (auto d : dims)
    if (d == 0)
      throw DimensionError("tensor dims must be positive, got " +
                           dims_to_string(dims));
}

}  // namespace

Tensor::Tensor() : dims_{1}, data_(1, 0.0) {}

Tensor::Tensor(Dims dims) : dims_(std::move(dims)) {
  check_dims(dims_);
  data_.assign(dims_product(dims_), 0.0);
}

Tensor::Tensor(Dims dims, std::vector<double> data)
    : dims_(std::move(dims)), data_(std::move(data)) {
  check_dims(dims_);
  if (data_.size() != dims_product(dims_))
    throw DimensionError("data length " + std::to_string(data_.size()) +
                         " does not match dims " + dims_to_string(dims_));
}

Tensor Tensor::from_matrix(const Matrix& m) {
  Tensor t({static_cast<std::size_t>(m.rows()),
            static_cast<std::size_t>(m.cols())});
  Eigen::Map<Matrix>(t.data_.data(), m.rows(), m.cols()) = m;
  return t;
}

Tensor Tensor::from_vector(const Vector& v) {
  Tensor t({static_cast<std::size_t>(v.size())});
  Eigen::Map<Vector>(t.data_.data(), v.size()) = v;
  return t;
}

Matrix Tensor::to_matrix() const {
  if (order() > 2)
    throw DimensionError("to_matrix needs order <= 2, got " +
                         dims_to_string(dims_));
  const auto rows = static_cast<Eigen::Index>(dims_[0]);
  const auto cols = order() == 2 ? static_cast<Eigen::Index>(dims_[1]) : 1;
  return Eigen::Map<const Matrix>(data_.data(), rows, cols);
}

std::size_t Tensor::dim(std::size_t mode) const {
  if (mode >= dims_.size())
    throw DimensionError("mode " + std::to_string(mode) +
                         " out of range for order " +
                         std::to_string(dims_.size()));
  return dims_[mode];
}

std::size_t Tensor::linear_index(std::span<const std::size_t> index) const {
  if (index.size() != dims_.size())
    throw DimensionError("index order mismatch");
  std::size_t lin = 0;
  for (std::size_t k = dims_.size(); k-- > 0;) {
    if (index[k] >= dims_[k]) throw DimensionError("index out of range");
    lin = lin * dims_[k] + index[k];
  }
  return lin;
}

double& Tensor::at(std::span<const std::size_t> index) {
  return data_[linear_index(index)];
}

double Tensor::at(std::span<const std::size_t> index) const {
  return data_[linear_index(index)];
}

Tensor Tensor::permuted(std::span<const std::size_t> perm) const {
  const std::size_t n = order();
  if (perm.size() != n) throw DimensionError("permutation size mismatch");
  std::vector<bool> seen(n, false);
  for (auto p : perm) {
    if (p >= n || seen[p]) throw DimensionError("invalid permutation");
    seen[p] = true;
  }
  Dims out_dims(n);
  for (std::size_t k = 0; k < n; ++k) out_dims[k] = dims_[perm[k]];

  // Stride of each result mode inside the source layout.
  std::vector<std::size_t> src_stride(n);
  {
    std::size_t s = 1;
    std::vector<std::size_t> stride(n);
    for (std::size_t k = 0; k < n; ++k) {
      stride[k] = s;
      s *= dims_[k];
    }
    for (std::size_t k = 0; k < n; ++k) src_stride[k] = stride[perm[k]];
  }

  Tensor out(out_dims);
  std::vector<std::size_t> idx(n, 0);
  std::size_t src = 0;
  for (std::size_t lin = 0; lin < out.size(); ++lin) {
    out.data_[lin] = data_[src];
    for (std::size_t k = 0; k < n; ++k) {
      if (++idx[k] < out_dims[k]) {
        src += src_stride[k];
        break;
      }
      src -= src_stride[k] * (out_dims[k] - 1);
      idx[k] = 0;
    }
  }
  return out;
}

Tensor Tensor::reshaped(Dims dims) const {
  return Tensor(std::move(dims), data_);
}

bool Tensor::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(),
                     [](double v) { return std::isfinite(v); });
}

bool Tensor::is_zero() const noexcept {
  return std::all_of(data_.begin(), data_.end(),
                     [](double v) { return v == 0.0; });
}

Tensor& Tensor::operator+=(const Tensor& other) {
  if (dims_ != other.dims_) throw DimensionError("tensor sum dims mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

Tensor& Tensor::operator-=(const Tensor& other) {
  if (dims_ != other.dims_)
    throw DimensionError("tensor difference dims mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

Tensor& Tensor::operator*=(double s) {
  for (auto& v : data_) v *= s;
  return *this;
}

Tensor outer_product(std::span<const Vector> vectors) {
  if (vectors.empty()) throw DimensionError("outer_product of no vectors");
  Dims dims;
  for (const auto& v : vectors) {
    if (v.size() == 0) throw DimensionError("outer_product of empty vector");
    dims.push_back(static_cast<std::size_t>(v.size()));
  }
  Tensor out(dims);
  auto data = out.data();
  data[0] = 1.0;
  // Build mode by mode: after step k the leading prod(dims[0..k]) entries
  // hold v_0 ⊗ ... ⊗ v_k.
  std::size_t filled = 1;
  for (std::size_t k = 0; k < vectors.size(); ++k) {
    const auto& v = vectors[k];
    for (std::size_t j = dims[k]; j-- > 0;)
      for (std::size_t i = 0; i < filled; ++i)
        data[j * filled + i] = data[i] * v[static_cast<Eigen::Index>(j)];
    filled *= dims[k];
  }
  return out;
}

Tensor outer_product(std::initializer_list<Vector> vectors) {
  return outer_product(std::span<const Vector>(vectors.begin(), vectors.size()));
}

Tensor mode_product(const Tensor& t, const Matrix& q, std::size_t mode) {
  return kernels::mode_product(t, q, mode);
}

Tensor contract(const Tensor& t, const Tensor& s, std::size_t mode_t,
                std::size_t mode_s) {
  return kernels::contract(t, s, mode_t, mode_s);
}

double inner(const Tensor& t, const Tensor& s) {
  if (t.dims() != s.dims()) throw DimensionError("inner product dims mismatch");
  const auto a = t.data();
  const auto b = s.data();
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double frobenius(const Tensor& t) {
  const auto a = t.data();
  return Eigen::Map<const Vector>(a.data(), static_cast<Eigen::Index>(a.size()))
      .norm();
}

Matrix unfold(const Tensor& t, std::size_t mode) {
  const std::size_t len = t.dim(mode);
  const auto& d = t.dims();
  const std::size_t left = dims_product(std::span(d).first(mode));
  const std::size_t right = dims_product(std::span(d).subspan(mode + 1));
  Matrix m(static_cast<Eigen::Index>(len),
           static_cast<Eigen::Index>(left * right));
  const auto src = t.data();
  for (std::size_t r = 0; r < right; ++r)
    for (std::size_t l = 0; l < len; ++l)
      for (std::size_t a = 0; a < left; ++a)
        m(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(a + left * r)) =
            src[a + left * (l + len * r)];
  return m;
}

Tensor fold(const Matrix& m, std::size_t mode, const Dims& dims) {
  Tensor out(dims);
  const std::size_t len = out.dim(mode);
  const std::size_t left = dims_product(std::span(dims).first(mode));
  const std::size_t right = dims_product(std::span(dims).subspan(mode + 1));
  if (static_cast<std::size_t>(m.rows()) != len ||
      static_cast<std::size_t>(m.cols()) != left * right)
    throw DimensionError("fold: matrix shape does not match dims " +
                         dims_to_string(dims));
  auto dst = out.data();
  for (std::size_t r = 0; r < right; ++r)
    for (std::size_t l = 0; l < len; ++l)
      for (std::size_t a = 0; a < left; ++a)
        dst[a + left * (l + len * r)] =
            m(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(a + left * r));
  return out;
}

std::size_t mode_rank(const Tensor& t, std::size_t mode, double tol) {
  if (!(tol > 0)) throw std::invalid_argument("mode_rank: tol must be > 0");
  const auto svd = kernels::unfold_left_svd(t, mode);
  if (svd.sigma.size() == 0 || svd.sigma[0] == 0.0) return 0;
  const double cut = tol * svd.sigma[0];
  std::size_t r = 0;
  for (Eigen::Index i = 0; i < svd.sigma.size(); ++i)
    if (svd.sigma[i] >= cut) ++r;
  return r;
}

std::vector<std::size_t> modal_rank(const Tensor& t, double tol) {
  std::vector<std::size_t> ranks(t.order());
  for (std::size_t n = 0; n < t.order(); ++n) ranks[n] = mode_rank(t, n, tol);
  return ranks;
}

}  // namespace lpvtr
