// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace lpvtr {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Dims = std::vector<std::size_t>;

/// Thrown when operand shapes are incompatible.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when a numerical routine cannot produce a meaningful result
/// (non-finite data, singular factors, rank shortfall).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::size_t dims_product(std::span<const std::size_t> dims);
std::string dims_to_string(std::span<const std::size_t> dims);

/// Dense order-N real tensor.
///
/// Storage is column-major in the multi-index: mode 0 varies fastest, so the
/// scalar at (i_0, ..., i_{N-1}) lives at i_0 + L_0 (i_1 + L_1 (i_2 + ...)).
/// This is the same layout Eigen uses for matrices, so an order-2 tensor and
/// the corresponding Eigen::MatrixXd share a memory image. Modes are
/// 0-based throughout the API.
class Tensor {
 public:
  /// A 1-element order-1 tensor holding zero.
  Tensor();
  /// Zero tensor with the given dims. Every dim must be >= 1.
  explicit Tensor(Dims dims);
  Tensor(Dims dims, std::vector<double> data);

  static Tensor from_matrix(const Matrix& m);
  static Tensor from_vector(const Vector& v);

  /// Order-2 tensors convert directly; order-1 tensors become a column.
  Matrix to_matrix() const;

  const Dims& dims() const noexcept { return dims_; }
  std::size_t order() const noexcept { return dims_.size(); }
  std::size_t dim(std::size_t mode) const;
  std::size_t size() const noexcept { return data_.size(); }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  double& operator[](std::size_t linear) { return data_[linear]; }
  double operator[](std::size_t linear) const { return data_[linear]; }

  double& at(std::span<const std::size_t> index);
  double at(std::span<const std::size_t> index) const;
  double& at(std::initializer_list<std::size_t> index) {
    return at(std::span<const std::size_t>(index.begin(), index.size()));
  }
  double at(std::initializer_list<std::size_t> index) const {
    return at(std::span<const std::size_t>(index.begin(), index.size()));
  }

  std::size_t linear_index(std::span<const std::size_t> index) const;

  /// Reorders modes: mode k of the result is mode perm[k] of *this.
  Tensor permuted(std::span<const std::size_t> perm) const;
  Tensor permuted(std::initializer_list<std::size_t> perm) const {
    return permuted(std::span<const std::size_t>(perm.begin(), perm.size()));
  }

  /// Same data under new dims of equal total size.
  Tensor reshaped(Dims dims) const;

  bool all_finite() const noexcept;
  bool is_zero() const noexcept;

  Tensor& operator+=(const Tensor& other);
  Tensor& operator-=(const Tensor& other);
  Tensor& operator*=(double s);

  friend Tensor operator+(Tensor a, const Tensor& b) { return a += b; }
  friend Tensor operator-(Tensor a, const Tensor& b) { return a -= b; }
  friend Tensor operator*(Tensor a, double s) { return a *= s; }
  friend Tensor operator*(double s, Tensor a) { return a *= s; }

  friend bool operator==(const Tensor& a, const Tensor& b) {
    return a.dims_ == b.dims_ && a.data_ == b.data_;
  }

 private:
  Dims dims_;
  std::vector<double> data_;
};

/// v_0 ⊗ v_1 ⊗ ... ⊗ v_{N-1}.
Tensor outer_product(std::span<const Vector> vectors);
Tensor outer_product(std::initializer_list<Vector> vectors);

/// n-mode product T ·_n Q: replaces mode n (size L_n) by Q.rows().
/// Requires Q.cols() == T.dim(n).
Tensor mode_product(const Tensor& t, const Matrix& q, std::size_t mode);

/// Contraction of mode i of T with mode k of S. Result modes are T's modes
/// without i followed by S's modes without k, each in their original order.
Tensor contract(const Tensor& t, const Tensor& s, std::size_t mode_t,
                std::size_t mode_s);

/// Sum of elementwise products (standard orthonormal basis).
double inner(const Tensor& t, const Tensor& s);
double frobenius(const Tensor& t);

/// Mode-n unfolding: L_n x (prod_{i != n} L_i). Column index enumerates the
/// remaining modes in ascending order with the lowest one fastest.
Matrix unfold(const Tensor& t, std::size_t mode);
/// Inverse of unfold for the given target dims.
Tensor fold(const Matrix& m, std::size_t mode, const Dims& dims);

inline constexpr double kDefaultRankTol = 1e-10;

/// Numerical rank of unfold(T, n): singular values >= tol * sigma_max.
std::size_t mode_rank(const Tensor& t, std::size_t mode,
                      double tol = kDefaultRankTol);
std::vector<std::size_t> modal_rank(const Tensor& t,
                                    double tol = kDefaultRankTol);

}  // namespace lpvtr
