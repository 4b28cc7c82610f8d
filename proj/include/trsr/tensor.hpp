#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace trsr {

using Matrix = Eigen::MatrixXd;
using Shape = std::vector<std::size_t>;

/// Error raised for invalid arguments anywhere in the library (shape
/// mismatches, out-of-range modes, infeasible plans).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::size_t num_elements(std::span<const std::size_t> shape);
std::string shape_string(std::span<const std::size_t> shape);

/// N-dimensional real array.
///
/// Storage order: the first mode varies fastest (column-major generalised
/// to N modes). Every unfolding below decodes its composite row and column
/// indices with the same rule: among the modes it groups, the one listed
/// first is the fastest.
class DenseTensor {
 public:
  DenseTensor() = default;
  explicit DenseTensor(Shape shape, double fill = 0.0);
  DenseTensor(Shape shape, std::vector<double> data);

  static DenseTensor from_matrix(const Matrix& m);

  const Shape& shape() const { return shape_; }
  std::size_t order() const { return shape_.size(); }
  std::size_t extent(std::size_t mode) const { return shape_.at(mode); }
  std::size_t size() const { return data_.size(); }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  double& operator[](std::size_t linear) { return data_[linear]; }
  double operator[](std::size_t linear) const { return data_[linear]; }

  std::size_t linear_index(std::span<const std::size_t> index) const;
  double& at(std::span<const std::size_t> index) { return data_[linear_index(index)]; }
  double at(std::span<const std::size_t> index) const { return data_[linear_index(index)]; }

  /// Only valid for order-2 tensors.
  Matrix to_matrix() const;

  bool operator==(const DenseTensor&) const = default;

 private:
  Shape shape_;
  std::vector<double> data_;
};

// Mode arguments are 1-based throughout, as in the usual notation X_(n).

/// Mode-n unfolding X_(n): I_n rows, columns decode modes n+1, ..., N, 1, ..., n-1.
Matrix unfold_mode_n(const DenseTensor& t, std::size_t n);
DenseTensor fold_mode_n(const Matrix& m, std::size_t n, const Shape& shape);

/// Canonical unfolding X_[n]: rows decode modes 1..n, columns modes n+1..N.
Matrix unfold_canonical(const DenseTensor& t, std::size_t n);
DenseTensor fold_canonical(const Matrix& m, std::size_t n, const Shape& shape);

DenseTensor hadamard(const DenseTensor& a, const DenseTensor& b);
double frobenius_norm(const DenseTensor& t);
double squared_norm(const DenseTensor& t);

}  // namespace trsr
