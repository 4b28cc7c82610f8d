#include "trsr/tensor.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace trsr {

std::size_t num_elements(std::span<const std::size_t> shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

std::string shape_string(std::span<const std::size_t> shape) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << ", ";
    os << shape[i];
  }
  os << ')';
  return os.str();
}

namespace {

void check_shape(const Shape& shape) {
  if (shape.empty()) throw Error("tensor order must be at least 1");
  for (auto e : shape)
    if (e == 0) throw Error("tensor extents must be positive, got " + shape_string(shape));
}

void check_mode(std::size_t n, std::size_t lo, std::size_t hi) {
  if (n < lo || n > hi)
    throw Error("mode " + std::to_string(n) + " out of range [" + std::to_string(lo) + ", " +
                std::to_string(hi) + "]");
}

// Strides of the storage order (first mode fastest).
std::vector<std::size_t> strides_of(const Shape& shape) {
  std::vector<std::size_t> s(shape.size());
  std::size_t acc = 1;
  for (std::size_t k = 0; k < shape.size(); ++k) {
    s[k] = acc;
    acc *= shape[k];
  }
  return s;
}

// Walks every storage offset of `shape` in the order given by `modes`
// (first entry fastest), calling f(sequence_position, storage_offset).
template <typename F>
void for_each_in_order(const Shape& shape, const std::vector<std::size_t>& modes, F&& f) {
  const auto strides = strides_of(shape);
  const std::size_t total = num_elements(shape);
  std::vector<std::size_t> idx(modes.size(), 0);
  std::size_t offset = 0;
  for (std::size_t pos = 0; pos < total; ++pos) {
    f(pos, offset);
    for (std::size_t k = 0; k < modes.size(); ++k) {
      const std::size_t m = modes[k];
      if (++idx[k] < shape[m]) {
        offset += strides[m];
        break;
      }
      offset -= (shape[m] - 1) * strides[m];
      idx[k] = 0;
    }
  }
}

// Row mode n-1 (0-based) first, then the cyclic order n, ..., N-1, 0, ..., n-2.
std::vector<std::size_t> mode_n_order(std::size_t order, std::size_t n0) {
  std::vector<std::size_t> modes;
  modes.reserve(order);
  for (std::size_t k = 0; k < order; ++k) modes.push_back((n0 + k) % order);
  return modes;
}

}  // namespace

DenseTensor::DenseTensor(Shape shape, double fill) : shape_(std::move(shape)) {
  check_shape(shape_);
  data_.assign(num_elements(shape_), fill);
}

DenseTensor::DenseTensor(Shape shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  check_shape(shape_);
  if (data_.size() != num_elements(shape_))
    throw Error("data length " + std::to_string(data_.size()) + " does not match shape " +
                shape_string(shape_));
}

DenseTensor DenseTensor::from_matrix(const Matrix& m) {
  DenseTensor t({static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols())});
  Eigen::Map<Matrix>(t.data_.data(), m.rows(), m.cols()) = m;
  return t;
}

std::size_t DenseTensor::linear_index(std::span<const std::size_t> index) const {
  if (index.size() != shape_.size()) throw Error("index order does not match tensor order");
  std::size_t lin = 0;
  for (std::size_t k = shape_.size(); k-- > 0;) {
    if (index[k] >= shape_[k])
      throw Error("index " + std::to_string(index[k]) + " out of range for mode " +
                  std::to_string(k + 1) + " of extent " + std::to_string(shape_[k]));
    lin = lin * shape_[k] + index[k];
  }
  return lin;
}

Matrix DenseTensor::to_matrix() const {
  if (order() != 2) throw Error("to_matrix requires an order-2 tensor, got " + shape_string(shape_));
  return Eigen::Map<const Matrix>(data_.data(), shape_[0], shape_[1]);
}

Matrix unfold_mode_n(const DenseTensor& t, std::size_t n) {
  check_mode(n, 1, t.order());
  const std::size_t rows = t.extent(n - 1);
  Matrix m(rows, t.size() / rows);
  const auto data = t.data();
  double* out = m.data();
  // Column-major output: the sequence position is exactly the storage offset in m.
  for_each_in_order(t.shape(), mode_n_order(t.order(), n - 1),
                    [&](std::size_t pos, std::size_t off) { out[pos] = data[off]; });
  return m;
}

DenseTensor fold_mode_n(const Matrix& m, std::size_t n, const Shape& shape) {
  check_shape(shape);
  check_mode(n, 1, shape.size());
  if (static_cast<std::size_t>(m.rows()) != shape[n - 1] ||
      static_cast<std::size_t>(m.size()) != num_elements(shape))
    throw Error("matrix size does not match mode-" + std::to_string(n) + " unfolding of " +
                shape_string(shape));
  DenseTensor t(shape);
  auto data = t.data();
  const double* in = m.data();
  for_each_in_order(shape, mode_n_order(shape.size(), n - 1),
                    [&](std::size_t pos, std::size_t off) { data[off] = in[pos]; });
  return t;
}

Matrix unfold_canonical(const DenseTensor& t, std::size_t n) {
  if (t.order() < 2) throw Error("canonical unfolding needs order >= 2");
  check_mode(n, 1, t.order() - 1);
  std::size_t rows = 1;
  for (std::size_t k = 0; k < n; ++k) rows *= t.extent(k);
  // With the first mode fastest, X_[n] is the storage buffer read column-major.
  return Eigen::Map<const Matrix>(t.data().data(), rows, t.size() / rows);
}

DenseTensor fold_canonical(const Matrix& m, std::size_t n, const Shape& shape) {
  check_shape(shape);
  if (shape.size() < 2) throw Error("canonical unfolding needs order >= 2");
  check_mode(n, 1, shape.size() - 1);
  std::size_t rows = 1;
  for (std::size_t k = 0; k < n; ++k) rows *= shape[k];
  if (static_cast<std::size_t>(m.rows()) != rows ||
      static_cast<std::size_t>(m.size()) != num_elements(shape))
    throw Error("matrix size does not match canonical unfolding of " + shape_string(shape));
  return DenseTensor(shape, std::vector<double>(m.data(), m.data() + m.size()));
}

DenseTensor hadamard(const DenseTensor& a, const DenseTensor& b) {
  if (a.shape() != b.shape())
    throw Error("hadamard shape mismatch: " + shape_string(a.shape()) + " vs " +
                shape_string(b.shape()));
  DenseTensor out(a.shape());
  auto o = out.data();
  const auto x = a.data();
  const auto y = b.data();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = x[i] * y[i];
  return out;
}

double squared_norm(const DenseTensor& t) {
  double s = 0.0;
  for (double v : t.data()) s += v * v;
  return s;
}

double frobenius_norm(const DenseTensor& t) { return std::sqrt(squared_norm(t)); }

}  // namespace trsr
