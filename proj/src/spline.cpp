#include "trsr/spline.hpp"

#include <algorithm>

namespace trsr {

namespace {

std::size_t segment_of(std::span<const double> knots, double x) {
  const auto it = std::upper_bound(knots.begin(), knots.end(), x);
  const auto i = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, it - knots.begin() - 1));
  return std::min(i, knots.size() - 2);
}

InterpolationOperator linear_operator(std::span<const double> knots, std::span<const double> queries) {
  InterpolationOperator op;
  op.linear = true;
  op.weights = Matrix::Zero(static_cast<Eigen::Index>(queries.size()), static_cast<Eigen::Index>(knots.size()));
  for (std::size_t q = 0; q < queries.size(); ++q) {
    const auto row = static_cast<Eigen::Index>(q);
    if (knots.size() == 1) {
      op.weights(row, 0) = 1.0;
      continue;
    }
    const std::size_t i = segment_of(knots, queries[q]);
    const double s = (queries[q] - knots[i]) / (knots[i + 1] - knots[i]);
    op.weights(row, static_cast<Eigen::Index>(i)) = 1.0 - s;
    op.weights(row, static_cast<Eigen::Index>(i + 1)) = s;
  }
  return op;
}

}  // namespace

InterpolationOperator interpolation_operator(std::span<const double> knots, std::span<const double> queries) {
  if (knots.empty()) throw Error("interpolation needs at least one knot");
  for (std::size_t i = 1; i < knots.size(); ++i)
    if (!(knots[i] > knots[i - 1])) throw Error("interpolation knots must be strictly increasing");
  const std::size_t n = knots.size();
  if (n < 4) return linear_operator(knots, queries);

  const auto N = static_cast<Eigen::Index>(n);
  std::vector<double> h(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) h[i] = knots[i + 1] - knots[i];

  // Second derivatives m solve A m = D y.
  Matrix a = Matrix::Zero(N, N);
  Matrix d = Matrix::Zero(N, N);
  // Not-a-knot: third derivative continuous across the second and the
  // second-to-last knot.
  a(0, 0) = -h[1];
  a(0, 1) = h[0] + h[1];
  a(0, 2) = -h[0];
  a(N - 1, N - 3) = -h[n - 2];
  a(N - 1, N - 2) = h[n - 3] + h[n - 2];
  a(N - 1, N - 1) = -h[n - 3];
  for (Eigen::Index i = 1; i + 1 < N; ++i) {
    const double hl = h[static_cast<std::size_t>(i - 1)], hr = h[static_cast<std::size_t>(i)];
    a(i, i - 1) = hl;
    a(i, i) = 2.0 * (hl + hr);
    a(i, i + 1) = hr;
    d(i, i - 1) = 6.0 / hl;
    d(i, i) = -6.0 / hl - 6.0 / hr;
    d(i, i + 1) = 6.0 / hr;
  }
  const Matrix m_of_y = a.partialPivLu().solve(d);

  InterpolationOperator op;
  op.weights = Matrix::Zero(static_cast<Eigen::Index>(queries.size()), N);
  for (std::size_t q = 0; q < queries.size(); ++q) {
    const std::size_t i = segment_of(knots, queries[q]);
    const double hi = h[i];
    const double l = knots[i + 1] - queries[q];
    const double r = queries[q] - knots[i];
    // S = m_i l^3/(6h) + m_{i+1} r^3/(6h) + (y_i/h - m_i h/6) l + (y_{i+1}/h - m_{i+1} h/6) r
    const double cm0 = l * l * l / (6.0 * hi) - hi * l / 6.0;
    const double cm1 = r * r * r / (6.0 * hi) - hi * r / 6.0;
    auto row = op.weights.row(static_cast<Eigen::Index>(q));
    row += cm0 * m_of_y.row(static_cast<Eigen::Index>(i)) + cm1 * m_of_y.row(static_cast<Eigen::Index>(i + 1));
    row(static_cast<Eigen::Index>(i)) += l / hi;
    row(static_cast<Eigen::Index>(i + 1)) += r / hi;
  }
  return op;
}

}  // namespace trsr
