#include "trsr/kernels.hpp"

#include <algorithm>

namespace trsr::kernels {

namespace {

using Stride = Eigen::OuterStride<>;
using ConstSlice = Eigen::Map<const Matrix, 0, Stride>;

ConstSlice lateral_slice(const DenseTensor& core, std::size_t i) {
  const auto r0 = static_cast<Eigen::Index>(core.extent(0));
  const auto len = static_cast<Eigen::Index>(core.extent(1));
  const auto r1 = static_cast<Eigen::Index>(core.extent(2));
  return ConstSlice(core.data().data() + r0 * static_cast<Eigen::Index>(i), r0, r1, Stride(r0 * len));
}

template <bool Parallel>
Matrix subchain_impl(std::span<const DenseTensor> cores, std::size_t skip) {
  const std::size_t n_cores = cores.size();
  if (skip >= n_cores) throw Error("subchain: core index out of range");
  const auto left = static_cast<Eigen::Index>(cores[skip].extent(0));
  const auto right = static_cast<Eigen::Index>(cores[skip].extent(2));

  if (n_cores == 1) {
    // Empty product: the identity on the closing bond.
    Matrix a(1, left * right);
    for (Eigen::Index c = 0; c < left; ++c)
      for (Eigen::Index b = 0; b < right; ++b) a(0, b + right * c) = (b == c) ? 1.0 : 0.0;
    return a;
  }

  // Partial products stored back to back, each right x (current trailing rank), column-major.
  std::size_t first = (skip + 1) % n_cores;
  auto cur_rank = static_cast<Eigen::Index>(cores[first].extent(2));
  std::size_t count = cores[first].extent(1);
  std::vector<double> prod(count * static_cast<std::size_t>(right * cur_rank));
  for (std::size_t i = 0; i < count; ++i)
    Eigen::Map<Matrix>(prod.data() + i * right * cur_rank, right, cur_rank) = lateral_slice(cores[first], i);

  for (std::size_t step = 2; step < n_cores; ++step) {
    const DenseTensor& core = cores[(skip + step) % n_cores];
    const std::size_t len = core.extent(1);
    const auto next_rank = static_cast<Eigen::Index>(core.extent(2));
    const std::size_t new_count = count * len;
    std::vector<double> next(new_count * static_cast<std::size_t>(right * next_rank));
    const auto total = static_cast<std::ptrdiff_t>(new_count);
#pragma omp parallel for schedule(static) if (Parallel)
    for (std::ptrdiff_t jj = 0; jj < total; ++jj) {
      const auto j = static_cast<std::size_t>(jj);
      const std::size_t old = j % count;
      const std::size_t i = j / count;
      Eigen::Map<const Matrix> lhs(prod.data() + old * right * cur_rank, right, cur_rank);
      Eigen::Map<Matrix>(next.data() + j * right * next_rank, right, next_rank).noalias() =
          lhs * lateral_slice(core, i);
    }
    prod.swap(next);
    count = new_count;
    cur_rank = next_rank;
  }

  // cur_rank == left here; Z_j is right x left, stored column-major.
  Matrix a(static_cast<Eigen::Index>(count), left * right);
  const auto total = static_cast<std::ptrdiff_t>(count);
#pragma omp parallel for schedule(static) if (Parallel)
  for (std::ptrdiff_t j = 0; j < total; ++j) {
    const double* z = prod.data() + static_cast<std::size_t>(j) * right * left;
    for (Eigen::Index k = 0; k < left * right; ++k) a(j, k) = z[k];
  }
  return a;
}

std::size_t chunk_count(Eigen::Index rows) {
  return std::max<std::size_t>(1, (static_cast<std::size_t>(rows) + kChunkRows - 1) / kChunkRows);
}

std::pair<Eigen::Index, Eigen::Index> chunk_range(std::size_t c, Eigen::Index rows) {
  const auto begin = static_cast<Eigen::Index>(c * kChunkRows);
  const auto end = std::min<Eigen::Index>(rows, begin + static_cast<Eigen::Index>(kChunkRows));
  return {begin, end - begin};
}

}  // namespace

Matrix core_rows(const DenseTensor& core) {
  if (core.order() != 3) throw Error("core must be a third-order tensor");
  return unfold_mode_n(core, 2);
}

DenseTensor core_from_rows(const Matrix& rows, std::size_t left_rank, std::size_t right_rank) {
  return fold_mode_n(rows, 2, {left_rank, static_cast<std::size_t>(rows.rows()), right_rank});
}

Matrix subchain(std::span<const DenseTensor> cores, std::size_t skip) {
  return subchain_impl<true>(cores, skip);
}

Matrix gram(const Matrix& a) {
  const std::size_t chunks = chunk_count(a.rows());
  std::vector<Matrix> partial(chunks);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(chunks); ++c) {
    const auto [begin, len] = chunk_range(static_cast<std::size_t>(c), a.rows());
    Matrix g = Matrix::Zero(a.cols(), a.cols());
    g.selfadjointView<Eigen::Lower>().rankUpdate(a.middleRows(begin, len).transpose());
    partial[static_cast<std::size_t>(c)] = g.selfadjointView<Eigen::Lower>();
  }
  Matrix out = Matrix::Zero(a.cols(), a.cols());
  for (const auto& p : partial) out += p;
  return out;
}

Matrix cross(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) throw Error("cross: row count mismatch");
  const std::size_t chunks = chunk_count(a.rows());
  std::vector<Matrix> partial(chunks);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(chunks); ++c) {
    const auto [begin, len] = chunk_range(static_cast<std::size_t>(c), a.rows());
    partial[static_cast<std::size_t>(c)].noalias() =
        a.middleRows(begin, len).transpose() * b.middleRows(begin, len);
  }
  Matrix out = Matrix::Zero(a.cols(), b.cols());
  for (const auto& p : partial) out += p;
  return out;
}

double residual_squared(const Matrix& x, const Matrix& c, const Matrix& a) {
  if (x.rows() != c.rows() || x.cols() != a.rows() || c.cols() != a.cols())
    throw Error("residual_squared: size mismatch");
  const std::size_t chunks = chunk_count(a.rows());
  std::vector<double> partial(chunks, 0.0);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(chunks); ++k) {
    const auto [begin, len] = chunk_range(static_cast<std::size_t>(k), a.rows());
    Matrix diff = x.middleCols(begin, len);
    diff.noalias() -= c * a.middleRows(begin, len).transpose();
    partial[static_cast<std::size_t>(k)] = diff.squaredNorm();
  }
  double sum = 0.0;
  for (double p : partial) sum += p;
  return sum;
}

namespace serial {

Matrix subchain(std::span<const DenseTensor> cores, std::size_t skip) {
  return subchain_impl<false>(cores, skip);
}

Matrix gram(const Matrix& a) { return a.transpose() * a; }

Matrix cross(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) throw Error("cross: row count mismatch");
  return a.transpose() * b;
}

double residual_squared(const Matrix& x, const Matrix& c, const Matrix& a) {
  if (x.rows() != c.rows() || x.cols() != a.rows() || c.cols() != a.cols())
    throw Error("residual_squared: size mismatch");
  return (x - c * a.transpose()).squaredNorm();
}

}  // namespace serial

}  // namespace trsr::kernels
