#pragma once

// Data-parallel kernels behind the tensor-ring fit and the Hankel embedding.
//
// Each kernel has a plain serial version in `kernels::serial` that the tests
// and the benchmark compare against. The OpenMP versions split reductions
// into fixed-size row chunks and sum the partials in chunk order, so their
// results do not depend on the number of threads.

#include <cstddef>
#include <span>
#include <vector>

#include "trsr/tensor.hpp"

namespace trsr::kernels {

/// Rows per reduction chunk. Part of the numerical contract: changing it
/// changes results at the rounding level.
inline constexpr std::size_t kChunkRows = 2048;

/// Core of shape R(n-1) x I x R(n) as its mode-2 unfolding, an
/// I x (R(n-1)*R(n)) matrix whose column b + R(n)*a holds G[a, i, b].
Matrix core_rows(const DenseTensor& core);
DenseTensor core_from_rows(const Matrix& rows, std::size_t left_rank, std::size_t right_rank);

/// Matricized subchain of every core except `skip` (0-based).
///
/// Row j enumerates the multi-index over modes skip+1, ..., N-1, 0, ..., skip-1
/// (first listed fastest, i.e. the column order of unfold_mode_n). Row j is
/// the column-major vectorisation of the R(skip) x R(skip-1) slice product
/// Z_j = G_{skip+1}(i) ... G_{skip-1}(i); column b + R(skip)*a holds Z_j(b, a),
/// so that
///   X_(skip)[i, j] = core_rows(G_skip).row(i) . subchain.row(j).
Matrix subchain(std::span<const DenseTensor> cores, std::size_t skip);

/// A^T A.
Matrix gram(const Matrix& a);
/// A^T B.
Matrix cross(const Matrix& a, const Matrix& b);
/// || X - C * A^T ||_F^2 with X of size C.rows() x A.rows().
double residual_squared(const Matrix& x, const Matrix& c, const Matrix& a);

namespace serial {
Matrix subchain(std::span<const DenseTensor> cores, std::size_t skip);
Matrix gram(const Matrix& a);
Matrix cross(const Matrix& a, const Matrix& b);
double residual_squared(const Matrix& x, const Matrix& c, const Matrix& a);
}  // namespace serial

}  // namespace trsr::kernels
