#pragma once

// Overlapped patch Hankelization.
//
// An I1 x I2 matrix is first edge-padded so that (I' - P) is a multiple of
// the patch stride P - O, then its overlapping P x P patches are laid side by
// side into a J1 x J2 matrix (rearrange_overlapped). Along each mode the J/P
// patch blocks are duplicated into K = J/P - T + 1 sliding windows of T
// consecutive blocks, and the result is folded into a sixth-order tensor of
// shape P x P x T1 x K1 x T2 x K2:
//
//   embedded(p1, p2, t1, k1, t2, k2) = XJ((k1 + t1) * P + p1, (k2 + t2) * P + p2)
//
// The inverse averages every duplicate of an XJ entry (dehankelize) and then
// cross-fades the duplicated overlap strips back into I1 x I2 (blend_overlaps).

#include <cstddef>
#include <vector>

#include "trsr/tensor.hpp"

namespace trsr {

struct HankelPlan {
  std::size_t input_rows = 0, input_cols = 0;
  std::size_t patch = 0;
  std::size_t overlap = 0;
  std::size_t window_rows = 1, window_cols = 1;
  std::size_t pad_rows = 0, pad_cols = 0;
  std::size_t blocks_rows = 0, blocks_cols = 0;  // J / P
  std::size_t j_rows = 0, j_cols = 0;            // J1, J2
  std::size_t windows_rows = 0, windows_cols = 0;  // K = J/P - T + 1
  std::size_t dup_rows = 0, dup_cols = 0;        // D = P * T * K, rows of the duplication matrix

  std::size_t stride() const { return patch - overlap; }
  std::size_t padded_rows() const { return input_rows + pad_rows; }
  std::size_t padded_cols() const { return input_cols + pad_cols; }
  Shape embedded_shape() const;
};

HankelPlan make_plan(std::size_t rows, std::size_t cols, std::size_t patch, std::size_t overlap,
                     std::size_t window_rows, std::size_t window_cols);

/// Cross-fade weights for one overlap strip, u = 1..O: (O - u) / (O - 1),
/// or a single 1/2 when O == 1.
std::vector<double> blend_weights(std::size_t overlap);

Matrix rearrange_overlapped(const Matrix& x, const HankelPlan& plan);
DenseTensor patch_hankelize(const Matrix& xj, const HankelPlan& plan);
Matrix dehankelize(const DenseTensor& t, const HankelPlan& plan);
Matrix blend_overlaps(const Matrix& xj, const HankelPlan& plan);

/// rearrange_overlapped followed by patch_hankelize.
DenseTensor embed(const Matrix& x, const HankelPlan& plan);
/// dehankelize followed by blend_overlaps.
Matrix unembed(const DenseTensor& t, const HankelPlan& plan);

/// Explicit patch duplication matrix S_H of size (P*T*K) x J for one mode.
/// Used by tests to check the index-map implementation.
Matrix duplication_matrix(std::size_t j, std::size_t patch, std::size_t window);

namespace kernels::serial {
DenseTensor patch_hankelize(const Matrix& xj, const HankelPlan& plan);
Matrix dehankelize(const DenseTensor& t, const HankelPlan& plan);
}  // namespace kernels::serial

}  // namespace trsr
