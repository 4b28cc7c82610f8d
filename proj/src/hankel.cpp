#include "trsr/hankel.hpp"

#include <algorithm>
#include <string>

namespace trsr {

namespace {

struct ModeGeometry {
  std::size_t pad, blocks, j, windows, dup;
};

ModeGeometry mode_geometry(std::size_t extent, std::size_t patch, std::size_t overlap, std::size_t window,
                           const char* name) {
  const std::size_t stride = patch - overlap;
  const std::size_t rem = (extent - patch) % stride;
  ModeGeometry g{};
  g.pad = rem ? stride - rem : 0;
  g.blocks = (extent + g.pad - patch) / stride + 1;
  g.j = patch * g.blocks;
  if (g.blocks < window)
    throw Error(std::string("infeasible window along ") + name + ": " + std::to_string(g.blocks) +
                " patches cannot hold a window of " + std::to_string(window));
  g.windows = g.blocks - window + 1;
  g.dup = patch * window * g.windows;
  return g;
}

void check_matrix(const Matrix& m, std::size_t rows, std::size_t cols, const char* what) {
  if (static_cast<std::size_t>(m.rows()) != rows || static_cast<std::size_t>(m.cols()) != cols)
    throw Error(std::string(what) + ": expected " + std::to_string(rows) + "x" + std::to_string(cols) +
                " matrix, got " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
}

void check_embedded(const DenseTensor& t, const HankelPlan& plan) {
  if (t.shape() != plan.embedded_shape())
    throw Error("embedded tensor shape " + shape_string(t.shape()) + " does not match plan " +
                shape_string(plan.embedded_shape()));
}

// Number of (t, k) window positions that duplicate patch block b.
std::size_t copies_of_block(std::size_t b, std::size_t window, std::size_t windows) {
  std::size_t n = 0;
  for (std::size_t t = 0; t < window; ++t)
    if (b >= t && b - t < windows) ++n;
  return n;
}

template <bool Parallel>
DenseTensor hankelize_impl(const Matrix& xj, const HankelPlan& plan) {
  check_matrix(xj, plan.j_rows, plan.j_cols, "patch_hankelize");
  const std::size_t P = plan.patch;
  const std::size_t T1 = plan.window_rows, K1 = plan.windows_rows;
  const std::size_t T2 = plan.window_cols, K2 = plan.windows_cols;
  DenseTensor out(plan.embedded_shape());
  double* dst = out.data().data();
  const auto outer = static_cast<std::ptrdiff_t>(T2 * K2);
#pragma omp parallel for schedule(static) if (Parallel)
  for (std::ptrdiff_t oo = 0; oo < outer; ++oo) {
    const auto o = static_cast<std::size_t>(oo);
    const std::size_t t2 = o % T2, k2 = o / T2;
    const std::size_t col0 = (k2 + t2) * P;
    std::size_t off = o * P * P * T1 * K1;
    for (std::size_t k1 = 0; k1 < K1; ++k1)
      for (std::size_t t1 = 0; t1 < T1; ++t1) {
        const std::size_t row0 = (k1 + t1) * P;
        for (std::size_t p2 = 0; p2 < P; ++p2)
          for (std::size_t p1 = 0; p1 < P; ++p1) dst[off++] = xj(row0 + p1, col0 + p2);
      }
  }
  return out;
}

// Cross-fade duplicated strips along the columns: J-wide input, padded-width output.
Matrix blend_columns(const Matrix& xj, std::size_t patch, std::size_t overlap, std::size_t blocks,
                     std::size_t out_cols) {
  const std::size_t stride = patch - overlap;
  Matrix y(xj.rows(), static_cast<Eigen::Index>(out_cols));
  for (std::size_t c = 0; c < out_cols; ++c) {
    const std::size_t b = std::min(c / stride, blocks - 1);
    y.col(static_cast<Eigen::Index>(c)) = xj.col(static_cast<Eigen::Index>(b * patch + c - b * stride));
  }
  const auto w = blend_weights(overlap);
  for (std::size_t b = 1; b < blocks; ++b)
    for (std::size_t u = 0; u < overlap; ++u) {
      const auto left = static_cast<Eigen::Index>((b - 1) * patch + stride + u);
      const auto right = static_cast<Eigen::Index>(b * patch + u);
      // w * left + (1 - w) * right, written so identical copies pass through exactly.
      y.col(static_cast<Eigen::Index>(b * stride + u)) = xj.col(right) + w[u] * (xj.col(left) - xj.col(right));
    }
  return y;
}

}  // namespace

Shape HankelPlan::embedded_shape() const {
  return {patch, patch, window_rows, windows_rows, window_cols, windows_cols};
}

HankelPlan make_plan(std::size_t rows, std::size_t cols, std::size_t patch, std::size_t overlap,
                     std::size_t window_rows, std::size_t window_cols) {
  if (patch == 0) throw Error("patch size must be positive");
  if (overlap >= patch)
    throw Error("overlap " + std::to_string(overlap) + " must be smaller than patch " + std::to_string(patch));
  if (window_rows == 0 || window_cols == 0) throw Error("window sizes must be positive");
  if (patch > std::min(rows, cols))
    throw Error("patch " + std::to_string(patch) + " larger than image " + std::to_string(rows) + "x" +
                std::to_string(cols));
  HankelPlan p;
  p.input_rows = rows;
  p.input_cols = cols;
  p.patch = patch;
  p.overlap = overlap;
  p.window_rows = window_rows;
  p.window_cols = window_cols;
  const auto r = mode_geometry(rows, patch, overlap, window_rows, "rows");
  const auto c = mode_geometry(cols, patch, overlap, window_cols, "columns");
  p.pad_rows = r.pad;
  p.pad_cols = c.pad;
  p.blocks_rows = r.blocks;
  p.blocks_cols = c.blocks;
  p.j_rows = r.j;
  p.j_cols = c.j;
  p.windows_rows = r.windows;
  p.windows_cols = c.windows;
  p.dup_rows = r.dup;
  p.dup_cols = c.dup;
  return p;
}

std::vector<double> blend_weights(std::size_t overlap) {
  if (overlap == 0) return {};
  if (overlap == 1) return {0.5};
  std::vector<double> w(overlap);
  for (std::size_t u = 1; u <= overlap; ++u)
    w[u - 1] = static_cast<double>(overlap - u) / static_cast<double>(overlap - 1);
  return w;
}

Matrix rearrange_overlapped(const Matrix& x, const HankelPlan& plan) {
  check_matrix(x, plan.input_rows, plan.input_cols, "rearrange_overlapped");
  const std::size_t P = plan.patch, s = plan.stride();
  const auto last_row = static_cast<std::size_t>(x.rows() - 1);
  const auto last_col = static_cast<std::size_t>(x.cols() - 1);
  Matrix xj(static_cast<Eigen::Index>(plan.j_rows), static_cast<Eigen::Index>(plan.j_cols));
  for (std::size_t l = 0; l < plan.blocks_cols; ++l)
    for (std::size_t q = 0; q < P; ++q) {
      // Edge replication past the last row/column.
      const auto src_col = static_cast<Eigen::Index>(std::min(l * s + q, last_col));
      const auto dst_col = static_cast<Eigen::Index>(l * P + q);
      for (std::size_t k = 0; k < plan.blocks_rows; ++k)
        for (std::size_t p = 0; p < P; ++p)
          xj(static_cast<Eigen::Index>(k * P + p), dst_col) =
              x(static_cast<Eigen::Index>(std::min(k * s + p, last_row)), src_col);
    }
  return xj;
}

DenseTensor patch_hankelize(const Matrix& xj, const HankelPlan& plan) { return hankelize_impl<true>(xj, plan); }

Matrix dehankelize(const DenseTensor& t, const HankelPlan& plan) {
  check_embedded(t, plan);
  const std::size_t P = plan.patch;
  const std::size_t T1 = plan.window_rows, K1 = plan.windows_rows;
  const std::size_t T2 = plan.window_cols, K2 = plan.windows_cols;
  const double* src = t.data().data();
  Matrix xj(static_cast<Eigen::Index>(plan.j_rows), static_cast<Eigen::Index>(plan.j_cols));
  const auto col_blocks = static_cast<std::ptrdiff_t>(plan.blocks_cols);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t bb2 = 0; bb2 < col_blocks; ++bb2) {
    const auto b2 = static_cast<std::size_t>(bb2);
    const double n2 = static_cast<double>(copies_of_block(b2, T2, K2));
    for (std::size_t b1 = 0; b1 < plan.blocks_rows; ++b1) {
      const double n = n2 * static_cast<double>(copies_of_block(b1, T1, K1));
      for (std::size_t p2 = 0; p2 < P; ++p2)
        for (std::size_t p1 = 0; p1 < P; ++p1) {
          // Mean as first copy plus mean deviation: exact when all copies agree.
          bool have_first = false;
          double first = 0.0, dev = 0.0;
          for (std::size_t t2 = 0; t2 < T2; ++t2) {
            if (b2 < t2 || b2 - t2 >= K2) continue;
            const std::size_t k2 = b2 - t2;
            for (std::size_t t1 = 0; t1 < T1; ++t1) {
              if (b1 < t1 || b1 - t1 >= K1) continue;
              const std::size_t k1 = b1 - t1;
              const double v = src[p1 + P * (p2 + P * (t1 + T1 * (k1 + K1 * (t2 + T2 * k2))))];
              if (!have_first) {
                first = v;
                have_first = true;
              } else {
                dev += v - first;
              }
            }
          }
          xj(static_cast<Eigen::Index>(b1 * P + p1), static_cast<Eigen::Index>(b2 * P + p2)) = first + dev / n;
        }
    }
  }
  return xj;
}

Matrix blend_overlaps(const Matrix& xj, const HankelPlan& plan) {
  check_matrix(xj, plan.j_rows, plan.j_cols, "blend_overlaps");
  const Matrix cols = blend_columns(xj, plan.patch, plan.overlap, plan.blocks_cols, plan.padded_cols());
  const Matrix rows =
      blend_columns(cols.transpose(), plan.patch, plan.overlap, plan.blocks_rows, plan.padded_rows()).transpose();
  return rows.topLeftCorner(static_cast<Eigen::Index>(plan.input_rows), static_cast<Eigen::Index>(plan.input_cols));
}

DenseTensor embed(const Matrix& x, const HankelPlan& plan) {
  return patch_hankelize(rearrange_overlapped(x, plan), plan);
}

Matrix unembed(const DenseTensor& t, const HankelPlan& plan) { return blend_overlaps(dehankelize(t, plan), plan); }

Matrix duplication_matrix(std::size_t j, std::size_t patch, std::size_t window) {
  if (patch == 0 || j % patch != 0) throw Error("duplication_matrix: J must be a multiple of P");
  const std::size_t blocks = j / patch;
  if (blocks < window) throw Error("duplication_matrix: window larger than block count");
  const std::size_t windows = blocks - window + 1;
  Matrix s = Matrix::Zero(static_cast<Eigen::Index>(patch * window * windows), static_cast<Eigen::Index>(j));
  for (std::size_t k = 0; k < windows; ++k)
    for (std::size_t t = 0; t < window; ++t)
      for (std::size_t p = 0; p < patch; ++p)
        s(static_cast<Eigen::Index>(p + patch * (t + window * k)), static_cast<Eigen::Index>((k + t) * patch + p)) =
            1.0;
  return s;
}

namespace kernels::serial {

DenseTensor patch_hankelize(const Matrix& xj, const HankelPlan& plan) { return hankelize_impl<false>(xj, plan); }

// Scatter-add formulation, independent of the gather used by the parallel path.
Matrix dehankelize(const DenseTensor& t, const HankelPlan& plan) {
  check_embedded(t, plan);
  const std::size_t P = plan.patch;
  const std::size_t T1 = plan.window_rows, K1 = plan.windows_rows;
  const std::size_t T2 = plan.window_cols, K2 = plan.windows_cols;
  Matrix sum = Matrix::Zero(static_cast<Eigen::Index>(plan.j_rows), static_cast<Eigen::Index>(plan.j_cols));
  Matrix count = Matrix::Zero(sum.rows(), sum.cols());
  std::size_t off = 0;
  for (std::size_t k2 = 0; k2 < K2; ++k2)
    for (std::size_t t2 = 0; t2 < T2; ++t2)
      for (std::size_t k1 = 0; k1 < K1; ++k1)
        for (std::size_t t1 = 0; t1 < T1; ++t1)
          for (std::size_t p2 = 0; p2 < P; ++p2)
            for (std::size_t p1 = 0; p1 < P; ++p1) {
              const auto r = static_cast<Eigen::Index>((k1 + t1) * P + p1);
              const auto c = static_cast<Eigen::Index>((k2 + t2) * P + p2);
              sum(r, c) += t[off++];
              count(r, c) += 1.0;
            }
  return sum.cwiseQuotient(count);
}

}  // namespace kernels::serial

}  // namespace trsr
