#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "trsr/hankel.hpp"
#include "trsr/tensor.hpp"
#include "trsr/tensor_ring.hpp"

namespace trsr {

/// Observed-column indicator of a B-scan: whole A-scans (columns) are
/// either observed (1) or missing (0).
class Mask {
 public:
  Mask(std::size_t rows, std::vector<bool> observed_columns);
  static Mask all_observed(std::size_t rows, std::size_t cols);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return columns_.size(); }
  bool observed(std::size_t col) const { return columns_[col]; }
  const std::vector<bool>& columns() const { return columns_; }
  std::vector<std::size_t> observed_indices() const;
  std::size_t observed_count() const;
  /// Dense 0/1 matrix.
  Matrix matrix() const;

 private:
  std::size_t rows_;
  std::vector<bool> columns_;
};

struct PatchSetting {
  std::size_t patch = 7;
  std::size_t overlap = 4;
};

/// Reduced B-scan weight sum for a band of rows, applied to selected patch
/// sizes only.
struct NoiseBand {
  std::size_t row_begin = 0;
  std::size_t row_end = 0;  // exclusive
  double weight_sum = 0.95;
  std::vector<std::size_t> patches;
};

struct SuperResConfig {
  std::vector<PatchSetting> patches{{7, 4}};
  std::size_t window_rows = 2;
  std::size_t window_cols = 2;
  RankSchedule ranks{{3, 3, 3, 3, 3, 3}, 8, 1};
  std::size_t ratio = 2;
  std::vector<double> weights{1.0};
  std::optional<NoiseBand> noise_band;
  bool smoothing = true;
  AlsOptions als{};
  /// Stop the rank loop once the masked relative residual drops below this.
  double accuracy = 1e-3;
  /// Amplitude of new rank slabs relative to the core RMS.
  double rank_noise = 1e-2;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Weighted sum of equally sized B-scans.
Matrix fuse_bscans(const std::vector<Matrix>& scans, const std::vector<double>& weights);

struct SplineInit {
  Matrix x;
  Mask mask;
  bool linear_fallback = false;
};

/// Places the captured columns at stride `ratio` (first at column 0) in a
/// matrix `width` columns wide (default ratio * cols) and fills the others
/// by per-row cubic spline.
SplineInit spline_init(const Matrix& low_res, std::size_t ratio, std::size_t width = 0);

/// Fills every column of `x` not marked observed by per-row spline through
/// the observed ones. Observed columns are copied unchanged.
SplineInit interpolate_missing(const Matrix& x, const Mask& mask);

/// Replaces each entry at a missing column by the mean of its existing
/// 8-neighbours (one simultaneous pass); observed entries are untouched.
Matrix smooth_estimated(const Matrix& x, const Mask& mask);

struct RankLevelLog {
  std::size_t rank = 0;  // max rank at this level
  std::size_t sweeps = 0;
  std::vector<double> objective;  // per ALS sweep
  double masked_residual = 0.0;
};

struct PatchRunResult {
  Matrix output;
  std::vector<RankLevelLog> levels;
};

struct PatchRunOptions {
  PatchSetting setting;
  std::size_t window_rows = 2;
  std::size_t window_cols = 2;
  RankSchedule ranks{{3, 3, 3, 3, 3, 3}, 8, 1};
  AlsOptions als{};
  double accuracy = 1e-3;
  double rank_noise = 1e-2;
  bool smoothing = true;
  std::uint64_t seed = 0;
};

/// Masked tensor-ring completion in the embedded space for one patch size,
/// growing ranks from the schedule's initial vector up to its maximum.
/// Returns the last updated image, which equals `x0` on observed columns.
PatchRunResult superres_single_patch(const Matrix& x0, const Mask& mask, const PatchRunOptions& options);

struct PipelineResult {
  Matrix output;
  /// Spline initialisation of the fused scan (the baseline).
  Matrix spline;
  Mask mask;
  bool linear_fallback = false;
  /// Fused input on the output grid, per patch (differs only with a noise band).
  std::vector<Matrix> observed;
  std::vector<PatchRunResult> patches;
};

/// Fuse, spline-initialise, smooth, complete once per patch setting and
/// average the per-patch results.
PipelineResult superres_pipeline(const std::vector<Matrix>& scans, const SuperResConfig& config,
                                 std::size_t width = 0);

/// Same as superres_pipeline but for a full-width fused image whose missing
/// columns are given by `mask` (their content is ignored).
PipelineResult superres_masked(const Matrix& fused, const Mask& mask, const SuperResConfig& config);

}  // namespace trsr
