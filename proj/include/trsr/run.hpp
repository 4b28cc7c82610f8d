#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "trsr/run_config.hpp"
#include "trsr/superres.hpp"

namespace trsr {

struct Subsampled {
  Matrix reduced;  // kept columns only
  Mask mask;       // full width
  /// Set when the ratio has the form 1 - 1/L: every L-th column is kept.
  std::optional<std::size_t> stride;
};

/// Simulated A-scan dropout. Ratios of the form 1 - 1/L (within 0.01) keep
/// columns 0, L, 2L, ...; any other ratio drops a uniformly random subset of
/// round(ratio * width) columns using `seed`.
Subsampled subsample_columns(const Matrix& x, double missing_ratio, std::uint64_t seed);

struct ItemReport {
  std::string name;
  std::optional<std::string> error;
  std::optional<double> psnr_spline, psnr_tr, ssim_spline, ssim_tr;
  std::optional<double> cnr_spline, cnr_tr;
};

struct Report {
  std::uint64_t seed = 0;
  bool has_roi = false;
  std::vector<ItemReport> items;

  /// One row per item in input order, then `mean` and `std` rows (sample
  /// standard deviation over the items that produced a value).
  std::string csv() const;
};

/// Runs the whole batch, writing <name>_tr.<fmt>, <name>_spline.<fmt> and
/// report.csv into the output directory. Item failures are recorded in the
/// report and the batch continues.
Report run(const RunConfig& config);

}  // namespace trsr
