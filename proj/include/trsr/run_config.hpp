#pragma once

// Run configuration file: INI sections with the keys below. Comments go on
// their own line. Paths are relative to the directory holding the config
// file; lists are whitespace separated.
//
//   [run]
//   ; output directory (--out overrides)
//   output = out
//   ; --seed overrides
//   seed = 7
//   ; optional: drop A-scans from full-resolution inputs before reconstruction
//   missing_ratio = 0.5
//   ; png or pgm for written images
//   format = png
//
//   [superres]
//   patches = 15 10 7
//   overlaps = 7 6 4
//   window = 2 2
//   ; one value for all six bonds, or six values
//   initial_rank = 3
//   max_rank = 8
//   rank_step = 1
//   ; super-resolution ratio L (--ratio overrides)
//   ratio = 2
//   weights = 0.2 0.2 0.2 0.2 0.2
//   smoothing = true
//   sweeps = 10
//   tol = 1e-4
//   accuracy = 1e-3
//   rank_noise = 1e-2
//
//   ; optional: rows [begin, end) fused with a reduced weight sum for the listed patch sizes
//   [noise_band]
//   rows = 300 450
//   weight_sum = 0.95
//   patches = 10
//
//   ; optional: rectangles are "row col height width"; keys starting with
//   ; "foreground" are collected in order
//   [roi]
//   background = 0 0 20 40
//   foreground = 100 50 20 20
//   foreground2 = 140 200 20 20
//
//   ; one section per batch item (name starts with "image"), in file order
//   [image.1]
//   name = subject01
//   scans = b1.png b2.png
//   reference = ref.png

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "trsr/metrics.hpp"
#include "trsr/superres.hpp"

namespace trsr {

struct BatchItem {
  std::string name;
  std::vector<std::filesystem::path> scans;
  std::optional<std::filesystem::path> reference;
};

struct RunConfig {
  std::filesystem::path output_dir = "out";
  std::uint64_t seed = 0;
  std::optional<double> missing_ratio;
  std::string image_format = "png";
  SuperResConfig superres;
  std::optional<RoiSpec> roi;
  std::vector<BatchItem> items;
};

/// Parses the INI text; relative paths are resolved against `base_dir`.
/// Referenced input files must exist.
RunConfig parse_run_config(std::istream& in, const std::filesystem::path& base_dir);
RunConfig load_run_config(const std::filesystem::path& path);

/// Parses "row col height width".
Rect parse_rect(const std::string& text);
/// Reads only the [roi] section of a config file.
std::optional<RoiSpec> load_roi(const std::filesystem::path& path);

}  // namespace trsr
