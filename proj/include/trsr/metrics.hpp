#pragma once

#include <cstddef>
#include <vector>

#include "trsr/tensor.hpp"

namespace trsr {

/// Axis-aligned rectangle, 0-based top-left corner.
struct Rect {
  std::size_t row = 0, col = 0, height = 0, width = 0;
};

struct RoiSpec {
  std::vector<Rect> foreground;
  Rect background;
};

/// 10 log10(peak^2 / MSE); +infinity when the images are identical.
double psnr(const Matrix& reference, const Matrix& test, double peak);

/// Mean squared error.
double mse(const Matrix& reference, const Matrix& test);

/// SSIM with a square uniform window slid at stride 1 and the usual
/// stabilisers C1 = (k1 L)^2, C2 = (k2 L)^2 with L = peak. Window
/// statistics use population (1/N) moments.
struct SsimParams {
  std::size_t window = 8;
  double k1 = 0.01;
  double k2 = 0.03;
  double peak = 1.0;
};

double ssim(const Matrix& reference, const Matrix& test, const SsimParams& params = {});

/// |mu_f - mu_b| / sqrt((sigma_f^2 + sigma_b^2) / 2), population sigma,
/// averaged over the foreground rectangles against the one background.
double cnr(const Matrix& image, const RoiSpec& roi);

}  // namespace trsr
