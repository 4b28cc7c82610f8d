#include "trsr/metrics.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace trsr {

namespace {

void check_same_size(const Matrix& a, const Matrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw Error(std::string(what) + ": image sizes differ (" + std::to_string(a.rows()) + "x" +
                std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()) + ")");
}

struct Moments {
  double mean;
  double variance;
};

Moments region_moments(const Matrix& image, const Rect& r) {
  if (r.height == 0 || r.width == 0) throw Error("ROI must be non-empty");
  if (r.row + r.height > static_cast<std::size_t>(image.rows()) ||
      r.col + r.width > static_cast<std::size_t>(image.cols()))
    throw Error("ROI lies outside the image");
  const auto block = image.block(static_cast<Eigen::Index>(r.row), static_cast<Eigen::Index>(r.col),
                                 static_cast<Eigen::Index>(r.height), static_cast<Eigen::Index>(r.width));
  const double n = static_cast<double>(block.size());
  const double mean = block.sum() / n;
  const double variance = (block.array() - mean).square().sum() / n;
  return {mean, variance};
}

}  // namespace

double mse(const Matrix& reference, const Matrix& test) {
  check_same_size(reference, test, "mse");
  return (reference - test).squaredNorm() / static_cast<double>(reference.size());
}

double psnr(const Matrix& reference, const Matrix& test, double peak) {
  if (!(peak > 0.0)) throw Error("psnr: peak must be positive");
  const double e = mse(reference, test);
  if (e == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(peak * peak / e);
}

double ssim(const Matrix& reference, const Matrix& test, const SsimParams& params) {
  check_same_size(reference, test, "ssim");
  const auto w = static_cast<Eigen::Index>(params.window);
  if (w == 0) throw Error("ssim: window must be positive");
  if (reference.rows() < w || reference.cols() < w)
    throw Error("ssim: image smaller than the " + std::to_string(w) + "x" + std::to_string(w) + " window");
  const double c1 = std::pow(params.k1 * params.peak, 2);
  const double c2 = std::pow(params.k2 * params.peak, 2);
  const double n = static_cast<double>(w * w);

  double total = 0.0;
  const Eigen::Index rows = reference.rows() - w + 1, cols = reference.cols() - w + 1;
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r) {
      const auto x = reference.block(r, c, w, w).array();
      const auto y = test.block(r, c, w, w).array();
      const double mx = x.sum() / n, my = y.sum() / n;
      const double vx = (x - mx).square().sum() / n;
      const double vy = (y - my).square().sum() / n;
      const double cov = ((x - mx) * (y - my)).sum() / n;
      total += ((2 * mx * my + c1) * (2 * cov + c2)) / ((mx * mx + my * my + c1) * (vx + vy + c2));
    }
  return total / static_cast<double>(rows * cols);
}

double cnr(const Matrix& image, const RoiSpec& roi) {
  if (roi.foreground.empty()) throw Error("cnr: at least one foreground ROI is required");
  const Moments bg = region_moments(image, roi.background);
  double sum = 0.0;
  for (const Rect& r : roi.foreground) {
    const Moments fg = region_moments(image, r);
    const double denom = std::sqrt(0.5 * (fg.variance + bg.variance));
    if (denom == 0.0) throw Error("cnr: foreground and background are both constant");
    sum += std::abs(fg.mean - bg.mean) / denom;
  }
  return sum / static_cast<double>(roi.foreground.size());
}

}  // namespace trsr
