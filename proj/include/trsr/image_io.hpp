#pragma once

#include <filesystem>

#include "trsr/tensor.hpp"

namespace trsr {

/// Grayscale image in its source intensity range.
struct Image {
  Matrix pixels;
  int bit_depth = 8;  // 8 or 16

  double peak() const { return bit_depth == 16 ? 65535.0 : 255.0; }
};

/// PNG (8/16-bit, gray or colour via luma) or binary PGM (P5, maxval <= 65535).
Image load_image(const std::filesystem::path& path);

/// Format chosen from the extension (.png or .pgm); values are rounded and
/// clamped to [0, peak].
void write_image(const std::filesystem::path& path, const Image& image);

/// Rounds and clamps to the integer grid of the bit depth.
Matrix quantize(const Matrix& m, int bit_depth);

}  // namespace trsr
