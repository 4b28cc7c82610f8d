#include "trsr/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

namespace trsr {

namespace {

std::string lower_extension(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext;
}

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using File = std::unique_ptr<std::FILE, FileCloser>;

File open_file(const std::filesystem::path& path, const char* mode) {
  File f(std::fopen(path.c_str(), mode));
  if (!f) throw Error("cannot open " + path.string());
  return f;
}

// PGM header tokens, skipping comments.
std::string next_token(std::istream& in) {
  std::string tok;
  while (in) {
    const int c = in.get();
    if (c == '#') {
      std::string dummy;
      std::getline(in, dummy);
      continue;
    }
    if (std::isspace(c)) {
      if (!tok.empty()) break;
      continue;
    }
    if (c == EOF) break;
    tok.push_back(static_cast<char>(c));
  }
  return tok;
}

Image load_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  if (next_token(in) != "P5") throw Error(path.string() + ": only binary PGM (P5) is supported");
  long width = 0, height = 0, maxval = 0;
  try {
    width = std::stol(next_token(in));
    height = std::stol(next_token(in));
    maxval = std::stol(next_token(in));
  } catch (const std::exception&) {
    throw Error(path.string() + ": malformed PGM header");
  }
  if (width <= 0 || height <= 0 || maxval <= 0 || maxval > 65535) throw Error(path.string() + ": bad PGM header");
  const int bytes = maxval > 255 ? 2 : 1;
  std::vector<unsigned char> buf(static_cast<std::size_t>(width * height * bytes));
  in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (in.gcount() != static_cast<std::streamsize>(buf.size())) throw Error(path.string() + ": truncated PGM data");

  Image img;
  img.bit_depth = bytes == 2 ? 16 : 8;
  img.pixels.resize(height, width);
  for (long r = 0; r < height; ++r)
    for (long c = 0; c < width; ++c) {
      const std::size_t i = static_cast<std::size_t>(r * width + c) * bytes;
      img.pixels(r, c) = bytes == 2 ? buf[i] * 256.0 + buf[i + 1] : buf[i];
    }
  return img;
}

void write_pgm(const std::filesystem::path& path, const Image& image) {
  const Matrix q = quantize(image.pixels, image.bit_depth);
  const int bytes = image.bit_depth == 16 ? 2 : 1;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << "P5\n" << q.cols() << ' ' << q.rows() << '\n' << (bytes == 2 ? 65535 : 255) << '\n';
  std::vector<unsigned char> buf(static_cast<std::size_t>(q.size() * bytes));
  std::size_t i = 0;
  for (Eigen::Index r = 0; r < q.rows(); ++r)
    for (Eigen::Index c = 0; c < q.cols(); ++c) {
      const auto v = static_cast<unsigned>(q(r, c));
      if (bytes == 2) buf[i++] = static_cast<unsigned char>(v >> 8);
      buf[i++] = static_cast<unsigned char>(v & 0xff);
    }
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (!out) throw Error("failed writing " + path.string());
}

Image load_png(const std::filesystem::path& path) {
  File f = open_file(path, "rb");
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw Error("libpng initialisation failed");
  png_infop info = png_create_info_struct(png);
  if (!info || setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error(path.string() + ": unreadable PNG");
  }
  png_init_io(png, f.get());
  png_read_info(png, info);
  const int color = png_get_color_type(png, info);
  const int depth = png_get_bit_depth(png, info);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  png_set_strip_alpha(png);
  if (depth == 16) png_set_swap(png);  // host (little-endian) order for 16-bit reads
  png_read_update_info(png, info);

  const png_uint_32 width = png_get_image_width(png, info);
  const png_uint_32 height = png_get_image_height(png, info);
  const int channels = png_get_channels(png, info);
  const int out_depth = png_get_bit_depth(png, info);
  const std::size_t rowbytes = png_get_rowbytes(png, info);
  std::vector<unsigned char> data(rowbytes * height);
  std::vector<png_bytep> rows(height);
  for (png_uint_32 r = 0; r < height; ++r) rows[r] = data.data() + r * rowbytes;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  Image img;
  img.bit_depth = out_depth == 16 ? 16 : 8;
  img.pixels.resize(height, width);
  for (png_uint_32 r = 0; r < height; ++r)
    for (png_uint_32 c = 0; c < width; ++c) {
      auto sample = [&](int ch) -> double {
        if (out_depth == 16) {
          const unsigned char* p = rows[r] + 2 * (static_cast<std::size_t>(c) * channels + ch);
          return p[0] + 256.0 * p[1];
        }
        return rows[r][static_cast<std::size_t>(c) * channels + ch];
      };
      // Rec. 601 luma for colour input.
      img.pixels(r, c) = channels >= 3 ? 0.299 * sample(0) + 0.587 * sample(1) + 0.114 * sample(2) : sample(0);
    }
  return img;
}

void write_png(const std::filesystem::path& path, const Image& image) {
  const Matrix q = quantize(image.pixels, image.bit_depth);
  File f = open_file(path, "wb");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw Error("libpng initialisation failed");
  png_infop info = png_create_info_struct(png);
  if (!info || setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error("failed writing " + path.string());
  }
  png_init_io(png, f.get());
  const auto width = static_cast<png_uint_32>(q.cols());
  const auto height = static_cast<png_uint_32>(q.rows());
  png_set_IHDR(png, info, width, height, image.bit_depth, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  const int bytes = image.bit_depth == 16 ? 2 : 1;
  std::vector<unsigned char> row(static_cast<std::size_t>(width) * bytes);
  for (png_uint_32 r = 0; r < height; ++r) {
    for (png_uint_32 c = 0; c < width; ++c) {
      const auto v = static_cast<unsigned>(q(r, c));
      if (bytes == 2) {
        row[2 * c] = static_cast<unsigned char>(v >> 8);  // PNG is big-endian
        row[2 * c + 1] = static_cast<unsigned char>(v & 0xff);
      } else {
        row[c] = static_cast<unsigned char>(v);
      }
    }
    png_write_row(png, row.data());
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

}  // namespace

Matrix quantize(const Matrix& m, int bit_depth) {
  const double peak = bit_depth == 16 ? 65535.0 : 255.0;
  return m.unaryExpr([peak](double v) { return std::clamp(std::round(v), 0.0, peak); });
}

Image load_image(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw Error("no such file: " + path.string());
  const std::string ext = lower_extension(path);
  if (ext == ".png") return load_png(path);
  if (ext == ".pgm") return load_pgm(path);
  throw Error(path.string() + ": unsupported image format (expected .png or .pgm)");
}

void write_image(const std::filesystem::path& path, const Image& image) {
  if (image.bit_depth != 8 && image.bit_depth != 16) throw Error("bit depth must be 8 or 16");
  const std::string ext = lower_extension(path);
  if (ext == ".png") return write_png(path, image);
  if (ext == ".pgm") return write_pgm(path, image);
  throw Error(path.string() + ": unsupported image format (expected .png or .pgm)");
}

}  // namespace trsr
