#include <doctest.h>

#include <fstream>
#include <sstream>

#include "test_util.hpp"
#include "trsr/image_io.hpp"
#include "trsr/run.hpp"
#include "trsr/run_config.hpp"
#include "trsr/tensor_io.hpp"

using namespace trsr;
using testutil::TempDir;
namespace fs = std::filesystem;

namespace {

void write_bytes(const fs::path& p, const std::string& bytes) {
  std::ofstream out(p, std::ios::binary);
  out << bytes;
}

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

Matrix random_image(Eigen::Index rows, Eigen::Index cols, double peak, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> d(0, static_cast<int>(peak));
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = d(rng);
  return m;
}

const char* kSmallConfig = R"([run]
output = out
seed = 5
format = pgm

[superres]
patches = 5
overlaps = 2
initial_rank = 2
max_rank = 2
sweeps = 2
weights = 1
)";

}  // namespace

TEST_SUITE("io") {
  TEST_CASE("binary PGM fixture") {
    TempDir dir("pgm");
    const fs::path p = dir.path() / "tiny.pgm";
    write_bytes(p, std::string("P5\n# comment\n2 2\n255\n") + std::string("\x00\x55\xaa\xff", 4));
    const Image img = load_image(p);
    CHECK(img.bit_depth == 8);
    Matrix expect(2, 2);
    expect << 0, 85, 170, 255;
    CHECK(img.pixels == expect);
  }

  TEST_CASE("image round trips") {
    TempDir dir("img");
    std::mt19937_64 rng(1);
    for (int depth : {8, 16}) {
      const double peak = depth == 16 ? 65535.0 : 255.0;
      const Matrix m = random_image(7, 11, peak, rng);
      for (const char* ext : {".pgm", ".png"}) {
        const fs::path p = dir.path() / ("x" + std::to_string(depth) + ext);
        write_image(p, Image{m, depth});
        const Image back = load_image(p);
        CHECK(back.bit_depth == depth);
        CHECK(back.pixels == m);
      }
    }
    CHECK_THROWS_AS(load_image(dir.path() / "missing.png"), Error);
    write_bytes(dir.path() / "bad.png", "not a png");
    CHECK_THROWS_AS(load_image(dir.path() / "bad.png"), Error);
    CHECK_THROWS_AS(write_image(dir.path() / "x.bmp", Image{Matrix::Zero(2, 2), 8}), Error);
  }

  TEST_CASE("quantize rounds and clamps") {
    Matrix m(1, 4);
    m << -3.0, 1.4, 1.6, 300.0;
    Matrix expect(1, 4);
    expect << 0.0, 1.0, 2.0, 255.0;
    CHECK(quantize(m, 8) == expect);
  }

  TEST_CASE("column subsampling") {
    std::mt19937_64 rng(2);
    const Matrix x = testutil::random_matrix(3, 8, rng);
    const auto half = subsample_columns(x, 0.5, 0);
    CHECK(half.mask.observed_indices() == std::vector<std::size_t>{0, 2, 4, 6});
    CHECK(half.stride == std::optional<std::size_t>{2});
    CHECK(half.reduced.col(1) == x.col(2));
    const auto third = subsample_columns(testutil::random_matrix(3, 9, rng), 0.66, 0);
    CHECK(third.mask.observed_indices() == std::vector<std::size_t>{0, 3, 6});
    const auto none = subsample_columns(x, 0.0, 0);
    CHECK(none.reduced == x);
    CHECK(none.mask.observed_count() == 8);

    const Matrix wide = testutil::random_matrix(2, 40, rng);
    const auto r1 = subsample_columns(wide, 0.4, 9), r2 = subsample_columns(wide, 0.4, 9);
    CHECK_FALSE(r1.stride);
    CHECK(r1.mask.observed_count() == 24);
    CHECK(r1.mask.columns() == r2.mask.columns());
    CHECK(subsample_columns(x, 0.75, 0).mask.observed_indices() == std::vector<std::size_t>{0, 4});
    CHECK_THROWS_AS(subsample_columns(testutil::random_matrix(2, 2, rng), 0.77, 0), Error);
    CHECK_THROWS_AS(subsample_columns(x, 1.0, 0), Error);
  }

  TEST_CASE("tensor text format") {
    std::mt19937_64 rng(3);
    const auto t = testutil::random_tensor({2, 3, 4}, rng);
    std::stringstream ss;
    write_tensor(ss, t);
    CHECK(read_tensor(ss) == t);
    std::istringstream short_data("shape: 2 2\n1 2 3\n");
    CHECK_THROWS_AS(read_tensor(short_data), Error);
    std::istringstream no_header("2 2\n1 2 3 4\n");
    CHECK_THROWS_AS(read_tensor(no_header), Error);
    std::istringstream ok("shape: 2 2\n1 2\n3 4\n");
    const auto m = read_tensor(ok);
    CHECK(m.at(std::vector<std::size_t>{1, 0}) == 2.0);
  }

  TEST_CASE("rectangles") {
    const Rect r = parse_rect("1 2 3 4");
    CHECK(r.row == 1);
    CHECK(r.width == 4);
    CHECK_THROWS_AS(parse_rect("1 2 3"), Error);
    CHECK_THROWS_AS(parse_rect("1 2 -3 4"), Error);
  }

  TEST_CASE("config parsing") {
    TempDir dir("cfg");
    write_image(dir.path() / "a.png", Image{Matrix::Zero(4, 4), 8});
    write_image(dir.path() / "b.png", Image{Matrix::Zero(4, 4), 8});
    std::istringstream in(R"([run]
output = results
seed = 7
missing_ratio = 0.5

[superres]
; the wide-patch setting
patches = 15 10 7
overlaps = 7 6 4
window = 2 2
initial_rank = 1 2 3 1 2 3
max_rank = 9
weights = 0.5 0.5
smoothing = false

[noise_band]
rows = 3 9
patches = 10

[roi]
background = 0 0 2 2
foreground = 1 1 2 2
foreground_b = 2 2 1 1

[image.1]
name = first
scans = a.png b.png
reference = a.png

[image.2]
scans = b.png a.png
)");
    const RunConfig cfg = parse_run_config(in, dir.path());
    CHECK(cfg.output_dir == dir.path() / "results");
    CHECK(cfg.seed == 7);
    CHECK(cfg.superres.seed == 7);
    CHECK(cfg.missing_ratio == std::optional<double>{0.5});
    CHECK(cfg.image_format == "png");
    REQUIRE(cfg.superres.patches.size() == 3);
    CHECK(cfg.superres.patches[1].patch == 10);
    CHECK(cfg.superres.patches[1].overlap == 6);
    CHECK(cfg.superres.ranks.initial == std::vector<std::size_t>{1, 2, 3, 1, 2, 3});
    CHECK(cfg.superres.ranks.max_rank == 9);
    CHECK_FALSE(cfg.superres.smoothing);
    REQUIRE(cfg.superres.noise_band);
    CHECK(cfg.superres.noise_band->row_end == 9);
    CHECK(cfg.superres.noise_band->weight_sum == 0.95);
    REQUIRE(cfg.roi);
    CHECK(cfg.roi->foreground.size() == 2);
    REQUIRE(cfg.items.size() == 2);
    CHECK(cfg.items[0].name == "first");
    CHECK(cfg.items[0].reference == dir.path() / "a.png");
    CHECK(cfg.items[1].name == "image.2");
    CHECK_FALSE(cfg.items[1].reference);
  }

  TEST_CASE("config errors") {
    TempDir dir("cfgerr");
    write_image(dir.path() / "a.png", Image{Matrix::Zero(4, 4), 8});
    auto parse = [&](const std::string& text) {
      std::istringstream in(text);
      return parse_run_config(in, dir.path());
    };
    CHECK_THROWS_AS(parse("[run]\nseed = 1\n"), Error);
    CHECK_THROWS_AS(parse("[image.1]\nscans = missing.png\n"), Error);
    CHECK_THROWS_AS(parse("[superres]\nweights = 0.5 0.5\n[image.1]\nscans = a.png\n"), Error);
    CHECK_THROWS_AS(parse("[superres]\npatches = 7 5\noverlaps = 4\n[image.1]\nscans = a.png\n"), Error);
    CHECK_THROWS_AS(parse("[run]\nformat = bmp\n[image.1]\nscans = a.png\n"), Error);
    CHECK_THROWS_AS(parse("[superres]\ninitial_rank = 1 2\n[image.1]\nscans = a.png\n"), Error);
    CHECK_THROWS_AS(parse("[roi]\nforeground = 0 0 1 1\n[image.1]\nscans = a.png\n"), Error);
    CHECK_NOTHROW(parse("[image.1]\nscans = a.png\n"));
  }

  TEST_CASE("report schema") {
    Report rep;
    rep.seed = 3;
    ItemReport item;
    item.name = "one";
    item.psnr_spline = 20.0;
    item.psnr_tr = 21.5;
    item.ssim_spline = 0.5;
    item.ssim_tr = 0.6;
    rep.items = {item};
    const auto lines = lines_of(rep.csv());
    REQUIRE(lines.size() == 4);
    CHECK(lines[0] == "image,psnr_spline,psnr_tr,ssim_spline,ssim_tr,seed");
    CHECK(lines[1] == "one,20.000000,21.500000,0.500000,0.600000,3");
    CHECK(lines[2] == "mean,20.000000,21.500000,0.500000,0.600000,3");
    CHECK(lines[3] == "std,0.000000,0.000000,0.000000,0.000000,3");
    rep.has_roi = true;
    CHECK(lines_of(rep.csv())[0] == "image,psnr_spline,psnr_tr,ssim_spline,ssim_tr,cnr_spline,cnr_tr,seed");
  }

  TEST_CASE("batch of identical images") {
    TempDir dir("batch");
    std::mt19937_64 rng(4);
    const Matrix truth = quantize(testutil::synthetic_image(20, 20, 1, rng) * 255.0, 8);
    write_image(dir.path() / "scan.png", Image{truth, 8});
    std::string text = "[run]\nmissing_ratio = 0.5\n" + std::string(kSmallConfig).substr(6);
    for (int i = 1; i <= 3; ++i)
      text += "[image." + std::to_string(i) + "]\nname = im" + std::to_string(i) +
              "\nscans = scan.png\nreference = scan.png\n";
    std::istringstream in(text);
    const RunConfig cfg = parse_run_config(in, dir.path());
    const Report rep = run(cfg);
    REQUIRE(rep.items.size() == 3);
    const auto lines = lines_of(read_text(dir.path() / "out" / "report.csv"));
    REQUIRE(lines.size() == 6);
    CHECK(lines[5].rfind("std,0.000000,0.000000,0.000000,0.000000,", 0) == 0);
    CHECK(lines[1].substr(lines[1].find(',')) == lines[2].substr(lines[2].find(',')));
    CHECK(fs::exists(dir.path() / "out" / "im2_tr.pgm"));
    CHECK(fs::exists(dir.path() / "out" / "im2_spline.pgm"));
    CHECK_FALSE(fs::exists(dir.path() / "out" / "errors.log"));
    // Observed columns survive the full run bit for bit.
    const Image tr = load_image(dir.path() / "out" / "im1_tr.pgm");
    for (Eigen::Index c = 0; c < 20; c += 2) CHECK(tr.pixels.col(c) == truth.col(c));
  }

  TEST_CASE("a failing item does not stop the batch") {
    TempDir dir("fail");
    std::mt19937_64 rng(5);
    write_image(dir.path() / "good.png", Image{testutil::synthetic_image(20, 10, 1, rng) * 255.0, 8});
    write_bytes(dir.path() / "broken.png", "garbage");
    std::string text = kSmallConfig;
    text += "[image.1]\nname = broken\nscans = broken.png\n";
    text += "[image.2]\nname = good\nscans = good.png\n";
    std::istringstream in(text);
    const Report rep = run(parse_run_config(in, dir.path()));
    REQUIRE(rep.items.size() == 2);
    CHECK(rep.items[0].error);
    CHECK_FALSE(rep.items[1].error);
    CHECK(fs::exists(dir.path() / "out" / "good_tr.pgm"));
    const Image out = load_image(dir.path() / "out" / "good_tr.pgm");
    CHECK(out.pixels.cols() == 20);
    CHECK(read_text(dir.path() / "out" / "errors.log").find("broken") != std::string::npos);
  }
}
