#include <doctest.h>

#include <map>

#include "test_util.hpp"
#include "trsr/hankel.hpp"

using namespace trsr;
using testutil::random_matrix;

namespace {

// Smallest pad making (I + pad - P) a multiple of the stride, by search.
std::size_t search_pad(std::size_t i, std::size_t p, std::size_t o) {
  for (std::size_t pad = 0;; ++pad)
    if ((i + pad - p) % (p - o) == 0) return pad;
}

Eigen::Index ix(std::size_t v) { return static_cast<Eigen::Index>(v); }

// Row of the padded input copied to row r of the rearranged matrix.
std::size_t source_index(std::size_t r, std::size_t p, std::size_t o) { return (r / p) * (p - o) + r % p; }

Matrix edge_pad(const Matrix& x, std::size_t rows, std::size_t cols) {
  Matrix out(ix(rows), ix(cols));
  for (std::size_t c = 0; c < cols; ++c)
    for (std::size_t r = 0; r < rows; ++r)
      out(ix(r), ix(c)) = x(std::min<Eigen::Index>(ix(r), x.rows() - 1), std::min<Eigen::Index>(ix(c), x.cols() - 1));
  return out;
}

}  // namespace

TEST_SUITE("hankel") {
  TEST_CASE("plan sizes") {
    const auto a = make_plan(16, 16, 4, 2, 1, 1);
    CHECK(a.pad_rows == 0);
    CHECK(a.j_rows == 28);
    CHECK(a.blocks_rows == 7);
    CHECK(make_plan(16, 16, 4, 0, 1, 1).j_rows == 16);
    const auto c = make_plan(17, 23, 4, 2, 2, 2);
    CHECK(c.pad_rows == 1);
    CHECK(c.j_rows == 32);
    CHECK(c.pad_cols == 1);
    CHECK(c.windows_rows == 7);
    CHECK(c.dup_rows == 4 * 2 * 7);
    const auto d = make_plan(8, 8, 2, 0, 2, 2);
    CHECK(d.j_rows == 8);
    CHECK(d.dup_rows == 12);
    CHECK(d.embedded_shape() == Shape{2, 2, 2, 3, 2, 3});
  }

  TEST_CASE("padding is the minimal one") {
    for (std::size_t i = 7; i <= 70; ++i)
      for (std::size_t p : {2u, 3u, 4u, 5u, 7u})
        for (std::size_t o = 0; o < p; ++o) {
          const auto plan = make_plan(i, i, p, o, 1, 1);
          CHECK(plan.pad_rows == search_pad(i, p, o));
          CHECK(plan.j_rows == p * ((i + plan.pad_rows - p) / (p - o) + 1));
        }
  }

  TEST_CASE("plan errors") {
    CHECK_THROWS_AS(make_plan(16, 16, 4, 4, 1, 1), Error);
    CHECK_THROWS_AS(make_plan(16, 16, 0, 0, 1, 1), Error);
    CHECK_THROWS_AS(make_plan(3, 16, 4, 2, 1, 1), Error);
    CHECK_THROWS_AS(make_plan(16, 16, 4, 2, 0, 1), Error);
    // 16 x 16 with P = 4, O = 0 has four blocks; a window of five does not fit.
    CHECK_THROWS_AS(make_plan(16, 16, 4, 0, 5, 1), Error);
  }

  TEST_CASE("rearrangement index map") {
    Matrix ramp(6, 6);
    for (Eigen::Index c = 0; c < 6; ++c)
      for (Eigen::Index r = 0; r < 6; ++r) ramp(r, c) = static_cast<double>(r + 6 * c);
    const auto plan = make_plan(6, 6, 4, 2, 1, 1);
    const Matrix xj = rearrange_overlapped(ramp, plan);
    REQUIRE(xj.rows() == 8);
    REQUIRE(xj.cols() == 8);
    for (std::size_t c = 0; c < 8; ++c)
      for (std::size_t r = 0; r < 8; ++r)
        CHECK(xj(ix(r), ix(c)) == ramp(ix(source_index(r, 4, 2)), ix(source_index(c, 4, 2))));
    // middle rows 2 and 3 appear twice
    CHECK(xj.row(2) == xj.row(4));
    CHECK(xj.row(3) == xj.row(5));

    std::mt19937_64 rng(1);
    const Matrix x = random_matrix(17, 23, rng);
    const auto p2 = make_plan(17, 23, 5, 3, 1, 1);
    const Matrix padded = edge_pad(x, p2.padded_rows(), p2.padded_cols());
    const Matrix y = rearrange_overlapped(x, p2);
    for (std::size_t c = 0; c < p2.j_cols; ++c)
      for (std::size_t r = 0; r < p2.j_rows; ++r)
        CHECK(y(ix(r), ix(c)) == padded(ix(source_index(r, 5, 3)), ix(source_index(c, 5, 3))));
  }

  TEST_CASE("rearrangement degenerate cases") {
    std::mt19937_64 rng(2);
    const Matrix x = random_matrix(16, 16, rng);
    CHECK(rearrange_overlapped(x, make_plan(16, 16, 4, 0, 1, 1)) == x);
    const Matrix k = Matrix::Constant(13, 11, 0.25);
    const auto plan = make_plan(13, 11, 4, 1, 1, 1);
    const Matrix y = rearrange_overlapped(k, plan);
    CHECK(y.rows() == static_cast<Eigen::Index>(plan.j_rows));
    CHECK((y.array() == 0.25).all());
  }

  TEST_CASE("embedding matches the explicit duplication matrices") {
    std::mt19937_64 rng(3);
    const auto plan = make_plan(8, 12, 2, 0, 2, 3);
    const Matrix xj = random_matrix(ix(plan.j_rows), ix(plan.j_cols), rng);
    const Matrix s1 = duplication_matrix(plan.j_rows, 2, 2);
    const Matrix s2 = duplication_matrix(plan.j_cols, 2, 3);
    CHECK(s1.rows() == 12);
    const Matrix h = s1 * xj * s2.transpose();
    const DenseTensor t = patch_hankelize(xj, plan);
    // h rows decode (p1, t1, k1), columns (p2, t2, k2), first fastest.
    const Shape& sh = t.shape();
    for (std::size_t lin = 0; lin < t.size(); ++lin) {
      const auto i = testutil::decode(lin, sh);
      const std::size_t row = i[0] + sh[0] * (i[2] + sh[2] * i[3]);
      const std::size_t col = i[1] + sh[1] * (i[4] + sh[4] * i[5]);
      CHECK(t[lin] == h(ix(row), ix(col)));
    }
  }

  TEST_CASE("embedded entries follow the documented index map") {
    std::mt19937_64 rng(4);
    const auto plan = make_plan(17, 23, 4, 2, 2, 2);
    const Matrix xj = random_matrix(ix(plan.j_rows), ix(plan.j_cols), rng);
    const DenseTensor t = patch_hankelize(xj, plan);
    CHECK(t.shape() == plan.embedded_shape());
    const std::size_t P = 4;
    for (std::size_t lin = 0; lin < t.size(); ++lin) {
      const auto i = testutil::decode(lin, t.shape());
      CHECK(t[lin] == xj(ix((i[3] + i[2]) * P + i[0]), ix((i[5] + i[4]) * P + i[1])));
    }
  }

  TEST_CASE("window of one is a reshape") {
    std::mt19937_64 rng(5);
    const auto plan = make_plan(12, 8, 4, 0, 1, 1);
    const Matrix xj = random_matrix(12, 8, rng);
    const DenseTensor t = patch_hankelize(xj, plan);
    CHECK(t.shape() == Shape{4, 4, 1, 3, 1, 2});
    CHECK(t.size() == 96);
    for (std::size_t k2 = 0; k2 < 2; ++k2)
      for (std::size_t k1 = 0; k1 < 3; ++k1)
        for (std::size_t p2 = 0; p2 < 4; ++p2)
          for (std::size_t p1 = 0; p1 < 4; ++p1) {
            const std::size_t idx[] = {p1, p2, 0, k1, 0, k2};
            CHECK(t.at(idx) == xj(ix(k1 * 4 + p1), ix(k2 * 4 + p2)));
          }
  }

  TEST_CASE("dehankelize averages every duplicate") {
    std::mt19937_64 rng(6);
    const auto plan = make_plan(10, 12, 2, 0, 3, 2);
    const auto t = testutil::random_tensor(plan.embedded_shape(), rng);
    // Enumerate the duplication groups directly.
    std::map<std::pair<std::size_t, std::size_t>, std::pair<double, int>> groups;
    for (std::size_t lin = 0; lin < t.size(); ++lin) {
      const auto i = testutil::decode(lin, t.shape());
      auto& g = groups[{(i[3] + i[2]) * 2 + i[0], (i[5] + i[4]) * 2 + i[1]}];
      g.first += t[lin];
      g.second += 1;
    }
    const Matrix m = dehankelize(t, plan);
    const Matrix ms = kernels::serial::dehankelize(t, plan);
    CHECK(groups.size() == plan.j_rows * plan.j_cols);
    for (const auto& [pos, g] : groups) {
      const double mean = g.first / g.second;
      CHECK(std::abs(m(ix(pos.first), ix(pos.second)) - mean) <= 1e-14);
      CHECK(std::abs(ms(ix(pos.first), ix(pos.second)) - mean) <= 1e-14);
    }
    CHECK(dehankelize(DenseTensor(plan.embedded_shape(), 1.0), plan) == Matrix::Ones(10, 12));
    CHECK_THROWS_AS(dehankelize(DenseTensor({2, 2}), plan), Error);
  }

  TEST_CASE("one perturbed group") {
    const auto plan = make_plan(8, 8, 2, 0, 2, 2);
    DenseTensor t(plan.embedded_shape(), 1.0);
    // XJ(2, 2) has copies at t1 + k1 = 1 and t2 + k2 = 1: four of them.
    const std::size_t a[] = {0, 0, 0, 1, 0, 1}, b[] = {0, 0, 1, 0, 1, 0}, c[] = {0, 0, 1, 0, 0, 1};
    t.at(a) = 5.0;
    t.at(b) = -3.0;
    t.at(c) = 2.0;
    const Matrix m = dehankelize(t, plan);
    CHECK(m(2, 2) == doctest::Approx((5.0 - 3.0 + 2.0 + 1.0) / 4.0));
    CHECK(m(0, 0) == 1.0);
  }

  TEST_CASE("blend weights") {
    CHECK(blend_weights(0).empty());
    CHECK(blend_weights(1) == std::vector<double>{0.5});
    CHECK(blend_weights(3) == std::vector<double>{1.0, 0.5, 0.0});
    const auto w4 = blend_weights(4);
    CHECK(w4.front() == 1.0);
    CHECK(w4.back() == 0.0);
  }

  TEST_CASE("blending a 0 to 1 strip") {
    // P = 4, O = 3 on 5 columns: two blocks share columns 1..3.
    const auto plan = make_plan(4, 5, 4, 3, 1, 1);
    REQUIRE(plan.j_cols == 8);
    Matrix xj(ix(plan.j_rows), 8);
    xj.setZero();
    xj.rightCols(4).setOnes();
    const Matrix out = blend_overlaps(xj.leftCols(8), plan);
    // Copy from the left block is 0, from the right block 1.
    const Eigen::RowVectorXd expect = (Eigen::RowVectorXd(5) << 0.0, 0.0, 0.5, 1.0, 1.0).finished();
    // Row blending mixes identical rows, so every row shows the column pattern.
    for (Eigen::Index r = 0; r < out.rows(); ++r) CHECK((out.row(r) - expect).cwiseAbs().maxCoeff() <= 1e-15);
  }

  TEST_CASE("round trip is the identity") {
    std::mt19937_64 rng(7);
    for (auto [rows, cols] : {std::pair{16, 16}, std::pair{17, 23}, std::pair{64, 64}})
      for (std::size_t p : {4u, 7u, 10u})
        for (std::size_t o : {0u, 2u, 4u}) {
          if (o >= p) continue;
          for (std::size_t t : {1u, 2u}) {
            const auto plan = make_plan(static_cast<std::size_t>(rows), static_cast<std::size_t>(cols), p, o, t, t);
            const Matrix x = random_matrix(rows, cols, rng);
            CHECK((unembed(embed(x, plan), plan) - x).cwiseAbs().maxCoeff() <= 1e-12);
          }
        }
    const auto plan = make_plan(20, 20, 5, 2, 2, 2);
    const Matrix k = Matrix::Constant(20, 20, 0.7);
    CHECK((unembed(embed(k, plan), plan).array() == 0.7).all());
  }

  TEST_CASE("unembed is linear") {
    std::mt19937_64 rng(8);
    const auto plan = make_plan(17, 19, 5, 2, 2, 2);
    const auto a = testutil::random_tensor(plan.embedded_shape(), rng);
    const auto b = testutil::random_tensor(plan.embedded_shape(), rng);
    DenseTensor c = a;
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = 2.0 * a[i] - 0.5 * b[i];
    const Matrix lhs = unembed(c, plan);
    const Matrix rhs = 2.0 * unembed(a, plan) - 0.5 * unembed(b, plan);
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-12);
  }
}
