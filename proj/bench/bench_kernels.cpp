#include <benchmark/benchmark.h>

#include <random>

#include "trsr/hankel.hpp"
#include "trsr/kernels.hpp"
#include "trsr/tensor_ring.hpp"

using namespace trsr;

namespace {

// The embedding used for a 96 x 96 image with P = 7, O = 4, T = 2.
const HankelPlan& plan() {
  static const HankelPlan p = make_plan(96, 96, 7, 4, 2, 2);
  return p;
}

const TensorRing& ring() {
  static const TensorRing r = [] {
    std::mt19937_64 rng(1);
    const std::vector<std::size_t> ranks(6, 6);
    return TensorRing::random(plan().embedded_shape(), ranks, rng);
  }();
  return r;
}

Matrix random_matrix(Eigen::Index rows, Eigen::Index cols) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> normal;
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = normal(rng);
  return m;
}

template <bool Parallel>
void BM_subchain(benchmark::State& state) {
  const auto skip = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    Matrix a = Parallel ? kernels::subchain(ring().cores(), skip) : kernels::serial::subchain(ring().cores(), skip);
    benchmark::DoNotOptimize(a.data());
  }
}

template <bool Parallel>
void BM_gram(benchmark::State& state) {
  const Matrix a = kernels::subchain(ring().cores(), 3);
  for (auto _ : state) {
    Matrix g = Parallel ? kernels::gram(a) : kernels::serial::gram(a);
    benchmark::DoNotOptimize(g.data());
  }
}

template <bool Parallel>
void BM_cross(benchmark::State& state) {
  const Matrix a = kernels::subchain(ring().cores(), 3);
  const Matrix x = random_matrix(a.rows(), static_cast<Eigen::Index>(plan().embedded_shape()[3]));
  for (auto _ : state) {
    Matrix c = Parallel ? kernels::cross(a, x) : kernels::serial::cross(a, x);
    benchmark::DoNotOptimize(c.data());
  }
}

template <bool Parallel>
void BM_hankelize(benchmark::State& state) {
  const Matrix xj = random_matrix(static_cast<Eigen::Index>(plan().j_rows), static_cast<Eigen::Index>(plan().j_cols));
  for (auto _ : state) {
    DenseTensor t = Parallel ? patch_hankelize(xj, plan()) : kernels::serial::patch_hankelize(xj, plan());
    benchmark::DoNotOptimize(t.data().data());
  }
}

template <bool Parallel>
void BM_dehankelize(benchmark::State& state) {
  const Matrix xj = random_matrix(static_cast<Eigen::Index>(plan().j_rows), static_cast<Eigen::Index>(plan().j_cols));
  const DenseTensor t = patch_hankelize(xj, plan());
  for (auto _ : state) {
    Matrix m = Parallel ? dehankelize(t, plan()) : kernels::serial::dehankelize(t, plan());
    benchmark::DoNotOptimize(m.data());
  }
}

}  // namespace

BENCHMARK(BM_subchain<false>)->Arg(0)->Arg(3)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_subchain<true>)->Arg(0)->Arg(3)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_gram<false>)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_gram<true>)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_cross<false>)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_cross<true>)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_hankelize<false>)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_hankelize<true>)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_dehankelize<false>)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_dehankelize<true>)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
