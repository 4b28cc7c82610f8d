#include "trsr/tensor_ring.hpp"

#include <algorithm>
#include <cmath>

#include "trsr/kernels.hpp"

namespace trsr {

TensorRing::TensorRing(std::vector<DenseTensor> cores) : cores_(std::move(cores)) { validate(); }

void TensorRing::validate() const {
  if (cores_.empty()) throw Error("tensor ring needs at least one core");
  for (std::size_t n = 0; n < cores_.size(); ++n) {
    if (cores_[n].order() != 3)
      throw Error("core " + std::to_string(n + 1) + " is not third-order: " + shape_string(cores_[n].shape()));
    const DenseTensor& next = cores_[(n + 1) % cores_.size()];
    if (cores_[n].extent(2) != next.extent(0))
      throw Error("rank mismatch between core " + std::to_string(n + 1) + " and its successor");
  }
}

TensorRing TensorRing::random(const Shape& shape, std::span<const std::size_t> ranks, std::mt19937_64& rng,
                              double scale) {
  if (ranks.size() != shape.size()) throw Error("rank vector length must equal tensor order");
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<DenseTensor> cores;
  cores.reserve(shape.size());
  for (std::size_t n = 0; n < shape.size(); ++n) {
    const std::size_t left = ranks[(n + shape.size() - 1) % shape.size()];
    DenseTensor core({left, shape[n], ranks[n]});
    for (double& v : core.data()) v = scale * normal(rng);
    cores.push_back(std::move(core));
  }
  return TensorRing(std::move(cores));
}

void TensorRing::set_core(std::size_t n, DenseTensor core) {
  const DenseTensor& old = cores_.at(n);
  if (core.shape() != old.shape())
    throw Error("replacement core shape " + shape_string(core.shape()) + " differs from " +
                shape_string(old.shape()));
  cores_[n] = std::move(core);
}

Shape TensorRing::shape() const {
  Shape s;
  for (const auto& c : cores_) s.push_back(c.extent(1));
  return s;
}

std::vector<std::size_t> TensorRing::ranks() const {
  std::vector<std::size_t> r{cores_.front().extent(0)};
  for (const auto& c : cores_) r.push_back(c.extent(2));
  return r;
}

std::size_t TensorRing::max_rank() const {
  const auto r = ranks();
  return *std::max_element(r.begin(), r.end());
}

void RankSchedule::validate() const {
  if (initial.empty()) throw Error("rank schedule needs an initial rank vector");
  if (max_rank == 0) throw Error("maximum rank must be positive");
  for (auto r : initial) {
    if (r == 0) throw Error("ranks must be positive");
    if (r > max_rank) throw Error("initial rank exceeds maximum rank");
  }
}

double tr_element(const TensorRing& ring, std::span<const std::size_t> index) {
  if (index.size() != ring.order()) throw Error("index order does not match ring order");
  Matrix prod;
  for (std::size_t n = 0; n < ring.order(); ++n) {
    const DenseTensor& core = ring.core(n);
    if (index[n] >= core.extent(1)) throw Error("index out of range in mode " + std::to_string(n + 1));
    Matrix slice(core.extent(0), core.extent(2));
    for (std::size_t a = 0; a < core.extent(0); ++a)
      for (std::size_t b = 0; b < core.extent(2); ++b) {
        const std::size_t idx[] = {a, index[n], b};
        slice(a, b) = core.at(idx);
      }
    prod = (n == 0) ? slice : Matrix(prod * slice);
  }
  return prod.trace();
}

DenseTensor tr_to_dense(const TensorRing& ring) {
  const Matrix a = kernels::subchain(ring.cores(), 0);
  const Matrix unfolded = kernels::core_rows(ring.core(0)) * a.transpose();
  return fold_mode_n(unfolded, 1, ring.shape());
}

AlsResult tr_als_fit(const DenseTensor& target, TensorRing ring, const AlsOptions& options) {
  if (target.shape() != ring.shape())
    throw Error("target shape " + shape_string(target.shape()) + " does not match ring shape " +
                shape_string(ring.shape()));
  const std::size_t n_cores = ring.order();
  std::vector<Matrix> unfoldings;
  unfoldings.reserve(n_cores);
  for (std::size_t n = 0; n < n_cores; ++n) unfoldings.push_back(unfold_mode_n(target, n + 1));

  AlsResult result;
  {
    const Matrix a = kernels::subchain(ring.cores(), 0);
    result.initial_objective = kernels::residual_squared(unfoldings[0], kernels::core_rows(ring.core(0)), a);
  }
  double previous = result.initial_objective;

  for (std::size_t sweep = 0; sweep < options.sweeps; ++sweep) {
    double objective = previous;
    for (std::size_t n = 0; n < n_cores; ++n) {
      const DenseTensor& old = ring.core(n);
      const Matrix a = kernels::subchain(ring.cores(), n);
      const Matrix g = kernels::gram(a);
      const Matrix rhs = kernels::cross(a, unfoldings[n].transpose());
      // Minimum-norm solution of the normal equations; the Gram matrix is
      // singular whenever a bond carries redundant directions.
      const Eigen::CompleteOrthogonalDecomposition<Matrix> cod(g);
      const Matrix rows = cod.solve(rhs).transpose();
      if (!rows.allFinite())
        throw Error("non-finite core update at sweep " + std::to_string(sweep + 1) + ", core " +
                    std::to_string(n + 1));
      objective = kernels::residual_squared(unfoldings[n], rows, a);
      ring.set_core(n, kernels::core_from_rows(rows, old.extent(0), old.extent(2)));
      result.core_objective.push_back(objective);
    }
    result.sweep_objective.push_back(objective);
    const bool converged = previous <= 0.0 || (previous - objective) <= options.tol * previous;
    previous = objective;
    if (converged) break;
  }
  result.ring = std::move(ring);
  return result;
}

TensorRing rank_increment(const TensorRing& ring, std::size_t step, double noise_scale, std::mt19937_64& rng) {
  if (step == 0) return ring;
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<DenseTensor> cores;
  cores.reserve(ring.order());
  for (const DenseTensor& old : ring.cores()) {
    const std::size_t r0 = old.extent(0), len = old.extent(1), r1 = old.extent(2);
    const double rms = std::sqrt(squared_norm(old) / static_cast<double>(old.size()));
    const double amplitude = noise_scale * rms;
    DenseTensor grown({r0 + step, len, r1 + step});
    for (std::size_t b = 0; b < r1 + step; ++b)
      for (std::size_t i = 0; i < len; ++i)
        for (std::size_t a = 0; a < r0 + step; ++a) {
          const std::size_t idx[] = {a, i, b};
          if (a < r0 && b < r1) {
            grown.at(idx) = old.at(idx);
          } else {
            // Draw even when the amplitude is zero so the stream stays aligned.
            const double z = normal(rng);
            grown.at(idx) = amplitude * z;
          }
        }
    cores.push_back(std::move(grown));
  }
  return TensorRing(std::move(cores));
}

}  // namespace trsr
