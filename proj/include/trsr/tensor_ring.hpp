#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "trsr/tensor.hpp"

namespace trsr {

/// Tensor ring: N third-order cores, core n of shape R(n-1) x I(n) x R(n),
/// closed circularly (R(0) == R(N)). A tensor train is the case R(0) == 1.
class TensorRing {
 public:
  TensorRing() = default;
  explicit TensorRing(std::vector<DenseTensor> cores);

  /// Cores with i.i.d. standard normal entries scaled by `scale`.
  /// `ranks` holds R(1)..R(N); R(0) is taken as R(N).
  static TensorRing random(const Shape& shape, std::span<const std::size_t> ranks, std::mt19937_64& rng,
                           double scale = 1.0);

  std::size_t order() const { return cores_.size(); }
  const std::vector<DenseTensor>& cores() const { return cores_; }
  const DenseTensor& core(std::size_t n) const { return cores_.at(n); }
  void set_core(std::size_t n, DenseTensor core);

  /// Mode extents (I1, ..., IN).
  Shape shape() const;
  /// Full rank vector [R0, R1, ..., RN] with R0 == RN.
  std::vector<std::size_t> ranks() const;
  std::size_t max_rank() const;

 private:
  void validate() const;
  std::vector<DenseTensor> cores_;
};

struct RankSchedule {
  std::vector<std::size_t> initial;  // R1..RN
  std::size_t max_rank = 8;
  std::size_t step = 1;

  void validate() const;
};

/// Trace of the ordered product of lateral slices at `index` (0-based).
double tr_element(const TensorRing& ring, std::span<const std::size_t> index);

DenseTensor tr_to_dense(const TensorRing& ring);

struct AlsOptions {
  std::size_t sweeps = 10;
  /// Stop once (f_prev - f) / f_prev falls below this.
  double tol = 1e-4;
};

struct AlsResult {
  TensorRing ring;
  /// Objective ||target - ring||_F^2 after each completed sweep.
  std::vector<double> sweep_objective;
  /// Objective after each individual core update, in update order.
  std::vector<double> core_objective;
  /// Objective of the ring passed in, before any update.
  double initial_objective = 0.0;
};

/// Alternating least squares: each sweep solves for cores 1..N in turn with
/// the others fixed, using the minimum-norm least-squares solution.
AlsResult tr_als_fit(const DenseTensor& target, TensorRing ring, const AlsOptions& options);

/// Grows every bond by `step`. Old entries keep their leading sub-block; new
/// entries are N(0, 1) * noise_scale * rms(core).
TensorRing rank_increment(const TensorRing& ring, std::size_t step, double noise_scale, std::mt19937_64& rng);

}  // namespace trsr
