#include "trsr/superres.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "trsr/spline.hpp"

namespace trsr {

Mask::Mask(std::size_t rows, std::vector<bool> observed_columns) : rows_(rows), columns_(std::move(observed_columns)) {
  if (rows_ == 0 || columns_.empty()) throw Error("mask must be non-empty");
  if (std::none_of(columns_.begin(), columns_.end(), [](bool b) { return b; }))
    throw Error("mask must observe at least one column");
}

Mask Mask::all_observed(std::size_t rows, std::size_t cols) { return Mask(rows, std::vector<bool>(cols, true)); }

std::vector<std::size_t> Mask::observed_indices() const {
  std::vector<std::size_t> idx;
  for (std::size_t c = 0; c < columns_.size(); ++c)
    if (columns_[c]) idx.push_back(c);
  return idx;
}

std::size_t Mask::observed_count() const {
  return static_cast<std::size_t>(std::count(columns_.begin(), columns_.end(), true));
}

Matrix Mask::matrix() const {
  Matrix m(static_cast<Eigen::Index>(rows_), static_cast<Eigen::Index>(cols()));
  for (std::size_t c = 0; c < cols(); ++c) m.col(static_cast<Eigen::Index>(c)).setConstant(columns_[c] ? 1.0 : 0.0);
  return m;
}

void SuperResConfig::validate() const {
  if (patches.empty()) throw Error("at least one patch setting is required");
  for (const auto& p : patches)
    if (p.overlap >= p.patch)
      throw Error("overlap " + std::to_string(p.overlap) + " must be smaller than patch " + std::to_string(p.patch));
  if (window_rows == 0 || window_cols == 0) throw Error("window sizes must be positive");
  if (ratio == 0) throw Error("super-resolution ratio must be at least 1");
  if (weights.empty()) throw Error("B-scan weights must not be empty");
  const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (sum > 1.0 + 1e-12) throw Error("B-scan weights sum to " + std::to_string(sum) + " > 1");
  ranks.validate();
  if (ranks.initial.size() != 6) throw Error("rank vector must have six entries for the sixth-order embedding");
  if (noise_band) {
    if (noise_band->row_end <= noise_band->row_begin) throw Error("noise band is empty");
    if (noise_band->weight_sum <= 0.0 || noise_band->weight_sum > 1.0)
      throw Error("noise band weight sum must lie in (0, 1]");
  }
}

Matrix fuse_bscans(const std::vector<Matrix>& scans, const std::vector<double>& weights) {
  if (scans.empty()) throw Error("no B-scans to fuse");
  if (scans.size() != weights.size())
    throw Error("got " + std::to_string(scans.size()) + " B-scans but " + std::to_string(weights.size()) + " weights");
  const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (sum > 1.0 + 1e-12) throw Error("B-scan weights sum to " + std::to_string(sum) + " > 1");
  Matrix out = Matrix::Zero(scans[0].rows(), scans[0].cols());
  for (std::size_t i = 0; i < scans.size(); ++i) {
    if (scans[i].rows() != out.rows() || scans[i].cols() != out.cols())
      throw Error("B-scan " + std::to_string(i + 1) + " has a different size");
    out += weights[i] * scans[i];
  }
  return out;
}

SplineInit interpolate_missing(const Matrix& x, const Mask& mask) {
  if (static_cast<std::size_t>(x.rows()) != mask.rows() || static_cast<std::size_t>(x.cols()) != mask.cols())
    throw Error("interpolate_missing: mask size differs from image");
  const auto observed = mask.observed_indices();
  std::vector<double> knots(observed.begin(), observed.end());
  std::vector<std::size_t> missing;
  for (std::size_t c = 0; c < mask.cols(); ++c)
    if (!mask.observed(c)) missing.push_back(c);
  std::vector<double> queries(missing.begin(), missing.end());

  const auto op = interpolation_operator(knots, queries);
  Matrix samples(x.rows(), static_cast<Eigen::Index>(observed.size()));
  for (std::size_t k = 0; k < observed.size(); ++k)
    samples.col(static_cast<Eigen::Index>(k)) = x.col(static_cast<Eigen::Index>(observed[k]));
  const Matrix filled = samples * op.weights.transpose();

  SplineInit out{x, mask, op.linear};
  for (std::size_t k = 0; k < missing.size(); ++k)
    out.x.col(static_cast<Eigen::Index>(missing[k])) = filled.col(static_cast<Eigen::Index>(k));
  return out;
}

SplineInit spline_init(const Matrix& low_res, std::size_t ratio, std::size_t width) {
  if (ratio == 0) throw Error("super-resolution ratio must be at least 1");
  if (low_res.size() == 0) throw Error("empty input image");
  const auto captured = static_cast<std::size_t>(low_res.cols());
  if (width == 0) width = ratio * captured;
  if ((captured - 1) * ratio >= width)
    throw Error("output width " + std::to_string(width) + " cannot hold " + std::to_string(captured) +
                " columns at stride " + std::to_string(ratio));
  std::vector<bool> cols(width, false);
  Matrix x = Matrix::Zero(low_res.rows(), static_cast<Eigen::Index>(width));
  for (std::size_t k = 0; k < captured; ++k) {
    cols[k * ratio] = true;
    x.col(static_cast<Eigen::Index>(k * ratio)) = low_res.col(static_cast<Eigen::Index>(k));
  }
  return interpolate_missing(x, Mask(static_cast<std::size_t>(low_res.rows()), std::move(cols)));
}

Matrix smooth_estimated(const Matrix& x, const Mask& mask) {
  if (static_cast<std::size_t>(x.rows()) != mask.rows() || static_cast<std::size_t>(x.cols()) != mask.cols())
    throw Error("smooth_estimated: mask size differs from image");
  Matrix out = x;
  const Eigen::Index rows = x.rows(), cols = x.cols();
  for (Eigen::Index c = 0; c < cols; ++c) {
    if (mask.observed(static_cast<std::size_t>(c))) continue;
    for (Eigen::Index r = 0; r < rows; ++r) {
      double sum = 0.0;
      int n = 0;
      for (Eigen::Index dc = -1; dc <= 1; ++dc)
        for (Eigen::Index dr = -1; dr <= 1; ++dr) {
          if (dr == 0 && dc == 0) continue;
          const Eigen::Index rr = r + dr, cc = c + dc;
          if (rr < 0 || rr >= rows || cc < 0 || cc >= cols) continue;
          sum += x(rr, cc);
          ++n;
        }
      if (n > 0) out(r, c) = sum / n;
    }
  }
  return out;
}

namespace {

// Entry scale for a random ring whose materialisation has roughly the given RMS.
double init_scale(double rms, std::size_t order, std::size_t rank) {
  const double r = static_cast<double>(rank);
  const double n = static_cast<double>(order);
  return std::pow(std::max(rms, 1e-12) / std::pow(r, n / 2.0), 1.0 / n);
}

double masked_relative_residual(const Matrix& x, const Matrix& estimate, const Mask& mask) {
  double num = 0.0, den = 0.0;
  for (std::size_t c = 0; c < mask.cols(); ++c) {
    if (!mask.observed(c)) continue;
    const auto col = static_cast<Eigen::Index>(c);
    num += (x.col(col) - estimate.col(col)).squaredNorm();
    den += x.col(col).squaredNorm();
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

}  // namespace

PatchRunResult superres_single_patch(const Matrix& x0, const Mask& mask, const PatchRunOptions& options) {
  if (static_cast<std::size_t>(x0.rows()) != mask.rows() || static_cast<std::size_t>(x0.cols()) != mask.cols())
    throw Error("superres_single_patch: mask size differs from image");
  options.ranks.validate();
  const HankelPlan plan = make_plan(static_cast<std::size_t>(x0.rows()), static_cast<std::size_t>(x0.cols()),
                                    options.setting.patch, options.setting.overlap, options.window_rows,
                                    options.window_cols);
  if (options.ranks.initial.size() != plan.embedded_shape().size())
    throw Error("rank vector length must match the embedded tensor order");

  std::mt19937_64 rng(options.seed);
  const Matrix omega = mask.matrix();
  const DenseTensor omega_h = embed(omega, plan);

  Matrix x = x0;
  DenseTensor previous = embed(x, plan);
  const double rms = frobenius_norm(previous) / std::sqrt(static_cast<double>(previous.size()));
  TensorRing ring = TensorRing::random(plan.embedded_shape(), options.ranks.initial, rng,
                                       init_scale(rms, 6, options.ranks.initial.front()));

  PatchRunResult result;
  while (ring.max_rank() <= options.ranks.max_rank) {
    const DenseTensor x_h = embed(x, plan);
    // X~_H = Omega_H * X_H + (1 - Omega_H) * previous estimate.
    DenseTensor target(x_h.shape());
    {
      auto t = target.data();
      const auto xs = x_h.data();
      const auto ws = omega_h.data();
      const auto ps = previous.data();
      for (std::size_t i = 0; i < t.size(); ++i) t[i] = ws[i] * xs[i] + (1.0 - ws[i]) * ps[i];
    }

    const std::size_t level = ring.max_rank();
    AlsResult fit;
    try {
      fit = tr_als_fit(target, std::move(ring), options.als);
    } catch (const Error& e) {
      throw Error("rank level " + std::to_string(level) + ": " + e.what());
    }
    previous = tr_to_dense(fit.ring);
    Matrix estimate = unembed(previous, plan);
    if (!estimate.allFinite()) throw Error("non-finite estimate at rank level " + std::to_string(fit.ring.max_rank()));

    RankLevelLog log;
    log.rank = fit.ring.max_rank();
    log.sweeps = fit.sweep_objective.size();
    log.objective = fit.sweep_objective;
    log.masked_residual = masked_relative_residual(x, estimate, mask);
    result.levels.push_back(log);

    if (options.smoothing) estimate = smooth_estimated(estimate, mask);
    for (std::size_t c = 0; c < mask.cols(); ++c)
      if (!mask.observed(c)) x.col(static_cast<Eigen::Index>(c)) = estimate.col(static_cast<Eigen::Index>(c));

    if (log.masked_residual <= options.accuracy) break;
    ring = rank_increment(fit.ring, options.ranks.step, options.rank_noise, rng);
    if (options.ranks.step == 0) break;
  }
  result.output = std::move(x);
  return result;
}

PipelineResult superres_masked(const Matrix& fused, const Mask& mask, const SuperResConfig& config) {
  config.validate();
  const SplineInit init = interpolate_missing(fused, mask);
  PipelineResult out{Matrix(), init.x, mask, init.linear_fallback, {}, {}};

  const double weight_sum = std::accumulate(config.weights.begin(), config.weights.end(), 0.0);
  const std::size_t n_patches = config.patches.size();
  Matrix sum = Matrix::Zero(fused.rows(), fused.cols());
  for (std::size_t i = 0; i < n_patches; ++i) {
    const PatchSetting& setting = config.patches[i];
    Matrix start = init.x;
    if (config.noise_band) {
      const auto& band = *config.noise_band;
      if (std::find(band.patches.begin(), band.patches.end(), setting.patch) != band.patches.end()) {
        // The spline is linear in the data, so rescaling rows after
        // interpolation equals fusing those rows with the reduced weights.
        const auto begin = static_cast<Eigen::Index>(std::min<std::size_t>(band.row_begin, start.rows()));
        const auto end = static_cast<Eigen::Index>(std::min<std::size_t>(band.row_end, start.rows()));
        start.middleRows(begin, end - begin) *= band.weight_sum / weight_sum;
      }
    }
    out.observed.push_back(start);
    if (config.smoothing) start = smooth_estimated(start, mask);

    PatchRunOptions options;
    options.setting = setting;
    options.window_rows = config.window_rows;
    options.window_cols = config.window_cols;
    options.ranks = config.ranks;
    options.als = config.als;
    options.accuracy = config.accuracy;
    options.rank_noise = config.rank_noise;
    options.smoothing = config.smoothing;
    // Seeded by the setting, not its position, so repeated settings agree.
    options.seed = config.seed * 1000003u + setting.patch * 1009u + setting.overlap;
    try {
      out.patches.push_back(superres_single_patch(start, mask, options));
    } catch (const Error& e) {
      throw Error("patch size " + std::to_string(setting.patch) + ": " + e.what());
    }
    sum += out.patches.back().output;
  }
  out.output = sum / static_cast<double>(n_patches);
  return out;
}

PipelineResult superres_pipeline(const std::vector<Matrix>& scans, const SuperResConfig& config, std::size_t width) {
  config.validate();
  const Matrix fused = fuse_bscans(scans, config.weights);
  const SplineInit init = spline_init(fused, config.ratio, width);
  return superres_masked(init.x, init.mask, config);
}

}  // namespace trsr
