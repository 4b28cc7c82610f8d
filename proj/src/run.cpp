#include "trsr/run.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>

#include "trsr/image_io.hpp"
#include "trsr/metrics.hpp"

namespace trsr {

Subsampled subsample_columns(const Matrix& x, double missing_ratio, std::uint64_t seed) {
  if (!(missing_ratio >= 0.0 && missing_ratio < 1.0)) throw Error("missing ratio must lie in [0, 1)");
  const auto width = static_cast<std::size_t>(x.cols());
  std::vector<bool> keep(width, false);
  std::optional<std::size_t> stride;

  const auto l = static_cast<std::size_t>(std::llround(1.0 / (1.0 - missing_ratio)));
  if (l >= 1 && std::abs(missing_ratio - (1.0 - 1.0 / static_cast<double>(l))) <= 0.01) {
    stride = l;
    for (std::size_t c = 0; c < width; c += l) keep[c] = true;
  } else {
    const auto drop = static_cast<std::size_t>(std::llround(missing_ratio * static_cast<double>(width)));
    std::vector<std::size_t> order(width);
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t k = drop; k < width; ++k) keep[order[k]] = true;
  }
  const auto kept = static_cast<std::size_t>(std::count(keep.begin(), keep.end(), true));
  if (kept == 0)
    throw Error("missing ratio " + std::to_string(missing_ratio) + " leaves no column of " + std::to_string(width));

  Subsampled out{Matrix(x.rows(), static_cast<Eigen::Index>(kept)), Mask(static_cast<std::size_t>(x.rows()), keep),
                 stride};
  Eigen::Index k = 0;
  for (std::size_t c = 0; c < width; ++c)
    if (keep[c]) out.reduced.col(k++) = x.col(static_cast<Eigen::Index>(c));
  return out;
}

namespace {

std::string format_value(const std::optional<double>& v) {
  if (!v) return "";
  if (std::isinf(*v)) return *v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", *v);
  return buf;
}

struct Summary {
  std::optional<double> mean, std;
};

Summary summarize(const std::vector<ItemReport>& items, std::optional<double> ItemReport::*field) {
  std::vector<double> values;
  for (const auto& it : items)
    if (it.*field && std::isfinite(*(it.*field))) values.push_back(*(it.*field));
  if (values.empty()) return {};
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, values.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0};
}

ItemReport process(const BatchItem& item, const RunConfig& cfg) {
  ItemReport rep;
  rep.name = item.name;

  std::vector<Matrix> scans;
  int bit_depth = 8;
  for (std::size_t i = 0; i < item.scans.size(); ++i) {
    Image img = load_image(item.scans[i]);
    if (i == 0) bit_depth = img.bit_depth;
    scans.push_back(img.pixels / img.peak());
  }
  const double peak = bit_depth == 16 ? 65535.0 : 255.0;

  std::optional<Matrix> reference;
  if (item.reference) reference = load_image(*item.reference).pixels;

  SuperResConfig sr = cfg.superres;
  PipelineResult result = [&] {
    if (cfg.missing_ratio) {
      // Simulated dropout: every scan loses the same columns.
      std::optional<Mask> mask;
      std::vector<Matrix> full;
      for (const Matrix& s : scans) {
        Subsampled sub = subsample_columns(s, *cfg.missing_ratio, cfg.seed);
        Matrix placed = Matrix::Zero(s.rows(), s.cols());
        Eigen::Index k = 0;
        for (std::size_t c = 0; c < sub.mask.cols(); ++c)
          if (sub.mask.observed(c)) placed.col(static_cast<Eigen::Index>(c)) = sub.reduced.col(k++);
        full.push_back(std::move(placed));
        if (!mask) mask = sub.mask;
        if (sub.stride) sr.ratio = *sub.stride;
      }
      return superres_masked(fuse_bscans(full, sr.weights), *mask, sr);
    }
    const std::size_t width = reference ? static_cast<std::size_t>(reference->cols()) : 0;
    return superres_pipeline(scans, sr, width);
  }();

  const Matrix tr = quantize(result.output * peak, bit_depth);
  const Matrix spline = quantize(result.spline * peak, bit_depth);
  const std::string ext = "." + cfg.image_format;
  write_image(cfg.output_dir / (item.name + "_tr" + ext), Image{tr, bit_depth});
  write_image(cfg.output_dir / (item.name + "_spline" + ext), Image{spline, bit_depth});

  if (reference) {
    if (reference->rows() != tr.rows() || reference->cols() != tr.cols())
      throw Error("reference size differs from the reconstruction");
    const SsimParams params{8, 0.01, 0.03, peak};
    rep.psnr_spline = psnr(*reference, spline, peak);
    rep.psnr_tr = psnr(*reference, tr, peak);
    rep.ssim_spline = ssim(*reference, spline, params);
    rep.ssim_tr = ssim(*reference, tr, params);
  }
  if (cfg.roi) {
    rep.cnr_spline = cnr(spline, *cfg.roi);
    rep.cnr_tr = cnr(tr, *cfg.roi);
  }
  return rep;
}

}  // namespace

std::string Report::csv() const {
  std::ostringstream os;
  os << "image,psnr_spline,psnr_tr,ssim_spline,ssim_tr";
  if (has_roi) os << ",cnr_spline,cnr_tr";
  os << ",seed\n";

  using Field = std::optional<double> ItemReport::*;
  std::vector<Field> fields{&ItemReport::psnr_spline, &ItemReport::psnr_tr, &ItemReport::ssim_spline,
                            &ItemReport::ssim_tr};
  if (has_roi) {
    fields.push_back(&ItemReport::cnr_spline);
    fields.push_back(&ItemReport::cnr_tr);
  }
  for (const auto& it : items) {
    os << it.name;
    for (Field f : fields) os << ',' << format_value(it.*f);
    os << ',' << seed << '\n';
  }
  std::vector<Summary> summaries;
  for (Field f : fields) summaries.push_back(summarize(items, f));
  os << "mean";
  for (const auto& s : summaries) os << ',' << format_value(s.mean);
  os << ',' << seed << '\n';
  os << "std";
  for (const auto& s : summaries) os << ',' << format_value(s.std);
  os << ',' << seed << '\n';
  return os.str();
}

Report run(const RunConfig& config) {
  std::filesystem::create_directories(config.output_dir);
  Report report;
  report.seed = config.seed;
  report.has_roi = config.roi.has_value();
  for (const BatchItem& item : config.items) {
    try {
      report.items.push_back(process(item, config));
    } catch (const std::exception& e) {
      ItemReport failed;
      failed.name = item.name;
      failed.error = e.what();
      report.items.push_back(std::move(failed));
      std::cerr << "item '" << item.name << "' failed: " << e.what() << '\n';
    }
  }
  std::ofstream csv(config.output_dir / "report.csv", std::ios::binary);
  if (!csv) throw Error("cannot write report.csv in " + config.output_dir.string());
  csv << report.csv();

  std::vector<std::string> errors;
  for (const auto& it : report.items)
    if (it.error) errors.push_back(it.name + ": " + *it.error);
  if (!errors.empty()) {
    std::ofstream err(config.output_dir / "errors.log");
    for (const auto& e : errors) err << e << '\n';
  }
  return report;
}

}  // namespace trsr
