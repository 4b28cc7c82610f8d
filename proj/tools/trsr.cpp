// Command-line front end.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <random>

#include "trsr/hankel.hpp"
#include "trsr/image_io.hpp"
#include "trsr/metrics.hpp"
#include "trsr/run.hpp"
#include "trsr/run_config.hpp"
#include "trsr/tensor_io.hpp"
#include "trsr/tensor_ring.hpp"

namespace fs = std::filesystem;

namespace {

int cmd_subsample(const fs::path& input, double ratio, std::uint64_t seed, const fs::path& out) {
  const trsr::Image img = trsr::load_image(input);
  const trsr::Subsampled sub = trsr::subsample_columns(img.pixels, ratio, seed);
  fs::create_directories(out);
  const std::string stem = input.stem().string();
  trsr::write_image(out / (stem + "_reduced" + input.extension().string()), trsr::Image{sub.reduced, img.bit_depth});
  trsr::write_image(out / (stem + "_mask.pgm"), trsr::Image{sub.mask.matrix() * 255.0, 8});
  std::cout << "kept " << sub.mask.observed_count() << " of " << sub.mask.cols() << " columns";
  if (sub.stride) std::cout << " (stride " << *sub.stride << ")";
  std::cout << '\n';
  return 0;
}

int cmd_superres(const fs::path& config_path, const CLI::Option* seed_opt, std::uint64_t seed,
                 const CLI::Option* out_opt, const fs::path& out, const CLI::Option* ratio_opt, std::size_t ratio,
                 const CLI::Option* missing_opt, double missing) {
  trsr::RunConfig cfg = trsr::load_run_config(config_path);
  if (*seed_opt) cfg.seed = cfg.superres.seed = seed;
  if (*out_opt) cfg.output_dir = out;
  if (*ratio_opt) cfg.superres.ratio = ratio;
  if (*missing_opt) cfg.missing_ratio = missing;
  const trsr::Report report = trsr::run(cfg);
  std::cout << report.csv();
  for (const auto& item : report.items)
    if (item.error) return 1;
  return 0;
}

int cmd_hankelize(const fs::path& input, std::size_t patch, std::size_t overlap, const std::vector<std::size_t>& window) {
  const trsr::Image img = trsr::load_image(input);
  const auto plan = trsr::make_plan(static_cast<std::size_t>(img.pixels.rows()), static_cast<std::size_t>(img.pixels.cols()),
                                    patch, overlap, window.at(0), window.at(1));
  const trsr::Matrix x = img.pixels / img.peak();
  const trsr::DenseTensor t = trsr::embed(x, plan);
  const double residual = (trsr::unembed(t, plan) - x).cwiseAbs().maxCoeff();
  std::cout << "input: " << plan.input_rows << "x" << plan.input_cols << '\n'
            << "padding: " << plan.pad_rows << " rows, " << plan.pad_cols << " cols\n"
            << "rearranged: " << plan.j_rows << "x" << plan.j_cols << '\n'
            << "duplicated: " << plan.dup_rows << "x" << plan.dup_cols << '\n'
            << "embedded shape: " << trsr::shape_string(t.shape()) << '\n'
            << "round-trip max abs error: " << residual << '\n';
  return 0;
}

int cmd_metrics(const fs::path& ref_path, const fs::path& test_path, const fs::path& config) {
  const trsr::Image ref = trsr::load_image(ref_path);
  const trsr::Image test = trsr::load_image(test_path);
  const double peak = ref.peak();
  std::optional<trsr::RoiSpec> roi;
  if (!config.empty()) roi = trsr::load_roi(config);
  std::cout << "psnr,ssim" << (roi ? ",cnr_reference,cnr_test" : "") << '\n';
  const double p = trsr::psnr(ref.pixels, test.pixels, peak);
  const double s = trsr::ssim(ref.pixels, test.pixels, {8, 0.01, 0.03, peak});
  std::printf("%.6f,%.6f", p, s);
  if (roi) std::printf(",%.6f,%.6f", trsr::cnr(ref.pixels, *roi), trsr::cnr(test.pixels, *roi));
  std::printf("\n");
  return 0;
}

int cmd_decompose(const fs::path& input, std::vector<std::size_t> ranks, std::size_t sweeps, double tol,
                  std::uint64_t seed, const fs::path& out) {
  const trsr::DenseTensor target = trsr::read_tensor(input);
  if (ranks.size() == 1) ranks.assign(target.order(), ranks[0]);
  std::mt19937_64 rng(seed);
  const auto ring = trsr::TensorRing::random(target.shape(), ranks, rng);
  const auto fit = trsr::tr_als_fit(target, ring, {sweeps, tol});
  const double norm2 = trsr::squared_norm(target);
  std::cout << "sweep,objective,relative_error\n";
  std::printf("0,%.12e,%.12e\n", fit.initial_objective, std::sqrt(fit.initial_objective / norm2));
  for (std::size_t i = 0; i < fit.sweep_objective.size(); ++i)
    std::printf("%zu,%.12e,%.12e\n", i + 1, fit.sweep_objective[i], std::sqrt(fit.sweep_objective[i] / norm2));
  if (!out.empty()) trsr::write_tensor(out, trsr::tr_to_dense(fit.ring));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tensor-ring super-resolution of column-subsampled images"};
  app.require_subcommand(1);

  fs::path input, out = "out", config, ref_path, test_path, tensor_out;
  double missing = 0.5;
  std::uint64_t seed = 0;
  std::size_t ratio = 2, patch = 7, overlap = 4, sweeps = 10;
  double tol = 1e-4;
  std::vector<std::size_t> window{2, 2}, ranks{2};

  auto* sub = app.add_subcommand("subsample", "drop A-scans (columns) from an image");
  sub->add_option("input", input, "input image (PNG/PGM)")->required()->check(CLI::ExistingFile);
  sub->add_option("--missing-ratio", missing, "fraction of columns to drop")->required();
  sub->add_option("--seed", seed, "seed for non-stride ratios");
  sub->add_option("--out", out, "output directory");

  auto* sr = app.add_subcommand("superres", "run the configured super-resolution batch");
  sr->add_option("--config", config, "run config file")->required()->check(CLI::ExistingFile);
  auto* sr_seed = sr->add_option("--seed", seed, "override run.seed");
  auto* sr_out = sr->add_option("--out", out, "override run.output");
  auto* sr_ratio = sr->add_option("--ratio", ratio, "override superres.ratio");
  auto* sr_missing = sr->add_option("--missing-ratio", missing, "override run.missing_ratio");

  auto* hk = app.add_subcommand("hankelize", "print embedding geometry and round-trip error");
  hk->add_option("input", input, "input image")->required()->check(CLI::ExistingFile);
  hk->add_option("--patch", patch, "patch size P");
  hk->add_option("--overlap", overlap, "overlap O");
  hk->add_option("--window", window, "window sizes T1 T2")->expected(2);

  auto* mt = app.add_subcommand("metrics", "PSNR/SSIM (and CNR with ROIs) of a test image");
  mt->add_option("reference", ref_path, "reference image")->required()->check(CLI::ExistingFile);
  mt->add_option("test", test_path, "test image")->required()->check(CLI::ExistingFile);
  mt->add_option("--config", config, "config file with a [roi] section")->check(CLI::ExistingFile);

  auto* dc = app.add_subcommand("decompose", "fit a tensor ring to a tensor text file");
  dc->add_option("input", input, "tensor file ('shape:' header + values)")->required()->check(CLI::ExistingFile);
  dc->add_option("--ranks", ranks, "bond ranks R1..RN (one value = uniform)");
  dc->add_option("--sweeps", sweeps, "maximum ALS sweeps");
  dc->add_option("--tol", tol, "relative objective decrease to stop at");
  dc->add_option("--seed", seed, "seed for the random initial cores");
  dc->add_option("--out", tensor_out, "write the reconstruction to this tensor file");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sub) return cmd_subsample(input, missing, seed, out);
    if (*sr) return cmd_superres(config, sr_seed, seed, sr_out, out, sr_ratio, ratio, sr_missing, missing);
    if (*hk) return cmd_hankelize(input, patch, overlap, window);
    if (*mt) return cmd_metrics(ref_path, test_path, config);
    if (*dc) return cmd_decompose(input, ranks, sweeps, tol, seed, tensor_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
