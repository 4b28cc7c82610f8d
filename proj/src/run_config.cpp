#include "trsr/run_config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fstream>
#include <sstream>

namespace trsr {

namespace pt = boost::property_tree;

namespace {

template <typename T>
std::vector<T> parse_list(const std::string& text, const std::string& key) {
  std::istringstream in(text);
  std::vector<T> out;
  T v{};
  while (in >> v) out.push_back(v);
  if (!in.eof()) throw Error("malformed list for '" + key + "': " + text);
  return out;
}

bool parse_bool(const std::string& text, const std::string& key) {
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  throw Error("'" + key + "' must be a boolean, got " + text);
}

template <typename T>
T get(const pt::ptree& tree, const std::string& key, T fallback) {
  try {
    return tree.get<T>(key, fallback);
  } catch (const pt::ptree_error&) {
    throw Error("bad value for '" + key + "'");
  }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

std::filesystem::path existing(const std::filesystem::path& base, const std::string& p) {
  auto path = resolve(base, p);
  if (!std::filesystem::exists(path)) throw Error("referenced file does not exist: " + path.string());
  return path;
}

std::optional<RoiSpec> roi_from(const pt::ptree& tree) {
  const auto section = tree.get_child_optional("roi");
  if (!section) return std::nullopt;
  RoiSpec roi;
  bool have_background = false;
  for (const auto& [key, value] : *section) {
    if (key == "background") {
      roi.background = parse_rect(value.data());
      have_background = true;
    } else if (key.rfind("foreground", 0) == 0) {
      roi.foreground.push_back(parse_rect(value.data()));
    } else {
      throw Error("unknown key in [roi]: " + key);
    }
  }
  if (!have_background) throw Error("[roi] needs a background rectangle");
  if (roi.foreground.empty()) throw Error("[roi] needs at least one foreground rectangle");
  return roi;
}

}  // namespace

Rect parse_rect(const std::string& text) {
  const auto v = parse_list<long>(text, "rectangle");
  if (v.size() != 4) throw Error("rectangle needs 'row col height width', got: " + text);
  for (long x : v)
    if (x < 0) throw Error("rectangle entries must be non-negative: " + text);
  return Rect{static_cast<std::size_t>(v[0]), static_cast<std::size_t>(v[1]), static_cast<std::size_t>(v[2]),
              static_cast<std::size_t>(v[3])};
}

RunConfig parse_run_config(std::istream& in, const std::filesystem::path& base_dir) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw Error(std::string("config: ") + e.what());
  }

  RunConfig cfg;
  cfg.output_dir = resolve(base_dir, get<std::string>(tree, "run.output", "out"));
  cfg.seed = get<std::uint64_t>(tree, "run.seed", 0);
  if (auto r = tree.get_optional<double>("run.missing_ratio")) cfg.missing_ratio = *r;
  cfg.image_format = get<std::string>(tree, "run.format", "png");
  if (cfg.image_format != "png" && cfg.image_format != "pgm")
    throw Error("run.format must be png or pgm, got " + cfg.image_format);

  SuperResConfig& s = cfg.superres;
  if (auto sr = tree.get_child_optional("superres")) {
    const auto patches = parse_list<std::size_t>(get<std::string>(*sr, "patches", "7"), "patches");
    const auto overlaps = parse_list<std::size_t>(get<std::string>(*sr, "overlaps", "4"), "overlaps");
    if (patches.size() != overlaps.size()) throw Error("superres.patches and superres.overlaps differ in length");
    s.patches.clear();
    for (std::size_t i = 0; i < patches.size(); ++i) s.patches.push_back({patches[i], overlaps[i]});
    const auto window = parse_list<std::size_t>(get<std::string>(*sr, "window", "2 2"), "window");
    if (window.size() != 2) throw Error("superres.window needs two values");
    s.window_rows = window[0];
    s.window_cols = window[1];
    auto initial = parse_list<std::size_t>(get<std::string>(*sr, "initial_rank", "3"), "initial_rank");
    if (initial.size() == 1) initial.assign(6, initial[0]);
    s.ranks.initial = initial;
    s.ranks.max_rank = get<std::size_t>(*sr, "max_rank", 8);
    s.ranks.step = get<std::size_t>(*sr, "rank_step", 1);
    s.ratio = get<std::size_t>(*sr, "ratio", 2);
    s.weights = parse_list<double>(get<std::string>(*sr, "weights", "1"), "weights");
    s.smoothing = parse_bool(get<std::string>(*sr, "smoothing", "true"), "smoothing");
    s.als.sweeps = get<std::size_t>(*sr, "sweeps", 10);
    s.als.tol = get<double>(*sr, "tol", 1e-4);
    s.accuracy = get<double>(*sr, "accuracy", 1e-3);
    s.rank_noise = get<double>(*sr, "rank_noise", 1e-2);
  }
  if (auto nb = tree.get_child_optional("noise_band")) {
    NoiseBand band;
    const auto rows = parse_list<std::size_t>(get<std::string>(*nb, "rows", ""), "noise_band.rows");
    if (rows.size() != 2) throw Error("noise_band.rows needs 'begin end'");
    band.row_begin = rows[0];
    band.row_end = rows[1];
    band.weight_sum = get<double>(*nb, "weight_sum", 0.95);
    band.patches = parse_list<std::size_t>(get<std::string>(*nb, "patches", ""), "noise_band.patches");
    s.noise_band = band;
  }
  s.seed = cfg.seed;
  cfg.roi = roi_from(tree);

  for (const auto& [section, body] : tree) {
    if (section.rfind("image", 0) != 0) continue;
    BatchItem item;
    item.name = get<std::string>(body, "name", section);
    for (const auto& p : parse_list<std::string>(get<std::string>(body, "scans", ""), section + ".scans"))
      item.scans.push_back(existing(base_dir, p));
    if (item.scans.empty()) throw Error("[" + section + "] lists no scans");
    if (auto ref = body.get_optional<std::string>("reference")) item.reference = existing(base_dir, *ref);
    cfg.items.push_back(std::move(item));
  }
  if (cfg.items.empty()) throw Error("config defines no [image.*] sections");
  for (const auto& item : cfg.items)
    if (item.scans.size() != s.weights.size())
      throw Error("item '" + item.name + "' has " + std::to_string(item.scans.size()) + " scans but " +
                  std::to_string(s.weights.size()) + " weights are configured");
  s.validate();
  if (cfg.missing_ratio && (*cfg.missing_ratio < 0.0 || *cfg.missing_ratio >= 1.0))
    throw Error("run.missing_ratio must lie in [0, 1)");
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config " + path.string());
  return parse_run_config(in, path.parent_path());
}

std::optional<RoiSpec> load_roi(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config " + path.string());
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw Error(std::string("config: ") + e.what());
  }
  return roi_from(tree);
}

}  // namespace trsr
