#include "hsi/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "hsi/error.hpp"
#include "hsi/features.hpp"
#include "hsi/filters.hpp"
#include "hsi/ingest.hpp"
#include "hsi/leakage.hpp"
#include "hsi/rng.hpp"

namespace hsi::harness {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double d = 0;
  try {
    d = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != v.size() || !std::isfinite(d)) throw InvalidArgument(key + ": expected a number, got '" + v + "'");
  return d;
}

std::uint64_t to_uint(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  unsigned long long u = 0;
  try {
    u = std::stoull(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != v.size() || v.empty() || v[0] == '-') {
    throw InvalidArgument(key + ": expected a non-negative integer, got '" + v + "'");
  }
  return u;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw InvalidArgument(key + ": expected true/false, got '" + v + "'");
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string num(double v) { return fmt("%.6f", v); }
std::string rate_str(double v) { return fmt("%g", v); }

synth::Scene load_dataset(const Dataset& d) {
  if (const auto* s = std::get_if<synth::SceneConfig>(&d)) return synth::generate_scene(*s);
  const auto& f = std::get<FileDataset>(d);
  auto cube = io::read_cube(f.cube);
  auto labels = io::read_labels(f.labels);
  if (!labels.matches(cube)) throw DataError("label map and cube extents differ");
  return {std::move(cube), std::move(labels)};
}

FeatureSet extract(const HyperCube& cube, std::span<const Pixel> pixels, const FeatureChoice& f) {
  return std::visit(
      [&](const auto& c) -> FeatureSet {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, RawSpectral>) {
          return features::raw_spectral(cube, pixels);
        } else if constexpr (std::is_same_v<T, SpatialCoords>) {
          return features::spatial_coords(cube, pixels);
        } else if constexpr (std::is_same_v<T, MeanFilterThenRaw>) {
          return features::raw_spectral(filters::mean_filter(cube, filters::WindowSpec::square(c.window)), pixels);
        } else if constexpr (std::is_same_v<T, GaussianThenRaw>) {
          return features::raw_spectral(filters::gaussian_filter(cube, {c.sigma}), pixels);
        } else if constexpr (std::is_same_v<T, Dwt3d>) {
          return features::dwt3d_features(cube, pixels);
        } else {
          return features::emp_features(cube, pixels, {c.components, c.radius, true});
        }
      },
      f);
}

classify::TrainedModel fit(const ClassifierChoice& choice, const FeatureSet& x, const std::vector<ClassId>& y,
                           std::uint64_t seed) {
  if (const auto* k = std::get_if<Knn>(&choice)) return classify::knn_train(x, y, k->k);
  if (const auto* f = std::get_if<Forest>(&choice)) return classify::rf_train(x, y, f->trees, f->max_depth, seed);
  const auto& svm = std::get<LinearSvm>(choice);
  double cost = svm.costs.front();
  if (svm.costs.size() > 1) {
    // Folds shrink to the smallest class so that low sampling rates can still select a cost.
    std::map<ClassId, std::size_t> counts;
    for (ClassId c : y) ++counts[c];
    std::size_t smallest = y.size();
    for (const auto& [c, n] : counts) smallest = std::min(smallest, n);
    const std::size_t folds = std::min(svm.folds, smallest);
    if (folds >= 2) {
      classify::CvGrid grid{folds, {}};
      for (double c : svm.costs) grid.candidates.push_back(classify::SvmParams{c, svm.epochs});
      const auto cv = classify::cross_validate(x, y, grid, derive_seed(seed, 1));
      cost = svm.costs[cv.best];
    }
  }
  return classify::svm_train(x, y, cost, svm.epochs, derive_seed(seed, 2));
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
}

}  // namespace

// ------------------------------------------------------------------ config

void ExperimentConfig::validate() const {
  if (repetitions == 0) throw InvalidArgument("repetitions must be >= 1");
  if (rates.empty()) throw InvalidArgument("at least one sampling rate is required");
  for (double r : rates) {
    if (!(r > 0.0 && r < 1.0)) throw InvalidArgument("sampling rates must lie in (0, 1)");
  }
  if (strategies.empty()) throw InvalidArgument("at least one sampling strategy is required");
  if (features.empty()) throw InvalidArgument("at least one feature is required");
  if (const auto* s = std::get_if<synth::SceneConfig>(&dataset)) s->validate();
  if (const auto* svm = std::get_if<LinearSvm>(&classifier); svm && svm->costs.empty()) {
    throw InvalidArgument("svm cost grid is empty");
  }
}

FeatureChoice parse_feature(const std::string& text) {
  const auto parts = split_list(text, ':');
  if (parts.empty()) throw InvalidArgument("empty feature name");
  const auto& kind = parts[0];
  auto arg = [&](std::size_t i, const char* what) {
    if (parts.size() <= i) throw InvalidArgument("feature '" + text + "' is missing its " + what);
    return parts[i];
  };
  if (kind == "raw" && parts.size() == 1) return RawSpectral{};
  if (kind == "coords" && parts.size() == 1) return SpatialCoords{};
  if (kind == "dwt" && parts.size() == 1) return Dwt3d{};
  if (kind == "mean" && parts.size() == 2) {
    const auto w = to_uint("feature", arg(1, "window"));
    filters::WindowSpec::square(w).validate();
    return MeanFilterThenRaw{w};
  }
  if (kind == "gaussian" && parts.size() == 2) {
    const double s = to_double("feature", arg(1, "sigma"));
    filters::GaussianSpec{s}.validate();
    return GaussianThenRaw{s};
  }
  if (kind == "emp" && parts.size() <= 3) {
    Emp e;
    if (parts.size() > 1) e.components = to_uint("feature", parts[1]);
    if (parts.size() > 2) e.radius = to_uint("feature", parts[2]);
    if (e.components == 0 || e.radius == 0) throw InvalidArgument("emp needs m >= 1 and n >= 1");
    return e;
  }
  throw InvalidArgument("unknown feature '" + text + "' (raw, coords, mean:<w>, gaussian:<sigma>, dwt, emp[:m[:n]])");
}

ClassifierChoice parse_classifier(const std::string& text) {
  const auto parts = split_list(text, ':');
  if (parts.empty()) throw InvalidArgument("empty classifier name");
  if (parts[0] == "knn" && parts.size() <= 2) {
    Knn k;
    if (parts.size() == 2) k.k = to_uint("classifier", parts[1]);
    if (k.k == 0) throw InvalidArgument("knn needs k >= 1");
    return k;
  }
  if (parts[0] == "svm" && parts.size() <= 2) {
    LinearSvm s;
    if (parts.size() == 2) {
      s.costs.clear();
      for (const auto& c : split_list(parts[1], '/')) {
        const double v = to_double("classifier", c);
        if (!(v > 0.0)) throw InvalidArgument("svm costs must be > 0");
        s.costs.push_back(v);
      }
    }
    return s;
  }
  if (parts[0] == "rf" && parts.size() <= 3) {
    Forest f;
    if (parts.size() > 1) f.trees = to_uint("classifier", parts[1]);
    if (parts.size() > 2) f.max_depth = to_uint("classifier", parts[2]);
    if (f.trees == 0) throw InvalidArgument("rf needs at least one tree");
    return f;
  }
  throw InvalidArgument("unknown classifier '" + text + "' (knn[:k], svm[:c1/c2/..], rf[:trees[:depth]])");
}

std::string feature_name(const FeatureChoice& f) {
  return std::visit(
      [](const auto& c) -> std::string {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, RawSpectral>) return "raw";
        else if constexpr (std::is_same_v<T, SpatialCoords>) return "coords";
        else if constexpr (std::is_same_v<T, MeanFilterThenRaw>) return "mean:" + std::to_string(c.window);
        else if constexpr (std::is_same_v<T, GaussianThenRaw>) return "gaussian:" + fmt("%g", c.sigma);
        else if constexpr (std::is_same_v<T, Dwt3d>) return "dwt";
        else return "emp:" + std::to_string(c.components) + ":" + std::to_string(c.radius);
      },
      f);
}

std::string classifier_name(const ClassifierChoice& c) {
  if (const auto* k = std::get_if<Knn>(&c)) return "knn:" + std::to_string(k->k);
  if (const auto* f = std::get_if<Forest>(&c)) {
    return "rf:" + std::to_string(f->trees) + ":" + std::to_string(f->max_depth);
  }
  std::string s = "svm:";
  const auto& svm = std::get<LinearSvm>(c);
  for (std::size_t i = 0; i < svm.costs.size(); ++i) s += (i ? "/" : "") + fmt("%g", svm.costs[i]);
  return s;
}

std::size_t effective_window(const FeatureChoice& f) {
  return std::visit(
      [](const auto& c) -> std::size_t {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, MeanFilterThenRaw>) {
          return c.window;
        } else if constexpr (std::is_same_v<T, GaussianThenRaw>) {
          return 2 * filters::GaussianSpec{c.sigma}.truncation_radius() + 1;
        } else if constexpr (std::is_same_v<T, Dwt3d>) {
          // Haar dilations 1+2+4 forward along x or y, then the 3×3 mean: reach 8.
          return 17;
        } else if constexpr (std::is_same_v<T, Emp>) {
          std::size_t reach = 0;
          for (const auto& o : features::disk_element(c.radius)) {
            reach = std::max<std::size_t>(reach, static_cast<std::size_t>(std::max(std::abs(o.dy), std::abs(o.dx))));
          }
          return 4 * reach + 1;  // erosion then dilation
        } else {
          return 1;
        }
      },
      f);
}

ExperimentConfig parse_config(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  std::size_t no = 0;
  while (std::getline(in, line)) {
    ++no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw InvalidArgument("config line " + std::to_string(no) + ": expected key = value");
    const auto key = trim(line.substr(0, eq));
    if (kv.count(key)) throw InvalidArgument("config line " + std::to_string(no) + ": duplicate key '" + key + "'");
    kv[key] = trim(line.substr(eq + 1));
  }

  ExperimentConfig cfg;
  synth::SceneConfig scene;
  std::string dataset = "synthetic";
  FileDataset files;
  std::string layout = "voronoi";
  std::size_t seeds_per_class = synth::VoronoiBlobs{}.seeds_per_class;
  std::size_t block = synth::GridBlocks{}.block;
  std::size_t epochs = LinearSvm{}.epochs;
  std::size_t folds = LinearSvm{}.folds;

  for (const auto& [key, v] : kv) {
    if (key == "dataset") dataset = v;
    else if (key == "cube") files.cube = v;
    else if (key == "labels") files.labels = v;
    else if (key == "scene.height") scene.height = to_uint(key, v);
    else if (key == "scene.width") scene.width = to_uint(key, v);
    else if (key == "scene.bands") scene.bands = to_uint(key, v);
    else if (key == "scene.classes") scene.classes = to_uint(key, v);
    else if (key == "scene.layout") layout = v;
    else if (key == "scene.seeds_per_class") seeds_per_class = to_uint(key, v);
    else if (key == "scene.block") block = to_uint(key, v);
    else if (key == "scene.separation") scene.signature_separation = to_double(key, v);
    else if (key == "scene.noise") scene.noise_sigma = to_double(key, v);
    else if (key == "scene.seed") scene.rng_seed = to_uint(key, v);
    else if (key == "strategy") {
      cfg.strategies.clear();
      for (const auto& s : split_list(v, ',')) cfg.strategies.push_back(sampling::parse_strategy(s));
    } else if (key == "rates") {
      cfg.rates.clear();
      for (const auto& s : split_list(v, ',')) cfg.rates.push_back(to_double(key, s));
    } else if (key == "feature") {
      cfg.features.clear();
      for (const auto& s : split_list(v, ',')) cfg.features.push_back(parse_feature(s));
    } else if (key == "classifier") cfg.classifier = parse_classifier(v);
    else if (key == "svm.epochs") epochs = to_uint(key, v);
    else if (key == "cv.folds") folds = to_uint(key, v);
    else if (key == "repetitions") cfg.repetitions = to_uint(key, v);
    else if (key == "seed") cfg.master_seed = to_uint(key, v);
    else if (key == "output") cfg.output_dir = v;
    else if (key == "save_splits") cfg.save_splits = to_bool(key, v);
    else if (key == "save_maps") cfg.save_maps = to_bool(key, v);
    else throw InvalidArgument("unknown config key '" + key + "'");
  }

  if (layout == "voronoi") scene.layout = synth::VoronoiBlobs{seeds_per_class};
  else if (layout == "grid") scene.layout = synth::GridBlocks{block};
  else throw InvalidArgument("scene.layout must be voronoi or grid");

  if (dataset == "synthetic") {
    cfg.dataset = scene;
  } else if (dataset == "files") {
    if (files.cube.empty() || files.labels.empty()) throw InvalidArgument("dataset = files needs cube and labels");
    cfg.dataset = files;
  } else {
    throw InvalidArgument("dataset must be synthetic or files");
  }
  if (auto* svm = std::get_if<LinearSvm>(&cfg.classifier)) {
    svm->epochs = epochs;
    svm->folds = folds;
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  auto cfg = parse_config(ss.str());
  // Relative dataset paths resolve against the config file's directory.
  if (auto* f = std::get_if<FileDataset>(&cfg.dataset)) {
    const auto base = path.parent_path();
    if (f->cube.is_relative()) f->cube = base / f->cube;
    if (f->labels.is_relative()) f->labels = base / f->labels;
  }
  return cfg;
}

std::uint64_t repetition_seed(std::uint64_t master_seed, std::size_t repetition) {
  return derive_seed(master_seed, repetition);
}

// ------------------------------------------------------------------ run

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  const auto scene = load_dataset(config.dataset);
  const auto pixels = labeled_pixels(scene.labels);
  if (pixels.empty()) throw DataError("label map has no labeled pixels");
  if (!config.output_dir.empty()) std::filesystem::create_directories(config.output_dir);

  ExperimentResult result;
  const std::string cls = classifier_name(config.classifier);
  for (const auto& feature : config.features) {
    const std::string fname = feature_name(feature);
    const FeatureSet all = extract(scene.cube, pixels, feature);
    const auto truth = classify::labels_for(all, scene.labels);
    const std::size_t window = effective_window(feature);

    for (auto strategy : config.strategies) {
      for (double rate : config.rates) {
        std::vector<metrics::EvalReport> reports;
        std::vector<double> overlaps;
        std::size_t failures = 0;
        for (std::size_t rep = 0; rep < config.repetitions; ++rep) {
          ResultRow row{strategy, rate, fname, cls, rep, repetition_seed(config.master_seed, rep), {}, 0.0, {}};
          try {
            const auto split = sampling::make_split(scene.labels, {rate, row.seed, strategy});
            std::vector<std::size_t> tr, te;
            for (std::size_t i = 0; i < all.count(); ++i) {
              const auto s = split.at(all.coords()[i].y, all.coords()[i].x);
              if (s == SplitState::Train) tr.push_back(i);
              else if (s == SplitState::Test) te.push_back(i);
            }
            const FeatureSet xtr = all.subset(tr), xte = all.subset(te);
            std::vector<ClassId> ytr, yte;
            for (std::size_t i : tr) ytr.push_back(truth[i]);
            for (std::size_t i : te) yte.push_back(truth[i]);
            const auto model = fit(config.classifier, xtr, ytr, row.seed);
            const auto pred = classify::predict(model, xte);
            row.report = metrics::evaluate(metrics::confusion(pred, yte, scene.labels.num_classes()));
            row.overlap_rate = leakage::overlap_rate(split, window);

            if (!config.output_dir.empty()) {
              const std::string tag = std::string(sampling::to_string(strategy)) + "_" + rate_str(rate) + "_" +
                                      std::to_string(rep);
              if (config.save_splits) io::write_split(split, config.output_dir / ("split_" + tag + ".txt"));
              if (config.save_maps) {
                const auto all_pred = classify::predict(model, all);
                std::vector<ClassId> map(scene.labels.labels().size(), 0);
                for (std::size_t i = 0; i < all.count(); ++i) {
                  map[all.coords()[i].y * scene.labels.width() + all.coords()[i].x] = all_pred[i];
                }
                std::string safe = fname;
                std::replace(safe.begin(), safe.end(), ':', '-');
                write_ppm(render_map(map, scene.labels.height(), scene.labels.width()),
                          config.output_dir / ("map_" + safe + "_" + tag + ".ppm"));
              }
            }
            reports.push_back(*row.report);
            overlaps.push_back(row.overlap_rate);
          } catch (const Error& e) {
            row.report.reset();
            row.error = e.what();
            ++failures;
            std::cerr << "repetition " << rep << " (" << sampling::to_string(strategy) << ", rate " << rate << ", "
                      << fname << ") failed: " << e.what() << '\n';
          }
          result.rows.push_back(std::move(row));
        }
        AggregateRow agg{strategy, rate, fname, cls, failures, {}, 0.0};
        if (!reports.empty()) {
          agg.report = metrics::aggregate(reports);
          for (double o : overlaps) agg.overlap_mean += o / static_cast<double>(overlaps.size());
        }
        result.aggregates.push_back(std::move(agg));
      }
    }
  }

  if (!config.output_dir.empty()) {
    write_text(config.output_dir / "results.csv", results_csv(result));
    write_text(config.output_dir / "aggregate.csv", aggregate_csv(result));
    std::string curve = "strategy,rate,window,overlap_rate\n";
    const std::vector<std::size_t> windows{1, 3, 5, 7, 9, 11};
    for (auto strategy : config.strategies) {
      const auto c = leakage::overlap_curve(scene.labels, strategy, config.rates, windows, config.master_seed);
      for (std::size_t r = 0; r < c.rates.size(); ++r)
        for (std::size_t w = 0; w < windows.size(); ++w)
          curve += std::string(sampling::to_string(strategy)) + "," + rate_str(c.rates[r]) + "," +
                   std::to_string(windows[w]) + "," + num(c.values[r][w]) + "\n";
    }
    write_text(config.output_dir / "curve_overlap.csv", curve);
    const auto decay = leakage::correlation_decay(scene.cube, leakage::Axis::X, 10);
    std::string dc = "lag,rho\n";
    for (std::size_t i = 0; i < decay.lags.size(); ++i)
      dc += std::to_string(decay.lags[i]) + "," + (decay.rho[i] ? num(*decay.rho[i]) : std::string("NA")) + "\n";
    write_text(config.output_dir / "curve_correlation.csv", dc);
    if (config.save_maps) {
      write_ppm(render_map(scene.labels.labels(), scene.labels.height(), scene.labels.width()),
                config.output_dir / "map_truth.ppm");
    }
  }
  return result;
}

std::string results_csv(const ExperimentResult& result) {
  std::string s = "strategy,rate,feature,classifier,repetition,oa,aa,kappa,overlap_rate,seed\n";
  for (const auto& r : result.rows) {
    s += std::string(sampling::to_string(r.strategy)) + "," + rate_str(r.rate) + "," + r.feature + "," + r.classifier +
         "," + std::to_string(r.repetition) + ",";
    if (r.report) {
      s += num(r.report->oa) + "," + num(r.report->aa) + "," + num(r.report->kappa) + "," + num(r.overlap_rate);
    } else {
      s += "NA,NA,NA,NA";
    }
    s += "," + std::to_string(r.seed) + "\n";
  }
  return s;
}

std::string aggregate_csv(const ExperimentResult& result) {
  std::string s =
      "strategy,rate,feature,classifier,repetitions,failures,oa_mean,oa_std,aa_mean,aa_std,kappa_mean,kappa_std,"
      "overlap_mean\n";
  for (const auto& a : result.aggregates) {
    s += std::string(sampling::to_string(a.strategy)) + "," + rate_str(a.rate) + "," + a.feature + "," + a.classifier +
         ",";
    if (a.report) {
      const auto& r = *a.report;
      s += std::to_string(r.repetitions) + "," + std::to_string(a.failures) + "," + num(r.oa) + "," + num(r.oa_std) +
           "," + num(r.aa) + "," + num(r.aa_std) + "," + num(r.kappa) + "," + num(r.kappa_std) + "," +
           num(a.overlap_mean);
    } else {
      s += "0," + std::to_string(a.failures) + ",NA,NA,NA,NA,NA,NA,NA";
    }
    s += "\n";
  }
  return s;
}

// ------------------------------------------------------------------ maps

Palette default_palette() {
  return {{230, 25, 75},   {60, 180, 75},   {255, 225, 25}, {0, 130, 200},   {245, 130, 48}, {145, 30, 180},
          {70, 240, 240},  {240, 50, 230},  {210, 245, 60}, {250, 190, 212}, {0, 128, 128},  {220, 190, 255},
          {170, 110, 40},  {255, 250, 200}, {128, 0, 0},    {170, 255, 195}};
}

RgbImage render_map(std::span<const ClassId> classes, std::size_t height, std::size_t width, const Palette& palette) {
  if (classes.size() != height * width) throw InvalidArgument("map data does not match its dimensions");
  RgbImage img{height, width, std::vector<Rgb>(classes.size()), {}};
  std::vector<bool> warned;
  for (std::size_t i = 0; i < classes.size(); ++i) {
    const ClassId c = classes[i];
    if (c == 0) continue;
    if (c <= palette.size()) {
      img.pixels[i] = palette[c - 1];
      continue;
    }
    const std::uint64_t h = mix64(c);
    img.pixels[i] = {static_cast<std::uint8_t>(64 + (h & 0x7F)), static_cast<std::uint8_t>(64 + ((h >> 8) & 0x7F)),
                     static_cast<std::uint8_t>(64 + ((h >> 16) & 0x7F))};
    if (warned.size() <= c) warned.resize(c + 1, false);
    if (!warned[c]) {
      warned[c] = true;
      img.warnings.push_back("class " + std::to_string(c) + " has no palette entry; using a hashed colour");
    }
  }
  return img;
}

void write_ppm(const RgbImage& image, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out << "P6\n" << image.width << ' ' << image.height << "\n255\n";
  for (const Rgb& p : image.pixels) {
    const char rgb[3] = {static_cast<char>(p.r), static_cast<char>(p.g), static_cast<char>(p.b)};
    out.write(rgb, 3);
  }
  if (!out) throw DataError("write failed: " + path.string());
}

}  // namespace hsi::harness
