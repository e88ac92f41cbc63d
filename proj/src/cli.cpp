#include "hsi/cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "hsi/classify.hpp"
#include "hsi/error.hpp"
#include "hsi/features.hpp"
#include "hsi/filters.hpp"
#include "hsi/harness.hpp"
#include "hsi/ingest.hpp"
#include "hsi/leakage.hpp"
#include "hsi/metrics.hpp"
#include "hsi/sampling.hpp"
#include "hsi/synthgen.hpp"

namespace hsi::cli {
namespace {

std::string g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw DataError("cannot write " + path);
  f << text;
}

FeatureSet compute_features(const HyperCube& cube, std::span<const Pixel> pixels, const std::string& spec) {
  const auto choice = harness::parse_feature(spec);
  return std::visit(
      [&](const auto& c) -> FeatureSet {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, harness::RawSpectral>) return features::raw_spectral(cube, pixels);
        else if constexpr (std::is_same_v<T, harness::SpatialCoords>) return features::spatial_coords(cube, pixels);
        else if constexpr (std::is_same_v<T, harness::MeanFilterThenRaw>)
          return features::raw_spectral(filters::mean_filter(cube, filters::WindowSpec::square(c.window)), pixels);
        else if constexpr (std::is_same_v<T, harness::GaussianThenRaw>)
          return features::raw_spectral(filters::gaussian_filter(cube, {c.sigma}), pixels);
        else if constexpr (std::is_same_v<T, harness::Dwt3d>) return features::dwt3d_features(cube, pixels);
        else return features::emp_features(cube, pixels, {c.components, c.radius, true});
      },
      choice);
}

// Predictions travel as "y,x,class" rows so that maps missing a class stay representable.
void write_predictions(const std::string& path, std::span<const Pixel> coords, std::span<const ClassId> pred,
                       std::ostream& out) {
  std::string s = "y,x,class\n";
  for (std::size_t i = 0; i < coords.size(); ++i) {
    s += std::to_string(coords[i].y) + "," + std::to_string(coords[i].x) + "," + std::to_string(pred[i]) + "\n";
  }
  emit(s, path, out);
}

std::map<Pixel, ClassId> read_predictions(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(ParseError::Kind::Io, "cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("y,x,class", 0) != 0) {
    throw ParseError(ParseError::Kind::MagicMismatch, path + ": expected header y,x,class");
  }
  std::map<Pixel, ClassId> preds;
  std::size_t no = 1;
  while (std::getline(in, line)) {
    ++no;
    if (line.empty() || line == "\r") continue;
    unsigned long y = 0, x = 0, c = 0;
    char tail = 0;
    if (std::sscanf(line.c_str(), "%lu,%lu,%lu%c", &y, &x, &c, &tail) < 3 || (tail && tail != '\r') || c > 0xFFFF) {
      throw ParseError(ParseError::Kind::Malformed, path + ":" + std::to_string(no) + ": bad prediction row");
    }
    if (!preds.emplace(Pixel{y, x}, static_cast<ClassId>(c)).second) {
      throw ParseError(ParseError::Kind::Malformed, path + ":" + std::to_string(no) + ": duplicate pixel");
    }
  }
  return preds;
}

std::string report_text(const metrics::EvalReport& r) {
  std::string s = "metric,value\noa," + g(r.oa) + "\naa," + g(r.aa) + "\nkappa," + g(r.kappa) + "\n";
  for (std::size_t c = 0; c < r.per_class_recall.size(); ++c) {
    const double v = r.per_class_recall[c];
    s += "recall_" + std::to_string(c + 1) + "," + (std::isnan(v) ? std::string("NA") : g(v)) + "\n";
  }
  return s;
}

struct Options {
  std::uint64_t seed = 0;
  // generate
  synth::SceneConfig scene;
  std::string layout = "voronoi";
  std::size_t seeds_per_class = 4, block = 8;
  // shared paths
  std::string cube, labels, split, features, predictions, config, out, out_cube, out_labels;
  // sample
  std::string strategy = "stratified";
  double rate = 0.1;
  // audit
  std::vector<std::size_t> windows{1, 3, 5, 7, 9, 11};
  // filter
  std::optional<std::size_t> mean;
  std::optional<double> sigma;
  // features / classify
  std::string feature = "raw", classifier = "knn:1";
  bool all_pixels = false;
  std::string map;
  std::size_t epochs = 30, folds = 5;
  // run
  std::string output_dir;
  // correlate
  std::size_t max_lag = 10;
  std::string axis = "x";
  std::optional<std::size_t> patch_radius;
};

int dispatch(const CLI::App& app, Options& o, std::ostream& out, std::ostream& err) {
  const auto* sub = app.get_subcommands().front();
  const std::string name = sub->get_name();

  if (name == "generate") {
    if (o.layout == "voronoi") o.scene.layout = synth::VoronoiBlobs{o.seeds_per_class};
    else if (o.layout == "grid") o.scene.layout = synth::GridBlocks{o.block};
    else throw InvalidArgument("--layout must be voronoi or grid");
    o.scene.rng_seed = o.seed;
    const auto scene = synth::generate_scene(o.scene);
    io::write_cube(scene.cube, o.out_cube);
    io::write_labels(scene.labels, o.out_labels);
    out << "wrote " << o.scene.height << "x" << o.scene.width << "x" << o.scene.bands << " cube with "
        << scene.labels.num_classes() << " classes\n";
    return 0;
  }

  if (name == "sample") {
    const auto labels = io::read_labels(o.labels);
    const auto split = sampling::make_split(labels, {o.rate, o.seed, sampling::parse_strategy(o.strategy)});
    io::write_split(split, o.out);
    const auto s = sampling::split_summary(split, labels);
    out << "class,train,test\n";
    for (const auto& [c, n] : s.per_class) out << c << "," << n.train << "," << n.test << "\n";
    out << "total," << s.train << "," << s.test << "\n";
    return 0;
  }

  if (name == "audit") {
    const auto labels = io::read_labels(o.labels);
    const auto split = io::read_split(o.split, labels);
    std::string s = "window,overlap_rate\n";
    for (std::size_t w : o.windows) s += std::to_string(w) + "," + g(leakage::overlap_rate(split, w)) + "\n";
    emit(s, o.out, out);
    return 0;
  }

  if (name == "filter") {
    if (o.mean.has_value() == o.sigma.has_value()) throw InvalidArgument("filter needs exactly one of --mean, --gaussian");
    const auto cube = io::read_cube(o.cube);
    const auto result = o.mean ? filters::mean_filter(cube, filters::WindowSpec::square(*o.mean))
                               : filters::gaussian_filter(cube, {*o.sigma});
    io::write_cube(result, o.out);
    return 0;
  }

  if (name == "features") {
    const auto cube = io::read_cube(o.cube);
    std::vector<Pixel> pixels;
    if (o.labels.empty()) {
      for (std::size_t y = 0; y < cube.height(); ++y)
        for (std::size_t x = 0; x < cube.width(); ++x) pixels.push_back({y, x});
    } else {
      const auto labels = io::read_labels(o.labels);
      if (!labels.matches(cube)) throw DataError("label map and cube extents differ");
      pixels = labeled_pixels(labels);
    }
    io::write_features(compute_features(cube, pixels, o.feature), o.out);
    return 0;
  }

  if (name == "classify") {
    const auto labels = io::read_labels(o.labels);
    const auto split = io::read_split(o.split, labels);
    std::optional<FeatureSet> feats;
    if (!o.features.empty()) {
      feats = io::read_features(o.features, labels.height(), labels.width());
    } else {
      if (o.cube.empty()) throw InvalidArgument("classify needs --features or --cube");
      const auto cube = io::read_cube(o.cube);
      if (!labels.matches(cube)) throw DataError("label map and cube extents differ");
      std::vector<Pixel> pixels;
      for (std::size_t y = 0; y < cube.height(); ++y)
        for (std::size_t x = 0; x < cube.width(); ++x)
          if (o.all_pixels || labels.at(y, x) != 0) pixels.push_back({y, x});
      feats = compute_features(cube, pixels, o.feature);
    }
    const auto train_set = feats->select(split, SplitState::Train);
    if (train_set.count() == 0) throw DataError("split has no training pixels among the feature rows");
    const auto ytrain = classify::labels_for(train_set, labels);

    classify::ClassifierSpec spec;
    const auto choice = harness::parse_classifier(o.classifier);
    if (const auto* k = std::get_if<harness::Knn>(&choice)) spec = classify::KnnParams{k->k};
    else if (const auto* f = std::get_if<harness::Forest>(&choice)) spec = classify::ForestParams{f->trees, f->max_depth};
    else {
      const auto& svm = std::get<harness::LinearSvm>(choice);
      double cost = svm.costs.front();
      if (svm.costs.size() > 1) {
        classify::CvGrid grid{o.folds, {}};
        for (double c : svm.costs) grid.candidates.push_back(classify::SvmParams{c, o.epochs});
        const auto cv = classify::cross_validate(train_set, ytrain, grid, o.seed);
        cost = svm.costs[cv.best];
        err << "cv selected cost " << g(cost) << "\n";
      }
      spec = classify::SvmParams{cost, o.epochs};
    }
    const auto model = classify::train(spec, train_set, ytrain, o.seed);
    const auto pred = classify::predict(model, *feats);
    write_predictions(o.out, feats->coords(), pred, out);
    if (!o.map.empty()) {
      std::vector<ClassId> grid(labels.height() * labels.width(), 0);
      for (std::size_t i = 0; i < pred.size(); ++i) grid[feats->coords()[i].y * labels.width() + feats->coords()[i].x] = pred[i];
      const auto img = harness::render_map(grid, labels.height(), labels.width());
      for (const auto& w : img.warnings) err << "warning: " << w << "\n";
      harness::write_ppm(img, o.map);
    }
    return 0;
  }

  if (name == "evaluate") {
    const auto labels = io::read_labels(o.labels);
    const auto split = io::read_split(o.split, labels);
    const auto preds = read_predictions(o.predictions);
    std::vector<ClassId> p, t;
    for (const auto& px : split.pixels_in(SplitState::Test)) {
      const auto it = preds.find(px);
      if (it == preds.end()) {
        throw DataError("no prediction for test pixel (" + std::to_string(px.y) + "," + std::to_string(px.x) + ")");
      }
      p.push_back(it->second);
      t.push_back(labels.at(px.y, px.x));
    }
    if (t.empty()) throw DataError("split has no test pixels");
    emit(report_text(metrics::evaluate(metrics::confusion(p, t, labels.num_classes()))), o.out, out);
    return 0;
  }

  if (name == "run") {
    auto cfg = harness::load_config(o.config);
    if (sub->count("--seed")) cfg.master_seed = o.seed;
    if (!o.output_dir.empty()) cfg.output_dir = o.output_dir;
    const auto result = harness::run_experiment(cfg);
    if (cfg.output_dir.empty()) out << harness::aggregate_csv(result);
    else out << "wrote " << (cfg.output_dir / "aggregate.csv").string() << "\n";
    return 0;
  }

  if (name == "correlate") {
    const auto cube = io::read_cube(o.cube);
    std::string s;
    if (o.patch_radius) {
      const auto patch = leakage::correlation_patch(cube, *o.patch_radius);
      const auto r = static_cast<std::ptrdiff_t>(*o.patch_radius);
      s = "dy,dx,rho,pairs\n";
      for (std::ptrdiff_t dy = -r; dy <= r; ++dy) {
        for (std::ptrdiff_t dx = -r; dx <= r; ++dx) {
          const std::size_t i = static_cast<std::size_t>((dy + r) * (2 * r + 1) + (dx + r));
          s += std::to_string(dy) + "," + std::to_string(dx) + "," +
               (patch.rho[i] ? g(*patch.rho[i]) : std::string("NA")) + "," + std::to_string(patch.pairs[i]) + "\n";
        }
      }
    } else {
      leakage::Axis axis;
      if (o.axis == "x") axis = leakage::Axis::X;
      else if (o.axis == "y") axis = leakage::Axis::Y;
      else throw InvalidArgument("--axis must be x or y");
      const auto curve = leakage::correlation_decay(cube, axis, o.max_lag);
      s = "lag,rho,pairs\n";
      for (std::size_t i = 0; i < curve.lags.size(); ++i) {
        s += std::to_string(curve.lags[i]) + "," + (curve.rho[i] ? g(*curve.rho[i]) : std::string("NA")) + "," +
             std::to_string(curve.pairs[i]) + "\n";
      }
    }
    emit(s, o.out, out);
    return 0;
  }

  if (name == "render") {
    std::vector<ClassId> grid;
    std::size_t h = 0, w = 0;
    if (!o.predictions.empty()) {
      if (o.labels.empty()) throw InvalidArgument("render --predictions needs --labels for the image extent");
      const auto labels = io::read_labels(o.labels);
      h = labels.height();
      w = labels.width();
      grid.assign(h * w, 0);
      for (const auto& [px, c] : read_predictions(o.predictions)) {
        if (px.y >= h || px.x >= w) throw DataError("prediction outside the label map");
        grid[px.y * w + px.x] = c;
      }
    } else {
      const auto labels = io::read_labels(o.labels);
      h = labels.height();
      w = labels.width();
      grid.assign(labels.labels().begin(), labels.labels().end());
    }
    const auto img = harness::render_map(grid, h, w);
    for (const auto& msg : img.warnings) err << "warning: " << msg << "\n";
    harness::write_ppm(img, o.out);
    return 0;
  }
  throw InvalidArgument("unknown subcommand " + name);
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hyperspectral classification with spatial-leakage diagnostics", "hsi"};
  app.require_subcommand(1, 1);
  Options o;
  auto seed = [&](CLI::App* s) { s->add_option("--seed", o.seed, "RNG seed")->capture_default_str(); };

  auto* gen = app.add_subcommand("generate", "Synthesize a labeled cube");
  seed(gen);
  gen->add_option("--height", o.scene.height)->capture_default_str();
  gen->add_option("--width", o.scene.width)->capture_default_str();
  gen->add_option("--bands", o.scene.bands)->capture_default_str();
  gen->add_option("--classes", o.scene.classes)->capture_default_str();
  gen->add_option("--layout", o.layout, "voronoi or grid")->capture_default_str();
  gen->add_option("--seeds-per-class", o.seeds_per_class)->capture_default_str();
  gen->add_option("--block", o.block)->capture_default_str();
  gen->add_option("--separation", o.scene.signature_separation)->capture_default_str();
  gen->add_option("--noise", o.scene.noise_sigma)->capture_default_str();
  gen->add_option("--cube", o.out_cube, "output cube")->required();
  gen->add_option("--labels", o.out_labels, "output label map")->required();

  auto* smp = app.add_subcommand("sample", "Draw a train/test split");
  seed(smp);
  smp->add_option("--labels", o.labels)->required();
  smp->add_option("--strategy", o.strategy, "stratified or controlled")->capture_default_str();
  smp->add_option("--rate", o.rate)->capture_default_str();
  smp->add_option("--out", o.out, "split file")->required();

  auto* aud = app.add_subcommand("audit", "Overlap rate of a split per window size");
  seed(aud);
  aud->add_option("--labels", o.labels)->required();
  aud->add_option("--split", o.split)->required();
  aud->add_option("--window", o.windows, "odd window sizes")->capture_default_str();
  aud->add_option("--out", o.out, "CSV (default stdout)");

  auto* flt = app.add_subcommand("filter", "Spatially filter every band");
  seed(flt);
  flt->add_option("--cube", o.cube)->required();
  flt->add_option("--mean", o.mean, "square window size");
  flt->add_option("--gaussian", o.sigma, "sigma");
  flt->add_option("--out", o.out)->required();

  auto* fea = app.add_subcommand("features", "Extract features to CSV");
  seed(fea);
  fea->add_option("--cube", o.cube)->required();
  fea->add_option("--labels", o.labels, "restrict to labeled pixels");
  fea->add_option("--feature", o.feature, "raw, coords, mean:w, gaussian:s, dwt, emp:m:n")->capture_default_str();
  fea->add_option("--out", o.out)->required();

  auto* cls = app.add_subcommand("classify", "Train on Train pixels and predict");
  seed(cls);
  cls->add_option("--labels", o.labels)->required();
  cls->add_option("--split", o.split)->required();
  cls->add_option("--features", o.features, "feature CSV");
  cls->add_option("--cube", o.cube, "cube, features computed with --feature");
  cls->add_option("--feature", o.feature)->capture_default_str();
  cls->add_flag("--all-pixels", o.all_pixels, "predict unlabeled pixels too (with --cube)");
  cls->add_option("--classifier", o.classifier, "knn:k, svm:c1/c2/.., rf:trees:depth")->capture_default_str();
  cls->add_option("--epochs", o.epochs)->capture_default_str();
  cls->add_option("--folds", o.folds)->capture_default_str();
  cls->add_option("--out", o.out, "prediction CSV (default stdout)");
  cls->add_option("--map", o.map, "prediction map (PPM)");

  auto* evl = app.add_subcommand("evaluate", "Score predictions on Test pixels");
  seed(evl);
  evl->add_option("--labels", o.labels)->required();
  evl->add_option("--split", o.split)->required();
  evl->add_option("--predictions", o.predictions)->required();
  evl->add_option("--out", o.out, "CSV (default stdout)");

  auto* run_cmd = app.add_subcommand("run", "Run a full experiment from a config file");
  seed(run_cmd);
  run_cmd->add_option("--config", o.config)->required();
  run_cmd->add_option("--output", o.output_dir, "overrides the config's output directory");

  auto* cor = app.add_subcommand("correlate", "Spectral correlation against spatial lag");
  seed(cor);
  cor->add_option("--cube", o.cube)->required();
  cor->add_option("--max-lag", o.max_lag)->capture_default_str();
  cor->add_option("--axis", o.axis, "x or y")->capture_default_str();
  cor->add_option("--patch-radius", o.patch_radius, "emit the 2-D patch instead");
  cor->add_option("--out", o.out, "CSV (default stdout)");

  auto* ren = app.add_subcommand("render", "Render labels or predictions as PPM");
  seed(ren);
  ren->add_option("--labels", o.labels)->required();
  ren->add_option("--predictions", o.predictions);
  ren->add_option("--out", o.out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    if (code != 0) err << app.help();
    return code == 0 ? 0 : 1;
  }

  try {
    return dispatch(app, o, out, err);
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace hsi::cli
