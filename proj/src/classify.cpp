#include "hsi/classify.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "hsi/error.hpp"
#include "hsi/rng.hpp"

namespace hsi::classify {
namespace {

void check_training(const FeatureSet& features, std::span<const ClassId> labels) {
  if (features.count() == 0) throw DataError("empty training set");
  if (labels.size() != features.count()) throw InvalidArgument("training labels do not match feature rows");
  for (ClassId c : labels) {
    if (c == 0) throw InvalidArgument("training label 0 (unlabeled)");
  }
}

void check_dim(const TrainedModel& model, const FeatureSet& features) {
  if (features.dim() != model.dim) {
    throw InvalidArgument("feature dimension " + std::to_string(features.dim()) + " does not match model dimension " +
                          std::to_string(model.dim));
  }
}

std::size_t max_class(std::span<const ClassId> labels) {
  return *std::max_element(labels.begin(), labels.end());
}

// Majority over `votes` indexed by class id; ties go to the smallest id.
ClassId majority(const std::vector<std::size_t>& votes) {
  ClassId best = 0;
  std::size_t best_n = 0;
  for (std::size_t c = 1; c < votes.size(); ++c) {
    if (votes[c] > best_n) {
      best_n = votes[c];
      best = static_cast<ClassId>(c);
    }
  }
  return best;
}

// ---------------------------------------------------------------- KNN

ClassId knn_one(const KnnModel& m, std::span<const double> q, std::size_t classes) {
  const std::size_t d = q.size();
  const std::size_t n = m.labels.size();
  std::vector<std::pair<double, std::size_t>> dist(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    const double* r = m.rows.data() + i * d;
    for (std::size_t j = 0; j < d; ++j) s += (q[j] - r[j]) * (q[j] - r[j]);
    dist[i] = {s, i};
  }
  const std::size_t k = std::min(m.k, n);
  std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
  std::vector<std::size_t> votes(classes + 1, 0);
  for (std::size_t i = 0; i < k; ++i) ++votes[m.labels[dist[i].second]];
  return majority(votes);
}

// ---------------------------------------------------------------- SVM

std::vector<double> standardized(const SvmModel& m, std::span<const double> row) {
  std::vector<double> z(row.size() + 1);
  for (std::size_t j = 0; j < row.size(); ++j) z[j] = (row[j] - m.mean[j]) / m.scale[j];
  z.back() = 1.0;
  return z;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double primal_objective(std::span<const double> w, const std::vector<std::vector<double>>& z,
                        const std::vector<double>& y, double lambda) {
  double hinge = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) hinge += std::max(0.0, 1.0 - y[i] * dot(w, z[i]));
  return 0.5 * lambda * dot(w, w) + hinge / static_cast<double>(z.size());
}

// ---------------------------------------------------------------- Forest

struct TreeBuilder {
  const FeatureSet& x;
  std::span<const ClassId> y;
  std::size_t classes;
  std::size_t max_depth;
  std::size_t mtry;
  Rng rng;
  DecisionTree tree;

  static double gini(const std::vector<std::size_t>& counts, std::size_t n) {
    if (n == 0) return 0.0;
    double s = 1.0;
    for (std::size_t c : counts) {
      const double p = static_cast<double>(c) / static_cast<double>(n);
      s -= p * p;
    }
    return s;
  }

  std::int32_t build(std::vector<std::size_t>& idx, std::size_t depth) {
    const auto node_index = static_cast<std::int32_t>(tree.nodes.size());
    tree.nodes.push_back({});
    std::vector<std::size_t> counts(classes + 1, 0);
    for (std::size_t i : idx) ++counts[y[i]];
    const ClassId leaf = majority(counts);
    const std::size_t n = idx.size();
    const double parent = gini(counts, n);
    tree.nodes[static_cast<std::size_t>(node_index)].leaf_class = leaf;
    if (parent <= 0.0 || n < 2 || (max_depth != 0 && depth >= max_depth)) return node_index;

    // Candidate features: partial Fisher-Yates over all dimensions.
    std::vector<std::size_t> feats(x.dim());
    std::iota(feats.begin(), feats.end(), std::size_t{0});
    for (std::size_t i = 0; i < mtry; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng.below(feats.size() - i));
      std::swap(feats[i], feats[j]);
    }

    double best_gain = 0.0;
    std::size_t best_feat = 0;
    double best_thr = 0.0;
    std::vector<std::size_t> order(idx);
    for (std::size_t fi = 0; fi < mtry; ++fi) {
      const std::size_t f = feats[fi];
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double va = x.row(a)[f], vb = x.row(b)[f];
        return va < vb || (va == vb && a < b);
      });
      std::vector<std::size_t> left(classes + 1, 0);
      std::vector<std::size_t> right = counts;
      for (std::size_t i = 0; i + 1 < n; ++i) {
        const ClassId c = y[order[i]];
        ++left[c];
        --right[c];
        const double v = x.row(order[i])[f];
        const double next = x.row(order[i + 1])[f];
        if (!(v < next)) continue;
        const std::size_t nl = i + 1, nr = n - nl;
        const double child = (static_cast<double>(nl) * gini(left, nl) + static_cast<double>(nr) * gini(right, nr)) /
                             static_cast<double>(n);
        const double gain = parent - child;
        if (gain > best_gain + 1e-15) {
          best_gain = gain;
          best_feat = f;
          best_thr = v + 0.5 * (next - v);
          if (!(best_thr < next)) best_thr = v;  // midpoint rounded up onto `next`
        }
      }
    }
    if (best_gain <= 0.0) return node_index;

    std::vector<std::size_t> li, ri;
    for (std::size_t i : idx) (x.row(i)[best_feat] <= best_thr ? li : ri).push_back(i);
    idx.clear();
    idx.shrink_to_fit();
    const std::int32_t l = build(li, depth + 1);
    const std::int32_t r = build(ri, depth + 1);
    auto& node = tree.nodes[static_cast<std::size_t>(node_index)];
    node.feature = best_feat;
    node.threshold = best_thr;
    node.left = l;
    node.right = r;
    return node_index;
  }
};

template <class F>
std::vector<ClassId> predict_rows(const FeatureSet& features, F&& one) {
  std::vector<ClassId> out(features.count());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(out.size()); ++i) {
    out[static_cast<std::size_t>(i)] = one(features.row(static_cast<std::size_t>(i)));
  }
  return out;
}

}  // namespace

ClassId DecisionTree::predict(std::span<const double> row) const {
  std::size_t i = 0;
  while (nodes[i].left >= 0) {
    i = static_cast<std::size_t>(row[nodes[i].feature] <= nodes[i].threshold ? nodes[i].left : nodes[i].right);
  }
  return nodes[i].leaf_class;
}

TrainedModel knn_train(const FeatureSet& features, std::span<const ClassId> labels, std::size_t k) {
  check_training(features, labels);
  if (k == 0 || k > features.count()) {
    throw InvalidArgument("k must lie in 1.." + std::to_string(features.count()));
  }
  KnnModel m{k, {features.values().begin(), features.values().end()}, {labels.begin(), labels.end()}};
  return {std::move(m), max_class(labels), features.dim()};
}

TrainedModel svm_train(const FeatureSet& features, std::span<const ClassId> labels, double cost, std::size_t epochs,
                       std::uint64_t seed) {
  check_training(features, labels);
  if (!(cost > 0.0) || !std::isfinite(cost)) throw InvalidArgument("svm cost must be > 0");
  if (epochs == 0) throw InvalidArgument("svm needs at least one epoch");
  const std::size_t n = features.count();
  const std::size_t d = features.dim();
  const std::size_t classes = max_class(labels);

  SvmModel m;
  std::vector<std::size_t> per_class(classes + 1, 0);
  for (ClassId c : labels) ++per_class[c];
  for (std::size_t c = 1; c <= classes; ++c) {
    if (per_class[c] > 0) m.classes.push_back(static_cast<ClassId>(c));
  }
  if (m.classes.size() < 2) throw DataError("svm needs at least 2 classes with training rows");

  m.mean.assign(d, 0.0);
  m.scale.assign(d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) m.mean[j] += features.row(i)[j];
  }
  for (auto& v : m.mean) v /= static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      const double e = features.row(i)[j] - m.mean[j];
      m.scale[j] += e * e;
    }
  }
  for (auto& v : m.scale) {
    v = std::sqrt(v / static_cast<double>(n));
    if (!(v > 1e-12)) v = 1.0;
  }
  std::vector<std::vector<double>> z(n);
  for (std::size_t i = 0; i < n; ++i) z[i] = standardized(m, features.row(i));

  const double lambda = 1.0 / (cost * static_cast<double>(n));
  const double radius = 1.0 / std::sqrt(lambda);
  m.weights.assign(m.classes.size(), std::vector<double>(d + 1, 0.0));
  m.objective_trace.assign(m.classes.size(), {});

#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t ci = 0; ci < static_cast<std::ptrdiff_t>(m.classes.size()); ++ci) {
    const auto cidx = static_cast<std::size_t>(ci);
    const ClassId positive = m.classes[cidx];
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = labels[i] == positive ? 1.0 : -1.0;
    Rng rng(derive_seed(seed, positive));
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<double> w(d + 1, 0.0), avg(d + 1, 0.0);
    // One shuffle reused by every epoch, so checkpoints differ only by optimisation progress.
    rng.shuffle(std::span<std::size_t>(order));
    std::size_t t = 0;
    for (std::size_t e = 0; e < epochs; ++e) {
      for (std::size_t i : order) {
        ++t;
        const double eta = 1.0 / (lambda * static_cast<double>(t));
        const double margin = y[i] * dot(w, z[i]);
        const double shrink = 1.0 - 1.0 / static_cast<double>(t);
        for (auto& v : w) v *= shrink;
        if (margin < 1.0) {
          for (std::size_t j = 0; j <= d; ++j) w[j] += eta * y[i] * z[i][j];
        }
        const double norm = std::sqrt(dot(w, w));
        if (norm > radius) {
          for (auto& v : w) v *= radius / norm;
        }
        // Running average of every iterate so far.
        for (std::size_t j = 0; j <= d; ++j) avg[j] += (w[j] - avg[j]) / static_cast<double>(t);
      }
      m.objective_trace[cidx].push_back(primal_objective(avg, z, y, lambda));
    }
    m.weights[cidx] = avg;
  }
  return {std::move(m), classes, d};
}

TrainedModel rf_train(const FeatureSet& features, std::span<const ClassId> labels, std::size_t trees,
                      std::size_t max_depth, std::uint64_t seed) {
  check_training(features, labels);
  if (trees == 0) throw InvalidArgument("forest needs at least one tree");
  const std::size_t n = features.count();
  const std::size_t classes = max_class(labels);
  const auto mtry = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(features.dim()))));
  ForestModel forest;
  forest.trees.resize(trees);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t t = 0; t < static_cast<std::ptrdiff_t>(trees); ++t) {
    TreeBuilder b{features, labels, classes, max_depth, std::min(mtry, features.dim()),
                  Rng(derive_seed(seed, static_cast<std::uint64_t>(t))), {}};
    std::vector<std::size_t> sample(n);
    for (auto& s : sample) s = static_cast<std::size_t>(b.rng.below(n));
    std::sort(sample.begin(), sample.end());
    b.build(sample, 0);
    forest.trees[static_cast<std::size_t>(t)] = std::move(b.tree);
  }
  return {std::move(forest), classes, features.dim()};
}

TrainedModel train(const ClassifierSpec& spec, const FeatureSet& features, std::span<const ClassId> labels,
                   std::uint64_t seed) {
  return std::visit(
      [&](const auto& p) -> TrainedModel {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, KnnParams>) {
          return knn_train(features, labels, p.k);
        } else if constexpr (std::is_same_v<T, SvmParams>) {
          return svm_train(features, labels, p.cost, p.epochs, seed);
        } else {
          return rf_train(features, labels, p.trees, p.max_depth, seed);
        }
      },
      spec);
}

std::vector<double> svm_scores(const SvmModel& model, std::span<const double> row) {
  const auto z = standardized(model, row);
  std::vector<double> s(model.classes.size());
  for (std::size_t c = 0; c < s.size(); ++c) s[c] = dot(model.weights[c], z);
  return s;
}

double svm_objective(const SvmModel& model, std::size_t class_index, const FeatureSet& features,
                     std::span<const ClassId> labels, double cost) {
  std::vector<std::vector<double>> z(features.count());
  std::vector<double> y(features.count());
  for (std::size_t i = 0; i < z.size(); ++i) {
    z[i] = standardized(model, features.row(i));
    y[i] = labels[i] == model.classes[class_index] ? 1.0 : -1.0;
  }
  return primal_objective(model.weights[class_index], z, y, 1.0 / (cost * static_cast<double>(z.size())));
}

std::vector<ClassId> knn_predict(const TrainedModel& model, const FeatureSet& features) {
  const auto* m = std::get_if<KnnModel>(&model.kind);
  if (!m) throw InvalidArgument("model is not a KNN model");
  check_dim(model, features);
  return predict_rows(features, [&](std::span<const double> r) { return knn_one(*m, r, model.classes); });
}

std::vector<ClassId> svm_predict(const TrainedModel& model, const FeatureSet& features) {
  const auto* m = std::get_if<SvmModel>(&model.kind);
  if (!m) throw InvalidArgument("model is not an SVM model");
  check_dim(model, features);
  return predict_rows(features, [&](std::span<const double> r) {
    const auto s = svm_scores(*m, r);
    std::size_t best = 0;
    for (std::size_t c = 1; c < s.size(); ++c) {
      if (s[c] > s[best]) best = c;
    }
    return m->classes[best];
  });
}

std::vector<ClassId> rf_predict(const TrainedModel& model, const FeatureSet& features) {
  const auto* m = std::get_if<ForestModel>(&model.kind);
  if (!m) throw InvalidArgument("model is not a forest model");
  check_dim(model, features);
  return predict_rows(features, [&](std::span<const double> r) {
    std::vector<std::size_t> votes(model.classes + 1, 0);
    for (const auto& t : m->trees) ++votes[t.predict(r)];
    return majority(votes);
  });
}

std::vector<ClassId> predict(const TrainedModel& model, const FeatureSet& features) {
  switch (model.kind.index()) {
    case 0: return knn_predict(model, features);
    case 1: return svm_predict(model, features);
    default: return rf_predict(model, features);
  }
}

void CvGrid::validate() const {
  if (folds < 2) throw InvalidArgument("cross-validation needs at least 2 folds");
  if (candidates.empty()) throw InvalidArgument("cross-validation grid is empty");
}

CvResult cross_validate(const FeatureSet& features, std::span<const ClassId> labels, const CvGrid& grid,
                        std::uint64_t seed) {
  grid.validate();
  check_training(features, labels);
  const std::size_t classes = max_class(labels);
  std::vector<std::vector<std::size_t>> members(classes + 1);
  for (std::size_t i = 0; i < labels.size(); ++i) members[labels[i]].push_back(i);
  std::vector<std::size_t> fold_of(labels.size());
  for (std::size_t c = 1; c <= classes; ++c) {
    auto& m = members[c];
    if (m.empty()) continue;
    if (m.size() < grid.folds) {
      throw DataError("class " + std::to_string(c) + " has " + std::to_string(m.size()) + " rows, fewer than " +
                      std::to_string(grid.folds) + " folds");
    }
    Rng rng(derive_seed(seed, c));
    rng.shuffle(std::span<std::size_t>(m));
    for (std::size_t k = 0; k < m.size(); ++k) fold_of[m[k]] = k % grid.folds;
  }

  CvResult result;
  result.fold_scores.assign(grid.candidates.size(), {});
  for (std::size_t f = 0; f < grid.folds; ++f) {
    std::vector<std::size_t> tr, te;
    for (std::size_t i = 0; i < labels.size(); ++i) (fold_of[i] == f ? te : tr).push_back(i);
    const FeatureSet xtr = features.subset(tr), xte = features.subset(te);
    std::vector<ClassId> ytr, yte;
    for (std::size_t i : tr) ytr.push_back(labels[i]);
    for (std::size_t i : te) yte.push_back(labels[i]);
    for (std::size_t c = 0; c < grid.candidates.size(); ++c) {
      const auto model = train(grid.candidates[c], xtr, ytr, derive_seed(seed, 0x10000 + f));
      result.fold_scores[c].push_back(accuracy(predict(model, xte), yte));
    }
  }
  for (const auto& s : result.fold_scores) {
    result.mean_scores.push_back(std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(s.size()));
  }
  for (std::size_t c = 1; c < result.mean_scores.size(); ++c) {
    if (result.mean_scores[c] > result.mean_scores[result.best]) result.best = c;
  }
  result.best_spec = grid.candidates[result.best];
  return result;
}

std::vector<ClassId> labels_for(const FeatureSet& features, const LabelMap& labels) {
  if (features.height() != labels.height() || features.width() != labels.width()) {
    throw InvalidArgument("feature set and label map extents differ");
  }
  std::vector<ClassId> out;
  out.reserve(features.count());
  for (const Pixel& p : features.coords()) out.push_back(labels.at(p.y, p.x));
  return out;
}

double accuracy(std::span<const ClassId> predicted, std::span<const ClassId> truth) {
  if (predicted.size() != truth.size()) throw InvalidArgument("prediction and truth lengths differ");
  if (truth.empty()) return 0.0;
  std::size_t hit = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hit += predicted[i] == truth[i];
  return static_cast<double>(hit) / static_cast<double>(truth.size());
}

}  // namespace hsi::classify
