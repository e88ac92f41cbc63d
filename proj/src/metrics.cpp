#include "hsi/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "hsi/error.hpp"

namespace hsi::metrics {
namespace {

double sample_std(std::span<const double> v, double mean) {
  if (v.size() < 2) return 0.0;
  double s = 0.0;
  for (double x : v) s += (x - mean) * (x - mean);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

}  // namespace

ConfusionMatrix confusion(std::span<const ClassId> predicted, std::span<const ClassId> truth, std::size_t classes) {
  if (predicted.size() != truth.size()) {
    throw InvalidArgument("prediction length " + std::to_string(predicted.size()) + " differs from truth length " +
                          std::to_string(truth.size()));
  }
  if (classes == 0) {
    for (ClassId c : predicted) classes = std::max<std::size_t>(classes, c);
    for (ClassId c : truth) classes = std::max<std::size_t>(classes, c);
  }
  ConfusionMatrix m(classes);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] == 0) throw InvalidArgument("truth label 0 (unlabeled) in evaluation");
    m.add(truth[i], predicted[i]);
  }
  return m;
}

Scores oa_aa_kappa(const ConfusionMatrix& matrix) {
  const auto total = static_cast<double>(matrix.total());
  if (total == 0.0) throw DataError("confusion matrix is empty");
  const std::size_t c = matrix.classes();
  double diag = 0.0, pe = 0.0, recall_sum = 0.0;
  std::size_t present = 0;
  for (std::size_t k = 1; k <= c; ++k) {
    const auto id = static_cast<ClassId>(k);
    const auto row = static_cast<double>(matrix.row_total(id));
    const auto col = static_cast<double>(matrix.col_total(id));
    const auto hit = static_cast<double>(matrix.at(id, id));
    diag += hit;
    pe += row * col;
    if (row > 0.0) {
      recall_sum += hit / row;
      ++present;
    }
  }
  Scores s;
  s.oa = diag / total;
  s.aa = recall_sum / static_cast<double>(present);
  pe /= total * total;
  if (pe >= 1.0) {
    if (s.oa < 1.0) throw DataError("kappa undefined: chance agreement is 1 without perfect agreement");
    s.kappa = 1.0;
  } else {
    s.kappa = (s.oa - pe) / (1.0 - pe);
  }
  return s;
}

EvalReport evaluate(const ConfusionMatrix& matrix) {
  const Scores s = oa_aa_kappa(matrix);
  EvalReport r;
  r.oa = s.oa;
  r.aa = s.aa;
  r.kappa = s.kappa;
  r.matrix = matrix;
  for (std::size_t k = 1; k <= matrix.classes(); ++k) {
    const auto id = static_cast<ClassId>(k);
    const auto row = matrix.row_total(id);
    r.per_class_recall.push_back(row ? static_cast<double>(matrix.at(id, id)) / static_cast<double>(row)
                                     : std::numeric_limits<double>::quiet_NaN());
  }
  return r;
}

EvalReport aggregate(std::span<const EvalReport> reports) {
  if (reports.empty()) throw InvalidArgument("aggregate needs at least one report");
  const auto n = static_cast<double>(reports.size());
  std::vector<double> oa, aa, kappa;
  std::size_t classes = 0;
  for (const auto& r : reports) {
    oa.push_back(r.oa);
    aa.push_back(r.aa);
    kappa.push_back(r.kappa);
    classes = std::max(classes, r.matrix.classes());
  }
  EvalReport out;
  for (double v : oa) out.oa += v / n;
  for (double v : aa) out.aa += v / n;
  for (double v : kappa) out.kappa += v / n;
  out.oa_std = sample_std(oa, out.oa);
  out.aa_std = sample_std(aa, out.aa);
  out.kappa_std = sample_std(kappa, out.kappa);
  out.repetitions = reports.size();

  std::vector<std::uint64_t> sum(classes * classes, 0);
  for (const auto& r : reports) {
    for (std::size_t t = 1; t <= r.matrix.classes(); ++t) {
      for (std::size_t p = 1; p <= r.matrix.classes(); ++p) {
        sum[(t - 1) * classes + (p - 1)] += r.matrix.at(static_cast<ClassId>(t), static_cast<ClassId>(p));
      }
    }
  }
  out.matrix = ConfusionMatrix(classes, std::move(sum));
  out.per_class_recall.assign(classes, 0.0);
  for (std::size_t k = 0; k < classes; ++k) {
    double s = 0.0;
    std::size_t m = 0;
    for (const auto& r : reports) {
      if (k < r.per_class_recall.size() && !std::isnan(r.per_class_recall[k])) {
        s += r.per_class_recall[k];
        ++m;
      }
    }
    out.per_class_recall[k] = m ? s / static_cast<double>(m) : std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

}  // namespace hsi::metrics
