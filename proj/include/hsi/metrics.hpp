#pragma once

#include <span>
#include <vector>

#include "hsi/datamodel.hpp"

namespace hsi::metrics {

struct Scores {
  double oa = 0.0;
  double aa = 0.0;
  double kappa = 0.0;
};

struct EvalReport {
  double oa = 0.0;
  double aa = 0.0;
  double kappa = 0.0;
  /// Recall per class 1..C; classes absent from the test set hold NaN and are left out of AA.
  std::vector<double> per_class_recall;
  ConfusionMatrix matrix{0};
  std::size_t repetitions = 1;
  double oa_std = 0.0;
  double aa_std = 0.0;
  double kappa_std = 0.0;
};

/// `classes` defaults to the largest id present in either sequence.
ConfusionMatrix confusion(std::span<const ClassId> predicted, std::span<const ClassId> truth, std::size_t classes = 0);

/// OA = trace/total; AA = mean recall over classes with test pixels;
/// κ = (p_o − p_e)/(1 − p_e), p_e = Σ row_c·col_c / total². When p_e = 1, κ is 1 if p_o = 1
/// and otherwise undefined (throws).
Scores oa_aa_kappa(const ConfusionMatrix& matrix);

EvalReport evaluate(const ConfusionMatrix& matrix);

/// Means and sample (n−1) standard deviations; a single report has std 0.
/// The matrix of the result is the element-wise sum over reports.
EvalReport aggregate(std::span<const EvalReport> reports);

}  // namespace hsi::metrics
