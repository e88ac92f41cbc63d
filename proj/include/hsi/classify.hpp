#pragma once

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "hsi/datamodel.hpp"

namespace hsi::classify {

struct KnnParams {
  std::size_t k = 1;
};

/// Linear one-vs-rest SVM trained by stochastic subgradient descent (Pegasos schedule).
struct SvmParams {
  double cost = 1.0;
  std::size_t epochs = 30;
};

struct ForestParams {
  std::size_t trees = 100;
  std::size_t max_depth = 0;  ///< 0 = grow until pure
};

using ClassifierSpec = std::variant<KnnParams, SvmParams, ForestParams>;

struct KnnModel {
  std::size_t k = 1;
  std::vector<double> rows;
  std::vector<ClassId> labels;
};

struct SvmModel {
  std::vector<double> mean;  ///< standardization, per feature
  std::vector<double> scale;
  std::vector<ClassId> classes;              ///< one weight vector per class seen in training
  std::vector<std::vector<double>> weights;  ///< D standardized weights followed by the bias
  /// Primal objective of the running-average iterate at the end of each epoch, per class.
  std::vector<std::vector<double>> objective_trace;
};

struct TreeNode {
  std::size_t feature = 0;
  double threshold = 0.0;
  std::int32_t left = -1;  ///< −1 marks a leaf
  std::int32_t right = -1;
  ClassId leaf_class = 0;
};

struct DecisionTree {
  std::vector<TreeNode> nodes;  ///< root at index 0

  ClassId predict(std::span<const double> row) const;
};

struct ForestModel {
  std::vector<DecisionTree> trees;
};

struct TrainedModel {
  std::variant<KnnModel, SvmModel, ForestModel> kind;
  std::size_t classes = 0;  ///< largest class id seen in training
  std::size_t dim = 0;
};

TrainedModel knn_train(const FeatureSet& features, std::span<const ClassId> labels, std::size_t k);
TrainedModel svm_train(const FeatureSet& features, std::span<const ClassId> labels, double cost, std::size_t epochs,
                       std::uint64_t seed);
TrainedModel rf_train(const FeatureSet& features, std::span<const ClassId> labels, std::size_t trees,
                      std::size_t max_depth, std::uint64_t seed);

TrainedModel train(const ClassifierSpec& spec, const FeatureSet& features, std::span<const ClassId> labels,
                   std::uint64_t seed);

/// Dispatches on the model kind; rows are predicted independently and in parallel.
std::vector<ClassId> predict(const TrainedModel& model, const FeatureSet& features);

std::vector<ClassId> knn_predict(const TrainedModel& model, const FeatureSet& features);
std::vector<ClassId> svm_predict(const TrainedModel& model, const FeatureSet& features);
std::vector<ClassId> rf_predict(const TrainedModel& model, const FeatureSet& features);

/// Per-class SVM scores (standardized inputs), in the order of SvmModel::classes.
std::vector<double> svm_scores(const SvmModel& model, std::span<const double> row);

/// Mean hinge loss plus (λ/2)‖w‖², λ = 1/(cost·n), for the one-vs-rest problem of `positive`.
double svm_objective(const SvmModel& model, std::size_t class_index, const FeatureSet& features,
                     std::span<const ClassId> labels, double cost);

struct CvGrid {
  std::size_t folds = 5;
  std::vector<ClassifierSpec> candidates;

  void validate() const;
};

struct CvResult {
  std::size_t best = 0;
  ClassifierSpec best_spec;
  std::vector<double> mean_scores;               ///< per candidate, mean fold OA
  std::vector<std::vector<double>> fold_scores;  ///< per candidate, per fold
};

/// Stratified k-fold selection by mean overall accuracy; ties go to the earlier candidate.
CvResult cross_validate(const FeatureSet& features, std::span<const ClassId> labels, const CvGrid& grid,
                        std::uint64_t seed);

/// Ground-truth label of every feature row.
std::vector<ClassId> labels_for(const FeatureSet& features, const LabelMap& labels);

double accuracy(std::span<const ClassId> predicted, std::span<const ClassId> truth);

}  // namespace hsi::classify
