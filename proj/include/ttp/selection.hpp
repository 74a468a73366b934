#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ttp/benchmark.hpp"
#include "ttp/forest.hpp"

namespace ttp {

enum class SelectorFamily { Regression, PairwiseRF, Clustering, Knn };

const char* to_string(SelectorFamily family);
SelectorFamily selector_family_from_string(const std::string& name);

struct Dataset {
  std::vector<std::string> instance_ids;
  std::vector<std::string> algorithms;
  std::vector<std::string> feature_names;
  Matrix x;  // may contain NaN; imputed per training fold
  Matrix y;  // scaled scores, failures kept as -1
  CvSplits splits;
};

Dataset make_dataset(const Scenario& scenario);

struct SelectorConfig {
  SelectorFamily family = SelectorFamily::PairwiseRF;
  uint64_t seed = 0;
  int rf_trees = 100;
  int rf_max_depth = 12;
  int rf_features_per_split = -1;  // -1 = round(sqrt(F)), 0 = all features
  int knn_k = 32;
  int kmeans_k = 0;  // 0 = ceil(sqrt(train size)/2), capped at 25
  std::vector<std::string> feature_subset;  // empty = full catalogue
};

struct RegressionModel {
  Matrix weights;                  // per algorithm, over used features
  std::vector<double> intercepts;  // per algorithm
  std::vector<double> lambdas;     // chosen L1 strength per algorithm
};

struct PairwiseRfModel {
  struct Pair {
    int a = 0, b = 0;
    bool constant = false;  // one class only after weighting; vote fixed
    int winner = 0;
    RandomForest forest;
  };
  std::vector<Pair> pairs;
};

struct ClusterModel {
  Matrix centroids;         // in z-scored space
  std::vector<int> labels;  // best algorithm per cluster
};

struct KnnModel {
  Matrix train_x;  // z-scored
  Matrix train_y;
  int k = 32;
};

struct TrainedSelector {
  SelectorFamily family = SelectorFamily::PairwiseRF;
  std::vector<std::string> algorithms;
  std::vector<std::string> feature_names;  // the features this model consumes
  std::vector<double> impute_median;
  std::vector<double> mean;
  std::vector<double> sd;  // 0 marks a dropped (constant) feature
  std::vector<double> train_mean_score;  // per algorithm; breaks vote ties
  uint64_t seed = 0;

  RegressionModel regression;
  PairwiseRfModel pairwise;
  ClusterModel cluster;
  KnnModel knn;

  // raw feature values in feature_names order -> algorithm index
  int select(const std::vector<double>& raw_features) const;

  void save(const std::string& path) const;
  static TrainedSelector load(const std::string& path);
};

TrainedSelector train_selector(const Dataset& data, const std::vector<size_t>& train_rows,
                               const SelectorConfig& config);

struct EvalReport {
  double mean_performance = 0;
  std::vector<double> per_fold;
  double single_best = 0;
  double oracle = 0;
  double gap_closed = 0;  // (selector - single best) / (oracle - single best)
  std::string single_best_algorithm;
};

// Full cross-validated evaluation over the dataset's fold assignment.
EvalReport evaluate_selector(const Dataset& data, const SelectorConfig& config);

// Retrain and evaluate on the named feature subset only.
EvalReport evaluate_with_subset(const Dataset& data, const std::vector<std::string>& names,
                                SelectorFamily family, uint64_t seed);

struct GiniImportance {
  std::vector<std::string> feature_names;
  std::vector<double> mean;  // normalized, sums to 1
  std::vector<double> p25;   // per-forest distribution quartiles
  std::vector<double> p75;
};

// Average Gini importance across all trees of all pairwise forests.
GiniImportance gini_importance(const TrainedSelector& selector);

}  // namespace ttp
