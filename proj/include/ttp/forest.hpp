#pragma once

#include <cstdint>
#include <vector>

#include "ttp/rng.hpp"

namespace ttp {

using Matrix = std::vector<std::vector<double>>;  // row-major samples

struct TreeOptions {
  int max_depth = 12;
  int features_per_split = -1;  // -1 = all features
  double min_decrease = 1e-12;
};

// Axis-aligned binary classification tree over labels {-1, +1} with
// nonnegative sample weights entering the Gini impurity directly.
class DecisionTree {
 public:
  struct Node {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0;
    int left = -1;
    int right = -1;
    double pos_weight = 0;
    double neg_weight = 0;
  };

  void fit(const Matrix& x, const std::vector<int>& y, const std::vector<double>& w,
           const std::vector<size_t>& rows, const TreeOptions& opts, Rng* rng);

  void set_state(std::vector<Node> nodes, std::vector<double> decrease) {
    nodes_ = std::move(nodes);
    decrease_ = std::move(decrease);
  }

  // Weighted fraction voting +1, in [0, 1].
  double predict_margin(const std::vector<double>& row) const;
  int predict(const std::vector<double>& row) const {
    return predict_margin(row) >= 0.5 ? 1 : -1;
  }

  const std::vector<Node>& nodes() const { return nodes_; }
  // Total weighted impurity decrease per feature.
  const std::vector<double>& impurity_decrease() const { return decrease_; }

 private:
  int build(const Matrix& x, const std::vector<int>& y, const std::vector<double>& w,
            std::vector<size_t>& rows, int depth, const TreeOptions& opts, Rng* rng);

  std::vector<Node> nodes_;
  std::vector<double> decrease_;
};

struct ForestOptions {
  int n_trees = 100;
  bool bootstrap = true;
  TreeOptions tree;  // features_per_split -1 means round(sqrt(F))
};

class RandomForest {
 public:
  void fit(const Matrix& x, const std::vector<int>& y, const std::vector<double>& w,
           const ForestOptions& opts, uint64_t seed);

  double predict_margin(const std::vector<double>& row) const;
  int predict(const std::vector<double>& row) const {
    return predict_margin(row) >= 0.5 ? 1 : -1;
  }

  // Mean per-tree weighted impurity decrease, unnormalized.
  std::vector<double> feature_importance() const;

  const std::vector<DecisionTree>& trees() const { return trees_; }

  void set_trees(std::vector<DecisionTree> trees, size_t n_features) {
    trees_ = std::move(trees);
    n_features_ = n_features;
  }

 private:
  std::vector<DecisionTree> trees_;
  size_t n_features_ = 0;
};

}  // namespace ttp
