#include "ttp/forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ttp {

namespace {

double gini(double pos, double neg) {
  const double total = pos + neg;
  if (total <= 0) return 0;
  const double fp = pos / total;
  const double fn = neg / total;
  return 1.0 - fp * fp - fn * fn;
}

}  // namespace

void DecisionTree::fit(const Matrix& x, const std::vector<int>& y,
                       const std::vector<double>& w, const std::vector<size_t>& rows,
                       const TreeOptions& opts, Rng* rng) {
  nodes_.clear();
  decrease_.assign(x.empty() ? 0 : x[0].size(), 0.0);
  std::vector<size_t> mutable_rows = rows;
  build(x, y, w, mutable_rows, 0, opts, rng);
}

int DecisionTree::build(const Matrix& x, const std::vector<int>& y,
                        const std::vector<double>& w, std::vector<size_t>& rows,
                        int depth, const TreeOptions& opts, Rng* rng) {
  Node node;
  for (size_t r : rows) {
    if (y[r] > 0) {
      node.pos_weight += w[r];
    } else {
      node.neg_weight += w[r];
    }
  }
  const int node_id = static_cast<int>(nodes_.size());
  nodes_.push_back(node);

  const double node_gini = gini(node.pos_weight, node.neg_weight);
  if (depth >= opts.max_depth || rows.size() < 2 || node_gini <= 0) return node_id;

  const size_t n_features = x[0].size();
  std::vector<int> candidates;
  if (opts.features_per_split <= 0 ||
      static_cast<size_t>(opts.features_per_split) >= n_features || rng == nullptr) {
    candidates.resize(n_features);
    std::iota(candidates.begin(), candidates.end(), 0);
  } else {
    // sample without replacement
    std::vector<int> all(n_features);
    std::iota(all.begin(), all.end(), 0);
    for (int i = 0; i < opts.features_per_split; ++i) {
      const size_t j = i + static_cast<size_t>(rng->below(n_features - static_cast<size_t>(i)));
      std::swap(all[static_cast<size_t>(i)], all[j]);
    }
    candidates.assign(all.begin(), all.begin() + opts.features_per_split);
    std::sort(candidates.begin(), candidates.end());
  }

  const double total_weight = node.pos_weight + node.neg_weight;
  double best_decrease = opts.min_decrease;
  int best_feature = -1;
  double best_threshold = 0;

  std::vector<size_t> order = rows;
  for (int f : candidates) {
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
      return x[a][static_cast<size_t>(f)] < x[b][static_cast<size_t>(f)];
    });
    double left_pos = 0, left_neg = 0;
    for (size_t i = 0; i + 1 < order.size(); ++i) {
      const size_t r = order[i];
      if (y[r] > 0) {
        left_pos += w[r];
      } else {
        left_neg += w[r];
      }
      const double v = x[r][static_cast<size_t>(f)];
      const double v_next = x[order[i + 1]][static_cast<size_t>(f)];
      if (v == v_next) continue;
      const double right_pos = node.pos_weight - left_pos;
      const double right_neg = node.neg_weight - left_neg;
      const double wl = left_pos + left_neg;
      const double wr = right_pos + right_neg;
      const double dec = total_weight * node_gini - wl * gini(left_pos, left_neg) -
                         wr * gini(right_pos, right_neg);
      if (dec > best_decrease) {
        best_decrease = dec;
        best_feature = f;
        best_threshold = v + (v_next - v) / 2;
      }
    }
  }

  if (best_feature < 0) return node_id;

  std::vector<size_t> left_rows, right_rows;
  for (size_t r : rows) {
    if (x[r][static_cast<size_t>(best_feature)] <= best_threshold) {
      left_rows.push_back(r);
    } else {
      right_rows.push_back(r);
    }
  }
  if (left_rows.empty() || right_rows.empty()) return node_id;

  decrease_[static_cast<size_t>(best_feature)] += best_decrease;
  nodes_[static_cast<size_t>(node_id)].feature = best_feature;
  nodes_[static_cast<size_t>(node_id)].threshold = best_threshold;
  rows.clear();
  rows.shrink_to_fit();
  const int left_id = build(x, y, w, left_rows, depth + 1, opts, rng);
  nodes_[static_cast<size_t>(node_id)].left = left_id;
  const int right_id = build(x, y, w, right_rows, depth + 1, opts, rng);
  nodes_[static_cast<size_t>(node_id)].right = right_id;
  return node_id;
}

double DecisionTree::predict_margin(const std::vector<double>& row) const {
  if (nodes_.empty()) return 0.5;
  int at = 0;
  while (nodes_[static_cast<size_t>(at)].feature >= 0) {
    const Node& n = nodes_[static_cast<size_t>(at)];
    at = row[static_cast<size_t>(n.feature)] <= n.threshold ? n.left : n.right;
  }
  const Node& leaf = nodes_[static_cast<size_t>(at)];
  const double total = leaf.pos_weight + leaf.neg_weight;
  return total > 0 ? leaf.pos_weight / total : 0.5;
}

void RandomForest::fit(const Matrix& x, const std::vector<int>& y,
                       const std::vector<double>& w, const ForestOptions& opts,
                       uint64_t seed) {
  trees_.clear();
  n_features_ = x.empty() ? 0 : x[0].size();

  TreeOptions tree_opts = opts.tree;
  if (tree_opts.features_per_split == -1 && opts.n_trees > 1) {
    tree_opts.features_per_split = std::max(
        1, static_cast<int>(std::lround(std::sqrt(static_cast<double>(n_features_)))));
  }

  trees_.resize(static_cast<size_t>(opts.n_trees));
  for (int t = 0; t < opts.n_trees; ++t) {
    Rng rng(mix64(seed + 0x7ee5ULL * static_cast<uint64_t>(t + 1)));
    std::vector<size_t> rows;
    rows.reserve(x.size());
    if (opts.bootstrap) {
      for (size_t i = 0; i < x.size(); ++i) {
        rows.push_back(static_cast<size_t>(rng.below(x.size())));
      }
      std::sort(rows.begin(), rows.end());
    } else {
      rows.resize(x.size());
      std::iota(rows.begin(), rows.end(), 0);
    }
    trees_[static_cast<size_t>(t)].fit(x, y, w, rows, tree_opts,
                                       opts.n_trees > 1 ? &rng : nullptr);
  }
}

double RandomForest::predict_margin(const std::vector<double>& row) const {
  if (trees_.empty()) return 0.5;
  double sum = 0;
  for (const auto& tree : trees_) sum += tree.predict_margin(row);
  return sum / static_cast<double>(trees_.size());
}

std::vector<double> RandomForest::feature_importance() const {
  std::vector<double> total(n_features_, 0.0);
  for (const auto& tree : trees_) {
    const auto& dec = tree.impurity_decrease();
    for (size_t f = 0; f < dec.size(); ++f) total[f] += dec[f];
  }
  if (!trees_.empty()) {
    for (auto& v : total) v /= static_cast<double>(trees_.size());
  }
  return total;
}

}  // namespace ttp
