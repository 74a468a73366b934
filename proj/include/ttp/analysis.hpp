#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ttp/benchmark.hpp"

namespace ttp {

struct SpearmanResult {
  std::vector<std::vector<double>> rho;  // algorithms x algorithms, diagonal 1
  std::vector<std::string> warnings;     // constant columns, coefficient set to 0
};

// Rank correlation of algorithm score columns across instances; ties get
// average ranks, missing (-1) cells enter as-is.
SpearmanResult spearman_matrix(const ScaledMatrix& scaled);

struct WardResult {
  struct Merge {
    int a = 0, b = 0;      // cluster ids; leaves are 0..n-1, merges n, n+1, ...
    double height = 0;
    int size = 0;
  };
  std::vector<Merge> merges;
  std::vector<int> leaf_order;  // dendrogram display order
};

// Agglomerative Ward clustering on dissimilarity 1 - rho.
WardResult ward_order(const std::vector<std::vector<double>>& corr);

// Oracle coalition game: v(S) = mean over instances of the best score in S,
// failures floored at 0 so that v is monotone and v(empty) = 0.
class CoalitionGame {
 public:
  explicit CoalitionGame(const ScaledMatrix& scaled);

  double value(const std::vector<int>& subset) const;
  int num_algorithms() const { return static_cast<int>(scores_[0].size()); }
  size_t num_instances() const { return scores_.size(); }
  double score(size_t instance, int algo) const {
    return scores_[instance][static_cast<size_t>(algo)];
  }
  const std::vector<std::string>& algorithms() const { return algorithms_; }

 private:
  std::vector<std::vector<double>> scores_;  // floored at 0
  std::vector<std::string> algorithms_;
};

// v(N) - v(N \ {algo}); nonnegative by monotonicity.
double marginal_contribution(const CoalitionGame& game, int algo);
double marginal_contribution(const CoalitionGame& game, const std::string& algo);

enum class ShapleyMethod { Exact, MonteCarlo };

struct ShapleyReport {
  std::vector<std::string> algorithms;
  std::vector<double> standalone;        // raw scaled column means
  std::vector<double> shapley;
  std::vector<double> marginal_to_full;  // v(N) - v(N \ {a})
  ShapleyMethod method = ShapleyMethod::Exact;
  uint64_t samples = 0;                  // Monte Carlo only
  uint64_t seed = 0;
  std::vector<double> half_width;        // standard error, Monte Carlo only
};

// Exact mode uses the per-instance order-statistic closed form of the max
// game; Monte Carlo averages marginals over random insertion orders.
ShapleyReport shapley_values(const ScaledMatrix& scaled,
                             ShapleyMethod method = ShapleyMethod::Exact,
                             uint64_t samples = 10000, uint64_t seed = 0);

// Algorithm indices ordered by descending column mean, ties by name.
std::vector<int> standalone_ranking(const ScaledMatrix& scaled);

}  // namespace ttp
