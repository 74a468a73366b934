#include "ttp/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ttp/rng.hpp"

namespace ttp {

namespace {

// average ranks for ties
std::vector<double> rank_column(const std::vector<double>& values) {
  const size_t n = values.size();
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return values[a] < values[b]; });
  std::vector<double> rank(n, 0.0);
  size_t i = 0;
  while (i < n) {
    size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (size_t k = i; k <= j; ++k) rank[order[k]] = avg;
    i = j + 1;
  }
  return rank;
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  double ma = 0, mb = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double cov = 0, va = 0, vb = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    cov += (a[i] - ma) * (b[i] - mb);
    va += (a[i] - ma) * (a[i] - ma);
    vb += (b[i] - mb) * (b[i] - mb);
  }
  if (va <= 0 || vb <= 0) return std::numeric_limits<double>::quiet_NaN();
  return cov / std::sqrt(va * vb);
}

}  // namespace

SpearmanResult spearman_matrix(const ScaledMatrix& scaled) {
  const size_t n_algos = scaled.algorithms.size();
  const size_t n = scaled.instance_ids.size();
  if (n < 2) throw Error("spearman correlation needs at least 2 instances");

  std::vector<std::vector<double>> ranks(n_algos);
  std::vector<bool> constant(n_algos, false);
  for (size_t a = 0; a < n_algos; ++a) {
    std::vector<double> column(n);
    for (size_t i = 0; i < n; ++i) column[i] = scaled.scaled[i][a];
    constant[a] =
        std::all_of(column.begin(), column.end(), [&](double v) { return v == column[0]; });
    ranks[a] = rank_column(column);
  }

  SpearmanResult result;
  result.rho.assign(n_algos, std::vector<double>(n_algos, 0.0));
  for (size_t a = 0; a < n_algos; ++a) {
    result.rho[a][a] = 1.0;
    if (constant[a]) {
      result.warnings.push_back("constant score column: " + scaled.algorithms[a]);
    }
    for (size_t b = a + 1; b < n_algos; ++b) {
      double rho = 0.0;
      if (!constant[a] && !constant[b]) {
        const double r = pearson(ranks[a], ranks[b]);
        rho = std::isnan(r) ? 0.0 : r;
      }
      result.rho[a][b] = rho;
      result.rho[b][a] = rho;
    }
  }
  return result;
}

WardResult ward_order(const std::vector<std::vector<double>>& corr) {
  const int n = static_cast<int>(corr.size());
  WardResult result;
  if (n == 0) return result;
  if (n == 1) {
    result.leaf_order = {0};
    return result;
  }

  // Lance-Williams update on squared dissimilarities (ward.D2 convention).
  const int slots = 2 * n - 1;
  std::vector<std::vector<double>> d2(static_cast<size_t>(slots),
                                      std::vector<double>(static_cast<size_t>(slots), 0.0));
  std::vector<int> size(static_cast<size_t>(slots), 0);
  std::vector<bool> active(static_cast<size_t>(slots), false);
  std::vector<std::vector<int>> members(static_cast<size_t>(slots));

  for (int i = 0; i < n; ++i) {
    size[static_cast<size_t>(i)] = 1;
    active[static_cast<size_t>(i)] = true;
    members[static_cast<size_t>(i)] = {i};
    for (int j = 0; j < n; ++j) {
      const double d = 1.0 - corr[static_cast<size_t>(i)][static_cast<size_t>(j)];
      d2[static_cast<size_t>(i)][static_cast<size_t>(j)] = d * d;
    }
  }

  int next_id = n;
  for (int merge_step = 0; merge_step < n - 1; ++merge_step) {
    int best_i = -1, best_j = -1;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < next_id; ++i) {
      if (!active[static_cast<size_t>(i)]) continue;
      for (int j = i + 1; j < next_id; ++j) {
        if (!active[static_cast<size_t>(j)]) continue;
        if (d2[static_cast<size_t>(i)][static_cast<size_t>(j)] < best) {
          best = d2[static_cast<size_t>(i)][static_cast<size_t>(j)];
          best_i = i;
          best_j = j;
        }
      }
    }

    const int id = next_id++;
    const int ni = size[static_cast<size_t>(best_i)];
    const int nj = size[static_cast<size_t>(best_j)];
    size[static_cast<size_t>(id)] = ni + nj;
    active[static_cast<size_t>(id)] = true;
    active[static_cast<size_t>(best_i)] = false;
    active[static_cast<size_t>(best_j)] = false;
    members[static_cast<size_t>(id)] = members[static_cast<size_t>(best_i)];
    members[static_cast<size_t>(id)].insert(members[static_cast<size_t>(id)].end(),
                                            members[static_cast<size_t>(best_j)].begin(),
                                            members[static_cast<size_t>(best_j)].end());

    for (int k = 0; k < id; ++k) {
      if (!active[static_cast<size_t>(k)]) continue;
      const int nk = size[static_cast<size_t>(k)];
      const double dik = d2[static_cast<size_t>(best_i)][static_cast<size_t>(k)];
      const double djk = d2[static_cast<size_t>(best_j)][static_cast<size_t>(k)];
      const double dij = d2[static_cast<size_t>(best_i)][static_cast<size_t>(best_j)];
      const double updated = (static_cast<double>(ni + nk) * dik +
                              static_cast<double>(nj + nk) * djk -
                              static_cast<double>(nk) * dij) /
                             static_cast<double>(ni + nj + nk);
      d2[static_cast<size_t>(id)][static_cast<size_t>(k)] = updated;
      d2[static_cast<size_t>(k)][static_cast<size_t>(id)] = updated;
    }

    result.merges.push_back({best_i, best_j, std::sqrt(std::max(0.0, best)), ni + nj});
  }

  result.leaf_order = members[static_cast<size_t>(slots - 1)];
  return result;
}

CoalitionGame::CoalitionGame(const ScaledMatrix& scaled) {
  algorithms_ = scaled.algorithms;
  scores_.resize(scaled.scaled.size());
  for (size_t i = 0; i < scaled.scaled.size(); ++i) {
    scores_[i].resize(scaled.scaled[i].size());
    for (size_t a = 0; a < scaled.scaled[i].size(); ++a) {
      scores_[i][a] = std::max(0.0, scaled.scaled[i][a]);
    }
  }
  if (scores_.empty() || scores_[0].empty()) {
    throw Error("coalition game needs a non-empty scaled matrix");
  }
}

double CoalitionGame::value(const std::vector<int>& subset) const {
  if (subset.empty()) return 0;
  double total = 0;
  for (const auto& row : scores_) {
    double best = 0;
    for (int a : subset) best = std::max(best, row[static_cast<size_t>(a)]);
    total += best;
  }
  return total / static_cast<double>(scores_.size());
}

double marginal_contribution(const CoalitionGame& game, int algo) {
  const int a_count = game.num_algorithms();
  if (algo < 0 || algo >= a_count) {
    throw UnknownAlgorithm("algorithm index out of range");
  }
  std::vector<int> full(static_cast<size_t>(a_count));
  std::iota(full.begin(), full.end(), 0);
  std::vector<int> without;
  for (int a : full) {
    if (a != algo) without.push_back(a);
  }
  return game.value(full) - game.value(without);
}

double marginal_contribution(const CoalitionGame& game, const std::string& algo) {
  const auto& names = game.algorithms();
  auto it = std::find(names.begin(), names.end(), algo);
  if (it == names.end()) throw UnknownAlgorithm("unknown algorithm: " + algo);
  return marginal_contribution(game, static_cast<int>(it - names.begin()));
}

namespace {

// Shapley of the per-instance max game: with scores sorted descending
// s1 >= s2 >= ... >= sA >= 0, the algorithm at rank r receives
// sum_{j >= r} (s_j - s_{j+1}) / j where s_{A+1} = 0.
void exact_instance_shapley(const std::vector<double>& scores, std::vector<double>* phi) {
  const size_t a_count = scores.size();
  std::vector<size_t> order(a_count);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](size_t x, size_t y) { return scores[x] > scores[y]; });

  double acc = 0;
  for (size_t j = a_count; j >= 1; --j) {
    const double s_j = scores[order[j - 1]];
    const double s_next = j == a_count ? 0.0 : scores[order[j]];
    acc += (s_j - s_next) / static_cast<double>(j);
    (*phi)[order[j - 1]] += acc;
  }
}

}  // namespace

ShapleyReport shapley_values(const ScaledMatrix& scaled, ShapleyMethod method,
                             uint64_t samples, uint64_t seed) {
  const CoalitionGame game(scaled);
  const int a_count = game.num_algorithms();
  const size_t n = game.num_instances();

  ShapleyReport report;
  report.algorithms = scaled.algorithms;
  report.method = method;
  report.seed = seed;

  report.standalone.assign(static_cast<size_t>(a_count), 0.0);
  for (size_t i = 0; i < n; ++i) {
    for (int a = 0; a < a_count; ++a) {
      report.standalone[static_cast<size_t>(a)] += scaled.scaled[i][static_cast<size_t>(a)];
    }
  }
  for (auto& v : report.standalone) v /= static_cast<double>(n);

  report.marginal_to_full.resize(static_cast<size_t>(a_count));
  for (int a = 0; a < a_count; ++a) {
    report.marginal_to_full[static_cast<size_t>(a)] = marginal_contribution(game, a);
  }

  if (method == ShapleyMethod::Exact) {
    std::vector<double> phi(static_cast<size_t>(a_count), 0.0);
    std::vector<double> row(static_cast<size_t>(a_count));
    for (size_t i = 0; i < n; ++i) {
      for (int a = 0; a < a_count; ++a) row[static_cast<size_t>(a)] = game.score(i, a);
      exact_instance_shapley(row, &phi);
    }
    for (auto& v : phi) v /= static_cast<double>(n);
    report.shapley = std::move(phi);
    return report;
  }

  // Monte Carlo over uniformly random insertion orders; per permutation the
  // marginals telescope to v(N), so the estimates stay efficient.
  report.samples = samples;
  Rng rng(mix64(seed ^ 0x5a9bULL));
  std::vector<double> sum(static_cast<size_t>(a_count), 0.0);
  std::vector<double> sum_sq(static_cast<size_t>(a_count), 0.0);
  std::vector<int> perm(static_cast<size_t>(a_count));
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<double> cur_max(n);

  for (uint64_t s = 0; s < samples; ++s) {
    rng.shuffle(perm);
    std::fill(cur_max.begin(), cur_max.end(), 0.0);
    for (int a : perm) {
      double marginal = 0;
      for (size_t i = 0; i < n; ++i) {
        const double v = game.score(i, a);
        if (v > cur_max[i]) {
          marginal += v - cur_max[i];
          cur_max[i] = v;
        }
      }
      marginal /= static_cast<double>(n);
      sum[static_cast<size_t>(a)] += marginal;
      sum_sq[static_cast<size_t>(a)] += marginal * marginal;
    }
  }

  report.shapley.resize(static_cast<size_t>(a_count));
  report.half_width.resize(static_cast<size_t>(a_count));
  for (int a = 0; a < a_count; ++a) {
    const size_t sa = static_cast<size_t>(a);
    const double mean = sum[sa] / static_cast<double>(samples);
    const double var =
        std::max(0.0, sum_sq[sa] / static_cast<double>(samples) - mean * mean);
    report.shapley[sa] = mean;
    report.half_width[sa] = std::sqrt(var / static_cast<double>(samples));
  }
  return report;
}

std::vector<int> standalone_ranking(const ScaledMatrix& scaled) {
  const size_t a_count = scaled.algorithms.size();
  const size_t n = scaled.instance_ids.size();
  if (n == 0 || a_count == 0) throw Error("standalone ranking needs a non-empty matrix");

  std::vector<double> mean(a_count, 0.0);
  for (size_t i = 0; i < n; ++i) {
    for (size_t a = 0; a < a_count; ++a) mean[a] += scaled.scaled[i][a];
  }
  for (auto& v : mean) v /= static_cast<double>(n);

  std::vector<int> order(a_count);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int x, int y) {
    const size_t sx = static_cast<size_t>(x), sy = static_cast<size_t>(y);
    if (mean[sx] != mean[sy]) return mean[sx] > mean[sy];
    return scaled.algorithms[sx] < scaled.algorithms[sy];
  });
  return order;
}

}  // namespace ttp
