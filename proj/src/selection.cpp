#include "ttp/selection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "ttp/io_util.hpp"

namespace ttp {

const char* to_string(SelectorFamily family) {
  switch (family) {
    case SelectorFamily::Regression: return "regression";
    case SelectorFamily::PairwiseRF: return "pairwise_rf";
    case SelectorFamily::Clustering: return "clustering";
    case SelectorFamily::Knn: return "knn";
  }
  return "pairwise_rf";
}

SelectorFamily selector_family_from_string(const std::string& name) {
  if (name == "regression") return SelectorFamily::Regression;
  if (name == "pairwise_rf") return SelectorFamily::PairwiseRF;
  if (name == "clustering") return SelectorFamily::Clustering;
  if (name == "knn") return SelectorFamily::Knn;
  throw Error("unknown selector family: " + name);
}

Dataset make_dataset(const Scenario& scenario) {
  Dataset d;
  d.instance_ids = scenario.matrix.instance_ids;
  d.algorithms = scenario.matrix.algorithms;
  d.feature_names = scenario.feature_names;
  d.x = scenario.feature_values;
  d.y = scenario.scaled.scaled;
  d.splits = scenario.splits;
  if (d.y.size() != d.x.size() || d.splits.fold.size() != d.x.size()) {
    throw InconsistentIds("dataset rows disagree across tables");
  }
  return d;
}

namespace {

std::vector<int> subset_indices(const std::vector<std::string>& all,
                                const std::vector<std::string>& wanted) {
  std::vector<int> idx;
  if (wanted.empty()) {
    idx.resize(all.size());
    std::iota(idx.begin(), idx.end(), 0);
    return idx;
  }
  for (const auto& name : wanted) {
    auto it = std::find(all.begin(), all.end(), name);
    if (it == all.end()) throw UnknownFeature("unknown feature: " + name);
    idx.push_back(static_cast<int>(it - all.begin()));
  }
  return idx;
}

double median_of(std::vector<double> v) {
  if (v.empty()) return 0;
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// ---- L1-regularized linear regression via coordinate descent ----

double soft_threshold(double v, double lambda) {
  if (v > lambda) return v - lambda;
  if (v < -lambda) return v + lambda;
  return 0;
}

std::vector<double> lasso_fit(const Matrix& x, const std::vector<size_t>& rows,
                              const std::vector<double>& y, double lambda,
                              double* intercept) {
  const size_t n_features = x.empty() ? 0 : x[0].size();
  const double n = static_cast<double>(rows.size());

  double y_mean = 0;
  for (size_t r : rows) y_mean += y[r];
  y_mean /= n;
  *intercept = y_mean;

  std::vector<double> beta(n_features, 0.0);
  std::vector<double> residual(rows.size());
  for (size_t i = 0; i < rows.size(); ++i) residual[i] = y[rows[i]] - y_mean;

  std::vector<double> col_sq(n_features, 0.0);
  for (size_t i = 0; i < rows.size(); ++i) {
    for (size_t f = 0; f < n_features; ++f) {
      col_sq[f] += x[rows[i]][f] * x[rows[i]][f];
    }
  }

  for (int sweep = 0; sweep < 200; ++sweep) {
    double max_change = 0;
    for (size_t f = 0; f < n_features; ++f) {
      if (col_sq[f] <= 0) continue;
      double rho = 0;
      for (size_t i = 0; i < rows.size(); ++i) {
        rho += x[rows[i]][f] * residual[i];
      }
      rho = rho / n + col_sq[f] / n * beta[f];
      const double new_beta = soft_threshold(rho, lambda) / (col_sq[f] / n);
      const double delta = new_beta - beta[f];
      if (delta != 0) {
        for (size_t i = 0; i < rows.size(); ++i) {
          residual[i] -= delta * x[rows[i]][f];
        }
        beta[f] = new_beta;
        max_change = std::max(max_change, std::abs(delta));
      }
    }
    if (max_change < 1e-7) break;
  }
  return beta;
}

double lasso_mse(const Matrix& x, const std::vector<size_t>& rows,
                 const std::vector<double>& y, const std::vector<double>& beta,
                 double intercept) {
  double sum = 0;
  for (size_t r : rows) {
    double pred = intercept;
    for (size_t f = 0; f < beta.size(); ++f) pred += beta[f] * x[r][f];
    sum += (y[r] - pred) * (y[r] - pred);
  }
  return rows.empty() ? 0 : sum / static_cast<double>(rows.size());
}

// lambda picked by inner 3-fold CV over a 10-point log grid
std::vector<double> lasso_cv_fit(const Matrix& x, const std::vector<size_t>& rows,
                                 const std::vector<double>& y, uint64_t seed,
                                 double* intercept, double* chosen_lambda) {
  const size_t n_features = x.empty() ? 0 : x[0].size();
  double y_mean = 0;
  for (size_t r : rows) y_mean += y[r];
  y_mean /= std::max<double>(1, static_cast<double>(rows.size()));

  double lambda_max = 0;
  for (size_t f = 0; f < n_features; ++f) {
    double dot = 0;
    for (size_t r : rows) dot += x[r][f] * (y[r] - y_mean);
    lambda_max = std::max(lambda_max, std::abs(dot) / static_cast<double>(rows.size()));
  }
  if (lambda_max <= 0) {
    *intercept = y_mean;
    *chosen_lambda = 0;
    return std::vector<double>(n_features, 0.0);
  }

  std::vector<double> grid(10);
  for (int g = 0; g < 10; ++g) {
    grid[static_cast<size_t>(g)] = lambda_max * std::pow(10.0, -3.0 * g / 9.0);
  }

  std::vector<size_t> shuffled = rows;
  Rng rng(mix64(seed ^ 0x1a550ULL));
  rng.shuffle(shuffled);

  double best_mse = std::numeric_limits<double>::infinity();
  double best_lambda = grid[0];
  for (double lambda : grid) {
    double mse = 0;
    int folds_used = 0;
    for (int fold = 0; fold < 3; ++fold) {
      std::vector<size_t> train, val;
      for (size_t i = 0; i < shuffled.size(); ++i) {
        (static_cast<int>(i % 3) == fold ? val : train).push_back(shuffled[i]);
      }
      if (train.empty() || val.empty()) continue;
      double b0;
      auto beta = lasso_fit(x, train, y, lambda, &b0);
      mse += lasso_mse(x, val, y, beta, b0);
      ++folds_used;
    }
    if (folds_used > 0) mse /= folds_used;
    if (mse < best_mse - 1e-12) {
      best_mse = mse;
      best_lambda = lambda;
    }
  }

  *chosen_lambda = best_lambda;
  return lasso_fit(x, rows, y, best_lambda, intercept);
}

// ---- k-means with k-means++ seeding ----

struct KmeansResult {
  Matrix centroids;
  std::vector<int> assignment;
  double inertia = std::numeric_limits<double>::infinity();
};

double sq_dist(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

bool kmeans_attempt(const Matrix& x, const std::vector<size_t>& rows, int k, Rng& rng,
                    KmeansResult* out) {
  const size_t n = rows.size();
  Matrix centroids;
  centroids.reserve(static_cast<size_t>(k));

  // k-means++ seeding
  centroids.push_back(x[rows[rng.below(n)]]);
  std::vector<double> d2(n);
  while (static_cast<int>(centroids.size()) < k) {
    double total = 0;
    for (size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& c : centroids) best = std::min(best, sq_dist(x[rows[i]], c));
      d2[i] = best;
      total += best;
    }
    size_t pick = 0;
    if (total > 0) {
      double target = rng.next_double() * total;
      double acc = 0;
      for (size_t i = 0; i < n; ++i) {
        acc += d2[i];
        if (acc >= target) {
          pick = i;
          break;
        }
      }
    } else {
      pick = rng.below(n);
    }
    centroids.push_back(x[rows[pick]]);
  }

  std::vector<int> assignment(n, 0);
  for (int iter = 0; iter < 100; ++iter) {
    bool changed = false;
    for (size_t i = 0; i < n; ++i) {
      int best_c = 0;
      double best = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        const double d = sq_dist(x[rows[i]], centroids[static_cast<size_t>(c)]);
        if (d < best) {
          best = d;
          best_c = c;
        }
      }
      if (assignment[i] != best_c) {
        assignment[i] = best_c;
        changed = true;
      }
    }
    std::vector<size_t> counts(static_cast<size_t>(k), 0);
    Matrix sums(static_cast<size_t>(k),
                std::vector<double>(x[rows[0]].size(), 0.0));
    for (size_t i = 0; i < n; ++i) {
      ++counts[static_cast<size_t>(assignment[i])];
      for (size_t f = 0; f < sums[0].size(); ++f) {
        sums[static_cast<size_t>(assignment[i])][f] += x[rows[i]][f];
      }
    }
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<size_t>(c)] == 0) return false;  // empty cluster: restart
      for (size_t f = 0; f < sums[0].size(); ++f) {
        centroids[static_cast<size_t>(c)][f] =
            sums[static_cast<size_t>(c)][f] / static_cast<double>(counts[static_cast<size_t>(c)]);
      }
    }
    if (!changed) break;
  }

  double inertia = 0;
  for (size_t i = 0; i < n; ++i) {
    inertia += sq_dist(x[rows[i]], centroids[static_cast<size_t>(assignment[i])]);
  }
  out->centroids = std::move(centroids);
  out->assignment = std::move(assignment);
  out->inertia = inertia;
  return true;
}

}  // namespace

int TrainedSelector::select(const std::vector<double>& raw_features) const {
  if (raw_features.size() != feature_names.size()) {
    throw Error("feature vector has wrong length for this model");
  }
  std::vector<double> z(raw_features.size());
  for (size_t f = 0; f < z.size(); ++f) {
    double v = raw_features[f];
    if (std::isnan(v)) v = impute_median[f];
    z[f] = sd[f] > 0 ? (v - mean[f]) / sd[f] : 0.0;
  }

  const int n_algos = static_cast<int>(algorithms.size());
  auto tie_break = [&](const std::vector<double>& score) {
    int best = 0;
    for (int a = 1; a < n_algos; ++a) {
      const size_t sa = static_cast<size_t>(a), sb = static_cast<size_t>(best);
      if (score[sa] > score[sb] ||
          (score[sa] == score[sb] && train_mean_score[sa] > train_mean_score[sb])) {
        best = a;
      }
    }
    return best;
  };

  switch (family) {
    case SelectorFamily::Regression: {
      std::vector<double> pred(static_cast<size_t>(n_algos), 0.0);
      for (int a = 0; a < n_algos; ++a) {
        double v = regression.intercepts[static_cast<size_t>(a)];
        for (size_t f = 0; f < z.size(); ++f) {
          v += regression.weights[static_cast<size_t>(a)][f] * z[f];
        }
        pred[static_cast<size_t>(a)] = v;
      }
      return tie_break(pred);
    }
    case SelectorFamily::PairwiseRF: {
      std::vector<double> votes(static_cast<size_t>(n_algos), 0.0);
      for (const auto& pair : pairwise.pairs) {
        if (pair.constant) {
          votes[static_cast<size_t>(pair.winner)] += 1;
        } else {
          const int won = pair.forest.predict(z) > 0 ? pair.a : pair.b;
          votes[static_cast<size_t>(won)] += 1;
        }
      }
      return tie_break(votes);
    }
    case SelectorFamily::Clustering: {
      int best_c = 0;
      double best = std::numeric_limits<double>::infinity();
      for (size_t c = 0; c < cluster.centroids.size(); ++c) {
        const double d = sq_dist(z, cluster.centroids[c]);
        if (d < best) {
          best = d;
          best_c = static_cast<int>(c);
        }
      }
      return cluster.labels[static_cast<size_t>(best_c)];
    }
    case SelectorFamily::Knn: {
      const size_t n = knn.train_x.size();
      const size_t k = std::min<size_t>(static_cast<size_t>(knn.k), n);
      std::vector<std::pair<double, size_t>> dist(n);
      for (size_t i = 0; i < n; ++i) dist[i] = {sq_dist(z, knn.train_x[i]), i};
      std::partial_sort(dist.begin(), dist.begin() + static_cast<long>(k), dist.end());
      std::vector<double> mean_score(static_cast<size_t>(n_algos), 0.0);
      for (size_t i = 0; i < k; ++i) {
        for (int a = 0; a < n_algos; ++a) {
          mean_score[static_cast<size_t>(a)] += knn.train_y[dist[i].second][static_cast<size_t>(a)];
        }
      }
      return tie_break(mean_score);
    }
  }
  return 0;
}

TrainedSelector train_selector(const Dataset& data, const std::vector<size_t>& train_rows,
                               const SelectorConfig& config) {
  if (train_rows.empty()) throw Error("empty training fold");
  const auto idx = subset_indices(data.feature_names, config.feature_subset);

  TrainedSelector sel;
  sel.family = config.family;
  sel.seed = config.seed;
  sel.algorithms = data.algorithms;
  for (int f : idx) sel.feature_names.push_back(data.feature_names[static_cast<size_t>(f)]);

  const size_t n_feat = idx.size();
  const size_t n_algos = data.algorithms.size();

  // imputation + normalization statistics from the training fold only
  sel.impute_median.resize(n_feat);
  sel.mean.resize(n_feat);
  sel.sd.resize(n_feat);
  for (size_t f = 0; f < n_feat; ++f) {
    std::vector<double> seen;
    for (size_t r : train_rows) {
      const double v = data.x[r][static_cast<size_t>(idx[f])];
      if (!std::isnan(v)) seen.push_back(v);
    }
    sel.impute_median[f] = median_of(seen);
  }

  Matrix xz(data.x.size(), std::vector<double>(n_feat, 0.0));
  for (size_t r = 0; r < data.x.size(); ++r) {
    for (size_t f = 0; f < n_feat; ++f) {
      double v = data.x[r][static_cast<size_t>(idx[f])];
      if (std::isnan(v)) v = sel.impute_median[f];
      xz[r][f] = v;
    }
  }
  for (size_t f = 0; f < n_feat; ++f) {
    double m = 0;
    for (size_t r : train_rows) m += xz[r][f];
    m /= static_cast<double>(train_rows.size());
    double var = 0;
    for (size_t r : train_rows) var += (xz[r][f] - m) * (xz[r][f] - m);
    var /= static_cast<double>(train_rows.size());
    sel.mean[f] = m;
    sel.sd[f] = std::sqrt(var);
  }
  for (size_t r = 0; r < xz.size(); ++r) {
    for (size_t f = 0; f < n_feat; ++f) {
      xz[r][f] = sel.sd[f] > 0 ? (xz[r][f] - sel.mean[f]) / sel.sd[f] : 0.0;
    }
  }

  sel.train_mean_score.assign(n_algos, 0.0);
  for (size_t r : train_rows) {
    for (size_t a = 0; a < n_algos; ++a) sel.train_mean_score[a] += data.y[r][a];
  }
  for (auto& v : sel.train_mean_score) v /= static_cast<double>(train_rows.size());

  switch (config.family) {
    case SelectorFamily::Regression: {
      sel.regression.weights.resize(n_algos);
      sel.regression.intercepts.resize(n_algos);
      sel.regression.lambdas.resize(n_algos);
      for (size_t a = 0; a < n_algos; ++a) {
        std::vector<double> target(data.y.size(), 0.0);
        for (size_t r = 0; r < data.y.size(); ++r) target[r] = data.y[r][a];
        double intercept = 0, lambda = 0;
        sel.regression.weights[a] = lasso_cv_fit(xz, train_rows, target,
                                                 config.seed + a, &intercept, &lambda);
        sel.regression.intercepts[a] = intercept;
        sel.regression.lambdas[a] = lambda;
      }
      break;
    }
    case SelectorFamily::PairwiseRF: {
      ForestOptions fopts;
      fopts.n_trees = config.rf_trees;
      fopts.tree.max_depth = config.rf_max_depth;
      fopts.tree.features_per_split = config.rf_features_per_split;
      for (size_t a = 0; a < n_algos; ++a) {
        for (size_t b = a + 1; b < n_algos; ++b) {
          PairwiseRfModel::Pair pair;
          pair.a = static_cast<int>(a);
          pair.b = static_cast<int>(b);

          Matrix px;
          std::vector<int> py;
          std::vector<double> pw;
          for (size_t r : train_rows) {
            const double diff = data.y[r][a] - data.y[r][b];
            if (diff == 0) continue;  // carries no preference signal
            px.push_back(xz[r]);
            py.push_back(diff > 0 ? 1 : -1);
            pw.push_back(std::abs(diff));
          }
          const bool has_pos = std::find(py.begin(), py.end(), 1) != py.end();
          const bool has_neg = std::find(py.begin(), py.end(), -1) != py.end();
          if (py.empty() || !has_pos || !has_neg) {
            pair.constant = true;
            if (py.empty()) {
              pair.winner = sel.train_mean_score[a] >= sel.train_mean_score[b]
                                ? pair.a
                                : pair.b;
            } else {
              pair.winner = has_pos ? pair.a : pair.b;
            }
          } else {
            pair.forest.fit(px, py, pw, fopts,
                            mix64(config.seed ^ (a * 131 + b)));
          }
          sel.pairwise.pairs.push_back(std::move(pair));
        }
      }
      break;
    }
    case SelectorFamily::Clustering: {
      int k = config.kmeans_k;
      if (k <= 0) {
        k = static_cast<int>(
            std::ceil(std::sqrt(static_cast<double>(train_rows.size())) / 2.0));
        k = std::min(k, 25);
      }
      k = std::max(1, std::min<int>(k, static_cast<int>(train_rows.size())));

      KmeansResult best;
      bool found = false;
      uint64_t attempt_seed = mix64(config.seed ^ 0x6b6dULL);
      int attempts_left = 25 + 50;  // 25 scored restarts plus empty-cluster retries
      int scored = 0;
      while (scored < 25 && attempts_left-- > 0) {
        Rng rng(attempt_seed = mix64(attempt_seed));
        KmeansResult result;
        if (!kmeans_attempt(xz, train_rows, k, rng, &result)) continue;
        ++scored;
        if (result.inertia < best.inertia) {
          best = std::move(result);
          found = true;
        }
      }
      if (!found) throw Error("k-means failed to produce non-empty clusters");

      sel.cluster.centroids = best.centroids;
      sel.cluster.labels.assign(static_cast<size_t>(k), 0);
      for (int c = 0; c < k; ++c) {
        std::vector<double> mean_score(n_algos, 0.0);
        size_t members = 0;
        for (size_t i = 0; i < train_rows.size(); ++i) {
          if (best.assignment[i] != c) continue;
          ++members;
          for (size_t a = 0; a < n_algos; ++a) mean_score[a] += data.y[train_rows[i]][a];
        }
        int label = 0;
        for (size_t a = 1; a < n_algos; ++a) {
          if (mean_score[a] > mean_score[static_cast<size_t>(label)]) {
            label = static_cast<int>(a);
          }
        }
        (void)members;
        sel.cluster.labels[static_cast<size_t>(c)] = label;
      }
      break;
    }
    case SelectorFamily::Knn: {
      sel.knn.k = config.knn_k;
      for (size_t r : train_rows) {
        sel.knn.train_x.push_back(xz[r]);
        sel.knn.train_y.push_back(data.y[r]);
      }
      break;
    }
  }
  return sel;
}

EvalReport evaluate_selector(const Dataset& data, const SelectorConfig& config) {
  EvalReport report;
  const size_t n = data.x.size();
  const size_t n_algos = data.algorithms.size();

  // baselines over the full dataset
  {
    size_t best_a = 0;
    double best_mean = -std::numeric_limits<double>::infinity();
    for (size_t a = 0; a < n_algos; ++a) {
      double m = 0;
      for (size_t r = 0; r < n; ++r) m += data.y[r][a];
      m /= static_cast<double>(n);
      if (m > best_mean) {
        best_mean = m;
        best_a = a;
      }
    }
    report.single_best = best_mean;
    report.single_best_algorithm = data.algorithms[best_a];

    double oracle = 0;
    for (size_t r = 0; r < n; ++r) {
      oracle += *std::max_element(data.y[r].begin(), data.y[r].end());
    }
    report.oracle = oracle / static_cast<double>(n);
  }

  const auto idx = subset_indices(data.feature_names, config.feature_subset);
  double total = 0;
  size_t tested = 0;
  for (int fold = 1; fold <= data.splits.k; ++fold) {
    std::vector<size_t> train_rows, test_rows;
    for (size_t r = 0; r < n; ++r) {
      (data.splits.fold[r] == fold ? test_rows : train_rows).push_back(r);
    }
    if (test_rows.empty()) continue;
    TrainedSelector sel = train_selector(data, train_rows, config);

    double fold_sum = 0;
    for (size_t r : test_rows) {
      std::vector<double> raw(idx.size());
      for (size_t f = 0; f < idx.size(); ++f) raw[f] = data.x[r][static_cast<size_t>(idx[f])];
      const int chosen = sel.select(raw);
      fold_sum += data.y[r][static_cast<size_t>(chosen)];
    }
    report.per_fold.push_back(fold_sum / static_cast<double>(test_rows.size()));
    total += fold_sum;
    tested += test_rows.size();
  }
  report.mean_performance = tested > 0 ? total / static_cast<double>(tested) : 0;

  const double gap = report.oracle - report.single_best;
  report.gap_closed =
      gap > 1e-12 ? (report.mean_performance - report.single_best) / gap : 0.0;
  return report;
}

EvalReport evaluate_with_subset(const Dataset& data, const std::vector<std::string>& names,
                                SelectorFamily family, uint64_t seed) {
  SelectorConfig config;
  config.family = family;
  config.seed = seed;
  config.feature_subset = names;
  return evaluate_selector(data, config);
}

GiniImportance gini_importance(const TrainedSelector& selector) {
  if (selector.family != SelectorFamily::PairwiseRF) {
    throw Error("gini importance requires a pairwise_rf selector");
  }
  const size_t n_feat = selector.feature_names.size();
  GiniImportance out;
  out.feature_names = selector.feature_names;
  out.mean.assign(n_feat, 0.0);
  out.p25.assign(n_feat, 0.0);
  out.p75.assign(n_feat, 0.0);

  std::vector<std::vector<double>> per_forest;  // normalized per forest
  size_t tree_count = 0;
  std::vector<double> tree_sum(n_feat, 0.0);
  for (const auto& pair : selector.pairwise.pairs) {
    if (pair.constant) continue;
    std::vector<double> forest_total(n_feat, 0.0);
    for (const auto& tree : pair.forest.trees()) {
      const auto& dec = tree.impurity_decrease();
      for (size_t f = 0; f < n_feat; ++f) {
        tree_sum[f] += dec[f];
        forest_total[f] += dec[f];
      }
      ++tree_count;
    }
    const double s = std::accumulate(forest_total.begin(), forest_total.end(), 0.0);
    if (s > 0) {
      for (auto& v : forest_total) v /= s;
      per_forest.push_back(std::move(forest_total));
    }
  }

  if (tree_count > 0) {
    for (size_t f = 0; f < n_feat; ++f) out.mean[f] = tree_sum[f] / static_cast<double>(tree_count);
  }
  const double total = std::accumulate(out.mean.begin(), out.mean.end(), 0.0);
  if (total > 0) {
    for (auto& v : out.mean) v /= total;
  }

  if (!per_forest.empty()) {
    for (size_t f = 0; f < n_feat; ++f) {
      std::vector<double> column;
      column.reserve(per_forest.size());
      for (const auto& forest : per_forest) column.push_back(forest[f]);
      std::sort(column.begin(), column.end());
      auto quant = [&](double q) {
        const double pos = q * static_cast<double>(column.size() - 1);
        const size_t lo = static_cast<size_t>(std::floor(pos));
        const size_t hi = static_cast<size_t>(std::ceil(pos));
        return column[lo] + (column[hi] - column[lo]) * (pos - static_cast<double>(lo));
      };
      out.p25[f] = quant(0.25);
      out.p75[f] = quant(0.75);
    }
  }
  return out;
}

// ---- serialization ----

namespace {

nlohmann::json forest_to_json(const RandomForest& forest) {
  nlohmann::json trees = nlohmann::json::array();
  for (const auto& tree : forest.trees()) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto& n : tree.nodes()) {
      nodes.push_back({n.feature, n.threshold, n.left, n.right, n.pos_weight, n.neg_weight});
    }
    nlohmann::json t;
    t["nodes"] = std::move(nodes);
    t["decrease"] = tree.impurity_decrease();
    trees.push_back(std::move(t));
  }
  return trees;
}

}  // namespace

void TrainedSelector::save(const std::string& path) const {
  nlohmann::json j;
  j["format"] = "ttp-selector";
  j["version"] = 1;
  j["tool_version"] = kToolVersion;
  j["family"] = to_string(family);
  j["algorithms"] = algorithms;
  j["feature_names"] = feature_names;
  j["impute_median"] = impute_median;
  j["mean"] = mean;
  j["sd"] = sd;
  j["train_mean_score"] = train_mean_score;
  j["seed"] = seed;

  switch (family) {
    case SelectorFamily::Regression:
      j["weights"] = regression.weights;
      j["intercepts"] = regression.intercepts;
      j["lambdas"] = regression.lambdas;
      break;
    case SelectorFamily::PairwiseRF: {
      nlohmann::json pairs = nlohmann::json::array();
      for (const auto& pair : pairwise.pairs) {
        nlohmann::json p;
        p["a"] = pair.a;
        p["b"] = pair.b;
        p["constant"] = pair.constant;
        p["winner"] = pair.winner;
        if (!pair.constant) p["trees"] = forest_to_json(pair.forest);
        pairs.push_back(std::move(p));
      }
      j["pairs"] = std::move(pairs);
      break;
    }
    case SelectorFamily::Clustering:
      j["centroids"] = cluster.centroids;
      j["labels"] = cluster.labels;
      break;
    case SelectorFamily::Knn:
      j["k"] = knn.k;
      j["train_x"] = knn.train_x;
      j["train_y"] = knn.train_y;
      break;
  }
  write_text_file(path, j.dump() + "\n");
}

namespace {

// Forests are rebuilt node-for-node; prediction does not need refitting.
RandomForest forest_from_json(const nlohmann::json& trees_json, size_t n_features) {
  std::vector<DecisionTree> trees;
  for (const auto& t : trees_json) {
    std::vector<DecisionTree::Node> nodes;
    for (const auto& n : t["nodes"]) {
      DecisionTree::Node node;
      node.feature = n[0].get<int>();
      node.threshold = n[1].get<double>();
      node.left = n[2].get<int>();
      node.right = n[3].get<int>();
      node.pos_weight = n[4].get<double>();
      node.neg_weight = n[5].get<double>();
      nodes.push_back(node);
    }
    DecisionTree tree;
    tree.set_state(std::move(nodes), t["decrease"].get<std::vector<double>>());
    trees.push_back(std::move(tree));
  }
  RandomForest forest;
  forest.set_trees(std::move(trees), n_features);
  return forest;
}

}  // namespace

TrainedSelector TrainedSelector::load(const std::string& path) {
  const auto j = nlohmann::json::parse(read_text_file(path));
  if (j.value("format", "") != "ttp-selector") {
    throw Error("not a selector model file: " + path);
  }
  TrainedSelector sel;
  sel.family = selector_family_from_string(j["family"].get<std::string>());
  sel.algorithms = j["algorithms"].get<std::vector<std::string>>();
  sel.feature_names = j["feature_names"].get<std::vector<std::string>>();
  sel.impute_median = j["impute_median"].get<std::vector<double>>();
  sel.mean = j["mean"].get<std::vector<double>>();
  sel.sd = j["sd"].get<std::vector<double>>();
  sel.train_mean_score = j["train_mean_score"].get<std::vector<double>>();
  sel.seed = j["seed"].get<uint64_t>();

  switch (sel.family) {
    case SelectorFamily::Regression:
      sel.regression.weights = j["weights"].get<Matrix>();
      sel.regression.intercepts = j["intercepts"].get<std::vector<double>>();
      sel.regression.lambdas = j["lambdas"].get<std::vector<double>>();
      break;
    case SelectorFamily::PairwiseRF:
      for (const auto& p : j["pairs"]) {
        PairwiseRfModel::Pair pair;
        pair.a = p["a"].get<int>();
        pair.b = p["b"].get<int>();
        pair.constant = p["constant"].get<bool>();
        pair.winner = p["winner"].get<int>();
        if (!pair.constant) {
          pair.forest = forest_from_json(p["trees"], sel.feature_names.size());
        }
        sel.pairwise.pairs.push_back(std::move(pair));
      }
      break;
    case SelectorFamily::Clustering:
      sel.cluster.centroids = j["centroids"].get<Matrix>();
      sel.cluster.labels = j["labels"].get<std::vector<int>>();
      break;
    case SelectorFamily::Knn:
      sel.knn.k = j["k"].get<int>();
      sel.knn.train_x = j["train_x"].get<Matrix>();
      sel.knn.train_y = j["train_y"].get<Matrix>();
      break;
  }
  return sel;
}

}  // namespace ttp
