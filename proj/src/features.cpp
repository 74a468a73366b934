#include "ttp/features.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "ttp/errors.hpp"
#include "ttp/rng.hpp"

namespace ttp {

namespace {

constexpr size_t kFullMatrixMaxCities = 20000;
constexpr size_t kSampledEdges = 2'000'000;
constexpr uint64_t kSampleSeed = 0x7f3a2b1cULL;

double euclid(const Point& a, const Point& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return std::sqrt(dx * dx + dy * dy);
}

struct Stats {
  double min = 0, max = 0, mean = 0, median = 0, std_dev = 0;
};

Stats stats_of_sorted(const std::vector<double>& sorted) {
  Stats s;
  if (sorted.empty()) return s;
  s.min = sorted.front();
  s.max = sorted.back();
  double sum = 0;
  for (double v : sorted) sum += v;
  s.mean = sum / static_cast<double>(sorted.size());
  double sq = 0;
  for (double v : sorted) sq += (v - s.mean) * (v - s.mean);
  s.std_dev = std::sqrt(sq / static_cast<double>(sorted.size()));
  const size_t n = sorted.size();
  s.median = n % 2 == 1 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  return s;
}

Stats stats_of(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  return stats_of_sorted(values);
}

double quantile_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return 0;
  const double idx = q * static_cast<double>(sorted.size() - 1);
  const size_t lo = static_cast<size_t>(std::floor(idx));
  const size_t hi = static_cast<size_t>(std::ceil(idx));
  const double frac = idx - static_cast<double>(lo);
  return sorted[lo] * (1 - frac) + sorted[hi] * frac;
}

struct ModeFeatures {
  double frequency = 0;  // count in the tallest bin
  double quantity = 0;   // number of local-maximum bins
  double mean = 0;       // mean of modal bin centers
};

// Histogram with Freedman-Diaconis width; a mode is a bin strictly higher
// than its neighbors (boundary bins compare to the one existing neighbor).
ModeFeatures mode_features(const std::vector<double>& sorted) {
  ModeFeatures out;
  if (sorted.empty()) return out;
  const double lo = sorted.front(), hi = sorted.back();
  const double iqr = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
  double width = 2.0 * iqr / std::cbrt(static_cast<double>(sorted.size()));
  if (!(width > 0)) width = (hi - lo) / std::sqrt(static_cast<double>(sorted.size()));
  size_t bins = 1;
  if (width > 0 && hi > lo) {
    bins = std::min<size_t>(static_cast<size_t>(std::ceil((hi - lo) / width)), 10000);
    bins = std::max<size_t>(bins, 1);
  }
  std::vector<double> count(bins, 0.0);
  for (double v : sorted) {
    size_t b = hi > lo ? static_cast<size_t>((v - lo) / (hi - lo) * static_cast<double>(bins))
                       : 0;
    if (b >= bins) b = bins - 1;
    count[b] += 1;
  }
  double tallest = 0;
  for (double c : count) tallest = std::max(tallest, c);
  out.frequency = tallest;

  double modal_center_sum = 0;
  int modes = 0;
  for (size_t b = 0; b < bins; ++b) {
    const double left = b > 0 ? count[b - 1] : -1.0;
    const double right = b + 1 < bins ? count[b + 1] : -1.0;
    if (count[b] > left && count[b] > right) {
      ++modes;
      modal_center_sum += lo + (hi - lo) * (static_cast<double>(b) + 0.5) /
                                   static_cast<double>(bins);
    }
  }
  out.quantity = modes;
  out.mean = modes > 0 ? modal_center_sum / modes : 0.0;
  return out;
}

// Andrew monotone chain; returns hull vertex indices (strictly convex).
std::vector<int> convex_hull(const std::vector<Point>& pts) {
  const int n = static_cast<int>(pts.size());
  std::vector<int> idx(static_cast<size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    const Point& pa = pts[static_cast<size_t>(a)];
    const Point& pb = pts[static_cast<size_t>(b)];
    if (pa.x != pb.x) return pa.x < pb.x;
    return pa.y < pb.y;
  });
  auto cross = [&](int o, int a, int b) {
    const Point& po = pts[static_cast<size_t>(o)];
    const Point& pa = pts[static_cast<size_t>(a)];
    const Point& pb = pts[static_cast<size_t>(b)];
    return (pa.x - po.x) * (pb.y - po.y) - (pa.y - po.y) * (pb.x - po.x);
  };
  std::vector<int> hull(static_cast<size_t>(2 * n));
  int k = 0;
  for (int i = 0; i < n; ++i) {
    while (k >= 2 && cross(hull[static_cast<size_t>(k - 2)],
                           hull[static_cast<size_t>(k - 1)], idx[static_cast<size_t>(i)]) <= 0)
      --k;
    hull[static_cast<size_t>(k++)] = idx[static_cast<size_t>(i)];
  }
  for (int i = n - 2, lower = k + 1; i >= 0; --i) {
    while (k >= lower && cross(hull[static_cast<size_t>(k - 2)],
                               hull[static_cast<size_t>(k - 1)], idx[static_cast<size_t>(i)]) <= 0)
      --k;
    hull[static_cast<size_t>(k++)] = idx[static_cast<size_t>(i)];
  }
  hull.resize(static_cast<size_t>(std::max(k - 1, 1)));
  // distinct vertices only (duplicate points may repeat)
  std::vector<int> uniq;
  for (int v : hull) {
    if (std::find(uniq.begin(), uniq.end(), v) == uniq.end()) uniq.push_back(v);
  }
  return uniq;
}

double polygon_area(const std::vector<Point>& pts, const std::vector<int>& hull) {
  if (hull.size() < 3) return 0;
  double area2 = 0;
  for (size_t i = 0; i < hull.size(); ++i) {
    const Point& a = pts[static_cast<size_t>(hull[i])];
    const Point& b = pts[static_cast<size_t>(hull[(i + 1) % hull.size()])];
    area2 += a.x * b.y - b.x * a.y;
  }
  return std::abs(area2) / 2.0;
}

class Timer {
 public:
  Timer() : t0_(std::chrono::steady_clock::now()) {}
  double lap_ms() {
    const auto now = std::chrono::steady_clock::now();
    const double ms = std::chrono::duration<double, std::milli>(now - t0_).count();
    t0_ = now;
    return ms;
  }

 private:
  std::chrono::steady_clock::time_point t0_;
};

std::vector<std::string> build_catalogue() {
  std::vector<std::string> names = {
      "distance_min", "distance_max", "distance_mean", "distance_median",
      "distance_frac_shorter_than_mean", "distance_frac_distinct", "distance_std",
      "distance_mode_frequency", "distance_mode_quantity", "distance_mode_mean",
      "distance_expected_random_tour_length",
      "modes_count",
      "cluster_01_count", "cluster_01_mean_centroid_dist",
      "cluster_05_count", "cluster_05_mean_centroid_dist",
      "cluster_10_count", "cluster_10_mean_centroid_dist",
      "nnd_min", "nnd_max", "nnd_mean", "nnd_median", "nnd_std", "nnd_cv",
      "centroid_x", "centroid_y", "centroid_dist_min", "centroid_dist_mean",
      "centroid_dist_max",
      "mst_depth_min", "mst_depth_mean", "mst_depth_median", "mst_depth_max",
      "mst_depth_std",
      "mst_dist_min", "mst_dist_mean", "mst_dist_median", "mst_dist_max",
      "mst_dist_std", "mst_dist_sum_norm",
      "angle_min", "angle_mean", "angle_median", "angle_max", "angle_std",
      "hull_area", "hull_frac",
  };
  for (const auto& h : FeatureVector::header_names()) names.push_back(h);
  return names;
}

}  // namespace

const std::vector<std::string>& FeatureVector::catalogue() {
  static const std::vector<std::string> names = build_catalogue();
  return names;
}

const std::vector<std::string>& FeatureVector::header_names() {
  static const std::vector<std::string> names = {
      "capacity_of_knapsack", "knapsack_data_type", "number_of_items",
      "items_per_city",       "dimension",          "renting_ratio",
      "min_speed",            "max_speed",
  };
  return names;
}

const std::vector<std::string>& FeatureVector::group_names() {
  static const std::vector<std::string> names = {
      "distance", "modes", "cluster", "nnd", "centroid", "mst", "angle", "hull",
      "header"};
  return names;
}

double FeatureVector::at(const std::string& name) const {
  const auto& cat = catalogue();
  for (size_t i = 0; i < cat.size(); ++i) {
    if (cat[i] == name) return values[i];
  }
  throw UnknownFeature("unknown feature: " + name);
}

std::vector<Point> normalize_to_unit_square(const std::vector<Point>& points) {
  double min_x = points[0].x, max_x = points[0].x;
  double min_y = points[0].y, max_y = points[0].y;
  for (const Point& p : points) {
    min_x = std::min(min_x, p.x);
    max_x = std::max(max_x, p.x);
    min_y = std::min(min_y, p.y);
    max_y = std::max(max_y, p.y);
  }
  const double rx = max_x - min_x;
  const double ry = max_y - min_y;
  std::vector<Point> out(points.size());
  for (size_t i = 0; i < points.size(); ++i) {
    out[i].x = rx > 0 ? (points[i].x - min_x) / rx : 0.5;
    out[i].y = ry > 0 ? (points[i].y - min_y) / ry : 0.5;
  }
  return out;
}

std::vector<int> density_cluster(const std::vector<Point>& points, double eps,
                                 int min_pts) {
  const int n = static_cast<int>(points.size());
  std::vector<int> label(static_cast<size_t>(n), -2);  // -2 unvisited, -1 noise
  std::vector<int> neighbors, frontier;
  auto region_query = [&](int p, std::vector<int>* out) {
    out->clear();
    for (int q = 0; q < n; ++q) {
      if (q != p && euclid(points[static_cast<size_t>(p)], points[static_cast<size_t>(q)]) <= eps) {
        out->push_back(q);
      }
    }
  };

  int cluster = 0;
  for (int p = 0; p < n; ++p) {
    if (label[static_cast<size_t>(p)] != -2) continue;
    region_query(p, &neighbors);
    if (static_cast<int>(neighbors.size()) + 1 < min_pts) {
      label[static_cast<size_t>(p)] = -1;
      continue;
    }
    label[static_cast<size_t>(p)] = cluster;
    frontier = neighbors;
    for (size_t i = 0; i < frontier.size(); ++i) {
      const int q = frontier[i];
      if (label[static_cast<size_t>(q)] == -1) label[static_cast<size_t>(q)] = cluster;
      if (label[static_cast<size_t>(q)] != -2) continue;
      label[static_cast<size_t>(q)] = cluster;
      region_query(q, &neighbors);
      if (static_cast<int>(neighbors.size()) + 1 >= min_pts) {
        frontier.insert(frontier.end(), neighbors.begin(), neighbors.end());
      }
    }
    ++cluster;
  }
  for (auto& l : label) {
    if (l == -2) l = -1;
  }
  return label;
}

MstResult minimum_spanning_tree(
    const std::vector<Point>& points,
    const std::function<double(const Point&, const Point&)>& cost) {
  const int n = static_cast<int>(points.size());
  MstResult result;
  if (n < 2) {
    result.depth.assign(static_cast<size_t>(n), 0);
    return result;
  }

  // Prim from point 0
  std::vector<double> best(static_cast<size_t>(n), std::numeric_limits<double>::infinity());
  std::vector<int> parent(static_cast<size_t>(n), -1);
  std::vector<bool> in_tree(static_cast<size_t>(n), false);
  best[0] = 0;
  for (int step = 0; step < n; ++step) {
    int u = -1;
    for (int v = 0; v < n; ++v) {
      if (!in_tree[static_cast<size_t>(v)] &&
          (u == -1 || best[static_cast<size_t>(v)] < best[static_cast<size_t>(u)])) {
        u = v;
      }
    }
    in_tree[static_cast<size_t>(u)] = true;
    if (parent[static_cast<size_t>(u)] >= 0) {
      result.edges.push_back({parent[static_cast<size_t>(u)], u, best[static_cast<size_t>(u)]});
      result.total_weight += best[static_cast<size_t>(u)];
    }
    for (int v = 0; v < n; ++v) {
      if (in_tree[static_cast<size_t>(v)]) continue;
      const double w = cost(points[static_cast<size_t>(u)], points[static_cast<size_t>(v)]);
      if (w < best[static_cast<size_t>(v)]) {
        best[static_cast<size_t>(v)] = w;
        parent[static_cast<size_t>(v)] = u;
      }
    }
  }

  // depths from the root along parent links
  result.depth.assign(static_cast<size_t>(n), -1);
  result.depth[0] = 0;
  std::vector<std::vector<int>> children(static_cast<size_t>(n));
  for (int v = 1; v < n; ++v) children[static_cast<size_t>(parent[static_cast<size_t>(v)])].push_back(v);
  std::vector<int> stack = {0};
  while (!stack.empty()) {
    const int u = stack.back();
    stack.pop_back();
    for (int v : children[static_cast<size_t>(u)]) {
      result.depth[static_cast<size_t>(v)] = result.depth[static_cast<size_t>(u)] + 1;
      stack.push_back(v);
    }
  }
  return result;
}

MstResult minimum_spanning_tree(const std::vector<Point>& points) {
  return minimum_spanning_tree(points, euclid);
}

std::vector<std::pair<std::string, double>> extract_header_features(
    const TtpInstance& inst) {
  return {
      {"capacity_of_knapsack", inst.capacity},
      {"knapsack_data_type", static_cast<double>(kp_type_code(inst.kp_type))},
      {"number_of_items", static_cast<double>(inst.num_items())},
      {"items_per_city",
       static_cast<double>(inst.num_items()) / static_cast<double>(inst.dimension - 1)},
      {"dimension", static_cast<double>(inst.dimension)},
      {"renting_ratio", inst.renting_rate},
      {"min_speed", inst.min_speed},
      {"max_speed", inst.max_speed},
  };
}

FeatureVector extract_features(const TtpInstance& inst) {
  const size_t n = inst.coords.size();
  if (n < 3) {
    throw DegenerateGeometry("feature extraction requires at least 3 cities");
  }

  FeatureVector fv;
  fv.values.assign(FeatureVector::catalogue().size(), 0.0);
  size_t slot = 0;
  auto put = [&](double v) { fv.values[slot++] = v; };

  Timer timer;
  const std::vector<Point> pts = normalize_to_unit_square(inst.coords);

  // --- edge cost distribution ---
  const size_t total_pairs = n * (n - 1) / 2;
  std::vector<double> dists;
  double pair_sum = 0;
  if (n <= kFullMatrixMaxCities) {
    dists.reserve(total_pairs);
    for (size_t i = 0; i < n; ++i) {
      for (size_t j = i + 1; j < n; ++j) {
        const double d = euclid(pts[i], pts[j]);
        dists.push_back(d);
        pair_sum += d;
      }
    }
  } else {
    fv.approximate_distances = true;
    Rng rng(kSampleSeed);
    dists.reserve(kSampledEdges);
    for (size_t s = 0; s < kSampledEdges; ++s) {
      size_t i = rng.below(n);
      size_t j = rng.below(n - 1);
      if (j >= i) ++j;
      const double d = euclid(pts[i], pts[j]);
      dists.push_back(d);
      pair_sum += d;
    }
    pair_sum = pair_sum / static_cast<double>(kSampledEdges) * static_cast<double>(total_pairs);
  }
  std::sort(dists.begin(), dists.end());
  const Stats dstat = stats_of_sorted(dists);

  size_t shorter = 0, distinct = dists.empty() ? 0 : 1;
  for (size_t i = 0; i < dists.size(); ++i) {
    if (dists[i] < dstat.mean) ++shorter;
    if (i > 0 && dists[i] != dists[i - 1]) ++distinct;
  }
  const ModeFeatures modes = mode_features(dists);

  put(dstat.min);
  put(dstat.max);
  put(dstat.mean);
  put(dstat.median);
  put(static_cast<double>(shorter) / static_cast<double>(dists.size()));
  put(static_cast<double>(distinct) / static_cast<double>(dists.size()));
  put(dstat.std_dev);
  put(modes.frequency);
  put(modes.quantity);
  put(modes.mean);
  put(pair_sum * 2.0 / static_cast<double>(n - 1));
  fv.group_ms.emplace_back("distance", timer.lap_ms());

  put(modes.quantity);  // modes_count
  fv.group_ms.emplace_back("modes", timer.lap_ms());

  // --- density clusters at the three reachability radii ---
  for (double eps : {0.01, 0.05, 0.1}) {
    const auto labels = density_cluster(pts, eps, 3);
    int clusters = 0;
    for (int l : labels) clusters = std::max(clusters, l + 1);
    double dist_sum = 0;
    size_t member_count = 0;
    if (clusters > 0) {
      std::vector<double> cx(static_cast<size_t>(clusters), 0.0);
      std::vector<double> cy(static_cast<size_t>(clusters), 0.0);
      std::vector<size_t> cn(static_cast<size_t>(clusters), 0);
      for (size_t i = 0; i < n; ++i) {
        if (labels[i] < 0) continue;
        cx[static_cast<size_t>(labels[i])] += pts[i].x;
        cy[static_cast<size_t>(labels[i])] += pts[i].y;
        ++cn[static_cast<size_t>(labels[i])];
      }
      for (size_t i = 0; i < n; ++i) {
        if (labels[i] < 0) continue;
        const size_t c = static_cast<size_t>(labels[i]);
        const Point centroid{cx[c] / static_cast<double>(cn[c]),
                             cy[c] / static_cast<double>(cn[c])};
        dist_sum += euclid(pts[i], centroid);
        ++member_count;
      }
    }
    put(clusters);
    put(member_count > 0 ? dist_sum / static_cast<double>(member_count) : 0.0);
  }
  fv.group_ms.emplace_back("cluster", timer.lap_ms());

  // --- nearest neighbor distances ---
  std::vector<double> nnd(n, std::numeric_limits<double>::infinity());
  std::vector<int> nn1(n, -1), nn2(n, -1);  // two nearest, reused for angles
  for (size_t i = 0; i < n; ++i) {
    double d1 = std::numeric_limits<double>::infinity();
    double d2 = std::numeric_limits<double>::infinity();
    for (size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double d = euclid(pts[i], pts[j]);
      if (d < d1) {
        d2 = d1;
        nn2[i] = nn1[i];
        d1 = d;
        nn1[i] = static_cast<int>(j);
      } else if (d < d2) {
        d2 = d;
        nn2[i] = static_cast<int>(j);
      }
    }
    nnd[i] = d1;
  }
  const Stats nstat = stats_of(nnd);
  put(nstat.min);
  put(nstat.max);
  put(nstat.mean);
  put(nstat.median);
  put(nstat.std_dev);
  put(nstat.mean > 0 ? nstat.std_dev / nstat.mean : 0.0);
  fv.group_ms.emplace_back("nnd", timer.lap_ms());

  // --- centroid ---
  Point centroid{0, 0};
  for (const Point& p : pts) {
    centroid.x += p.x;
    centroid.y += p.y;
  }
  centroid.x /= static_cast<double>(n);
  centroid.y /= static_cast<double>(n);
  std::vector<double> cdist(n);
  for (size_t i = 0; i < n; ++i) cdist[i] = euclid(pts[i], centroid);
  const Stats cstat = stats_of(cdist);
  put(centroid.x);
  put(centroid.y);
  put(cstat.min);
  put(cstat.mean);
  put(cstat.max);
  fv.group_ms.emplace_back("centroid", timer.lap_ms());

  // --- minimum spanning tree ---
  const MstResult mst = minimum_spanning_tree(pts);
  std::vector<double> depths(n);
  for (size_t i = 0; i < n; ++i) depths[i] = mst.depth[i];
  std::vector<double> mst_dists(mst.edges.size());
  for (size_t i = 0; i < mst.edges.size(); ++i) mst_dists[i] = mst.edges[i].weight;
  const Stats dep = stats_of(depths);
  const Stats med = stats_of(mst_dists);
  put(dep.min);
  put(dep.mean);
  put(dep.median);
  put(dep.max);
  put(dep.std_dev);
  put(med.min);
  put(med.mean);
  put(med.median);
  put(med.max);
  put(med.std_dev);
  put(pair_sum > 0 ? mst.total_weight / pair_sum : 0.0);
  fv.group_ms.emplace_back("mst", timer.lap_ms());

  // --- angle spanned at each node by its two nearest neighbors ---
  std::vector<double> angles(n, 0.0);
  for (size_t i = 0; i < n; ++i) {
    const Point& p = pts[i];
    const Point& a = pts[static_cast<size_t>(nn1[i])];
    const Point& b = pts[static_cast<size_t>(nn2[i])];
    const double ax = a.x - p.x, ay = a.y - p.y;
    const double bx = b.x - p.x, by = b.y - p.y;
    const double na = std::sqrt(ax * ax + ay * ay);
    const double nb = std::sqrt(bx * bx + by * by);
    if (na > 0 && nb > 0) {
      const double c = std::clamp((ax * bx + ay * by) / (na * nb), -1.0, 1.0);
      angles[i] = std::acos(c);
    }
  }
  const Stats astat = stats_of(angles);
  put(astat.min);
  put(astat.mean);
  put(astat.median);
  put(astat.max);
  put(astat.std_dev);
  fv.group_ms.emplace_back("angle", timer.lap_ms());

  // --- convex hull ---
  const auto hull = convex_hull(pts);
  put(polygon_area(pts, hull));
  put(static_cast<double>(hull.size()) / static_cast<double>(n));
  fv.group_ms.emplace_back("hull", timer.lap_ms());

  for (const auto& [name, value] : extract_header_features(inst)) {
    (void)name;
    put(value);
  }
  fv.group_ms.emplace_back("header", timer.lap_ms());

  return fv;
}

}  // namespace ttp
