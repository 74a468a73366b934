#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "ttp/instance.hpp"

namespace ttp {

// 55 named instance features: 47 planar-geometry features computed on
// coordinates min-max normalized to the unit square, plus 8 header
// features copied verbatim from the instance definition.
struct FeatureVector {
  std::vector<double> values;                          // catalogue order
  std::vector<std::pair<std::string, double>> group_ms;  // extraction timing
  bool approximate_distances = false;  // edge stats sampled on huge instances

  double at(const std::string& name) const;  // throws UnknownFeature

  static const std::vector<std::string>& catalogue();      // 55 names
  static const std::vector<std::string>& header_names();   // the 8 header features
  static const std::vector<std::string>& group_names();
};

FeatureVector extract_features(const TtpInstance& inst);

// The processing-free features; constant time given a parsed instance.
std::vector<std::pair<std::string, double>> extract_header_features(const TtpInstance& inst);

// Density clustering (DBSCAN); returns a label per point, noise = -1.
std::vector<int> density_cluster(const std::vector<Point>& points, double eps,
                                 int min_pts);

struct MstResult {
  struct Edge {
    int a, b;       // 0-based point indices
    double weight;
  };
  std::vector<Edge> edges;   // n-1 edges
  std::vector<int> depth;    // per point, root = point 0
  double total_weight = 0;
};

MstResult minimum_spanning_tree(
    const std::vector<Point>& points,
    const std::function<double(const Point&, const Point&)>& cost);
MstResult minimum_spanning_tree(const std::vector<Point>& points);

// Points min-max scaled to [0,1] per axis; degenerate axes collapse to 0.5.
std::vector<Point> normalize_to_unit_square(const std::vector<Point>& points);

}  // namespace ttp
