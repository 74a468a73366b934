#pragma once

// Shared fixtures and independent brute-force oracles for the test suites.
// Oracles here enumerate exhaustively and never reuse solver code paths.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <vector>

#include "ttp/analysis.hpp"
#include "ttp/evaluation.hpp"
#include "ttp/instance.hpp"

namespace ttp_test {

// Four cities, six items, capacity 3, renting rate 1, speeds 0.1/1.
// Tour (1,2,4,3) with items 4 and 5 (profit 40+40, weight 2) pays rent
// 15 + 15 and scores exactly 50. Ceil distances: legs 5,5,5 out, 6 home.
inline ttp::TtpInstance worked_example_instance() {
  ttp::TtpInstance inst;
  inst.name = "example-4city";
  inst.dimension = 4;
  inst.coords = {{0.0, 0.0}, {4.5, 0.0}, {0.1, 5.5}, {4.5, 4.5}};
  inst.edge_weight_kind = ttp::EdgeWeightKind::CeilEuclidean2D;
  inst.items = {
      {1, 2, 20.0, 2.0}, {2, 2, 30.0, 3.0},  {3, 3, 100.0, 3.0},
      {4, 3, 40.0, 1.0}, {5, 3, 40.0, 1.0},  {6, 4, 20.0, 2.0},
  };
  inst.capacity = 3.0;
  inst.min_speed = 0.1;
  inst.max_speed = 1.0;
  inst.renting_rate = 1.0;
  inst.kp_type = ttp::KpType::Uncorrelated;
  inst.check_invariants();
  return inst;
}

inline ttp::Tour worked_example_tour() { return ttp::Tour{{1, 2, 4, 3}}; }

inline ttp::PackingPlan worked_example_plan() {
  ttp::PackingPlan plan;
  plan.picked = {0, 0, 0, 1, 1, 0};
  return plan;
}

// Direct objective evaluation of a packing bitmask, independent of the
// library's evaluation path.
inline double eval_mask(const ttp::TtpInstance& inst, const std::vector<int>& order,
                        uint32_t mask) {
  const int n = inst.dimension;
  std::vector<double> gain(static_cast<size_t>(n) + 1, 0.0);
  double profit = 0, weight = 0;
  for (size_t k = 0; k < inst.items.size(); ++k) {
    if (!(mask & (1u << k))) continue;
    const ttp::Item& it = inst.items[k];
    gain[static_cast<size_t>(it.city)] += it.weight;
    profit += it.profit;
    weight += it.weight;
  }
  if (weight > inst.capacity) return -std::numeric_limits<double>::infinity();
  const double nu = inst.nu();
  double carried = 0, time = 0;
  for (int i = 0; i < n; ++i) {
    carried += gain[static_cast<size_t>(order[static_cast<size_t>(i)])];
    time += inst.distance(order[static_cast<size_t>(i)],
                          order[static_cast<size_t>((i + 1) % n)]) /
            (inst.max_speed - nu * carried);
  }
  return profit - inst.renting_rate * time;
}

// Best packing for a fixed tour by full 2^m enumeration (m <= 24).
inline double brute_force_best_plan(const ttp::TtpInstance& inst,
                                    const std::vector<int>& order,
                                    uint32_t* best_mask = nullptr) {
  const size_t m = inst.items.size();
  double best = -std::numeric_limits<double>::infinity();
  for (uint32_t mask = 0; mask < (1u << m); ++mask) {
    const double z = eval_mask(inst, order, mask);
    if (z > best) {
      best = z;
      if (best_mask) *best_mask = mask;
    }
  }
  return best;
}

// Global optimum over all tours and packings (n <= 9, m <= 20).
inline double brute_force_optimum(const ttp::TtpInstance& inst) {
  std::vector<int> rest;
  for (int c = 2; c <= inst.dimension; ++c) rest.push_back(c);
  std::vector<int> order(static_cast<size_t>(inst.dimension));
  order[0] = 1;
  double best = -std::numeric_limits<double>::infinity();
  do {
    std::copy(rest.begin(), rest.end(), order.begin() + 1);
    best = std::max(best, brute_force_best_plan(inst, order));
  } while (std::next_permutation(rest.begin(), rest.end()));
  return best;
}

// Shapley values by averaging marginals over all |A|! insertion orders.
inline std::vector<double> brute_force_shapley(const ttp::CoalitionGame& game) {
  const int a_count = game.num_algorithms();
  std::vector<int> perm(static_cast<size_t>(a_count));
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<double> phi(static_cast<size_t>(a_count), 0.0);
  size_t count = 0;
  do {
    std::vector<int> prefix;
    double prev = 0;
    for (int a : perm) {
      prefix.push_back(a);
      const double v = game.value(prefix);
      phi[static_cast<size_t>(a)] += v - prev;
      prev = v;
    }
    ++count;
  } while (std::next_permutation(perm.begin(), perm.end()));
  for (auto& v : phi) v /= static_cast<double>(count);
  return phi;
}

// Total cost of the cheapest spanning tree by Pruefer-sequence enumeration.
inline double brute_force_mst_cost(const std::vector<ttp::Point>& pts) {
  const int n = static_cast<int>(pts.size());
  auto dist = [&](int a, int b) {
    const double dx = pts[static_cast<size_t>(a)].x - pts[static_cast<size_t>(b)].x;
    const double dy = pts[static_cast<size_t>(a)].y - pts[static_cast<size_t>(b)].y;
    return std::sqrt(dx * dx + dy * dy);
  };
  if (n == 2) return dist(0, 1);

  const int len = n - 2;
  std::vector<int> seq(static_cast<size_t>(len), 0);
  double best = std::numeric_limits<double>::infinity();
  while (true) {
    // decode the Pruefer sequence into tree edges
    std::vector<int> degree(static_cast<size_t>(n), 1);
    for (int v : seq) ++degree[static_cast<size_t>(v)];
    double cost = 0;
    std::vector<int> deg = degree;
    for (int v : seq) {
      for (int leaf = 0; leaf < n; ++leaf) {
        if (deg[static_cast<size_t>(leaf)] == 1) {
          cost += dist(leaf, v);
          deg[static_cast<size_t>(leaf)] = 0;
          --deg[static_cast<size_t>(v)];
          break;
        }
      }
    }
    int u = -1, w = -1;
    for (int v = 0; v < n; ++v) {
      if (deg[static_cast<size_t>(v)] == 1) (u < 0 ? u : w) = v;
    }
    cost += dist(u, w);
    best = std::min(best, cost);

    int pos = len - 1;
    while (pos >= 0 && seq[static_cast<size_t>(pos)] == n - 1) {
      seq[static_cast<size_t>(pos)] = 0;
      --pos;
    }
    if (pos < 0) break;
    ++seq[static_cast<size_t>(pos)];
  }
  return best;
}

}  // namespace ttp_test
