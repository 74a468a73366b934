#include "ttp/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ttp/rng.hpp"

namespace ttp {

namespace {

constexpr int kTwoOptPassCap = 1000;
constexpr double kImprovementEps = 1e-12;

int64_t elapsed_ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::steady_clock::now() - t0)
      .count();
}

void trace_point(Trace* trace, const Budget& budget,
                 std::chrono::steady_clock::time_point t0, uint64_t iter, double z) {
  if (!trace) return;
  const double x = budget.has_deadline()
                       ? static_cast<double>(elapsed_ms_since(t0))
                       : static_cast<double>(iter);
  trace->points.emplace_back(x, z);
}

}  // namespace

double tour_length(const TtpInstance& inst, const Tour& tour) {
  const int n = static_cast<int>(tour.order.size());
  double len = 0;
  for (int i = 0; i < n; ++i) {
    len += inst.distance(tour.order[static_cast<size_t>(i)],
                         tour.order[static_cast<size_t>((i + 1) % n)]);
  }
  return len;
}

Tour nearest_neighbor_tour(const TtpInstance& inst, uint64_t seed) {
  const int n = inst.dimension;
  Rng rng(mix64(seed));
  Tour tour;
  tour.order.reserve(static_cast<size_t>(n));
  tour.order.push_back(1);

  std::vector<bool> visited(static_cast<size_t>(n) + 1, false);
  visited[1] = true;
  std::vector<int> tied;
  int current = 1;
  for (int step = 1; step < n; ++step) {
    double best = std::numeric_limits<double>::infinity();
    tied.clear();
    for (int city = 2; city <= n; ++city) {
      if (visited[static_cast<size_t>(city)]) continue;
      const double d = inst.distance(current, city);
      if (d < best) {
        best = d;
        tied.clear();
        tied.push_back(city);
      } else if (d == best) {
        tied.push_back(city);
      }
    }
    const int next = tied.size() == 1
                         ? tied[0]
                         : tied[static_cast<size_t>(rng.below(tied.size()))];
    tour.order.push_back(next);
    visited[static_cast<size_t>(next)] = true;
    current = next;
  }
  return tour;
}

Tour two_opt(const TtpInstance& inst, Tour tour, const Budget& budget) {
  const int n = static_cast<int>(tour.order.size());
  if (n < 4) return tour;

  auto dist = [&](int a, int b) {
    return inst.distance(tour.order[static_cast<size_t>(a)],
                         tour.order[static_cast<size_t>(b)]);
  };

  for (int pass = 0; pass < kTwoOptPassCap; ++pass) {
    bool improved = false;
    for (int i = 1; i < n - 1; ++i) {
      if (budget.time_exhausted()) return tour;
      for (int j = i + 1; j < n; ++j) {
        // replace edges (i-1, i) and (j, j+1) with (i-1, j) and (i, j+1)
        const int after_j = (j + 1) % n;
        const double delta = dist(i - 1, j) + dist(i, after_j) -
                             dist(i - 1, i) - dist(j, after_j);
        if (delta < -kImprovementEps) {
          std::reverse(tour.order.begin() + i, tour.order.begin() + j + 1);
          improved = true;
        }
      }
    }
    if (!improved) break;
  }
  return tour;
}

namespace {

// Remaining tour distance from each tour position to the end of the loop.
std::vector<double> remaining_distance(const TtpInstance& inst, const Tour& tour) {
  const int n = static_cast<int>(tour.order.size());
  std::vector<double> rem(static_cast<size_t>(n) + 1, 0.0);
  for (int i = n - 1; i >= 0; --i) {
    rem[static_cast<size_t>(i)] =
        rem[static_cast<size_t>(i) + 1] +
        inst.distance(tour.order[static_cast<size_t>(i)],
                      tour.order[static_cast<size_t>((i + 1) % n)]);
  }
  return rem;
}

std::vector<int> positions(const TtpInstance& inst, const Tour& tour) {
  std::vector<int> pos(static_cast<size_t>(inst.dimension) + 1, -1);
  for (int i = 0; i < static_cast<int>(tour.order.size()); ++i) {
    pos[static_cast<size_t>(tour.order[static_cast<size_t>(i)])] = i;
  }
  return pos;
}

}  // namespace

PackingPlan sh_pack(const TtpInstance& inst, const Tour& tour) {
  const auto rem = remaining_distance(inst, tour);
  const auto pos = positions(inst, tour);
  const double nu = inst.nu();
  const int m = inst.num_items();

  // score = profit - renting cost of carrying only this item to the end
  std::vector<std::pair<double, int>> scored(static_cast<size_t>(m));
  for (int k = 0; k < m; ++k) {
    const Item& it = inst.items[static_cast<size_t>(k)];
    const double d = rem[static_cast<size_t>(pos[static_cast<size_t>(it.city)])];
    const double slow = 1.0 / (inst.max_speed - nu * it.weight) - 1.0 / inst.max_speed;
    scored[static_cast<size_t>(k)] = {it.profit - inst.renting_rate * d * slow, k};
  }
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });

  PackingEval eval(inst, tour);
  for (const auto& [score, k] : scored) {
    if (!eval.flip_feasible(k)) continue;
    if (eval.z_if_flipped(k) >= eval.z()) eval.flip(k);
  }
  return eval.plan();
}

namespace {

// Greedy fill in descending score order, keeping the best prefix seen.
// Returns the best Z; writes the accepted-flip count achieving it.
double sweep_alpha(const TtpInstance& inst, const Tour& tour,
                   const std::vector<int>& order, int* best_accepts) {
  PackingEval eval(inst, tour);
  double best_z = eval.z();
  int accepts = 0;
  *best_accepts = 0;
  for (int k : order) {
    if (!eval.flip_feasible(k)) continue;
    eval.flip(k);
    ++accepts;
    if (eval.z() > best_z) {
      best_z = eval.z();
      *best_accepts = accepts;
    }
  }
  return best_z;
}

std::vector<int> score_order(const TtpInstance& inst, const std::vector<double>& item_dist,
                             double alpha) {
  const int m = inst.num_items();
  std::vector<std::pair<double, int>> scored(static_cast<size_t>(m));
  for (int k = 0; k < m; ++k) {
    const Item& it = inst.items[static_cast<size_t>(k)];
    const double d = std::max(item_dist[static_cast<size_t>(k)], 1e-12);
    scored[static_cast<size_t>(k)] = {
        std::pow(it.profit, alpha) / (std::pow(it.weight, alpha) * d), k};
  }
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  std::vector<int> order(static_cast<size_t>(m));
  for (int k = 0; k < m; ++k) order[static_cast<size_t>(k)] = scored[static_cast<size_t>(k)].second;
  return order;
}

PackingPlan rebuild_plan(const TtpInstance& inst, const Tour& tour,
                         const std::vector<int>& order, int accepts) {
  PackingEval eval(inst, tour);
  int done = 0;
  for (int k : order) {
    if (done == accepts) break;
    if (!eval.flip_feasible(k)) continue;
    eval.flip(k);
    ++done;
  }
  return eval.plan();
}

}  // namespace

PackingPlan pack_iterative(const TtpInstance& inst, const Tour& tour) {
  const auto rem = remaining_distance(inst, tour);
  const auto pos = positions(inst, tour);
  const int m = inst.num_items();
  std::vector<double> item_dist(static_cast<size_t>(m));
  for (int k = 0; k < m; ++k) {
    item_dist[static_cast<size_t>(k)] =
        rem[static_cast<size_t>(pos[static_cast<size_t>(inst.items[static_cast<size_t>(k)].city)])];
  }

  constexpr int kGridPoints = 21;
  const double lo = std::log(0.1), hi = std::log(10.0);
  double best_z = -std::numeric_limits<double>::infinity();
  double best_alpha = 1.0;
  int best_accepts = 0;
  int best_grid = 0;

  std::vector<double> alphas(kGridPoints);
  for (int g = 0; g < kGridPoints; ++g) {
    alphas[static_cast<size_t>(g)] =
        std::exp(lo + (hi - lo) * g / (kGridPoints - 1));
  }
  for (int g = 0; g < kGridPoints; ++g) {
    const double alpha = alphas[static_cast<size_t>(g)];
    auto order = score_order(inst, item_dist, alpha);
    int accepts = 0;
    const double z = sweep_alpha(inst, tour, order, &accepts);
    if (z > best_z) {
      best_z = z;
      best_alpha = alpha;
      best_accepts = accepts;
      best_grid = g;
    }
  }

  // golden-section refinement within the bracket around the best grid point
  {
    double a = alphas[static_cast<size_t>(std::max(0, best_grid - 1))];
    double b = alphas[static_cast<size_t>(std::min(kGridPoints - 1, best_grid + 1))];
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - phi * (b - a);
    double x2 = a + phi * (b - a);
    auto probe = [&](double alpha, double* z_out, int* acc_out) {
      auto order = score_order(inst, item_dist, alpha);
      *z_out = sweep_alpha(inst, tour, order, acc_out);
    };
    double z1, z2;
    int acc1, acc2;
    probe(x1, &z1, &acc1);
    probe(x2, &z2, &acc2);
    for (int step = 0; step < 8; ++step) {
      if (z1 >= z2) {
        b = x2;
        x2 = x1;
        z2 = z1;
        acc2 = acc1;
        x1 = b - phi * (b - a);
        probe(x1, &z1, &acc1);
      } else {
        a = x1;
        x1 = x2;
        z1 = z2;
        acc1 = acc2;
        x2 = a + phi * (b - a);
        probe(x2, &z2, &acc2);
      }
      if (std::max(z1, z2) > best_z) {
        best_z = std::max(z1, z2);
        best_alpha = z1 >= z2 ? x1 : x2;
        best_accepts = z1 >= z2 ? acc1 : acc2;
      }
    }
  }

  auto order = score_order(inst, item_dist, best_alpha);
  return rebuild_plan(inst, tour, order, best_accepts);
}

Solution rls(const TtpInstance& inst, Solution start, const Budget& budget,
             uint64_t seed, Trace* trace, uint64_t* iters_out) {
  const int m = inst.num_items();
  if (m == 0) return start;
  Rng rng(mix64(seed ^ 0x524c53ULL));
  PackingEval eval(inst, start.tour, start.plan);
  const auto t0 = std::chrono::steady_clock::now();
  trace_point(trace, budget, t0, 0, eval.z());

  uint64_t iter = 0;
  while (!budget.exhausted(iter)) {
    ++iter;
    const int k = static_cast<int>(rng.below(static_cast<uint64_t>(m)));
    if (!eval.flip_feasible(k)) continue;
    const double z_new = eval.z_if_flipped(k);
    if (z_new >= eval.z()) {
      const bool improved = z_new > eval.z();
      eval.flip(k);
      if (improved) trace_point(trace, budget, t0, iter, eval.z());
    }
  }
  if (iters_out) *iters_out = iter;
  return make_solution(inst, start.tour, eval.plan());
}

Solution one_plus_one_ea(const TtpInstance& inst, Solution start, const Budget& budget,
                         uint64_t seed, Trace* trace, uint64_t* iters_out) {
  const int m = inst.num_items();
  if (m == 0) return start;
  Rng rng(mix64(seed ^ 0x4541ULL));
  PackingEval eval(inst, start.tour, start.plan);
  const auto t0 = std::chrono::steady_clock::now();
  trace_point(trace, budget, t0, 0, eval.z());

  const double p_flip = 1.0 / m;
  std::vector<int> flipped;
  uint64_t iter = 0;
  while (!budget.exhausted(iter)) {
    ++iter;
    flipped.clear();
    for (int k = 0; k < m; ++k) {
      if (rng.next_double() < p_flip) flipped.push_back(k);
    }
    if (flipped.empty()) {
      flipped.push_back(static_cast<int>(rng.below(static_cast<uint64_t>(m))));
    }
    const double z_before = eval.z();
    bool feasible = true;
    size_t applied = 0;
    for (int k : flipped) {
      if (!eval.picked(k) && !eval.flip_feasible(k)) {
        feasible = false;
        break;
      }
      eval.flip(k);
      ++applied;
    }
    if (!feasible || eval.z() < z_before) {
      for (size_t i = applied; i > 0; --i) eval.flip(flipped[i - 1]);  // revert
    } else if (eval.z() > z_before) {
      trace_point(trace, budget, t0, iter, eval.z());
    }
  }
  if (iters_out) *iters_out = iter;
  return make_solution(inst, start.tour, eval.plan());
}

Solution bitflip(const TtpInstance& inst, Solution start, const Budget& budget,
                 Trace* trace, uint64_t* iters_out) {
  const int m = inst.num_items();
  PackingEval eval(inst, start.tour, start.plan);
  const auto t0 = std::chrono::steady_clock::now();
  trace_point(trace, budget, t0, 0, eval.z());

  uint64_t iter = 0;
  bool improved = true;
  while (improved && !budget.exhausted(iter)) {
    improved = false;
    for (int k = 0; k < m && !budget.exhausted(iter); ++k) {
      ++iter;
      if (!eval.flip_feasible(k)) continue;
      if (eval.z_if_flipped(k) > eval.z() + kImprovementEps) {
        eval.flip(k);
        improved = true;
        trace_point(trace, budget, t0, iter, eval.z());
      }
    }
  }
  if (iters_out) *iters_out = iter;
  return make_solution(inst, start.tour, eval.plan());
}

// The iteration budget counts candidate relocations examined, so a fixed
// cap stretches much further on small tours than on large ones.
Solution insertion_counted(const TtpInstance& inst, Solution sol, const Budget& budget,
                           uint64_t* evals, Trace* trace,
                           std::chrono::steady_clock::time_point t0) {
  const int n = inst.dimension;
  double best_z = sol.objective;
  trace_point(trace, budget, t0, *evals, best_z);

  if (n >= 3) {
    bool improved = true;
    while (improved && !budget.exhausted(*evals)) {
      improved = false;
      for (int i = 1; i < n && !budget.exhausted(*evals); ++i) {  // city 1 stays first
        Tour candidate = sol.tour;
        const int city = candidate.order[static_cast<size_t>(i)];
        candidate.order.erase(candidate.order.begin() + i);
        for (int j = 1; j < n; ++j) {
          if (j == i) continue;
          if (budget.exhausted(*evals)) break;
          ++*evals;
          candidate.order.insert(candidate.order.begin() + j, city);
          const double z = objective(inst, candidate, sol.plan);
          if (z > best_z + kImprovementEps) {
            best_z = z;
            sol = make_solution(inst, candidate, sol.plan);
            improved = true;
            trace_point(trace, budget, t0, *evals, best_z);
            break;
          }
          candidate.order.erase(candidate.order.begin() + j);
        }
        if (improved) break;  // restart scan from the updated tour
      }
    }
  }
  return sol;
}

Solution insertion(const TtpInstance& inst, Solution sol, const Budget& budget,
                   Trace* trace, uint64_t* iters_out) {
  uint64_t evals = 0;
  sol = insertion_counted(inst, std::move(sol), budget, &evals, trace,
                          std::chrono::steady_clock::now());
  if (iters_out) *iters_out = evals;
  return sol;
}

Solution s5(const TtpInstance& inst, const Budget& budget, uint64_t seed,
            Trace* trace, uint64_t* iters_out) {
  if (budget.iteration_cap() == 0 || budget.time_exhausted()) {
    throw Error("s5: budget too small to complete one restart");
  }
  const auto t0 = std::chrono::steady_clock::now();
  std::optional<Solution> best;
  uint64_t restarts = 0;
  while (true) {
    const uint64_t restart_seed = mix64(seed + 0x5355ULL * (restarts + 1));
    Tour tour = two_opt(inst, nearest_neighbor_tour(inst, restart_seed), budget);
    PackingPlan plan = pack_iterative(inst, tour);
    Solution sol = make_solution(inst, std::move(tour), std::move(plan));
    ++restarts;
    if (!best || sol.objective > best->objective) {
      best = std::move(sol);
      trace_point(trace, budget, t0, restarts, best->objective);
    }
    if (budget.exhausted(restarts)) break;
  }
  if (iters_out) *iters_out = restarts;
  return *best;
}

const std::vector<std::string>& registered_solvers() {
  static const std::vector<std::string> names = {"SH",      "RLS", "EA", "BITFLIP",
                                                 "PI",      "S5",  "INS"};
  return names;
}

namespace {

Budget budget_from_spec(const SolverSpec& spec) {
  auto it = spec.params.find("iters");
  if (it != spec.params.end()) {
    return Budget::iterations(static_cast<uint64_t>(it->second));
  }
  return Budget::wall_ms(spec.budget_ms);
}

// Alternates relocation passes with repacking; the budget is a shared
// relocation-evaluation allowance across rounds.
Solution ins_pi_composite(const TtpInstance& inst, const Budget& budget,
                          uint64_t seed, Trace* trace, uint64_t* iters_out) {
  Tour tour = two_opt(inst, nearest_neighbor_tour(inst, seed), budget);
  Solution best = make_solution(inst, tour, pack_iterative(inst, tour));
  const auto t0 = std::chrono::steady_clock::now();
  trace_point(trace, budget, t0, 0, best.objective);

  uint64_t evals = 0;
  while (!budget.exhausted(evals)) {
    Solution moved = insertion_counted(inst, best, budget, &evals, nullptr, t0);
    PackingPlan repacked = pack_iterative(inst, moved.tour);
    Solution candidate = make_solution(inst, moved.tour, repacked);
    if (candidate.objective < moved.objective) candidate = std::move(moved);
    if (candidate.objective <= best.objective + kImprovementEps) break;
    best = std::move(candidate);
    trace_point(trace, budget, t0, evals, best.objective);
  }
  if (iters_out) *iters_out = evals;
  return best;
}

}  // namespace

SolverResult run_solver(const SolverSpec& spec, const TtpInstance& inst) {
  const auto& names = registered_solvers();
  if (std::find(names.begin(), names.end(), spec.name) == names.end()) {
    throw UnknownSolver("unknown solver: " + spec.name);
  }

  SolverResult result;
  const auto t0 = std::chrono::steady_clock::now();
  const Budget budget = budget_from_spec(spec);

  try {
    if (spec.name == "SH") {
      Tour tour = two_opt(inst, nearest_neighbor_tour(inst, spec.seed), budget);
      result.solution = make_solution(inst, tour, sh_pack(inst, tour));
      result.iterations = 1;
    } else if (spec.name == "PI") {
      Tour tour = two_opt(inst, nearest_neighbor_tour(inst, spec.seed), budget);
      result.solution = make_solution(inst, tour, pack_iterative(inst, tour));
      result.iterations = 1;
    } else if (spec.name == "RLS" || spec.name == "EA" || spec.name == "BITFLIP") {
      Tour tour = two_opt(inst, nearest_neighbor_tour(inst, spec.seed), budget);
      Solution start = make_solution(inst, std::move(tour), empty_plan(inst));
      if (spec.name == "RLS") {
        result.solution = rls(inst, std::move(start), budget, spec.seed,
                              &result.trajectory, &result.iterations);
      } else if (spec.name == "EA") {
        result.solution = one_plus_one_ea(inst, std::move(start), budget, spec.seed,
                                          &result.trajectory, &result.iterations);
      } else {
        result.solution = bitflip(inst, std::move(start), budget,
                                  &result.trajectory, &result.iterations);
      }
    } else if (spec.name == "S5") {
      result.solution =
          s5(inst, budget, spec.seed, &result.trajectory, &result.iterations);
    } else if (spec.name == "INS") {
      result.solution = ins_pi_composite(inst, budget, spec.seed,
                                         &result.trajectory, &result.iterations);
    }
  } catch (const std::exception& e) {
    result.solution.reset();
    result.failure_reason = e.what();
  }

  result.elapsed_ms = elapsed_ms_since(t0);
  return result;
}

}  // namespace ttp
