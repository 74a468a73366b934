#include <doctest.h>

#include <cmath>

#include "support.hpp"
#include "ttp/evaluation.hpp"
#include "ttp/rng.hpp"
#include "ttp/solvers.hpp"

using namespace ttp;
using namespace ttp_test;

namespace {

GeneratedInstance random_instance(uint64_t seed, int n = 10, int factor = 3,
                                  KpType type = KpType::BoundedStronglyCorrelated) {
  GeneratorParams p;
  p.n_cities = n;
  p.item_factor = factor;
  p.kp_type = type;
  p.capacity_class = 4;
  p.coord_range = 50.0;
  p.seed = seed;
  return generate_instance(p);
}

PackingPlan random_feasible_plan(const TtpInstance& inst, uint64_t seed) {
  Rng rng(seed);
  PackingPlan plan = empty_plan(inst);
  double weight = 0;
  for (size_t k = 0; k < inst.items.size(); ++k) {
    if (rng.below(2) && weight + inst.items[k].weight <= inst.capacity) {
      plan.picked[k] = 1;
      weight += inst.items[k].weight;
    }
  }
  return plan;
}

Tour random_tour(const TtpInstance& inst, uint64_t seed) {
  Tour tour;
  tour.order.resize(static_cast<size_t>(inst.dimension));
  std::iota(tour.order.begin(), tour.order.end(), 1);
  Rng rng(seed);
  for (size_t i = tour.order.size() - 1; i >= 2; --i) {
    std::swap(tour.order[i], tour.order[1 + rng.below(i)]);
  }
  return tour;
}

}  // namespace

TEST_CASE("worked example scores exactly 50") {
  const TtpInstance inst = worked_example_instance();
  CHECK(inst.distance(1, 2) == 5.0);
  CHECK(inst.distance(2, 4) == 5.0);
  CHECK(inst.distance(4, 3) == 5.0);
  CHECK(inst.distance(3, 1) == 6.0);

  const double z = objective(inst, worked_example_tour(), worked_example_plan());
  CHECK(z == 50.0);
  CHECK(travel_time(inst, worked_example_tour(), worked_example_plan()) ==
        doctest::Approx(30.0).epsilon(1e-12));
}

TEST_CASE("empty plan reduces to -R * tour length / max speed") {
  const TtpInstance inst = worked_example_instance();
  const Tour tour = worked_example_tour();
  const double len = 5 + 5 + 5 + 6;
  CHECK(objective(inst, tour, empty_plan(inst)) ==
        doctest::Approx(-inst.renting_rate * len / inst.max_speed).epsilon(1e-12));
}

TEST_CASE("square tour with unit speed travels its perimeter") {
  TtpInstance inst = worked_example_instance();
  inst.coords = {{0, 0}, {1, 0}, {0, 1}, {1, 1}};
  inst.edge_weight_kind = EdgeWeightKind::Euclidean2D;
  const Tour tour{{1, 2, 4, 3}};
  CHECK(travel_time(inst, tour, empty_plan(inst)) == doctest::Approx(4.0));
}

TEST_CASE("zero renting rate reduces to the profit sum") {
  TtpInstance inst = worked_example_instance();
  inst.renting_rate = 0.0;
  PackingPlan plan = worked_example_plan();
  CHECK(objective(inst, worked_example_tour(), plan) == doctest::Approx(80.0).epsilon(1e-12));
}

TEST_CASE("objective identity: Z + R * time = profit") {
  for (uint64_t seed = 1; seed <= 20; ++seed) {
    const TtpInstance inst = random_instance(seed).instance;
    const Tour tour = random_tour(inst, seed * 31);
    const PackingPlan plan = random_feasible_plan(inst, seed * 17);
    const double z = objective(inst, tour, plan);
    const double t = travel_time(inst, tour, plan);
    const double profit = plan.total_profit(inst);
    CHECK(z + inst.renting_rate * t ==
          doctest::Approx(profit).epsilon(1e-9));
  }
}

TEST_CASE("validate reports the spec's example violations") {
  const TtpInstance inst = worked_example_instance();
  CHECK(validate(inst, worked_example_tour(), worked_example_plan()).empty());

  const Tour bad{{1, 2, 2, 3}};
  const auto violations = validate(inst, bad, worked_example_plan());
  bool duplicate2 = false, missing4 = false;
  for (const auto& v : violations) {
    if (v.kind == Violation::Kind::DuplicateCity && v.index == 2) duplicate2 = true;
    if (v.kind == Violation::Kind::MissingCity && v.index == 4) missing4 = true;
  }
  CHECK(duplicate2);
  CHECK(missing4);

  PackingPlan heavy = empty_plan(inst);
  heavy.picked = {1, 1, 1, 0, 0, 0};  // weight 8 > capacity 3
  const auto over = validate(inst, worked_example_tour(), heavy);
  REQUIRE(over.size() == 1);
  CHECK(over[0].kind == Violation::Kind::CapacityExceeded);
  CHECK(over[0].value == doctest::Approx(8.0));
}

TEST_CASE("objective throws on malformed input") {
  const TtpInstance inst = worked_example_instance();
  PackingPlan heavy = worked_example_plan();
  heavy.picked = {1, 1, 1, 1, 1, 1};
  CHECK_THROWS_AS(objective(inst, worked_example_tour(), heavy), CapacityExceeded);
  CHECK_THROWS_AS(objective(inst, Tour{{1, 2, 3}}, worked_example_plan()), InvalidTour);
  CHECK_THROWS_AS(objective(inst, Tour{{2, 1, 3, 4}}, worked_example_plan()), InvalidTour);
}

TEST_CASE("reversing a tour keeps length but changes the objective") {
  const TtpInstance inst = random_instance(5, 12, 3,
                                           KpType::BoundedStronglyCorrelated).instance;
  Tour tour = two_opt(inst, nearest_neighbor_tour(inst, 1), Budget::unlimited());
  const PackingPlan plan = sh_pack(inst, tour);
  REQUIRE(plan.total_weight(inst) > 0);

  Tour reversed;
  reversed.order.push_back(1);
  for (size_t i = tour.order.size() - 1; i >= 1; --i) {
    reversed.order.push_back(tour.order[i]);
  }
  CHECK(tour_length(inst, tour) == doctest::Approx(tour_length(inst, reversed)));
  CHECK(objective(inst, tour, plan) != objective(inst, reversed, plan));
}

TEST_CASE("scaling speeds and renting rate together preserves the objective") {
  // nu scales with the speeds, so travel time scales by 1/alpha and the
  // rent term is unchanged when R scales by alpha.
  for (double alpha : {0.5, 2.0, 7.0}) {
    const TtpInstance inst = random_instance(9, 7, 1).instance;
    TtpInstance scaled = inst;
    scaled.min_speed *= alpha;
    scaled.max_speed *= alpha;
    scaled.renting_rate *= alpha;
    for (uint64_t seed = 1; seed <= 10; ++seed) {
      const Tour tour = random_tour(inst, seed);
      const PackingPlan plan = random_feasible_plan(inst, seed * 3);
      CHECK(objective(scaled, tour, plan) ==
            doctest::Approx(objective(inst, tour, plan)).epsilon(1e-9));
    }
  }
}

TEST_CASE("fixed-tour brute force upper-bounds heuristic packings") {
  for (uint64_t seed = 1; seed <= 10; ++seed) {
    const TtpInstance inst = random_instance(seed, 6, 1).instance;  // m = 5
    const Tour tour = two_opt(inst, nearest_neighbor_tour(inst, seed), Budget::unlimited());
    const double best = ttp_test::brute_force_best_plan(inst, tour.order);
    CHECK(objective(inst, tour, sh_pack(inst, tour)) <= best + 1e-9);
    CHECK(objective(inst, tour, pack_iterative(inst, tour)) <= best + 1e-9);
  }
}

TEST_CASE("incremental evaluation matches full recomputation") {
  const TtpInstance inst = random_instance(3, 9, 3).instance;
  const Tour tour = random_tour(inst, 77);
  PackingEval eval(inst, tour);
  Rng rng(55);
  for (int step = 0; step < 500; ++step) {
    const int k = static_cast<int>(rng.below(inst.items.size()));
    if (!eval.flip_feasible(k)) continue;
    const double predicted = eval.z_if_flipped(k);
    eval.flip(k);
    CHECK(eval.z() == doctest::Approx(predicted).epsilon(1e-12));
    CHECK(eval.z() == doctest::Approx(eval.recompute_z()).epsilon(1e-9));
  }
}

TEST_CASE("make_solution caches the objective and the weight trace") {
  const TtpInstance inst = worked_example_instance();
  const Solution sol = make_solution(inst, worked_example_tour(), worked_example_plan());
  CHECK(sol.objective == 50.0);
  const std::vector<double> expected = {0, 0, 0, 2};  // weight when leaving 1,2,4,3
  REQUIRE(sol.weight_trace.size() == 4);
  for (size_t i = 0; i < 4; ++i) CHECK(sol.weight_trace[i] == doctest::Approx(expected[i]));
}

TEST_CASE("solution text round trip") {
  const TtpInstance inst = worked_example_instance();
  const Solution sol = make_solution(inst, worked_example_tour(), worked_example_plan());
  const std::string text = solution_to_text(sol);
  const Solution parsed = solution_from_text(inst, text);
  CHECK(parsed.tour.order == sol.tour.order);
  CHECK(parsed.plan.picked == sol.plan.picked);
  CHECK(parsed.objective == sol.objective);
  CHECK(solution_to_json(sol).find("50") != std::string::npos);
}
