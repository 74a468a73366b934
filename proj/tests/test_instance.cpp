#include <doctest.h>

#include <cmath>
#include <sstream>

#include "support.hpp"
#include "ttp/instance.hpp"
#include "ttp/rng.hpp"

using namespace ttp;
using namespace ttp_test;

namespace {

const char* kExampleFile =
    "PROBLEM NAME: example-4city\n"
    "KNAPSACK DATA TYPE: uncorrelated\n"
    "DIMENSION: 4\n"
    "NUMBER OF ITEMS: 6\n"
    "CAPACITY OF KNAPSACK: 3\n"
    "MIN SPEED: 0.1\n"
    "MAX SPEED: 1.0\n"
    "RENTING RATIO: 1.0\n"
    "EDGE_WEIGHT_TYPE: CEIL_2D\n"
    "NODE_COORD_SECTION\t(INDEX, X, Y):\n"
    "1 0 0\n"
    "2 4.5 0\n"
    "3 0.1 5.5\n"
    "4 4.5 4.5\n"
    "ITEMS SECTION\t(INDEX, PROFIT, WEIGHT, ASSIGNED NODE NUMBER):\n"
    "1 20 2 2\n"
    "2 30 3 2\n"
    "3 100 3 3\n"
    "4 40 1 3\n"
    "5 40 1 3\n"
    "6 20 2 4\n";

GeneratorParams demo_params(uint64_t seed) {
  GeneratorParams p;
  p.n_cities = 12;
  p.item_factor = 3;
  p.kp_type = KpType::BoundedStronglyCorrelated;
  p.capacity_class = 5;
  p.coord_range = 100.0;
  p.seed = seed;
  return p;
}

}  // namespace

TEST_CASE("parse reads the 4-city example file") {
  const TtpInstance inst = parse_instance_text(kExampleFile);
  CHECK(inst.dimension == 4);
  CHECK(inst.num_items() == 6);
  CHECK(inst.capacity == 3.0);
  CHECK(inst.renting_rate == 1.0);
  CHECK(inst.min_speed == 0.1);
  CHECK(inst.max_speed == 1.0);
  CHECK(inst.kp_type == KpType::Uncorrelated);
  CHECK(inst.items[2].profit == 100.0);
  CHECK(inst.items[2].city == 3);
}

TEST_CASE("parse rejects a zero-item file via the capacity invariant") {
  const std::string text =
      "PROBLEM NAME: degenerate\n"
      "DIMENSION: 2\n"
      "NUMBER OF ITEMS: 0\n"
      "CAPACITY OF KNAPSACK: 3\n"
      "MIN SPEED: 0.1\n"
      "MAX SPEED: 1.0\n"
      "RENTING RATIO: 1.0\n"
      "NODE_COORD_SECTION:\n"
      "1 0 0\n"
      "2 1 1\n"
      "ITEMS SECTION:\n";
  CHECK_THROWS_AS(parse_instance_text(text), InvariantViolation);
}

TEST_CASE("parse reports missing headers by key") {
  const std::string text =
      "DIMENSION: 2\n"
      "NUMBER OF ITEMS: 1\n"
      "MIN SPEED: 0.1\n"
      "MAX SPEED: 1.0\n"
      "RENTING RATIO: 1.0\n"
      "NODE_COORD_SECTION:\n"
      "1 0 0\n"
      "2 1 1\n"
      "ITEMS SECTION:\n"
      "1 5 5 2\n";
  try {
    parse_instance_text(text);
    FAIL("expected MissingHeader");
  } catch (const MissingHeader& e) {
    CHECK(e.key == "CAPACITY OF KNAPSACK");
  }
}

TEST_CASE("parse reports malformed rows with the line number") {
  std::string text(kExampleFile);
  const auto at = text.find("3 0.1 5.5");
  text.replace(at, 9, "3 bad 5.5");
  try {
    parse_instance_text(text);
    FAIL("expected MalformedLine");
  } catch (const MalformedLine& e) {
    CHECK(e.lineno == 13);
  }
}

TEST_CASE("distance follows the declared edge weight kind") {
  TtpInstance inst = worked_example_instance();
  inst.coords = {{0, 0}, {3, 4}, {1, 1}, {10, 10}};

  inst.edge_weight_kind = EdgeWeightKind::Euclidean2D;
  CHECK(inst.distance(1, 2) == doctest::Approx(5.0));

  inst.edge_weight_kind = EdgeWeightKind::CeilEuclidean2D;
  CHECK(inst.distance(1, 3) == 2.0);  // ceil(sqrt(2))

  for (int i = 1; i <= 4; ++i) CHECK(inst.distance(i, i) == 0.0);
  CHECK_THROWS_AS(inst.distance(0, 1), IndexOutOfRange);
  CHECK_THROWS_AS(inst.distance(1, 5), IndexOutOfRange);
}

TEST_CASE("distance is symmetric and satisfies the triangle inequality") {
  GeneratedInstance gen = generate_instance(demo_params(7));
  TtpInstance inst = gen.instance;
  inst.edge_weight_kind = EdgeWeightKind::Euclidean2D;
  Rng rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    const int a = static_cast<int>(rng.uniform_int(1, inst.dimension));
    const int b = static_cast<int>(rng.uniform_int(1, inst.dimension));
    const int c = static_cast<int>(rng.uniform_int(1, inst.dimension));
    CHECK(inst.distance(a, b) == inst.distance(b, a));
    CHECK(inst.distance(a, c) <= inst.distance(a, b) + inst.distance(b, c) + 1e-9);
  }
}

TEST_CASE("write/parse round trip is exact for generated instances") {
  Rng rng(1234);
  for (int trial = 0; trial < 100; ++trial) {
    GeneratorParams p;
    p.n_cities = 3 + static_cast<int>(rng.below(12));
    const int factors[] = {1, 3, 5, 10};
    p.item_factor = factors[rng.below(4)];
    p.kp_type = static_cast<KpType>(rng.below(3));
    p.capacity_class = 1 + static_cast<int>(rng.below(10));
    p.coord_range = rng.uniform_real(1.0, 10000.0);
    p.seed = rng.next_u64();
    p.edge_weight_kind =
        rng.below(2) ? EdgeWeightKind::Euclidean2D : EdgeWeightKind::CeilEuclidean2D;

    const TtpInstance inst = generate_instance(p).instance;
    const std::string text = write_instance_text(inst);
    const TtpInstance reparsed = parse_instance_text(text);

    CHECK(reparsed.dimension == inst.dimension);
    CHECK(reparsed.capacity == inst.capacity);          // bit-exact
    CHECK(reparsed.renting_rate == inst.renting_rate);  // bit-exact
    CHECK(reparsed.min_speed == inst.min_speed);
    CHECK(reparsed.max_speed == inst.max_speed);
    CHECK(reparsed.kp_type == inst.kp_type);
    CHECK(reparsed.edge_weight_kind == inst.edge_weight_kind);
    REQUIRE(reparsed.items.size() == inst.items.size());
    for (size_t k = 0; k < inst.items.size(); ++k) {
      CHECK(reparsed.items[k].profit == inst.items[k].profit);
      CHECK(reparsed.items[k].weight == inst.items[k].weight);
      CHECK(reparsed.items[k].city == inst.items[k].city);
    }
    for (int c = 0; c < inst.dimension; ++c) {
      CHECK(reparsed.coords[static_cast<size_t>(c)].x == inst.coords[static_cast<size_t>(c)].x);
      CHECK(reparsed.coords[static_cast<size_t>(c)].y == inst.coords[static_cast<size_t>(c)].y);
    }
    // fixpoint: a second write emits identical bytes
    CHECK(write_instance_text(reparsed) == text);
  }
}

TEST_CASE("worked example instance writes a 4-city, 6-item file") {
  const std::string text = write_instance_text(worked_example_instance());
  CHECK(text.find("DIMENSION: 4") != std::string::npos);
  CHECK(text.find("NUMBER OF ITEMS: 6") != std::string::npos);
  const TtpInstance reparsed = parse_instance_text(text);
  CHECK(reparsed.dimension == 4);
  CHECK(reparsed.num_items() == 6);
}

TEST_CASE("generator: n=51, F=1 yields 50 items, one per non-first city") {
  GeneratorParams p;
  p.n_cities = 51;
  p.item_factor = 1;
  p.seed = 3;
  const TtpInstance inst = generate_instance(p).instance;
  CHECK(inst.num_items() == 50);
  std::vector<int> per_city(52, 0);
  for (const Item& it : inst.items) {
    CHECK(it.city >= 2);
    ++per_city[static_cast<size_t>(it.city)];
  }
  CHECK(per_city[1] == 0);
  for (int c = 2; c <= 51; ++c) CHECK(per_city[static_cast<size_t>(c)] == 1);
}

TEST_CASE("generator is deterministic given the seed") {
  const auto a = generate_instance(demo_params(42));
  const auto b = generate_instance(demo_params(42));
  CHECK(write_instance_text(a.instance) == write_instance_text(b.instance));
  CHECK(a.reference_tour == b.reference_tour);
  CHECK(a.reference_plan == b.reference_plan);
}

TEST_CASE("generator reference solution scores zero") {
  for (uint64_t seed : {1ULL, 2ULL, 3ULL, 4ULL, 5ULL}) {
    const GeneratedInstance gen = generate_instance(demo_params(seed));
    Tour tour{gen.reference_tour};
    PackingPlan plan{gen.reference_plan};
    CHECK(validate(gen.instance, tour, plan).empty());
    CHECK(std::abs(objective(gen.instance, tour, plan)) < 1e-6);
  }
}

TEST_CASE("generator capacity classes are monotone") {
  double previous = 0;
  for (int c = 1; c <= 10; ++c) {
    GeneratorParams p = demo_params(11);
    p.capacity_class = c;
    const TtpInstance inst = generate_instance(p).instance;
    CHECK(inst.capacity > previous);
    previous = inst.capacity;
  }
}

TEST_CASE("generator rejects invalid parameters") {
  GeneratorParams p = demo_params(1);
  p.item_factor = 2;
  CHECK_THROWS_AS(generate_instance(p), InvalidParams);
  p = demo_params(1);
  p.capacity_class = 11;
  CHECK_THROWS_AS(generate_instance(p), InvalidParams);
  p = demo_params(1);
  p.n_cities = 1;
  CHECK_THROWS_AS(generate_instance(p), InvalidParams);
}

TEST_CASE("instance invariants catch bad field combinations") {
  TtpInstance inst = worked_example_instance();
  inst.min_speed = 1.0;  // equals max speed
  CHECK_THROWS_AS(inst.check_invariants(), InvariantViolation);

  inst = worked_example_instance();
  inst.capacity = 100.0;  // above total item weight 12
  CHECK_THROWS_AS(inst.check_invariants(), InvariantViolation);

  inst = worked_example_instance();
  inst.items[0].city = 1;  // first city holds no items
  CHECK_THROWS_AS(inst.check_invariants(), InvariantViolation);
}
