#include <algorithm>
#include <cmath>

#include "ttp/evaluation.hpp"
#include "ttp/instance.hpp"
#include "ttp/io_util.hpp"
#include "ttp/rng.hpp"
#include "ttp/solvers.hpp"

namespace ttp {

namespace {

const char* kp_short_name(KpType t) {
  switch (t) {
    case KpType::Uncorrelated: return "unc";
    case KpType::UncorrelatedSimilarWeights: return "usw";
    case KpType::BoundedStronglyCorrelated: return "bsc";
  }
  return "unc";
}

Item sample_item(Rng& rng, KpType type, int id, int city) {
  double profit = 0, weight = 0;
  switch (type) {
    case KpType::Uncorrelated:
      profit = static_cast<double>(rng.uniform_int(1, 1000));
      weight = static_cast<double>(rng.uniform_int(1, 1000));
      break;
    case KpType::UncorrelatedSimilarWeights:
      profit = static_cast<double>(rng.uniform_int(1, 1000));
      weight = static_cast<double>(rng.uniform_int(1000, 1010));
      break;
    case KpType::BoundedStronglyCorrelated:
      weight = static_cast<double>(rng.uniform_int(1, 1000));
      profit = weight + 100.0;
      break;
  }
  return Item{id, city, profit, weight};
}

}  // namespace

GeneratedInstance generate_instance(const GeneratorParams& params) {
  if (params.n_cities < 2) throw InvalidParams("n_cities must be >= 2");
  if (params.item_factor != 1 && params.item_factor != 3 && params.item_factor != 5 &&
      params.item_factor != 10) {
    throw InvalidParams("item_factor must be one of 1, 3, 5, 10");
  }
  if (params.capacity_class < 1 || params.capacity_class > 10) {
    throw InvalidParams("capacity_class must be in [1, 10]");
  }
  if (!(params.coord_range > 0)) throw InvalidParams("coord_range must be positive");

  Rng rng(mix64(params.seed));
  TtpInstance inst;
  inst.dimension = params.n_cities;
  inst.edge_weight_kind = params.edge_weight_kind;
  inst.kp_type = params.kp_type;
  inst.min_speed = 0.1;
  inst.max_speed = 1.0;

  inst.coords.resize(static_cast<size_t>(params.n_cities));
  for (auto& p : inst.coords) {
    p.x = rng.uniform_real(0.0, params.coord_range);
    p.y = rng.uniform_real(0.0, params.coord_range);
  }

  // every city but the first holds exactly item_factor items
  int next_id = 1;
  for (int city = 2; city <= params.n_cities; ++city) {
    for (int k = 0; k < params.item_factor; ++k) {
      inst.items.push_back(sample_item(rng, params.kp_type, next_id++, city));
    }
  }

  inst.capacity =
      (static_cast<double>(params.capacity_class) / 11.0) * inst.total_item_weight();

  inst.name = "gen-n" + std::to_string(params.n_cities) + "-f" +
              std::to_string(params.item_factor) + "-" + kp_short_name(params.kp_type) +
              "-c" + (params.capacity_class < 10 ? "0" : "") +
              std::to_string(params.capacity_class) + "-s" + std::to_string(params.seed);

  // Renting rate: a greedy solution must score exactly zero. Build the
  // greedy tour and ratio packing, then R = profit / travel time.
  Tour tour = two_opt(inst, nearest_neighbor_tour(inst, params.seed), Budget::unlimited());

  std::vector<int> by_ratio(inst.items.size());
  for (size_t k = 0; k < inst.items.size(); ++k) by_ratio[k] = static_cast<int>(k);
  std::sort(by_ratio.begin(), by_ratio.end(), [&](int a, int b) {
    const Item& ia = inst.items[static_cast<size_t>(a)];
    const Item& ib = inst.items[static_cast<size_t>(b)];
    const double ra = ia.profit / ia.weight;
    const double rb = ib.profit / ib.weight;
    if (ra != rb) return ra > rb;
    return a < b;
  });
  PackingPlan plan = empty_plan(inst);
  double packed_weight = 0;
  double packed_profit = 0;
  for (int k : by_ratio) {
    const Item& it = inst.items[static_cast<size_t>(k)];
    if (packed_weight + it.weight <= inst.capacity) {
      plan.picked[static_cast<size_t>(k)] = 1;
      packed_weight += it.weight;
      packed_profit += it.profit;
    }
  }

  inst.renting_rate = 0;
  const double time = travel_time(inst, tour, plan);
  inst.renting_rate = packed_profit > 0 ? packed_profit / time : 0.0;

  inst.check_invariants();

  GeneratedInstance out;
  out.instance = std::move(inst);
  out.reference_tour = tour.order;
  out.reference_plan = plan.picked;
  return out;
}

}  // namespace ttp
