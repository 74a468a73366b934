#include "ttp/evaluation.hpp"

#include <cmath>
#include <sstream>

#include <json.hpp>

#include "ttp/io_util.hpp"

namespace ttp {

double PackingPlan::total_weight(const TtpInstance& inst) const {
  double total = 0;
  for (size_t k = 0; k < picked.size(); ++k) {
    if (picked[k]) total += inst.items[k].weight;
  }
  return total;
}

double PackingPlan::total_profit(const TtpInstance& inst) const {
  double total = 0;
  for (size_t k = 0; k < picked.size(); ++k) {
    if (picked[k]) total += inst.items[k].profit;
  }
  return total;
}

std::vector<int> PackingPlan::picked_ids() const {
  std::vector<int> ids;
  for (size_t k = 0; k < picked.size(); ++k) {
    if (picked[k]) ids.push_back(static_cast<int>(k) + 1);
  }
  return ids;
}

PackingPlan empty_plan(const TtpInstance& inst) {
  PackingPlan plan;
  plan.picked.assign(inst.items.size(), 0);
  return plan;
}

std::string Violation::describe() const {
  switch (kind) {
    case Kind::WrongTourLength:
      return "tour has " + std::to_string(index) + " cities";
    case Kind::TourStart:
      return "tour must start at city 1, starts at " + std::to_string(index);
    case Kind::CityOutOfRange:
      return "city index out of range: " + std::to_string(index);
    case Kind::DuplicateCity:
      return "duplicate city " + std::to_string(index);
    case Kind::MissingCity:
      return "missing city " + std::to_string(index);
    case Kind::PlanSize:
      return "packing plan has " + std::to_string(index) + " bits";
    case Kind::CapacityExceeded:
      return "total weight " + format_number(value) + " exceeds capacity " +
             format_number(limit);
  }
  return "unknown violation";
}

std::vector<Violation> validate(const TtpInstance& inst, const Tour& tour,
                                const PackingPlan& plan) {
  std::vector<Violation> out;
  const int n = inst.dimension;

  if (static_cast<int>(tour.order.size()) != n) {
    out.push_back({Violation::Kind::WrongTourLength,
                   static_cast<int>(tour.order.size()), 0, 0});
  }
  if (!tour.order.empty() && tour.order[0] != 1) {
    out.push_back({Violation::Kind::TourStart, tour.order[0], 0, 0});
  }
  std::vector<int> count(static_cast<size_t>(n) + 1, 0);
  for (int city : tour.order) {
    if (city < 1 || city > n) {
      out.push_back({Violation::Kind::CityOutOfRange, city, 0, 0});
    } else {
      ++count[static_cast<size_t>(city)];
    }
  }
  for (int city = 1; city <= n; ++city) {
    if (count[static_cast<size_t>(city)] > 1) {
      out.push_back({Violation::Kind::DuplicateCity, city, 0, 0});
    } else if (count[static_cast<size_t>(city)] == 0) {
      out.push_back({Violation::Kind::MissingCity, city, 0, 0});
    }
  }

  if (plan.picked.size() != inst.items.size()) {
    out.push_back({Violation::Kind::PlanSize,
                   static_cast<int>(plan.picked.size()), 0, 0});
  } else {
    double w = plan.total_weight(inst);
    if (w > inst.capacity) {
      out.push_back({Violation::Kind::CapacityExceeded, 0, w, inst.capacity});
    }
  }
  return out;
}

namespace {

void require_valid_tour(const TtpInstance& inst, const Tour& tour) {
  const int n = inst.dimension;
  if (static_cast<int>(tour.order.size()) != n || tour.order[0] != 1) {
    throw InvalidTour("tour must be a permutation of all cities starting at city 1");
  }
  std::vector<bool> seen(static_cast<size_t>(n) + 1, false);
  for (int city : tour.order) {
    if (city < 1 || city > n || seen[static_cast<size_t>(city)]) {
      throw InvalidTour("tour is not a permutation");
    }
    seen[static_cast<size_t>(city)] = true;
  }
}

struct EvalTerms {
  double profit;
  double time;
};

EvalTerms evaluate_terms(const TtpInstance& inst, const Tour& tour,
                         const PackingPlan& plan) {
  require_valid_tour(inst, tour);
  if (plan.picked.size() != inst.items.size()) {
    throw InvalidTour("packing plan size does not match item count");
  }
  const int n = inst.dimension;

  std::vector<double> weight_gain(static_cast<size_t>(n) + 1, 0.0);
  double profit = 0;
  double total_weight = 0;
  for (size_t k = 0; k < plan.picked.size(); ++k) {
    if (!plan.picked[k]) continue;
    const Item& it = inst.items[k];
    weight_gain[static_cast<size_t>(it.city)] += it.weight;
    profit += it.profit;
    total_weight += it.weight;
  }
  if (total_weight > inst.capacity) {
    throw CapacityExceeded(total_weight, inst.capacity);
  }

  const double nu = inst.nu();
  double time = 0;
  double carried = 0;
  for (int i = 0; i < n; ++i) {
    carried += weight_gain[static_cast<size_t>(tour.order[static_cast<size_t>(i)])];
    const int from = tour.order[static_cast<size_t>(i)];
    const int to = tour.order[static_cast<size_t>((i + 1) % n)];
    const double speed = inst.max_speed - nu * carried;
    if (!(speed > 0)) throw CapacityExceeded(carried, inst.capacity);
    time += inst.distance(from, to) / speed;
  }
  return {profit, time};
}

}  // namespace

double objective(const TtpInstance& inst, const Tour& tour, const PackingPlan& plan) {
  EvalTerms t = evaluate_terms(inst, tour, plan);
  return t.profit - inst.renting_rate * t.time;
}

double travel_time(const TtpInstance& inst, const Tour& tour, const PackingPlan& plan) {
  return evaluate_terms(inst, tour, plan).time;
}

Solution make_solution(const TtpInstance& inst, Tour tour, PackingPlan plan) {
  Solution sol;
  sol.objective = objective(inst, tour, plan);

  const int n = inst.dimension;
  std::vector<double> weight_gain(static_cast<size_t>(n) + 1, 0.0);
  for (size_t k = 0; k < plan.picked.size(); ++k) {
    if (plan.picked[k]) {
      weight_gain[static_cast<size_t>(inst.items[k].city)] += inst.items[k].weight;
    }
  }
  sol.weight_trace.resize(static_cast<size_t>(n));
  double carried = 0;
  for (int i = 0; i < n; ++i) {
    carried += weight_gain[static_cast<size_t>(tour.order[static_cast<size_t>(i)])];
    sol.weight_trace[static_cast<size_t>(i)] = carried;
  }
  sol.tour = std::move(tour);
  sol.plan = std::move(plan);
  return sol;
}

PackingEval::PackingEval(const TtpInstance& inst, const Tour& tour)
    : PackingEval(inst, tour, empty_plan(inst)) {}

PackingEval::PackingEval(const TtpInstance& inst, const Tour& tour,
                         const PackingPlan& plan)
    : inst_(&inst), tour_(&tour), plan_(plan) {
  require_valid_tour(inst, tour);
  const int n = inst.dimension;
  pos_of_city_.assign(static_cast<size_t>(n) + 1, -1);
  for (int i = 0; i < n; ++i) {
    pos_of_city_[static_cast<size_t>(tour.order[static_cast<size_t>(i)])] = i;
  }
  leg_dist_.resize(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    leg_dist_[static_cast<size_t>(i)] =
        inst.distance(tour.order[static_cast<size_t>(i)],
                      tour.order[static_cast<size_t>((i + 1) % n)]);
  }

  std::vector<double> weight_gain(static_cast<size_t>(n) + 1, 0.0);
  for (size_t k = 0; k < plan_.picked.size(); ++k) {
    if (!plan_.picked[k]) continue;
    const Item& it = inst.items[k];
    weight_gain[static_cast<size_t>(it.city)] += it.weight;
    profit_ += it.profit;
    weight_ += it.weight;
  }
  if (weight_ > inst.capacity) throw CapacityExceeded(weight_, inst.capacity);

  weight_at_.resize(static_cast<size_t>(n));
  const double nu = inst.nu();
  double carried = 0;
  for (int i = 0; i < n; ++i) {
    carried += weight_gain[static_cast<size_t>(tour.order[static_cast<size_t>(i)])];
    weight_at_[static_cast<size_t>(i)] = carried;
    time_ += leg_dist_[static_cast<size_t>(i)] / (inst.max_speed - nu * carried);
  }
}

bool PackingEval::flip_feasible(int item) const {
  if (picked(item)) return true;  // removing is always feasible
  return weight_ + inst_->items[static_cast<size_t>(item)].weight <= inst_->capacity;
}

double PackingEval::leg_time_delta(int item, double sign) const {
  const Item& it = inst_->items[static_cast<size_t>(item)];
  const int p = pos_of_city_[static_cast<size_t>(it.city)];
  const int n = inst_->dimension;
  const double nu = inst_->nu();
  const double dw = sign * it.weight;
  double delta = 0;
  for (int i = p; i < n; ++i) {
    const double w_old = weight_at_[static_cast<size_t>(i)];
    delta += leg_dist_[static_cast<size_t>(i)] *
             (1.0 / (inst_->max_speed - nu * (w_old + dw)) -
              1.0 / (inst_->max_speed - nu * w_old));
  }
  return delta;
}

double PackingEval::z_if_flipped(int item) const {
  const Item& it = inst_->items[static_cast<size_t>(item)];
  const double sign = picked(item) ? -1.0 : 1.0;
  const double new_profit = profit_ + sign * it.profit;
  const double new_time = time_ + leg_time_delta(item, sign);
  return new_profit - inst_->renting_rate * new_time;
}

void PackingEval::flip(int item) {
  const Item& it = inst_->items[static_cast<size_t>(item)];
  const double sign = picked(item) ? -1.0 : 1.0;
  time_ += leg_time_delta(item, sign);
  profit_ += sign * it.profit;
  weight_ += sign * it.weight;
  const int p = pos_of_city_[static_cast<size_t>(it.city)];
  const double dw = sign * it.weight;
  for (int i = p; i < inst_->dimension; ++i) {
    weight_at_[static_cast<size_t>(i)] += dw;
  }
  plan_.picked[static_cast<size_t>(item)] =
      plan_.picked[static_cast<size_t>(item)] ? 0 : 1;
}

double PackingEval::recompute_z() const {
  return objective(*inst_, *tour_, plan_);
}

std::string solution_to_text(const Solution& sol) {
  std::ostringstream out;
  for (size_t i = 0; i < sol.tour.order.size(); ++i) {
    if (i) out << ' ';
    out << sol.tour.order[i];
  }
  out << "\n";
  auto ids = sol.plan.picked_ids();
  for (size_t i = 0; i < ids.size(); ++i) {
    if (i) out << ' ';
    out << ids[i];
  }
  out << "\n";
  return out.str();
}

Solution solution_from_text(const TtpInstance& inst, const std::string& text) {
  std::istringstream in(text);
  std::string tour_line, items_line;
  if (!std::getline(in, tour_line)) throw Error("solution text: missing tour line");
  std::getline(in, items_line);  // may legitimately be empty

  Tour tour;
  for (auto tok : split_ws(tour_line)) {
    auto v = parse_integer(tok);
    if (!v) throw Error("solution text: bad tour token");
    tour.order.push_back(static_cast<int>(*v));
  }
  PackingPlan plan = empty_plan(inst);
  for (auto tok : split_ws(items_line)) {
    auto v = parse_integer(tok);
    if (!v || *v < 1 || *v > inst.num_items()) {
      throw Error("solution text: bad item id");
    }
    plan.picked[static_cast<size_t>(*v) - 1] = 1;
  }
  return make_solution(inst, std::move(tour), std::move(plan));
}

std::string solution_to_json(const Solution& sol) {
  nlohmann::json j;
  j["tour"] = sol.tour.order;
  j["picked_items"] = sol.plan.picked_ids();
  j["objective"] = sol.objective;
  return j.dump(2);
}

}  // namespace ttp
