#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "ttp/instance.hpp"

namespace ttp {

struct Tour {
  std::vector<int> order;  // permutation of [1, n], order[0] == 1
};

struct PackingPlan {
  std::vector<uint8_t> picked;  // bit per item index (item id - 1)

  double total_weight(const TtpInstance& inst) const;
  double total_profit(const TtpInstance& inst) const;
  std::vector<int> picked_ids() const;  // 1-based item ids
};

PackingPlan empty_plan(const TtpInstance& inst);

struct Violation {
  enum class Kind {
    WrongTourLength,
    TourStart,
    CityOutOfRange,
    DuplicateCity,
    MissingCity,
    PlanSize,
    CapacityExceeded,
  };
  Kind kind;
  int index = 0;      // offending city / size, if applicable
  double value = 0;   // offending quantity (e.g. total weight)
  double limit = 0;

  std::string describe() const;
};

// Empty result iff (tour, plan) is a feasible solution. Never throws.
std::vector<Violation> validate(const TtpInstance& inst, const Tour& tour,
                                const PackingPlan& plan);

// Z(tour, plan) = sum of picked profits - R * travel time.
// Throws InvalidTour / CapacityExceeded on malformed input.
double objective(const TtpInstance& inst, const Tour& tour, const PackingPlan& plan);

// The time term of the objective; objective == profit - R * travel_time.
double travel_time(const TtpInstance& inst, const Tour& tour, const PackingPlan& plan);

struct Solution {
  Tour tour;
  PackingPlan plan;
  double objective = 0;               // cached; equals recomputation
  std::vector<double> weight_trace;   // carried weight when leaving tour position i
};

Solution make_solution(const TtpInstance& inst, Tour tour, PackingPlan plan);

// Incremental objective evaluation for single-bit packing flips under a
// fixed tour. A flip at tour position p only touches legs p..n-1, so hill
// climbers avoid full recomputation. Agrees with objective() to 1e-9.
class PackingEval {
 public:
  PackingEval(const TtpInstance& inst, const Tour& tour);
  PackingEval(const TtpInstance& inst, const Tour& tour, const PackingPlan& plan);

  double z() const { return profit_ - inst_->renting_rate * time_; }
  double profit() const { return profit_; }
  double time() const { return time_; }
  double weight() const { return weight_; }
  bool picked(int item) const { return plan_.picked[static_cast<size_t>(item)] != 0; }
  const PackingPlan& plan() const { return plan_; }
  const Tour& tour() const { return *tour_; }

  // Would switching item on keep the plan within capacity?
  bool flip_feasible(int item) const;

  // Z after flipping the item, without committing. Caller checks feasibility.
  double z_if_flipped(int item) const;

  void flip(int item);

  // Full recomputation of the cached state; used as a drift cross-check.
  double recompute_z() const;

 private:
  double leg_time_delta(int item, double sign) const;

  const TtpInstance* inst_;
  const Tour* tour_;
  PackingPlan plan_;
  std::vector<int> pos_of_city_;      // city id -> tour position
  std::vector<double> leg_dist_;      // tour position -> distance of outgoing leg
  std::vector<double> weight_at_;     // carried weight when leaving tour position
  double profit_ = 0;
  double time_ = 0;
  double weight_ = 0;
};

// Two-line text format: tour city ids, then picked item ids.
std::string solution_to_text(const Solution& sol);
Solution solution_from_text(const TtpInstance& inst, const std::string& text);
std::string solution_to_json(const Solution& sol);

}  // namespace ttp
