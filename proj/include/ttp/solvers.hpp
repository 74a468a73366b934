#pragma once

#include <chrono>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ttp/evaluation.hpp"
#include "ttp/instance.hpp"

namespace ttp {

// Wall-clock deadline and/or iteration cap. Runs capped only by iterations
// are bit-reproducible; wall-clock runs are not.
class Budget {
 public:
  static Budget unlimited() { return Budget{}; }

  static Budget wall_ms(int64_t ms) {
    Budget b;
    b.deadline_ = std::chrono::steady_clock::now() + std::chrono::milliseconds(ms);
    return b;
  }

  static Budget iterations(uint64_t iters) {
    Budget b;
    b.max_iters_ = iters;
    return b;
  }

  Budget& cap_iterations(uint64_t iters) {
    max_iters_ = iters;
    return *this;
  }

  uint64_t iteration_cap() const { return max_iters_; }
  bool has_deadline() const { return deadline_.has_value(); }

  bool time_exhausted() const {
    return deadline_ && std::chrono::steady_clock::now() >= *deadline_;
  }

  bool exhausted(uint64_t iters_done) const {
    if (iters_done >= max_iters_) return true;
    return time_exhausted();
  }

 private:
  std::optional<std::chrono::steady_clock::time_point> deadline_;
  uint64_t max_iters_ = std::numeric_limits<uint64_t>::max();
};

// Greedy construction from city 1; distance ties are broken by a
// seed-derived pick among the tied candidates.
Tour nearest_neighbor_tour(const TtpInstance& inst, uint64_t seed);

// First-improvement 2-opt on tour length until local optimum or budget.
Tour two_opt(const TtpInstance& inst, Tour tour, const Budget& budget);

double tour_length(const TtpInstance& inst, const Tour& tour);

// Constructive packer: items scored by profit minus the renting cost the
// item alone would add over the rest of the tour; added in descending
// score while feasible and while the objective does not decrease.
PackingPlan sh_pack(const TtpInstance& inst, const Tour& tour);

// Exponent-sweep packer: score(k) = p_k^a / (w_k^a * d_k) with d_k the
// remaining tour distance from the item's city; greedy fill per exponent,
// best prefix kept; one golden-section refinement pass around the best
// grid exponent.
PackingPlan pack_iterative(const TtpInstance& inst, const Tour& tour);

struct Trace {
  // (elapsed ms, best Z) in wall-clock mode; (iteration, best Z) when capped.
  std::vector<std::pair<double, double>> points;
};

Solution rls(const TtpInstance& inst, Solution start, const Budget& budget,
             uint64_t seed, Trace* trace = nullptr, uint64_t* iters_out = nullptr);

Solution one_plus_one_ea(const TtpInstance& inst, Solution start, const Budget& budget,
                         uint64_t seed, Trace* trace = nullptr,
                         uint64_t* iters_out = nullptr);

// Systematic single-bit hill climber; accepts strict improvements only.
Solution bitflip(const TtpInstance& inst, Solution start, const Budget& budget,
                 Trace* trace = nullptr, uint64_t* iters_out = nullptr);

// Relocates single cities to better tour positions, packing fixed.
Solution insertion(const TtpInstance& inst, Solution sol, const Budget& budget,
                   Trace* trace = nullptr, uint64_t* iters_out = nullptr);

// Restart loop: randomized nearest-neighbor + 2-opt tour, pack_iterative,
// keep the best. Iteration cap counts restarts.
Solution s5(const TtpInstance& inst, const Budget& budget, uint64_t seed,
            Trace* trace = nullptr, uint64_t* iters_out = nullptr);

struct SolverSpec {
  std::string name;  // registered solver name
  uint64_t seed = 0;
  int64_t budget_ms = 0;
  std::map<std::string, double> params;  // "iters" switches to capped mode
};

struct SolverResult {
  std::optional<Solution> solution;  // empty = failure
  std::string failure_reason;
  int64_t elapsed_ms = 0;
  uint64_t iterations = 0;
  Trace trajectory;
};

const std::vector<std::string>& registered_solvers();

// Dispatches by spec.name; throws UnknownSolver for unregistered names.
// Solver crashes and empty-budget timeouts are recorded as failures.
SolverResult run_solver(const SolverSpec& spec, const TtpInstance& inst);

}  // namespace ttp
