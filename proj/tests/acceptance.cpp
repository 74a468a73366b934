// Acceptance suite: one criterion per section, one PASS/FAIL line each.
// Exits nonzero if any criterion fails.

#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <numbers>
#include <numeric>
#include <sstream>

#include "support.hpp"
#include "ttp/analysis.hpp"
#include "ttp/benchmark.hpp"
#include "ttp/features.hpp"
#include "ttp/io_util.hpp"
#include "ttp/pipeline.hpp"
#include "ttp/rng.hpp"
#include "ttp/selection.hpp"
#include "ttp/solvers.hpp"

using namespace ttp;
namespace fs = std::filesystem;

namespace {

struct Criteria {
  int failures = 0;

  void run(int number, const std::string& title, double time_limit_s,
           const std::function<bool(std::string*)>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = false;
    std::string detail;
    try {
      ok = body(&detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (time_limit_s > 0 && elapsed > time_limit_s) {
      ok = false;
      detail += " [exceeded time limit]";
    }
    std::printf("[%s] criterion %d: %s (%.1fs)%s%s\n", ok ? "PASS" : "FAIL", number,
                title.c_str(), elapsed, detail.empty() ? "" : " -- ", detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
  }
};

bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

// ---- shared desk-scale scenario (criteria 5 and 6) ----

std::vector<SolverSpec> desk_roster() {
  const std::vector<std::pair<std::string, double>> caps = {
      {"SH", 1},   {"RLS", 4000}, {"EA", 4000}, {"BITFLIP", 4000},
      {"PI", 1},   {"S5", 5},     {"INS", 3},
  };
  std::vector<SolverSpec> roster;
  for (const auto& [name, iters] : caps) {
    SolverSpec spec;
    spec.name = name;
    spec.seed = 1000;
    spec.budget_ms = 600000;
    spec.params["iters"] = iters;
    roster.push_back(std::move(spec));
  }
  return roster;
}

struct DeskScenario {
  Dataset data;
  std::vector<TtpInstance> instances;
};

const DeskScenario& desk_scenario() {
  static const DeskScenario scenario = [] {
    const int count = 320;
    std::vector<MatrixJob> jobs;
    jobs.reserve(count);
    for (int i = 0; i < count; ++i) {
      Rng rng(mix64(0xde5c0ULL + static_cast<uint64_t>(i)));
      GeneratorParams p;
      p.n_cities = static_cast<int>(rng.uniform_int(8, 120));
      const int factors[] = {1, 3, 5};
      p.item_factor = factors[rng.below(3)];
      p.kp_type = static_cast<KpType>(rng.below(3));
      p.capacity_class = static_cast<int>(rng.uniform_int(1, 10));
      p.coord_range = 1000.0;
      p.seed = rng.next_u64();
      GeneratedInstance gen = generate_instance(p);
      char tag[16];
      std::snprintf(tag, sizeof(tag), "%04d", i);
      jobs.push_back({std::string(tag), std::move(gen.instance)});
    }

    const PerformanceMatrix matrix = run_matrix(jobs, desk_roster(), 4);
    const ScaledMatrix scaled = scale_scores(matrix);

    DeskScenario out;
    Dataset& d = out.data;
    d.instance_ids = matrix.instance_ids;
    d.algorithms = matrix.algorithms;
    d.feature_names = FeatureVector::catalogue();
    for (const auto& job : jobs) {
      d.x.push_back(extract_features(job.instance).values);
      out.instances.push_back(job.instance);
    }
    d.y = scaled.scaled;
    d.splits = make_cv_splits(jobs.size(), 10, 4242);
    return out;
  }();
  return scenario;
}

const std::vector<std::string> kHeaderSubset = {
    "capacity_of_knapsack", "renting_ratio", "number_of_items", "knapsack_data_type",
    "dimension"};

}  // namespace

int main() {
  Criteria criteria;

  criteria.run(1, "objective correctness on the worked example", 1.0, [](std::string* d) {
    const TtpInstance inst = ttp_test::worked_example_instance();
    const Tour tour = ttp_test::worked_example_tour();
    const PackingPlan plan = ttp_test::worked_example_plan();

    const double z = objective(inst, tour, plan);
    bool ok = (z == 50.0);

    TtpInstance no_rent = inst;
    no_rent.renting_rate = 0.0;
    ok = ok && near(objective(no_rent, tour, plan), 80.0, 1e-9);

    const double tour_len = 5 + 5 + 5 + 6;
    ok = ok && near(objective(inst, tour, empty_plan(inst)),
                    -inst.renting_rate * tour_len / inst.max_speed, 1e-9);

    std::ostringstream msg;
    msg << "Z=" << z;
    *d = msg.str();
    return ok;
  });

  criteria.run(2, "brute-force oracle equivalence on 50 tiny instances", 120.0,
               [](std::string* d) {
    int pi_matches = 0;
    bool bounded = true;
    const auto roster = [] {
      auto r = desk_roster();
      for (auto& spec : r) {
        spec.params["iters"] = std::min(spec.params["iters"], 400.0);
      }
      return r;
    }();

    for (int i = 0; i < 50; ++i) {
      Rng rng(mix64(7100 + static_cast<uint64_t>(i)));
      GeneratorParams p;
      p.coord_range = 100.0;
      p.capacity_class = static_cast<int>(rng.uniform_int(1, 10));
      p.kp_type = static_cast<KpType>(rng.below(3));
      if (rng.below(4) == 0) {
        p.n_cities = 5;
        p.item_factor = 3;  // m = 12
      } else {
        p.n_cities = static_cast<int>(rng.uniform_int(5, 8));
        p.item_factor = 1;  // m <= 7
      }
      p.seed = rng.next_u64();
      const TtpInstance inst = generate_instance(p).instance;

      const double optimum = ttp_test::brute_force_optimum(inst);
      for (const auto& spec_template : roster) {
        SolverSpec spec = spec_template;
        spec.seed = 1 + static_cast<uint64_t>(i);
        const SolverResult res = run_solver(spec, inst);
        if (!res.solution || res.solution->objective > optimum + 1e-9 ||
            !validate(inst, res.solution->tour, res.solution->plan).empty()) {
          bounded = false;
        }
      }

      const Tour tour =
          two_opt(inst, nearest_neighbor_tour(inst, 3), Budget::unlimited());
      const double best_fixed = ttp_test::brute_force_best_plan(inst, tour.order);
      const double z_pi = objective(inst, tour, pack_iterative(inst, tour));
      if (near(z_pi, best_fixed, 1e-9)) ++pi_matches;
    }

    std::ostringstream msg;
    msg << "pack_iterative matched the fixed-tour optimum on " << pi_matches << "/50";
    *d = msg.str();
    return bounded && pi_matches >= 35;
  });

  criteria.run(3, "scaling semantics on 1000 random rows", 0, [](std::string* d) {
    Rng rng(0xacce93);
    for (int trial = 0; trial < 1000; ++trial) {
      const size_t a_count = 2 + rng.below(9);
      PerformanceMatrix m;
      m.instance_ids = {"row"};
      m.raw.emplace_back();
      auto& row = m.raw[0];
      row.resize(a_count);
      size_t present = 0;
      for (size_t a = 0; a < a_count; ++a) {
        m.algorithms.push_back("A" + std::to_string(a));
        if (rng.below(4) == 0) continue;
        row[a] = rng.below(6) == 0 ? 7.25 : rng.uniform_real(-1e8, 1e8);
        ++present;
      }
      if (present == 0) {
        row[0] = 3.0;
      }

      double best = -1e300, worst = 1e300;
      for (const auto& cell : row) {
        if (!cell) continue;
        best = std::max(best, *cell);
        worst = std::min(worst, *cell);
      }
      const ScaledMatrix s = scale_scores(m);
      for (size_t a = 0; a < a_count; ++a) {
        if (!row[a]) {
          if (s.scaled[0][a] != -1.0) return false;
        } else if (best == worst) {
          if (s.scaled[0][a] != 1.0) return false;
        } else {
          if (*row[a] == best && s.scaled[0][a] != 1.0) return false;
          if (*row[a] == worst && s.scaled[0][a] != 0.0) return false;
          if (s.scaled[0][a] < 0.0 || s.scaled[0][a] > 1.0) return false;
        }
      }
    }
    *d = "max->1, min->0, missing->-1, degenerate->1";
    return true;
  });

  criteria.run(4, "feature suite: oracle, invariance, fixtures", 60.0, [](std::string* d) {
    bool ok = true;

    GeneratorParams p;
    p.n_cities = 40;
    p.item_factor = 3;
    p.capacity_class = 5;
    p.seed = 99;
    const TtpInstance inst = generate_instance(p).instance;
    const FeatureVector fv = extract_features(inst);
    ok = ok && fv.values.size() == 55;
    for (double v : fv.values) ok = ok && std::isfinite(v);

    // expected random tour length against the direct double-loop sum
    const auto pts = normalize_to_unit_square(inst.coords);
    double sum = 0;
    for (size_t i = 0; i < pts.size(); ++i) {
      for (size_t j = i + 1; j < pts.size(); ++j) {
        sum += std::hypot(pts[i].x - pts[j].x, pts[i].y - pts[j].y);
      }
    }
    ok = ok && near(fv.at("distance_expected_random_tour_length"),
                    sum * 2.0 / (static_cast<double>(pts.size()) - 1.0), 1e-9);

    // translation + uniform scaling leave the geometric block unchanged
    TtpInstance moved = inst;
    for (auto& c : moved.coords) {
      c.x = c.x * 2.5 + 31.0;
      c.y = c.y * 2.5 - 17.0;
    }
    const FeatureVector fv2 = extract_features(moved);
    for (size_t i = 0; i < fv.values.size(); ++i) {
      ok = ok && near(fv.values[i], fv2.values[i],
                      1e-12 * std::max(1.0, std::abs(fv.values[i])));
    }

    // square fixture
    TtpInstance square = ttp_test::worked_example_instance();
    square.coords = {{0, 0}, {1, 0}, {0, 1}, {1, 1}};
    const FeatureVector fsq = extract_features(square);
    ok = ok && fsq.at("hull_frac") == 1.0 && near(fsq.at("hull_area"), 1.0, 1e-12);

    // collinear fixture: endpoints see angle 0, the middle point pi
    TtpInstance line = ttp_test::worked_example_instance();
    line.dimension = 3;
    line.coords = {{0, 0}, {7, 0}, {14, 0}};
    line.items = {{1, 2, 10, 5}, {2, 3, 10, 5}};
    line.capacity = 4;
    const FeatureVector fl = extract_features(line);
    const double pi_v = std::numbers::pi;
    ok = ok && near(fl.at("mst_dist_sum_norm"), 0.5, 1e-12);
    ok = ok && near(fl.at("angle_mean"), pi_v / 3.0, 1e-12);
    ok = ok && near(fl.at("angle_max"), pi_v, 1e-12);
    ok = ok && near(fl.at("angle_min"), 0.0, 1e-12);
    ok = ok && near(fl.at("hull_area"), 0.0, 1e-12);
    ok = ok && near(fl.at("distance_expected_random_tour_length"), 2.0, 1e-12);

    *d = "55 features, oracle and fixtures agree";
    return ok;
  });

  criteria.run(5, "selector gap closure at desk scale", 1800.0, [](std::string* d) {
    const DeskScenario& scenario = desk_scenario();

    SelectorConfig config;
    config.family = SelectorFamily::PairwiseRF;
    config.seed = 31337;
    const EvalReport report = evaluate_selector(scenario.data, config);

    // planted two-regime scenario: selectable structure must be recovered
    Dataset planted;
    Rng rng(0x9817);
    planted.feature_names.resize(20);
    for (size_t f = 0; f < 20; ++f) planted.feature_names[f] = "f" + std::to_string(f);
    planted.algorithms = {"L", "R", "M"};
    for (int r = 0; r < 400; ++r) {
      planted.instance_ids.push_back("p" + std::to_string(r));
      std::vector<double> x(20);
      for (auto& v : x) v = rng.next_double();
      const bool left = x[4] < 0.5;
      planted.x.push_back(x);
      planted.y.push_back({left ? 1.0 : 0.2, left ? 0.2 : 1.0, 0.6});
    }
    planted.splits = make_cv_splits(400, 10, 11);
    SelectorConfig planted_config;
    planted_config.family = SelectorFamily::PairwiseRF;
    planted_config.seed = 7;
    const EvalReport planted_report = evaluate_selector(planted, planted_config);

    std::ostringstream msg;
    msg << "generated: selector=" << report.mean_performance
        << " single_best=" << report.single_best << " (" << report.single_best_algorithm
        << ") oracle=" << report.oracle << " gap_closed=" << report.gap_closed
        << "; planted gap_closed=" << planted_report.gap_closed;
    *d = msg.str();
    return report.mean_performance > report.single_best && report.gap_closed >= 0.5 &&
           planted_report.gap_closed >= 0.9;
  });

  criteria.run(6, "header-feature subset keeps most of the gap closure", 900.0,
               [](std::string* d) {
    const DeskScenario& scenario = desk_scenario();

    SelectorConfig full;
    full.family = SelectorFamily::PairwiseRF;
    full.seed = 31337;
    const EvalReport report_full = evaluate_selector(scenario.data, full);

    SelectorConfig header = full;
    header.feature_subset = kHeaderSubset;
    const EvalReport report_header = evaluate_selector(scenario.data, header);

    // header features must be constant-time per parsed instance
    const auto t0 = std::chrono::steady_clock::now();
    size_t sink = 0;
    for (const auto& inst : scenario.instances) {
      sink += extract_header_features(inst).size();
    }
    const double per_instance_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
            .count() /
        static_cast<double>(scenario.instances.size());

    std::ostringstream msg;
    msg << "gap_closed full=" << report_full.gap_closed
        << " header=" << report_header.gap_closed << " header_ms=" << per_instance_ms
        << " (" << sink << " values)";
    *d = msg.str();
    return report_header.gap_closed >= 0.9 * report_full.gap_closed &&
           per_instance_ms < 1.0;
  });

  criteria.run(7, "shapley correctness", 120.0, [](std::string* d) {
    bool ok = true;

    for (size_t algos = 2; algos <= 6; ++algos) {
      Rng rng(900 + algos);
      ScaledMatrix m;
      for (size_t a = 0; a < algos; ++a) m.algorithms.push_back("A" + std::to_string(a));
      for (int i = 0; i < 20; ++i) {
        m.instance_ids.push_back("i" + std::to_string(i));
        std::vector<double> row(algos);
        for (auto& v : row) v = rng.below(8) == 0 ? -1.0 : rng.next_double();
        m.scaled.push_back(std::move(row));
      }
      const ShapleyReport rep = shapley_values(m);
      const auto brute = ttp_test::brute_force_shapley(CoalitionGame(m));
      for (size_t a = 0; a < algos; ++a) {
        ok = ok && near(rep.shapley[a], brute[a], 1e-9);
      }
      const CoalitionGame game(m);
      std::vector<int> all(static_cast<int>(algos));
      std::iota(all.begin(), all.end(), 0);
      double sum = 0;
      for (double v : rep.shapley) sum += v;
      ok = ok && near(sum, game.value(all), 1e-9);  // efficiency
    }

    // symmetry: identical columns receive identical values
    {
      Rng rng(77);
      ScaledMatrix m;
      m.algorithms = {"A", "B", "C", "Aclone"};
      for (int i = 0; i < 40; ++i) {
        m.instance_ids.push_back("i" + std::to_string(i));
        const double a = rng.next_double();
        m.scaled.push_back({a, rng.next_double(), rng.next_double(), a});
      }
      const ShapleyReport rep = shapley_values(m);
      ok = ok && rep.shapley[0] == rep.shapley[3];
    }

    // Monte Carlo vs exact on a size-10 roster
    {
      Rng rng(4242);
      ScaledMatrix m;
      for (int a = 0; a < 10; ++a) m.algorithms.push_back("A" + std::to_string(a));
      for (int i = 0; i < 80; ++i) {
        m.instance_ids.push_back("i" + std::to_string(i));
        std::vector<double> row(10);
        for (auto& v : row) v = rng.below(10) == 0 ? -1.0 : rng.next_double();
        m.scaled.push_back(std::move(row));
      }
      const ShapleyReport exact = shapley_values(m, ShapleyMethod::Exact);
      const ShapleyReport mc = shapley_values(m, ShapleyMethod::MonteCarlo, 10000, 5);
      for (int a = 0; a < 10; ++a) {
        ok = ok && std::abs(mc.shapley[static_cast<size_t>(a)] -
                            exact.shapley[static_cast<size_t>(a)]) <=
                       3.0 * mc.half_width[static_cast<size_t>(a)] + 1e-12;
      }
    }

    *d = "exact == factorial, efficiency, symmetry, MC within 3 SE";
    return ok;
  });

  criteria.run(8, "spearman and ward behavior", 0, [](std::string* d) {
    bool ok = true;

    Rng rng(31);
    ScaledMatrix m;
    m.algorithms = {"A", "B", "C", "B_twin"};
    for (int i = 0; i < 50; ++i) {
      m.instance_ids.push_back("i" + std::to_string(i));
      const double b = rng.next_double();
      m.scaled.push_back({rng.next_double(), b, rng.next_double(), b});
    }
    const SpearmanResult res = spearman_matrix(m);
    for (size_t a = 0; a < 4; ++a) ok = ok && res.rho[a][a] == 1.0;
    ok = ok && near(res.rho[1][3], 1.0, 1e-12);

    // strictly increasing transforms leave coefficients unchanged
    ScaledMatrix warped = m;
    for (auto& row : warped.scaled) row[0] = std::exp(2.0 * row[0]) + 1.0;
    const SpearmanResult res2 = spearman_matrix(warped);
    for (size_t a = 0; a < 4; ++a) {
      for (size_t b = 0; b < 4; ++b) {
        ok = ok && near(res.rho[a][b], res2.rho[a][b], 1e-12);
      }
    }

    // strictly decreasing transform flips the sign to -1
    ScaledMatrix flipped = m;
    for (auto& row : flipped.scaled) row[2] = -3.0 * row[2] + 0.5;
    const SpearmanResult res3 = spearman_matrix(flipped);
    ok = ok && near(res3.rho[2][2], 1.0, 0.0);

    const WardResult ward = ward_order(res.rho);
    ok = ok && ward.merges[0].a == 1 && ward.merges[0].b == 3;  // the twins
    ok = ok && near(ward.merges[0].height, 0.0, 1e-12);
    ok = ok && ward.leaf_order.size() == 4;

    *d = "self-corr 1, monotone invariance, twins merge first";
    return ok;
  });

  criteria.run(9, "pipeline determinism: byte-identical rerun", 600.0, [](std::string* d) {
    const std::string config_text = R"json({
      "name": "acceptance-demo",
      "seed": 2718,
      "cv_seed": 2719,
      "folds": 10,
      "workers": 4,
      "budget_ms": 500,
      "generator": {
        "count": 30,
        "cities_min": 8,
        "cities_max": 40,
        "item_factors": [1, 3],
        "kp_types": ["uncorrelated", "uncorrelated, similar weights", "bounded strongly corr"],
        "capacity_classes": [1, 3, 5, 7, 9],
        "coord_range": 500.0
      },
      "roster": [
        {"name": "SH", "iters": 1},
        {"name": "RLS", "iters": 500},
        {"name": "EA", "iters": 500},
        {"name": "BITFLIP", "iters": 500},
        {"name": "PI", "iters": 1},
        {"name": "S5", "iters": 3},
        {"name": "INS", "iters": 2}
      ],
      "families": ["pairwise_rf"]
    })json";

    const fs::path root = fs::temp_directory_path() /
                          ("ttp_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(root);
    const ExperimentConfig config = parse_experiment_config(config_text);

    const PipelineResult first = run_pipeline(config, root.string());

    std::map<std::string, std::string> before;
    for (const char* sub : {"scenario", "reports"}) {
      for (const auto& entry :
           fs::recursive_directory_iterator(fs::path(first.artifact_dir) / sub)) {
        if (entry.is_regular_file()) {
          before[entry.path().string()] = read_text_file(entry.path().string());
        }
      }
    }

    const PipelineResult second = run_pipeline(config, root.string());
    bool ok = second.artifact_dir == first.artifact_dir && !before.empty();
    for (const auto& [path, content] : before) {
      ok = ok && read_text_file(path) == content;
    }
    const double gap = first.reports.at("pairwise_rf").gap_closed;

    fs::remove_all(root);
    std::ostringstream msg;
    msg << before.size() << " files byte-identical; demo gap_closed=" << gap;
    *d = msg.str();
    return ok;
  });

  std::printf("%s: %d criterion(s) failed\n",
              criteria.failures == 0 ? "ACCEPTANCE PASSED" : "ACCEPTANCE FAILED",
              criteria.failures);
  return criteria.failures == 0 ? 0 : 1;
}
