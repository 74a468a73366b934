#include <filesystem>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ttp/analysis.hpp"
#include "ttp/benchmark.hpp"
#include "ttp/evaluation.hpp"
#include "ttp/features.hpp"
#include "ttp/instance.hpp"
#include "ttp/io_util.hpp"
#include "ttp/pipeline.hpp"
#include "ttp/selection.hpp"
#include "ttp/solvers.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::vector<ttp::SolverSpec> load_roster(const std::string& path, uint64_t default_seed,
                                         int64_t default_budget_ms) {
  const auto j = json::parse(ttp::read_text_file(path));
  std::vector<ttp::SolverSpec> roster;
  for (const auto& s : j) {
    ttp::SolverSpec spec;
    spec.name = s["name"].get<std::string>();
    spec.seed = s.value("seed", default_seed);
    spec.budget_ms = s.value("budget_ms", default_budget_ms);
    if (s.contains("iters")) spec.params["iters"] = s["iters"].get<double>();
    roster.push_back(std::move(spec));
  }
  return roster;
}

std::vector<ttp::MatrixJob> load_instance_dir(const std::string& dir) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".ttp") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  std::vector<ttp::MatrixJob> jobs;
  for (const auto& file : files) {
    jobs.push_back({file.stem().string(), ttp::parse_instance_file(file.string())});
  }
  if (jobs.empty()) throw ttp::Error("no .ttp instances found in " + dir);
  return jobs;
}

std::string features_to_json(const ttp::FeatureVector& fv) {
  json values = json::object();
  const auto& names = ttp::FeatureVector::catalogue();
  for (size_t i = 0; i < names.size(); ++i) values[names[i]] = fv.values[i];
  json timing = json::object();
  for (const auto& [group, ms] : fv.group_ms) timing[group] = ms;
  json j;
  j["tool_version"] = ttp::kToolVersion;
  j["features"] = values;
  j["timing_ms"] = timing;
  j["approximate_distances"] = fv.approximate_distances;
  return j.dump(2) + "\n";
}

std::string features_to_csv(const ttp::FeatureVector& fv) {
  std::ostringstream out;
  const auto& names = ttp::FeatureVector::catalogue();
  for (size_t i = 0; i < names.size(); ++i) out << (i ? "," : "") << names[i];
  out << "\n";
  for (size_t i = 0; i < fv.values.size(); ++i) {
    out << (i ? "," : "") << ttp::format_number(fv.values[i]);
  }
  out << "\n";
  return out.str();
}

void emit(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
  } else {
    ttp::write_text_file(path, content);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"TTP toolkit: instance generation, heuristic portfolio, features, "
               "per-instance algorithm selection and portfolio analysis"};
  app.set_version_flag("--version", std::string("ttp ") + ttp::kToolVersion);
  app.require_subcommand(1);

  // ---- gen ----
  auto* gen = app.add_subcommand("gen", "Generate a benchmark-style instance");
  int gen_cities = 51;
  int gen_factor = 1;
  std::string gen_kp = "uncorrelated";
  int gen_class = 1;
  double gen_range = 1000.0;
  uint64_t gen_seed = 0;
  std::string gen_edge = "CEIL_2D";
  std::string gen_out;
  bool gen_json = false;
  gen->add_option("--cities", gen_cities, "Number of cities")->required();
  gen->add_option("--item-factor", gen_factor, "Items per city (1, 3, 5 or 10)");
  gen->add_option("--kp-type", gen_kp,
                  "uncorrelated | similar | strongly (benchmark spellings accepted)");
  gen->add_option("--capacity-class", gen_class, "Capacity class in [1,10]");
  gen->add_option("--coord-range", gen_range, "Coordinate range");
  gen->add_option("--seed", gen_seed, "Generator seed")->required();
  gen->add_option("--edge-weight-type", gen_edge, "CEIL_2D | EUC_2D");
  gen->add_option("-o,--output", gen_out, "Output file (default stdout)");
  gen->add_flag("--json", gen_json, "Emit a JSON record instead of the instance file");

  // ---- solve ----
  auto* solve = app.add_subcommand("solve", "Run one solver on one instance");
  std::string solve_instance, solve_algo = "S5", solve_out;
  int64_t solve_budget = 2000;
  uint64_t solve_seed = 0;
  int64_t solve_iters = -1;
  bool solve_json = false;
  solve->add_option("--instance", solve_instance, "Instance file")->required();
  solve->add_option("--algo", solve_algo, "Solver name");
  solve->add_option("--budget-ms", solve_budget, "Wall-clock budget");
  solve->add_option("--seed", solve_seed, "Seed")->required();
  solve->add_option("--iters", solve_iters, "Iteration cap (deterministic mode)");
  solve->add_option("-o,--output", solve_out, "Solution file (default stdout)");
  solve->add_flag("--json", solve_json, "Emit the JSON result record");

  // ---- eval ----
  auto* eval = app.add_subcommand("eval", "Evaluate a solution file");
  std::string eval_instance, eval_solution;
  bool eval_json = false;
  eval->add_option("--instance", eval_instance, "Instance file")->required();
  eval->add_option("--solution", eval_solution, "Solution file (two-line format)")
      ->required();
  eval->add_flag("--json", eval_json, "Emit JSON");

  // ---- features ----
  auto* feat = app.add_subcommand("features", "Extract the 55 instance features");
  std::string feat_instance, feat_out;
  feat->add_option("--instance", feat_instance, "Instance file")->required();
  feat->add_option("-o,--output", feat_out, "Output .json or .csv (default JSON stdout)");

  // ---- bench ----
  auto* bench = app.add_subcommand("bench", "Run the instance x algorithm matrix");
  std::string bench_instances, bench_roster, bench_out;
  int64_t bench_budget = 2000;
  int bench_workers = 1;
  uint64_t bench_seed = 0;
  bench->add_option("--instances", bench_instances, "Directory of .ttp files")->required();
  bench->add_option("--roster", bench_roster, "Roster JSON file")->required();
  bench->add_option("--budget-ms", bench_budget, "Default budget per cell");
  bench->add_option("--workers", bench_workers, "Parallel workers");
  bench->add_option("--seed", bench_seed, "Default solver seed");
  bench->add_option("-o,--output", bench_out, "Output directory")->required();

  // ---- scenario ----
  auto* scenario_cmd = app.add_subcommand("scenario", "Scenario bundle operations");
  scenario_cmd->require_subcommand(1);
  auto* scen_export = scenario_cmd->add_subcommand("export", "Export an ASlib-style scenario");
  std::string scen_instances, scen_bench, scen_out, scen_id = "TTP";
  uint64_t scen_cv_seed = 0;
  int scen_folds = 10;
  scen_export->add_option("--instances", scen_instances, "Directory of .ttp files")->required();
  scen_export->add_option("--bench", scen_bench, "bench output directory (matrix_raw.csv)")
      ->required();
  scen_export->add_option("--cv-seed,--seed", scen_cv_seed, "Cross-validation seed");
  scen_export->add_option("--folds", scen_folds, "Number of CV folds");
  scen_export->add_option("--id", scen_id, "Scenario id");
  scen_export->add_option("-o,--output", scen_out, "Scenario directory")->required();

  // ---- train ----
  auto* train = app.add_subcommand("train", "Train a selector on a scenario");
  std::string train_scenario, train_family = "pairwise_rf", train_out;
  uint64_t train_seed = 0;
  std::vector<std::string> train_features;
  train->add_option("--scenario", train_scenario, "Scenario directory")->required();
  train->add_option("--family", train_family,
                    "regression | pairwise_rf | clustering | knn");
  train->add_option("--seed", train_seed, "Training seed");
  train->add_option("--features", train_features, "Feature subset (default all)");
  train->add_option("-o,--output", train_out, "Model file")->required();

  // ---- select ----
  auto* select = app.add_subcommand("select", "Pick an algorithm for a feature vector");
  std::string select_model, select_features;
  bool select_json = false;
  select->add_option("--model", select_model, "Trained model file")->required();
  select->add_option("--features", select_features, "features JSON for one instance")
      ->required();
  select->add_flag("--json", select_json, "Emit JSON");

  // ---- evaluate ----
  auto* evaluate = app.add_subcommand("evaluate", "Cross-validated selector evaluation");
  std::string eval_scenario, eval_family = "pairwise_rf", eval_out;
  uint64_t eval_seed = 0;
  std::vector<std::string> eval_features;
  evaluate->add_option("--scenario", eval_scenario, "Scenario directory")->required();
  evaluate->add_option("--family", eval_family,
                       "regression | pairwise_rf | clustering | knn");
  evaluate->add_option("--seed", eval_seed, "Training seed");
  evaluate->add_option("--features", eval_features, "Feature subset (default all)");
  evaluate->add_option("-o,--output", eval_out, "Report file (default stdout)");

  // ---- analyze ----
  auto* analyze = app.add_subcommand("analyze", "Portfolio complementarity tables");
  std::string an_scenario, an_what = "shapley", an_out;
  uint64_t an_seed = 0;
  analyze->add_option("--scenario", an_scenario, "Scenario directory")->required();
  analyze->add_option("--what", an_what, "spearman | ward | shapley | marginal | standalone");
  analyze->add_option("--seed", an_seed, "Seed (Monte Carlo Shapley)");
  analyze->add_option("-o,--output", an_out, "Output file (default stdout)");

  // ---- report ----
  auto* report = app.add_subcommand("report", "Emit all analysis tables");
  std::string rep_scenario, rep_out;
  uint64_t rep_seed = 0;
  report->add_option("--scenario", rep_scenario, "Scenario directory")->required();
  report->add_option("--seed", rep_seed, "Seed");
  report->add_option("-o,--output", rep_out, "Output directory")->required();

  // ---- pipeline ----
  auto* pipe = app.add_subcommand("pipeline", "End-to-end experiment from a config file");
  std::string pipe_config, pipe_out = "runs";
  bool pipe_json = false;
  pipe->add_option("--config", pipe_config, "Experiment config JSON")->required();
  pipe->add_option("--out,-o", pipe_out, "Artifact root directory");
  pipe->add_flag("--json", pipe_json, "Emit a JSON summary");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      ttp::GeneratorParams params;
      params.n_cities = gen_cities;
      params.item_factor = gen_factor;
      params.capacity_class = gen_class;
      params.coord_range = gen_range;
      params.seed = gen_seed;
      if (gen_kp.find("sim") != std::string::npos) {
        params.kp_type = ttp::KpType::UncorrelatedSimilarWeights;
      } else if (gen_kp.find("strong") != std::string::npos) {
        params.kp_type = ttp::KpType::BoundedStronglyCorrelated;
      }
      if (gen_edge == "EUC_2D") params.edge_weight_kind = ttp::EdgeWeightKind::Euclidean2D;
      ttp::GeneratedInstance out = ttp::generate_instance(params);
      if (gen_json) {
        json j;
        j["tool_version"] = ttp::kToolVersion;
        j["name"] = out.instance.name;
        j["dimension"] = out.instance.dimension;
        j["items"] = out.instance.num_items();
        j["capacity"] = out.instance.capacity;
        j["renting_rate"] = out.instance.renting_rate;
        j["reference_tour"] = out.reference_tour;
        emit(gen_out, j.dump(2) + "\n");
      } else {
        emit(gen_out, ttp::write_instance_text(out.instance));
      }
    } else if (*solve) {
      const ttp::TtpInstance inst = ttp::parse_instance_file(solve_instance);
      ttp::SolverSpec spec;
      spec.name = solve_algo;
      spec.seed = solve_seed;
      spec.budget_ms = solve_budget;
      if (solve_iters >= 0) spec.params["iters"] = static_cast<double>(solve_iters);
      const ttp::SolverResult result = ttp::run_solver(spec, inst);
      if (solve_json) {
        json j;
        j["tool_version"] = ttp::kToolVersion;
        j["algorithm"] = solve_algo;
        j["seed"] = solve_seed;
        j["elapsed_ms"] = result.elapsed_ms;
        j["iterations"] = result.iterations;
        if (result.solution) {
          j["objective"] = result.solution->objective;
          j["tour"] = result.solution->tour.order;
          j["picked_items"] = result.solution->plan.picked_ids();
        } else {
          j["failure"] = result.failure_reason;
        }
        json traj = json::array();
        for (const auto& [t, z] : result.trajectory.points) traj.push_back({t, z});
        j["trajectory"] = traj;
        emit(solve_out, j.dump(2) + "\n");
      } else if (result.solution) {
        emit(solve_out, ttp::solution_to_text(*result.solution));
      } else {
        std::cerr << "no solution: " << result.failure_reason << "\n";
        return 1;
      }
    } else if (*eval) {
      const ttp::TtpInstance inst = ttp::parse_instance_file(eval_instance);
      const ttp::Solution sol =
          ttp::solution_from_text(inst, ttp::read_text_file(eval_solution));
      const auto violations = ttp::validate(inst, sol.tour, sol.plan);
      if (eval_json) {
        json j;
        j["tool_version"] = ttp::kToolVersion;
        j["objective"] = sol.objective;
        j["travel_time"] = ttp::travel_time(inst, sol.tour, sol.plan);
        j["profit"] = sol.plan.total_profit(inst);
        j["weight"] = sol.plan.total_weight(inst);
        json v = json::array();
        for (const auto& violation : violations) v.push_back(violation.describe());
        j["violations"] = v;
        std::cout << j.dump(2) << "\n";
      } else {
        std::cout << ttp::format_number(sol.objective) << "\n";
        for (const auto& violation : violations) {
          std::cerr << "violation: " << violation.describe() << "\n";
        }
      }
      if (!violations.empty()) return 1;
    } else if (*feat) {
      const ttp::TtpInstance inst = ttp::parse_instance_file(feat_instance);
      const ttp::FeatureVector fv = ttp::extract_features(inst);
      const bool csv = feat_out.size() > 4 &&
                       feat_out.substr(feat_out.size() - 4) == ".csv";
      emit(feat_out, csv ? features_to_csv(fv) : features_to_json(fv));
    } else if (*bench) {
      const auto jobs = load_instance_dir(bench_instances);
      const auto roster = load_roster(bench_roster, bench_seed, bench_budget);
      fs::create_directories(bench_out);
      ttp::PerformanceMatrix matrix = ttp::run_matrix(
          jobs, roster, bench_workers, (fs::path(bench_out) / "journal.jsonl").string());
      matrix.budget_ms = bench_budget;
      matrix.base_seed = bench_seed;
      ttp::write_matrix_csv(matrix, (fs::path(bench_out) / "matrix_raw.csv").string());
      std::cerr << "matrix: " << matrix.instance_ids.size() << " instances x "
                << matrix.algorithms.size() << " algorithms\n";
    } else if (*scen_export) {
      const auto jobs = load_instance_dir(scen_instances);
      ttp::PerformanceMatrix matrix =
          ttp::read_matrix_csv((fs::path(scen_bench) / "matrix_raw.csv").string());
      std::vector<std::string> ids;
      for (const auto& job : jobs) ids.push_back(job.instance_id);
      if (matrix.instance_ids != ids) {
        throw ttp::InconsistentIds("bench matrix ids do not match the instance directory");
      }
      std::vector<ttp::FeatureVector> features;
      for (const auto& job : jobs) features.push_back(ttp::extract_features(job.instance));
      const ttp::ScaledMatrix scaled = ttp::scale_scores(matrix);
      const ttp::CvSplits splits = ttp::make_cv_splits(jobs.size(), scen_folds, scen_cv_seed);
      ttp::export_scenario(matrix, scaled, features, splits, scen_out, scen_id);
      std::cerr << "scenario written to " << scen_out << "\n";
    } else if (*train) {
      const ttp::Scenario scenario = ttp::load_scenario(train_scenario);
      const ttp::Dataset data = ttp::make_dataset(scenario);
      std::vector<size_t> all_rows(data.x.size());
      for (size_t r = 0; r < all_rows.size(); ++r) all_rows[r] = r;
      ttp::SelectorConfig config;
      config.family = ttp::selector_family_from_string(train_family);
      config.seed = train_seed;
      config.feature_subset = train_features;
      const ttp::TrainedSelector model = ttp::train_selector(data, all_rows, config);
      model.save(train_out);
      std::cerr << "model written to " << train_out << "\n";
    } else if (*select) {
      const ttp::TrainedSelector model = ttp::TrainedSelector::load(select_model);
      const auto j = json::parse(ttp::read_text_file(select_features));
      const auto& values = j.contains("features") ? j["features"] : j;
      std::vector<double> raw;
      for (const auto& name : model.feature_names) {
        if (!values.contains(name)) {
          throw ttp::UnknownFeature("feature missing from input: " + name);
        }
        raw.push_back(values[name].get<double>());
      }
      const int chosen = model.select(raw);
      if (select_json) {
        json out;
        out["algorithm"] = model.algorithms[static_cast<size_t>(chosen)];
        std::cout << out.dump() << "\n";
      } else {
        std::cout << model.algorithms[static_cast<size_t>(chosen)] << "\n";
      }
    } else if (*evaluate) {
      const ttp::Scenario scenario = ttp::load_scenario(eval_scenario);
      const ttp::Dataset data = ttp::make_dataset(scenario);
      ttp::SelectorConfig config;
      config.family = ttp::selector_family_from_string(eval_family);
      config.seed = eval_seed;
      config.feature_subset = eval_features;
      const ttp::EvalReport rep = ttp::evaluate_selector(data, config);
      emit(eval_out, ttp::eval_report_to_json(rep, eval_family, ""));
    } else if (*analyze) {
      const ttp::Scenario scenario = ttp::load_scenario(an_scenario);
      std::ostringstream out;
      if (an_what == "spearman") {
        const auto res = ttp::spearman_matrix(scenario.scaled);
        out << "algorithm";
        for (const auto& a : scenario.scaled.algorithms) out << ',' << a;
        out << "\n";
        for (size_t i = 0; i < res.rho.size(); ++i) {
          out << scenario.scaled.algorithms[i];
          for (double v : res.rho[i]) out << ',' << ttp::format_number(v);
          out << "\n";
        }
      } else if (an_what == "ward") {
        const auto corr = ttp::spearman_matrix(scenario.scaled);
        const auto ward = ttp::ward_order(corr.rho);
        json j;
        json order = json::array();
        for (int leaf : ward.leaf_order) {
          order.push_back(scenario.scaled.algorithms[static_cast<size_t>(leaf)]);
        }
        j["leaf_order"] = order;
        json merges = json::array();
        for (const auto& m : ward.merges) {
          merges.push_back({{"a", m.a}, {"b", m.b}, {"height", m.height}, {"size", m.size}});
        }
        j["merges"] = merges;
        out << j.dump(2) << "\n";
      } else if (an_what == "shapley" || an_what == "marginal" || an_what == "standalone") {
        const auto rep = ttp::shapley_values(
            scenario.scaled,
            scenario.scaled.algorithms.size() <= 20 ? ttp::ShapleyMethod::Exact
                                                    : ttp::ShapleyMethod::MonteCarlo,
            10000, an_seed);
        if (an_what == "shapley") {
          out << "algorithm,standalone,shapley,marginal_to_full\n";
          for (size_t a = 0; a < rep.algorithms.size(); ++a) {
            out << rep.algorithms[a] << ',' << ttp::format_number(rep.standalone[a]) << ','
                << ttp::format_number(rep.shapley[a]) << ','
                << ttp::format_number(rep.marginal_to_full[a]) << "\n";
          }
        } else if (an_what == "marginal") {
          out << "algorithm,marginal_to_full\n";
          for (size_t a = 0; a < rep.algorithms.size(); ++a) {
            out << rep.algorithms[a] << ','
                << ttp::format_number(rep.marginal_to_full[a]) << "\n";
          }
        } else {
          const auto order = ttp::standalone_ranking(scenario.scaled);
          out << "rank,algorithm,standalone\n";
          for (size_t r = 0; r < order.size(); ++r) {
            const size_t a = static_cast<size_t>(order[r]);
            out << (r + 1) << ',' << rep.algorithms[a] << ','
                << ttp::format_number(rep.standalone[a]) << "\n";
          }
        }
      } else {
        throw ttp::Error("unknown analysis kind: " + an_what);
      }
      emit(an_out, out.str());
    } else if (*report) {
      const ttp::Scenario scenario = ttp::load_scenario(rep_scenario);
      ttp::write_analysis_reports(scenario, rep_out, rep_seed);
      std::cerr << "reports written to " << rep_out << "\n";
    } else if (*pipe) {
      const ttp::ExperimentConfig config = ttp::load_experiment_config(pipe_config);
      const ttp::PipelineResult result = ttp::run_pipeline(config, pipe_out);
      if (pipe_json) {
        json j;
        j["tool_version"] = ttp::kToolVersion;
        j["artifact_dir"] = result.artifact_dir;
        j["scenario_dir"] = result.scenario_dir;
        j["config_hash"] = result.config_hash;
        for (const auto& [family, rep] : result.reports) {
          j["reports"][family] =
              json::parse(ttp::eval_report_to_json(rep, family, result.config_hash));
        }
        std::cout << j.dump(2) << "\n";
      } else {
        std::cout << "artifacts: " << result.artifact_dir << "\n";
        for (const auto& [family, rep] : result.reports) {
          std::cout << family << ": mean=" << rep.mean_performance
                    << " single_best=" << rep.single_best << " oracle=" << rep.oracle
                    << " gap_closed=" << rep.gap_closed << "\n";
        }
      }
    }
  } catch (const std::exception& e) {
    json err;
    err["error"] = e.what();
    std::cerr << err.dump() << "\n";
    return 1;
  }
  return 0;
}
