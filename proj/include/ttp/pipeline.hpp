#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ttp/benchmark.hpp"
#include "ttp/selection.hpp"

namespace ttp {

// Declarative experiment description; every stage is seeded so a config
// maps to one reproducible artifact directory.
struct ExperimentConfig {
  std::string name = "experiment";
  uint64_t seed = 0;
  uint64_t cv_seed = 0;
  int folds = 10;
  int workers = 1;
  int64_t budget_ms = 2000;

  int instance_count = 0;
  int cities_min = 10;
  int cities_max = 50;
  std::vector<int> item_factors = {1};
  std::vector<KpType> kp_types = {KpType::Uncorrelated};
  std::vector<int> capacity_classes = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  double coord_range = 1000.0;
  EdgeWeightKind edge_weight_kind = EdgeWeightKind::CeilEuclidean2D;

  std::vector<SolverSpec> roster;
  std::vector<SelectorFamily> families = {SelectorFamily::PairwiseRF};
  std::vector<std::string> feature_subset;

  std::string canonical() const;  // stable serialization, input to the hash
  std::string config_hash() const;
};

ExperimentConfig parse_experiment_config(const std::string& json_text);
ExperimentConfig load_experiment_config(const std::string& path);

struct PipelineResult {
  std::string artifact_dir;
  std::string scenario_dir;
  std::string config_hash;
  std::map<std::string, EvalReport> reports;  // per selector family
};

// gen -> bench -> features -> scenario -> evaluate -> analyze. Journaled
// stages are reused on rerun, so a repeated run rewrites identical bytes.
PipelineResult run_pipeline(const ExperimentConfig& config, const std::string& out_root);

// Emits spearman/ward/shapley/standalone/feature-importance tables.
void write_analysis_reports(const Scenario& scenario, const std::string& dir,
                            uint64_t seed, const std::string& config_hash = "");

std::string eval_report_to_json(const EvalReport& report, const std::string& family,
                                const std::string& config_hash);

}  // namespace ttp
