#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ttp/features.hpp"
#include "ttp/instance.hpp"
#include "ttp/solvers.hpp"

namespace ttp {

struct PerformanceMatrix {
  std::vector<std::string> instance_ids;
  std::vector<std::string> algorithms;
  std::vector<std::vector<std::optional<double>>> raw;  // [instance][algorithm]
  int64_t budget_ms = 0;
  uint64_t base_seed = 0;
};

// Per-instance linear rescale of observed scores to [0,1]; missing = -1.
struct ScaledMatrix {
  std::vector<std::string> instance_ids;
  std::vector<std::string> algorithms;
  std::vector<std::vector<double>> scaled;
};

// Per row: best -> 1, worst -> 0, missing -> -1; all-equal rows -> all 1.
// Throws EmptyRow when a row has no finished run at all.
ScaledMatrix scale_scores(const PerformanceMatrix& raw);

struct CvSplits {
  std::vector<int> fold;  // per instance, in [1, k]
  int k = 0;
  uint64_t seed = 0;
};

CvSplits make_cv_splits(size_t instance_count, int k, uint64_t seed);

struct MatrixJob {
  std::string instance_id;
  TtpInstance instance;
};

// Runs every (instance, algorithm) cell once; failures become missing
// cells. With a journal path, finished cells are replayed on rerun.
PerformanceMatrix run_matrix(const std::vector<MatrixJob>& jobs,
                             const std::vector<SolverSpec>& roster, int workers,
                             const std::string& journal_path = "");

struct Scenario {
  PerformanceMatrix matrix;
  ScaledMatrix scaled;
  std::vector<std::string> feature_names;
  std::vector<std::vector<double>> feature_values;  // [instance][feature]
  std::vector<std::string> cost_group_names;
  std::vector<std::vector<double>> feature_costs_ms;  // [instance][group]
  CvSplits splits;
};

// ASlib-style scenario directory: description + attribute-relation tables
// plus plain CSV mirrors (the CSVs are what load_scenario reads back).
void export_scenario(const PerformanceMatrix& matrix, const ScaledMatrix& scaled,
                     const std::vector<FeatureVector>& features, const CvSplits& splits,
                     const std::string& dir, const std::string& scenario_id = "TTP",
                     const std::string& config_hash = "");

Scenario load_scenario(const std::string& dir);

void write_matrix_csv(const PerformanceMatrix& matrix, const std::string& path);
PerformanceMatrix read_matrix_csv(const std::string& path);

}  // namespace ttp
