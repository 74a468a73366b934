#include "ttp/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ttp/analysis.hpp"
#include "ttp/io_util.hpp"
#include "ttp/rng.hpp"

namespace fs = std::filesystem;

namespace ttp {

namespace {

KpType kp_type_from_string(const std::string& s) {
  if (s.find("similar") != std::string::npos) return KpType::UncorrelatedSimilarWeights;
  if (s.find("strongly") != std::string::npos) return KpType::BoundedStronglyCorrelated;
  return KpType::Uncorrelated;
}

nlohmann::json config_to_json(const ExperimentConfig& c) {
  nlohmann::json j;
  j["name"] = c.name;
  j["seed"] = c.seed;
  j["cv_seed"] = c.cv_seed;
  j["folds"] = c.folds;
  j["workers"] = c.workers;
  j["budget_ms"] = c.budget_ms;
  j["generator"]["count"] = c.instance_count;
  j["generator"]["cities_min"] = c.cities_min;
  j["generator"]["cities_max"] = c.cities_max;
  j["generator"]["item_factors"] = c.item_factors;
  nlohmann::json kp = nlohmann::json::array();
  for (auto t : c.kp_types) kp.push_back(to_string(t));
  j["generator"]["kp_types"] = kp;
  j["generator"]["capacity_classes"] = c.capacity_classes;
  j["generator"]["coord_range"] = c.coord_range;
  j["generator"]["edge_weight_type"] = to_string(c.edge_weight_kind);
  nlohmann::json roster = nlohmann::json::array();
  for (const auto& spec : c.roster) {
    nlohmann::json s;
    s["name"] = spec.name;
    s["seed"] = spec.seed;
    s["budget_ms"] = spec.budget_ms;
    for (const auto& [k, v] : spec.params) s[k] = v;
    roster.push_back(s);
  }
  j["roster"] = roster;
  nlohmann::json fams = nlohmann::json::array();
  for (auto f : c.families) fams.push_back(to_string(f));
  j["families"] = fams;
  j["feature_subset"] = c.feature_subset;
  return j;
}

}  // namespace

std::string ExperimentConfig::canonical() const { return config_to_json(*this).dump(); }

std::string ExperimentConfig::config_hash() const {
  return hex64(fnv1a64(canonical())).substr(8);  // 8-byte hex tag
}

ExperimentConfig parse_experiment_config(const std::string& json_text) {
  const auto j = nlohmann::json::parse(json_text);
  ExperimentConfig c;
  c.name = j.value("name", c.name);
  if (!j.contains("seed")) throw Error("config: 'seed' is mandatory");
  c.seed = j["seed"].get<uint64_t>();
  c.cv_seed = j.value("cv_seed", c.seed + 1);
  c.folds = j.value("folds", c.folds);
  c.workers = j.value("workers", c.workers);
  c.budget_ms = j.value("budget_ms", c.budget_ms);

  if (j.contains("generator")) {
    const auto& g = j["generator"];
    c.instance_count = g.value("count", c.instance_count);
    c.cities_min = g.value("cities_min", c.cities_min);
    c.cities_max = g.value("cities_max", c.cities_max);
    if (g.contains("item_factors")) c.item_factors = g["item_factors"].get<std::vector<int>>();
    if (g.contains("kp_types")) {
      c.kp_types.clear();
      for (const auto& t : g["kp_types"]) {
        c.kp_types.push_back(kp_type_from_string(t.get<std::string>()));
      }
    }
    if (g.contains("capacity_classes")) {
      c.capacity_classes = g["capacity_classes"].get<std::vector<int>>();
    }
    c.coord_range = g.value("coord_range", c.coord_range);
    if (g.value("edge_weight_type", "CEIL_2D") == std::string("EUC_2D")) {
      c.edge_weight_kind = EdgeWeightKind::Euclidean2D;
    }
  }

  if (j.contains("roster")) {
    c.roster.clear();
    for (const auto& s : j["roster"]) {
      SolverSpec spec;
      spec.name = s["name"].get<std::string>();
      spec.seed = s.value("seed", c.seed);
      spec.budget_ms = s.value("budget_ms", c.budget_ms);
      if (s.contains("iters")) spec.params["iters"] = s["iters"].get<double>();
      c.roster.push_back(std::move(spec));
    }
  }
  if (j.contains("families")) {
    c.families.clear();
    for (const auto& f : j["families"]) {
      c.families.push_back(selector_family_from_string(f.get<std::string>()));
    }
  }
  if (j.contains("feature_subset")) {
    c.feature_subset = j["feature_subset"].get<std::vector<std::string>>();
  }
  return c;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  return parse_experiment_config(read_text_file(path));
}

namespace {

std::vector<FeatureVector> features_with_journal(const std::vector<MatrixJob>& jobs,
                                                 const std::string& journal_path) {
  std::map<std::string, FeatureVector> cache;
  if (fs::exists(journal_path)) {
    std::ifstream in(journal_path);
    std::string line;
    while (std::getline(in, line)) {
      if (trim(line).empty()) continue;
      auto j = nlohmann::json::parse(line, nullptr, false);
      if (j.is_discarded()) continue;
      FeatureVector fv;
      fv.values = j["values"].get<std::vector<double>>();
      for (const auto& g : j["groups"]) {
        fv.group_ms.emplace_back(g[0].get<std::string>(), g[1].get<double>());
      }
      fv.approximate_distances = j.value("approx", false);
      cache[j["id"].get<std::string>()] = std::move(fv);
    }
  }

  std::ofstream out(journal_path, std::ios::app);
  std::vector<FeatureVector> features;
  features.reserve(jobs.size());
  for (const auto& job : jobs) {
    auto it = cache.find(job.instance_id);
    if (it != cache.end()) {
      features.push_back(it->second);
      continue;
    }
    FeatureVector fv = extract_features(job.instance);
    nlohmann::json j;
    j["id"] = job.instance_id;
    j["values"] = fv.values;
    nlohmann::json groups = nlohmann::json::array();
    for (const auto& [name, ms] : fv.group_ms) groups.push_back({name, ms});
    j["groups"] = groups;
    j["approx"] = fv.approximate_distances;
    out << j.dump() << "\n";
    features.push_back(std::move(fv));
  }
  return features;
}

void write_csv_matrix(const std::string& path, const std::vector<std::string>& row_names,
                      const std::vector<std::string>& col_names,
                      const std::vector<std::vector<double>>& values,
                      const std::string& corner) {
  std::ostringstream out;
  out << corner;
  for (const auto& c : col_names) out << ',' << c;
  out << "\n";
  for (size_t i = 0; i < row_names.size(); ++i) {
    out << row_names[i];
    for (double v : values[i]) out << ',' << format_number(v);
    out << "\n";
  }
  write_text_file(path, out.str());
}

}  // namespace

std::string eval_report_to_json(const EvalReport& report, const std::string& family,
                                const std::string& config_hash) {
  nlohmann::json j;
  j["tool_version"] = kToolVersion;
  if (!config_hash.empty()) j["config_hash"] = config_hash;
  j["family"] = family;
  j["mean_performance"] = report.mean_performance;
  j["per_fold"] = report.per_fold;
  j["single_best"] = report.single_best;
  j["single_best_algorithm"] = report.single_best_algorithm;
  j["oracle"] = report.oracle;
  j["gap_closed"] = report.gap_closed;
  return j.dump(2) + "\n";
}

void write_analysis_reports(const Scenario& scenario, const std::string& dir,
                            uint64_t seed, const std::string& config_hash) {
  fs::create_directories(dir);
  const auto& algos = scenario.scaled.algorithms;

  const SpearmanResult spearman = spearman_matrix(scenario.scaled);
  write_csv_matrix((fs::path(dir) / "spearman.csv").string(), algos, algos, spearman.rho,
                   "algorithm");

  const WardResult ward = ward_order(spearman.rho);
  {
    nlohmann::json j;
    j["tool_version"] = kToolVersion;
    if (!config_hash.empty()) j["config_hash"] = config_hash;
    nlohmann::json order = nlohmann::json::array();
    for (int leaf : ward.leaf_order) order.push_back(algos[static_cast<size_t>(leaf)]);
    j["leaf_order"] = order;
    nlohmann::json merges = nlohmann::json::array();
    for (const auto& m : ward.merges) {
      merges.push_back({{"a", m.a}, {"b", m.b}, {"height", m.height}, {"size", m.size}});
    }
    j["merges"] = merges;
    write_text_file((fs::path(dir) / "ward.json").string(), j.dump(2) + "\n");
  }

  const bool exact = algos.size() <= 20;
  const ShapleyReport shapley = shapley_values(
      scenario.scaled, exact ? ShapleyMethod::Exact : ShapleyMethod::MonteCarlo, 10000,
      seed);
  {
    std::ostringstream out;
    out << "algorithm,standalone,shapley,marginal_to_full";
    if (!exact) out << ",half_width";
    out << "\n";
    for (size_t a = 0; a < algos.size(); ++a) {
      out << algos[a] << ',' << format_number(shapley.standalone[a]) << ','
          << format_number(shapley.shapley[a]) << ','
          << format_number(shapley.marginal_to_full[a]);
      if (!exact) out << ',' << format_number(shapley.half_width[a]);
      out << "\n";
    }
    write_text_file((fs::path(dir) / "shapley.csv").string(), out.str());
  }

  {
    const auto ranking = standalone_ranking(scenario.scaled);
    std::ostringstream out;
    out << "rank,algorithm,mean_scaled_score\n";
    std::vector<double> mean(algos.size(), 0.0);
    for (const auto& row : scenario.scaled.scaled) {
      for (size_t a = 0; a < algos.size(); ++a) mean[a] += row[a];
    }
    for (auto& v : mean) v /= static_cast<double>(scenario.scaled.scaled.size());
    for (size_t r = 0; r < ranking.size(); ++r) {
      const size_t a = static_cast<size_t>(ranking[r]);
      out << (r + 1) << ',' << algos[a] << ',' << format_number(mean[a]) << "\n";
    }
    write_text_file((fs::path(dir) / "standalone.csv").string(), out.str());
  }

  // feature importance from a pairwise model trained on the full data
  {
    Dataset data = make_dataset(scenario);
    std::vector<size_t> all_rows(data.x.size());
    for (size_t r = 0; r < all_rows.size(); ++r) all_rows[r] = r;
    SelectorConfig config;
    config.family = SelectorFamily::PairwiseRF;
    config.seed = seed;
    TrainedSelector model = train_selector(data, all_rows, config);
    const GiniImportance imp = gini_importance(model);

    std::vector<size_t> order(imp.feature_names.size());
    for (size_t f = 0; f < order.size(); ++f) order[f] = f;
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return imp.mean[a] > imp.mean[b]; });

    std::ostringstream out;
    out << "feature,importance,p25,p75\n";
    for (size_t f : order) {
      out << imp.feature_names[f] << ',' << format_number(imp.mean[f]) << ','
          << format_number(imp.p25[f]) << ',' << format_number(imp.p75[f]) << "\n";
    }
    write_text_file((fs::path(dir) / "feature_importance.csv").string(), out.str());
  }
}

PipelineResult run_pipeline(const ExperimentConfig& config, const std::string& out_root) {
  if (config.instance_count <= 0) throw Error("config: generator.count must be positive");
  if (config.roster.empty()) throw Error("config: roster must not be empty");

  PipelineResult result;
  result.config_hash = config.config_hash();
  const fs::path dir = fs::path(out_root) / (config.name + "-" + result.config_hash);
  result.artifact_dir = dir.string();
  fs::create_directories(dir / "instances");

  // --- generate instances ---
  std::vector<MatrixJob> jobs;
  jobs.reserve(static_cast<size_t>(config.instance_count));
  for (int i = 0; i < config.instance_count; ++i) {
    Rng rng(mix64(config.seed + 1000003ULL * static_cast<uint64_t>(i)));
    GeneratorParams params;
    params.n_cities = static_cast<int>(
        rng.uniform_int(config.cities_min, config.cities_max));
    params.item_factor =
        config.item_factors[rng.below(config.item_factors.size())];
    params.kp_type = config.kp_types[rng.below(config.kp_types.size())];
    params.capacity_class =
        config.capacity_classes[rng.below(config.capacity_classes.size())];
    params.coord_range = config.coord_range;
    params.edge_weight_kind = config.edge_weight_kind;
    params.seed = rng.next_u64();

    GeneratedInstance gen = generate_instance(params);
    char tag[16];
    std::snprintf(tag, sizeof(tag), "%04d", i);
    const std::string id = std::string(tag) + "_" + gen.instance.name;
    const fs::path file = dir / "instances" / (id + ".ttp");
    if (!fs::exists(file)) write_instance_file(gen.instance, file.string());
    jobs.push_back({id, std::move(gen.instance)});
  }

  // --- performance matrix ---
  PerformanceMatrix matrix = run_matrix(jobs, config.roster, config.workers,
                                        (dir / "journal.jsonl").string());
  matrix.budget_ms = config.budget_ms;
  matrix.base_seed = config.seed;

  // --- features ---
  std::vector<FeatureVector> features =
      features_with_journal(jobs, (dir / "features.jsonl").string());

  // --- scenario ---
  const ScaledMatrix scaled = scale_scores(matrix);
  const CvSplits splits =
      make_cv_splits(jobs.size(), config.folds, config.cv_seed);
  result.scenario_dir = (dir / "scenario").string();
  export_scenario(matrix, scaled, features, splits, result.scenario_dir, config.name,
                  result.config_hash);

  // --- selectors ---
  const Scenario scenario = load_scenario(result.scenario_dir);
  Dataset data = make_dataset(scenario);
  fs::create_directories(dir / "reports");
  for (SelectorFamily family : config.families) {
    SelectorConfig sc;
    sc.family = family;
    sc.seed = config.seed;
    sc.feature_subset = config.feature_subset;
    EvalReport report = evaluate_selector(data, sc);
    result.reports[to_string(family)] = report;
    write_text_file((dir / "reports" / ("evaluation_" + std::string(to_string(family)) + ".json")).string(),
                    eval_report_to_json(report, to_string(family), result.config_hash));
  }

  // --- analysis tables ---
  write_analysis_reports(scenario, (dir / "reports").string(), config.seed,
                         result.config_hash);

  // --- manifest ---
  {
    nlohmann::json j;
    j["tool_version"] = kToolVersion;
    j["config_hash"] = result.config_hash;
    j["config"] = nlohmann::json::parse(config.canonical());
    j["scenario_dir"] = "scenario";
    j["instance_count"] = config.instance_count;
    write_text_file((dir / "manifest.json").string(), j.dump(2) + "\n");
  }
  return result;
}

}  // namespace ttp
