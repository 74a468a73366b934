#include "ttp/benchmark.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "ttp/io_util.hpp"
#include "ttp/rng.hpp"

namespace fs = std::filesystem;

namespace ttp {

ScaledMatrix scale_scores(const PerformanceMatrix& raw) {
  ScaledMatrix out;
  out.instance_ids = raw.instance_ids;
  out.algorithms = raw.algorithms;
  out.scaled.resize(raw.raw.size());

  for (size_t i = 0; i < raw.raw.size(); ++i) {
    const auto& row = raw.raw[i];
    double best = -std::numeric_limits<double>::infinity();
    double worst = std::numeric_limits<double>::infinity();
    size_t present = 0;
    for (const auto& cell : row) {
      if (!cell) continue;
      ++present;
      best = std::max(best, *cell);
      worst = std::min(worst, *cell);
    }
    if (present == 0) {
      throw EmptyRow("no finished run for instance " + raw.instance_ids[i]);
    }
    auto& srow = out.scaled[i];
    srow.resize(row.size());
    for (size_t a = 0; a < row.size(); ++a) {
      if (!row[a]) {
        srow[a] = -1.0;
      } else if (best == worst) {
        srow[a] = 1.0;  // every algorithm reached the best known score
      } else {
        srow[a] = (*row[a] - worst) / (best - worst);
      }
    }
  }
  return out;
}

CvSplits make_cv_splits(size_t instance_count, int k, uint64_t seed) {
  if (instance_count < static_cast<size_t>(k)) {
    throw TooFewInstances("need at least " + std::to_string(k) + " instances, have " +
                          std::to_string(instance_count));
  }
  std::vector<size_t> idx(instance_count);
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(mix64(seed ^ 0xc0f0ULL));
  rng.shuffle(idx);

  CvSplits splits;
  splits.k = k;
  splits.seed = seed;
  splits.fold.assign(instance_count, 0);
  for (size_t i = 0; i < idx.size(); ++i) {
    splits.fold[idx[i]] = static_cast<int>(i % static_cast<size_t>(k)) + 1;
  }
  return splits;
}

namespace {

std::string cell_key(const std::string& instance_id, const SolverSpec& spec,
                     uint64_t cell_seed) {
  std::ostringstream key;
  key << instance_id << '|' << spec.name << '|' << cell_seed << '|' << spec.budget_ms;
  auto it = spec.params.find("iters");
  if (it != spec.params.end()) key << "|iters=" << format_number(it->second);
  return key.str();
}

struct JournalEntry {
  std::optional<double> z;
};

}  // namespace

PerformanceMatrix run_matrix(const std::vector<MatrixJob>& jobs,
                             const std::vector<SolverSpec>& roster, int workers,
                             const std::string& journal_path) {
  PerformanceMatrix matrix;
  matrix.instance_ids.reserve(jobs.size());
  for (const auto& job : jobs) matrix.instance_ids.push_back(job.instance_id);
  for (const auto& spec : roster) matrix.algorithms.push_back(spec.name);
  matrix.raw.assign(jobs.size(),
                    std::vector<std::optional<double>>(roster.size(), std::nullopt));
  if (!roster.empty()) {
    matrix.budget_ms = roster.front().budget_ms;
    matrix.base_seed = roster.front().seed;
  }

  std::map<std::string, JournalEntry> journal;
  if (!journal_path.empty() && fs::exists(journal_path)) {
    std::ifstream in(journal_path);
    std::string line;
    while (std::getline(in, line)) {
      if (trim(line).empty()) continue;
      auto j = nlohmann::json::parse(line, nullptr, false);
      if (j.is_discarded()) continue;  // torn tail line after an interrupt
      JournalEntry entry;
      if (j.contains("z") && !j["z"].is_null()) entry.z = j["z"].get<double>();
      journal[j["key"].get<std::string>()] = entry;
    }
  }

  std::ofstream journal_out;
  if (!journal_path.empty()) {
    fs::create_directories(fs::path(journal_path).parent_path());
    journal_out.open(journal_path, std::ios::app);
  }
  std::mutex journal_mutex;

  struct Cell {
    size_t instance;
    size_t algo;
  };
  std::vector<Cell> cells;
  for (size_t i = 0; i < jobs.size(); ++i) {
    for (size_t a = 0; a < roster.size(); ++a) cells.push_back({i, a});
  }

  std::atomic<size_t> next{0};
  auto worker = [&]() {
    while (true) {
      const size_t c = next.fetch_add(1);
      if (c >= cells.size()) break;
      const auto [i, a] = cells[c];
      SolverSpec spec = roster[a];
      spec.seed = mix64(spec.seed ^ fnv1a64(jobs[i].instance_id));
      const std::string key = cell_key(jobs[i].instance_id, roster[a], spec.seed);

      {
        std::lock_guard<std::mutex> lock(journal_mutex);
        auto it = journal.find(key);
        if (it != journal.end()) {
          matrix.raw[i][a] = it->second.z;
          continue;
        }
      }

      std::optional<double> z;
      std::string status = "ok";
      int64_t elapsed = 0;
      try {
        SolverResult res = run_solver(spec, jobs[i].instance);
        elapsed = res.elapsed_ms;
        if (res.solution) {
          z = res.solution->objective;
        } else {
          status = "timeout";
        }
      } catch (const std::exception&) {
        status = "crash";
      }
      matrix.raw[i][a] = z;

      if (journal_out.is_open()) {
        nlohmann::json j;
        j["key"] = key;
        j["instance"] = jobs[i].instance_id;
        j["algorithm"] = roster[a].name;
        j["status"] = status;
        j["elapsed_ms"] = elapsed;
        if (z) {
          j["z"] = *z;
        } else {
          j["z"] = nullptr;
        }
        std::lock_guard<std::mutex> lock(journal_mutex);
        journal_out << j.dump() << "\n";
        journal_out.flush();
        journal[key] = JournalEntry{z};
      }
    }
  };

  const int thread_count = std::max(1, workers);
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(thread_count - 1));
  for (int t = 1; t < thread_count; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  return matrix;
}

void write_matrix_csv(const PerformanceMatrix& matrix, const std::string& path) {
  std::ostringstream out;
  out << "instance_id";
  for (const auto& a : matrix.algorithms) out << ',' << a;
  out << "\n";
  for (size_t i = 0; i < matrix.instance_ids.size(); ++i) {
    out << matrix.instance_ids[i];
    for (const auto& cell : matrix.raw[i]) {
      out << ',' << (cell ? format_number(*cell) : "NA");
    }
    out << "\n";
  }
  write_text_file(path, out.str());
}

PerformanceMatrix read_matrix_csv(const std::string& path) {
  std::istringstream in(read_text_file(path));
  std::string line;
  if (!std::getline(in, line)) throw Error("empty matrix csv: " + path);
  auto header = split_csv_line(line);
  if (header.empty() || header[0] != "instance_id") {
    throw Error("bad matrix csv header: " + path);
  }
  PerformanceMatrix matrix;
  matrix.algorithms.assign(header.begin() + 1, header.end());
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    auto cols = split_csv_line(line);
    if (cols.size() != header.size()) throw Error("ragged matrix csv row: " + path);
    matrix.instance_ids.push_back(cols[0]);
    std::vector<std::optional<double>> row;
    for (size_t a = 1; a < cols.size(); ++a) {
      if (cols[a] == "NA") {
        row.push_back(std::nullopt);
      } else {
        auto v = parse_number(cols[a]);
        if (!v) throw Error("bad matrix csv cell: " + cols[a]);
        row.push_back(*v);
      }
    }
    matrix.raw.push_back(std::move(row));
  }
  return matrix;
}

namespace {

void write_scaled_csv(const ScaledMatrix& scaled, const std::string& path) {
  std::ostringstream out;
  out << "instance_id";
  for (const auto& a : scaled.algorithms) out << ',' << a;
  out << "\n";
  for (size_t i = 0; i < scaled.instance_ids.size(); ++i) {
    out << scaled.instance_ids[i];
    for (double v : scaled.scaled[i]) out << ',' << format_number(v);
    out << "\n";
  }
  write_text_file(path, out.str());
}

std::string arff_header(const std::string& relation,
                        const std::vector<std::pair<std::string, std::string>>& attrs) {
  std::ostringstream out;
  out << "@RELATION " << relation << "\n\n";
  for (const auto& [name, type] : attrs) {
    out << "@ATTRIBUTE " << name << ' ' << type << "\n";
  }
  out << "\n@DATA\n";
  return out.str();
}

}  // namespace

void export_scenario(const PerformanceMatrix& matrix, const ScaledMatrix& scaled,
                     const std::vector<FeatureVector>& features, const CvSplits& splits,
                     const std::string& dir, const std::string& scenario_id,
                     const std::string& config_hash) {
  const size_t n = matrix.instance_ids.size();
  if (scaled.instance_ids != matrix.instance_ids || scaled.algorithms != matrix.algorithms ||
      features.size() != n || splits.fold.size() != n) {
    throw InconsistentIds("scenario inputs disagree on instances or algorithms");
  }

  fs::create_directories(dir);
  const auto& feature_names = FeatureVector::catalogue();
  const auto& group_names = FeatureVector::group_names();

  // description
  {
    std::ostringstream out;
    out << "scenario_id: " << scenario_id << "\n";
    out << "performance_measures: score\n";
    out << "maximize: true\n";
    out << "performance_type: solution_quality\n";
    out << "algorithm_cutoff_time: " << format_number(static_cast<double>(matrix.budget_ms) / 1000.0)
        << "\n";
    out << "features_deterministic: true\n";
    out << "number_of_feature_steps: " << group_names.size() << "\n";
    out << "feature_steps:";
    for (const auto& g : group_names) out << ' ' << g;
    out << "\n";
    out << "features:";
    for (const auto& f : feature_names) out << ' ' << f;
    out << "\n";
    out << "algorithms:";
    for (const auto& a : matrix.algorithms) out << ' ' << a;
    out << "\n";
    out << "cv_folds: " << splits.k << "\n";
    out << "tool_version: " << kToolVersion << "\n";
    if (!config_hash.empty()) out << "config_hash: " << config_hash << "\n";
    write_text_file((fs::path(dir) / "description.txt").string(), out.str());
  }

  // algorithm runs (raw scores; unsolved cells get the not-solved status)
  {
    std::ostringstream out;
    out << arff_header("ALGORITHM_RUNS", {{"instance_id", "STRING"},
                                          {"repetition", "NUMERIC"},
                                          {"algorithm", "STRING"},
                                          {"score", "NUMERIC"},
                                          {"runstatus", "{ok,timeout}"}});
    for (size_t i = 0; i < n; ++i) {
      for (size_t a = 0; a < matrix.algorithms.size(); ++a) {
        const auto& cell = matrix.raw[i][a];
        out << matrix.instance_ids[i] << ",1," << matrix.algorithms[a] << ','
            << (cell ? format_number(*cell) : "?") << ','
            << (cell ? "ok" : "timeout") << "\n";
      }
    }
    write_text_file((fs::path(dir) / "algorithm_runs.arff").string(), out.str());
  }

  // feature values
  {
    std::ostringstream arff;
    std::vector<std::pair<std::string, std::string>> attrs = {{"instance_id", "STRING"},
                                                              {"repetition", "NUMERIC"}};
    for (const auto& f : feature_names) attrs.emplace_back(f, "NUMERIC");
    arff << arff_header("FEATURE_VALUES", attrs);

    std::ostringstream csv;
    csv << "instance_id";
    for (const auto& f : feature_names) csv << ',' << f;
    csv << "\n";
    for (size_t i = 0; i < n; ++i) {
      arff << matrix.instance_ids[i] << ",1";
      csv << matrix.instance_ids[i];
      for (double v : features[i].values) {
        arff << ',' << format_number(v);
        csv << ',' << format_number(v);
      }
      arff << "\n";
      csv << "\n";
    }
    write_text_file((fs::path(dir) / "feature_values.arff").string(), arff.str());
    write_text_file((fs::path(dir) / "feature_values.csv").string(), csv.str());
  }

  // feature costs per extraction group
  {
    std::ostringstream arff;
    std::vector<std::pair<std::string, std::string>> attrs = {{"instance_id", "STRING"},
                                                              {"repetition", "NUMERIC"}};
    for (const auto& g : group_names) attrs.emplace_back(g, "NUMERIC");
    arff << arff_header("FEATURE_COSTS", attrs);

    std::ostringstream csv;
    csv << "instance_id";
    for (const auto& g : group_names) csv << ',' << g;
    csv << "\n";
    for (size_t i = 0; i < n; ++i) {
      arff << matrix.instance_ids[i] << ",1";
      csv << matrix.instance_ids[i];
      std::map<std::string, double> ms(features[i].group_ms.begin(),
                                       features[i].group_ms.end());
      for (const auto& g : group_names) {
        const double v = ms.count(g) ? ms[g] : 0.0;
        arff << ',' << format_number(v);
        csv << ',' << format_number(v);
      }
      arff << "\n";
      csv << "\n";
    }
    write_text_file((fs::path(dir) / "feature_costs.arff").string(), arff.str());
    write_text_file((fs::path(dir) / "feature_costs.csv").string(), csv.str());
  }

  // cv folds
  {
    std::ostringstream arff;
    arff << arff_header("CV", {{"instance_id", "STRING"},
                               {"repetition", "NUMERIC"},
                               {"fold", "NUMERIC"}});
    std::ostringstream csv;
    csv << "instance_id,fold\n";
    for (size_t i = 0; i < n; ++i) {
      arff << matrix.instance_ids[i] << ",1," << splits.fold[i] << "\n";
      csv << matrix.instance_ids[i] << ',' << splits.fold[i] << "\n";
    }
    write_text_file((fs::path(dir) / "cv.arff").string(), arff.str());
    write_text_file((fs::path(dir) / "cv.csv").string(), csv.str());
  }

  write_matrix_csv(matrix, (fs::path(dir) / "matrix_raw.csv").string());
  write_scaled_csv(scaled, (fs::path(dir) / "matrix_scaled.csv").string());

  // machine-readable metadata
  {
    nlohmann::json meta;
    meta["scenario_id"] = scenario_id;
    meta["tool_version"] = kToolVersion;
    meta["budget_ms"] = matrix.budget_ms;
    meta["base_seed"] = matrix.base_seed;
    meta["cv_seed"] = splits.seed;
    meta["cv_folds"] = splits.k;
    meta["mst_depth_root"] = "city 1";
    if (!config_hash.empty()) meta["config_hash"] = config_hash;
    bool approx = false;
    for (const auto& f : features) approx = approx || f.approximate_distances;
    meta["approximate_distance_features"] = approx;
    write_text_file((fs::path(dir) / "meta.json").string(), meta.dump(2) + "\n");
  }
}

Scenario load_scenario(const std::string& dir) {
  Scenario s;
  s.matrix = read_matrix_csv((fs::path(dir) / "matrix_raw.csv").string());

  // scaled matrix
  {
    std::istringstream in(read_text_file((fs::path(dir) / "matrix_scaled.csv").string()));
    std::string line;
    std::getline(in, line);
    auto header = split_csv_line(line);
    s.scaled.algorithms.assign(header.begin() + 1, header.end());
    while (std::getline(in, line)) {
      if (trim(line).empty()) continue;
      auto cols = split_csv_line(line);
      s.scaled.instance_ids.push_back(cols[0]);
      std::vector<double> row;
      for (size_t a = 1; a < cols.size(); ++a) row.push_back(*parse_number(cols[a]));
      s.scaled.scaled.push_back(std::move(row));
    }
  }

  auto read_table = [](const std::string& path, std::vector<std::string>* names,
                       std::vector<std::vector<double>>* rows,
                       std::vector<std::string>* ids) {
    std::istringstream in(read_text_file(path));
    std::string line;
    std::getline(in, line);
    auto header = split_csv_line(line);
    names->assign(header.begin() + 1, header.end());
    while (std::getline(in, line)) {
      if (trim(line).empty()) continue;
      auto cols = split_csv_line(line);
      ids->push_back(cols[0]);
      std::vector<double> row;
      for (size_t c = 1; c < cols.size(); ++c) {
        auto v = parse_number(cols[c]);
        row.push_back(v ? *v : std::numeric_limits<double>::quiet_NaN());
      }
      rows->push_back(std::move(row));
    }
  };

  std::vector<std::string> ids;
  read_table((fs::path(dir) / "feature_values.csv").string(), &s.feature_names,
             &s.feature_values, &ids);
  if (ids != s.matrix.instance_ids) throw InconsistentIds("feature table ids differ");

  ids.clear();
  read_table((fs::path(dir) / "feature_costs.csv").string(), &s.cost_group_names,
             &s.feature_costs_ms, &ids);

  // cv
  {
    std::istringstream in(read_text_file((fs::path(dir) / "cv.csv").string()));
    std::string line;
    std::getline(in, line);
    int max_fold = 0;
    while (std::getline(in, line)) {
      if (trim(line).empty()) continue;
      auto cols = split_csv_line(line);
      const int fold = static_cast<int>(*parse_integer(cols[1]));
      s.splits.fold.push_back(fold);
      max_fold = std::max(max_fold, fold);
    }
    s.splits.k = max_fold;
  }
  return s;
}

}  // namespace ttp
