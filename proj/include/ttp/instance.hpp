#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ttp/errors.hpp"

namespace ttp {

enum class EdgeWeightKind { CeilEuclidean2D, Euclidean2D };
enum class KpType { Uncorrelated, UncorrelatedSimilarWeights, BoundedStronglyCorrelated };

// Benchmark-file spellings ("CEIL_2D", "bounded strongly corr", ...).
const char* to_string(EdgeWeightKind kind);
const char* to_string(KpType type);
int kp_type_code(KpType type);  // ordinal encoding 0/1/2

struct Point {
  double x = 0;
  double y = 0;
};

struct Item {
  int id = 0;         // 1-based, contiguous within the instance
  int city = 0;       // in [2, dimension]; the first city holds no items
  double profit = 0;  // > 0
  double weight = 0;  // > 0
};

struct TtpInstance {
  std::string name;
  int dimension = 0;  // number of cities, >= 2
  std::vector<Point> coords;
  EdgeWeightKind edge_weight_kind = EdgeWeightKind::CeilEuclidean2D;
  std::vector<Item> items;  // sorted by id
  double capacity = 0;
  double min_speed = 0;
  double max_speed = 0;
  double renting_rate = 0;
  KpType kp_type = KpType::Uncorrelated;

  int num_cities() const { return dimension; }
  int num_items() const { return static_cast<int>(items.size()); }

  // Speed decay per unit of carried weight.
  double nu() const { return (max_speed - min_speed) / capacity; }

  double total_item_weight() const;

  // 1-based city indices; throws IndexOutOfRange.
  double distance(int i, int j) const;

  // Throws InvariantViolation with a description of the first failure.
  void check_invariants() const;
};

// city (1-based) -> indices into inst.items (0-based)
std::vector<std::vector<int>> items_by_city(const TtpInstance& inst);

TtpInstance parse_instance(std::istream& in);
TtpInstance parse_instance_text(const std::string& text);
TtpInstance parse_instance_file(const std::string& path);

void write_instance(const TtpInstance& inst, std::ostream& out);
std::string write_instance_text(const TtpInstance& inst);
void write_instance_file(const TtpInstance& inst, const std::string& path);

struct GeneratorParams {
  int n_cities = 0;
  int item_factor = 1;  // items per city, in {1, 3, 5, 10}
  KpType kp_type = KpType::Uncorrelated;
  int capacity_class = 1;  // in [1, 10]
  double coord_range = 1000.0;
  uint64_t seed = 0;
  EdgeWeightKind edge_weight_kind = EdgeWeightKind::CeilEuclidean2D;
};

// The reference solution scores exactly zero; it fixes the renting rate.
struct GeneratedInstance {
  TtpInstance instance;
  std::vector<int> reference_tour;        // city ids, starts at 1
  std::vector<uint8_t> reference_plan;    // bit per item index
};

GeneratedInstance generate_instance(const GeneratorParams& params);

}  // namespace ttp
