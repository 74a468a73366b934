#include "ttp/instance.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "ttp/io_util.hpp"

namespace ttp {

const char* to_string(EdgeWeightKind kind) {
  switch (kind) {
    case EdgeWeightKind::CeilEuclidean2D: return "CEIL_2D";
    case EdgeWeightKind::Euclidean2D: return "EUC_2D";
  }
  return "CEIL_2D";
}

const char* to_string(KpType type) {
  switch (type) {
    case KpType::Uncorrelated: return "uncorrelated";
    case KpType::UncorrelatedSimilarWeights: return "uncorrelated, similar weights";
    case KpType::BoundedStronglyCorrelated: return "bounded strongly corr";
  }
  return "uncorrelated";
}

int kp_type_code(KpType type) {
  switch (type) {
    case KpType::Uncorrelated: return 0;
    case KpType::UncorrelatedSimilarWeights: return 1;
    case KpType::BoundedStronglyCorrelated: return 2;
  }
  return 0;
}

double TtpInstance::total_item_weight() const {
  double total = 0;
  for (const Item& it : items) total += it.weight;
  return total;
}

double TtpInstance::distance(int i, int j) const {
  if (i < 1 || i > dimension || j < 1 || j > dimension) {
    throw IndexOutOfRange("city index out of range: " + std::to_string(i) +
                          ", " + std::to_string(j));
  }
  const Point& a = coords[static_cast<size_t>(i) - 1];
  const Point& b = coords[static_cast<size_t>(j) - 1];
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  const double e = std::sqrt(dx * dx + dy * dy);
  return edge_weight_kind == EdgeWeightKind::CeilEuclidean2D ? std::ceil(e) : e;
}

void TtpInstance::check_invariants() const {
  if (dimension < 2) throw InvariantViolation("dimension must be >= 2");
  if (coords.size() != static_cast<size_t>(dimension)) {
    throw InvariantViolation("coordinate count does not match dimension");
  }
  if (!(min_speed > 0)) throw InvariantViolation("min speed must be positive");
  if (!(min_speed < max_speed)) {
    throw InvariantViolation("min speed must be below max speed");
  }
  if (!(renting_rate >= 0)) throw InvariantViolation("renting rate must be nonnegative");
  for (size_t k = 0; k < items.size(); ++k) {
    const Item& it = items[k];
    if (it.id != static_cast<int>(k) + 1) {
      throw InvariantViolation("item ids must be contiguous starting at 1");
    }
    if (it.city < 2 || it.city > dimension) {
      throw InvariantViolation("item " + std::to_string(it.id) +
                               " assigned to invalid city " + std::to_string(it.city));
    }
    if (!(it.profit > 0)) {
      throw InvariantViolation("item " + std::to_string(it.id) + " has nonpositive profit");
    }
    if (!(it.weight > 0)) {
      throw InvariantViolation("item " + std::to_string(it.id) + " has nonpositive weight");
    }
  }
  if (!(capacity > 0)) throw InvariantViolation("capacity must be positive");
  if (!(capacity < total_item_weight())) {
    throw InvariantViolation("capacity " + format_number(capacity) +
                             " must be below total item weight " +
                             format_number(total_item_weight()));
  }
}

std::vector<std::vector<int>> items_by_city(const TtpInstance& inst) {
  std::vector<std::vector<int>> by_city(static_cast<size_t>(inst.dimension) + 1);
  for (size_t k = 0; k < inst.items.size(); ++k) {
    by_city[static_cast<size_t>(inst.items[k].city)].push_back(static_cast<int>(k));
  }
  return by_city;
}

namespace {

KpType parse_kp_type(std::string value, int lineno) {
  std::transform(value.begin(), value.end(), value.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (value.find("similar") != std::string::npos) return KpType::UncorrelatedSimilarWeights;
  if (value.find("strongly") != std::string::npos) return KpType::BoundedStronglyCorrelated;
  if (value.find("uncorr") != std::string::npos) return KpType::Uncorrelated;
  throw MalformedLine(lineno, "unknown knapsack data type: " + value);
}

EdgeWeightKind parse_edge_weight_kind(const std::string& value, int lineno) {
  if (value == "CEIL_2D") return EdgeWeightKind::CeilEuclidean2D;
  if (value == "EUC_2D") return EdgeWeightKind::Euclidean2D;
  throw MalformedLine(lineno, "unsupported edge weight type: " + value);
}

double require_number(const std::string& value, int lineno) {
  auto v = parse_number(trim(value));
  if (!v) throw MalformedLine(lineno, "expected a number, got '" + value + "'");
  return *v;
}

long long require_integer(const std::string& value, int lineno) {
  auto v = parse_integer(trim(value));
  if (!v) throw MalformedLine(lineno, "expected an integer, got '" + value + "'");
  return *v;
}

}  // namespace

TtpInstance parse_instance(std::istream& in) {
  TtpInstance inst;
  bool have_dimension = false, have_items = false, have_capacity = false;
  bool have_min_speed = false, have_max_speed = false, have_renting = false;
  long long declared_items = 0;

  std::string line;
  int lineno = 0;
  enum class Section { Header, Coords, Items } section = Section::Header;
  std::vector<bool> coord_seen;
  std::vector<bool> item_seen;
  size_t coords_read = 0, items_read = 0;

  while (std::getline(in, line)) {
    ++lineno;
    std::string_view stripped = trim(line);
    if (stripped.empty()) continue;

    if (section == Section::Header) {
      if (stripped.rfind("NODE_COORD_SECTION", 0) == 0) {
        if (!have_dimension) throw MissingHeader("DIMENSION");
        inst.coords.assign(static_cast<size_t>(inst.dimension), Point{});
        coord_seen.assign(static_cast<size_t>(inst.dimension), false);
        section = Section::Coords;
        continue;
      }
      if (stripped.rfind("ITEMS SECTION", 0) == 0) {
        throw MalformedLine(lineno, "ITEMS SECTION before NODE_COORD_SECTION");
      }
      size_t colon = line.find(':');
      if (colon == std::string::npos) {
        throw MalformedLine(lineno, "expected 'KEY: value' header line");
      }
      std::string key(trim(line.substr(0, colon)));
      std::string value(trim(line.substr(colon + 1)));
      if (key == "PROBLEM NAME") {
        inst.name = value;
      } else if (key == "KNAPSACK DATA TYPE") {
        inst.kp_type = parse_kp_type(value, lineno);
      } else if (key == "DIMENSION") {
        long long d = require_integer(value, lineno);
        if (d < 0 || d > 10'000'000) throw MalformedLine(lineno, "bad dimension");
        inst.dimension = static_cast<int>(d);
        have_dimension = true;
      } else if (key == "NUMBER OF ITEMS") {
        declared_items = require_integer(value, lineno);
        if (declared_items < 0) throw MalformedLine(lineno, "negative item count");
        have_items = true;
      } else if (key == "CAPACITY OF KNAPSACK") {
        inst.capacity = require_number(value, lineno);
        have_capacity = true;
      } else if (key == "MIN SPEED") {
        inst.min_speed = require_number(value, lineno);
        have_min_speed = true;
      } else if (key == "MAX SPEED") {
        inst.max_speed = require_number(value, lineno);
        have_max_speed = true;
      } else if (key == "RENTING RATIO") {
        inst.renting_rate = require_number(value, lineno);
        have_renting = true;
      } else if (key == "EDGE_WEIGHT_TYPE") {
        inst.edge_weight_kind = parse_edge_weight_kind(value, lineno);
      } else if (key == "COMMENT" || key == "TYPE") {
        // tolerated TSPLIB leftovers
      } else {
        throw MalformedLine(lineno, "unknown header key: " + key);
      }
      continue;
    }

    if (section == Section::Coords) {
      if (stripped.rfind("ITEMS SECTION", 0) == 0) {
        if (coords_read != static_cast<size_t>(inst.dimension)) {
          throw MalformedLine(lineno, "NODE_COORD_SECTION has " +
                                          std::to_string(coords_read) + " rows, expected " +
                                          std::to_string(inst.dimension));
        }
        if (!have_items) throw MissingHeader("NUMBER OF ITEMS");
        inst.items.assign(static_cast<size_t>(declared_items), Item{});
        item_seen.assign(static_cast<size_t>(declared_items), false);
        section = Section::Items;
        continue;
      }
      auto tokens = split_ws(stripped);
      if (tokens.size() != 3) throw MalformedLine(lineno, "expected 'id x y'");
      auto id = parse_integer(tokens[0]);
      auto x = parse_number(tokens[1]);
      auto y = parse_number(tokens[2]);
      if (!id || !x || !y) throw MalformedLine(lineno, "bad coordinate row");
      if (*id < 1 || *id > inst.dimension) {
        throw MalformedLine(lineno, "coordinate id out of range");
      }
      size_t idx = static_cast<size_t>(*id) - 1;
      if (coord_seen[idx]) throw MalformedLine(lineno, "duplicate coordinate id");
      coord_seen[idx] = true;
      inst.coords[idx] = Point{*x, *y};
      ++coords_read;
      continue;
    }

    // Section::Items
    auto tokens = split_ws(stripped);
    if (tokens.size() != 4) throw MalformedLine(lineno, "expected 'id profit weight city'");
    auto id = parse_integer(tokens[0]);
    auto profit = parse_number(tokens[1]);
    auto weight = parse_number(tokens[2]);
    auto city = parse_integer(tokens[3]);
    if (!id || !profit || !weight || !city) throw MalformedLine(lineno, "bad item row");
    if (*id < 1 || *id > declared_items) throw MalformedLine(lineno, "item id out of range");
    size_t idx = static_cast<size_t>(*id) - 1;
    if (item_seen[idx]) throw MalformedLine(lineno, "duplicate item id");
    item_seen[idx] = true;
    inst.items[idx] = Item{static_cast<int>(*id), static_cast<int>(*city), *profit, *weight};
    ++items_read;
  }

  if (!have_dimension) throw MissingHeader("DIMENSION");
  if (!have_items) throw MissingHeader("NUMBER OF ITEMS");
  if (!have_capacity) throw MissingHeader("CAPACITY OF KNAPSACK");
  if (!have_min_speed) throw MissingHeader("MIN SPEED");
  if (!have_max_speed) throw MissingHeader("MAX SPEED");
  if (!have_renting) throw MissingHeader("RENTING RATIO");
  if (section == Section::Header) throw MissingHeader("NODE_COORD_SECTION");
  if (section == Section::Coords) throw MissingHeader("ITEMS SECTION");
  if (items_read != static_cast<size_t>(declared_items)) {
    throw InvariantViolation("ITEMS SECTION has " + std::to_string(items_read) +
                             " rows, header declares " + std::to_string(declared_items));
  }

  inst.check_invariants();
  return inst;
}

TtpInstance parse_instance_text(const std::string& text) {
  std::istringstream in(text);
  return parse_instance(in);
}

TtpInstance parse_instance_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open instance file: " + path);
  return parse_instance(in);
}

void write_instance(const TtpInstance& inst, std::ostream& out) {
  out << "PROBLEM NAME: " << inst.name << "\n";
  out << "KNAPSACK DATA TYPE: " << to_string(inst.kp_type) << "\n";
  out << "DIMENSION: " << inst.dimension << "\n";
  out << "NUMBER OF ITEMS: " << inst.items.size() << "\n";
  out << "CAPACITY OF KNAPSACK: " << format_number(inst.capacity) << "\n";
  out << "MIN SPEED: " << format_number(inst.min_speed) << "\n";
  out << "MAX SPEED: " << format_number(inst.max_speed) << "\n";
  out << "RENTING RATIO: " << format_number(inst.renting_rate) << "\n";
  out << "EDGE_WEIGHT_TYPE: " << to_string(inst.edge_weight_kind) << "\n";
  out << "NODE_COORD_SECTION\t(INDEX, X, Y):\n";
  for (int i = 0; i < inst.dimension; ++i) {
    const Point& p = inst.coords[static_cast<size_t>(i)];
    out << (i + 1) << ' ' << format_number(p.x) << ' ' << format_number(p.y) << "\n";
  }
  out << "ITEMS SECTION\t(INDEX, PROFIT, WEIGHT, ASSIGNED NODE NUMBER):\n";
  for (const Item& it : inst.items) {
    out << it.id << ' ' << format_number(it.profit) << ' ' << format_number(it.weight)
        << ' ' << it.city << "\n";
  }
}

std::string write_instance_text(const TtpInstance& inst) {
  std::ostringstream out;
  write_instance(inst, out);
  return out.str();
}

void write_instance_file(const TtpInstance& inst, const std::string& path) {
  write_text_file(path, write_instance_text(inst));
}

}  // namespace ttp
