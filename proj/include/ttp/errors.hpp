#pragma once

#include <stdexcept>
#include <string>

namespace ttp {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseError : Error {
  using Error::Error;
};

struct MissingHeader : ParseError {
  explicit MissingHeader(const std::string& key)
      : ParseError("missing header: " + key), key(key) {}
  std::string key;
};

struct MalformedLine : ParseError {
  MalformedLine(int lineno, const std::string& what)
      : ParseError("line " + std::to_string(lineno) + ": " + what),
        lineno(lineno) {}
  int lineno;
};

struct InvariantViolation : Error {
  using Error::Error;
};

struct InvalidParams : Error {
  using Error::Error;
};

struct IndexOutOfRange : Error {
  using Error::Error;
};

struct InvalidTour : Error {
  using Error::Error;
};

struct CapacityExceeded : Error {
  CapacityExceeded(double total_weight, double capacity)
      : Error("packing weight " + std::to_string(total_weight) +
              " exceeds capacity " + std::to_string(capacity)),
        total_weight(total_weight),
        capacity(capacity) {}
  double total_weight;
  double capacity;
};

struct UnknownSolver : Error {
  using Error::Error;
};

struct DegenerateGeometry : Error {
  using Error::Error;
};

struct EmptyRow : Error {
  using Error::Error;
};

struct TooFewInstances : Error {
  using Error::Error;
};

struct InconsistentIds : Error {
  using Error::Error;
};

struct UnknownFeature : Error {
  using Error::Error;
};

struct UnknownAlgorithm : Error {
  using Error::Error;
};

}  // namespace ttp
