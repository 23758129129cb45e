#pragma once

#include <stdexcept>
#include <string>

namespace cmg {

// Raised when evaluation hits a guarded degeneracy: division by a value
// below the guard threshold, a singular metric, or an admissibility bound.
class DomainError : public std::runtime_error {
 public:
  explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

class SingularMetricError : public DomainError {
 public:
  explicit SingularMetricError(const std::string& what) : DomainError(what) {}
};

// Expression text rejected by the parser; position is a 0-based offset
// into the input string.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : std::runtime_error(what + " (at position " + std::to_string(position) + ")"),
        position_(position) {}
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

// Structure-level contract violation: malformed definition file, supplied
// and derived Reeb fields disagreeing, deformation preconditions.
class StructureError : public std::runtime_error {
 public:
  explicit StructureError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace cmg
