#ifndef RACKPLAN_ERROR_HPP
#define RACKPLAN_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace rackplan {

enum class ErrorCode {
  validation_error,
  region_too_small,
  unknown_class,
  unknown_object,
  precondition_violated,
  unresolved_relational_goal,
  empty_state,
  syntax_error,
  unknown_key,
  no_match,
  not_an_object_designator,
  not_a_location_designator,
  unresolvable_inner_object,
  unsatisfiable_relations,
  io_error,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::validation_error: return "validation-error";
    case ErrorCode::region_too_small: return "region-too-small";
    case ErrorCode::unknown_class: return "unknown-class";
    case ErrorCode::unknown_object: return "unknown-object";
    case ErrorCode::precondition_violated: return "precondition-violated";
    case ErrorCode::unresolved_relational_goal: return "unresolved-relational-goal";
    case ErrorCode::empty_state: return "empty-state";
    case ErrorCode::syntax_error: return "syntax-error";
    case ErrorCode::unknown_key: return "unknown-key";
    case ErrorCode::no_match: return "no-match";
    case ErrorCode::not_an_object_designator: return "not-an-object-designator";
    case ErrorCode::not_a_location_designator: return "not-a-location-designator";
    case ErrorCode::unresolvable_inner_object: return "unresolvable-inner-object";
    case ErrorCode::unsatisfiable_relations: return "unsatisfiable-relations";
    case ErrorCode::io_error: return "io-error";
  }
  return "unknown";
}

/// Base exception for every failure reported by the library. The code is
/// stable and machine-readable; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Raised by the s-expression reader. Line and column are 1-based.
class SyntaxError : public Error {
 public:
  SyntaxError(int line, int column, std::vector<std::string> expected, const std::string& detail)
      : Error(ErrorCode::syntax_error, format(line, column, expected, detail)),
        line_(line),
        column_(column),
        expected_(std::move(expected)) {}

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }
  const std::vector<std::string>& expected() const noexcept { return expected_; }

 private:
  static std::string format(int line, int column, const std::vector<std::string>& expected,
                            const std::string& detail) {
    std::string out = std::to_string(line) + ":" + std::to_string(column) + ": " + detail;
    if (!expected.empty()) {
      out += " (expected ";
      for (std::size_t i = 0; i < expected.size(); ++i) {
        if (i) out += " | ";
        out += expected[i];
      }
      out += ")";
    }
    return out;
  }

  int line_;
  int column_;
  std::vector<std::string> expected_;
};

/// Raised when two relational constraints cannot hold together. Indices
/// refer to the relation list of the goal; first == second when a single
/// relation is unsatisfiable on its own.
class UnsatisfiableRelations : public Error {
 public:
  UnsatisfiableRelations(std::size_t first, std::size_t second, const std::string& detail)
      : Error(ErrorCode::unsatisfiable_relations, detail), first_(first), second_(second) {}

  std::size_t first() const noexcept { return first_; }
  std::size_t second() const noexcept { return second_; }

 private:
  std::size_t first_;
  std::size_t second_;
};

}  // namespace rackplan

#endif  // RACKPLAN_ERROR_HPP
