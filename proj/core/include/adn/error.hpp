#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace adn {

enum class ErrorCode {
  index_out_of_range,
  duplicate_entry,
  invalid_k,
  length_mismatch,
  coordinate_outside_part,
  unsupported_conjugate,
  inconsistent_shared_vector,
  infinite_conjugate,
  inconsistent_snapshots,
  non_positive_curvature,
  degenerate_subproblem,
  missing_constant,
  invalid_input,
  invalid_budget,
  non_finite_value,
  config_error,
  malformed_message,
  parse_error,
  empty_dataset,
  invalid_spec,
};

std::string_view to_string(ErrorCode code) noexcept;

/// All library failures are reported with this exception; `code()` lets
/// callers branch without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Raised by the LIBSVM reader; carries the 1-based line number.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error(ErrorCode::parse_error, "line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace adn
