#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace powerlab {

enum class ErrorKind {
  invalid_argument,
  disjointness_violation,
  empty_set,
  invalid_alpha,
  exhausted,
  too_short,
  endpoint_mismatch,
  overlap_violation,
  length_mismatch,
  not_permutation,
  too_large,
  invalid_endpoint,
  wrong_construction,
  range_violation,
  no_common_neighbor_class,
  not_absorbable,
  infeasible_params,
  parse_error,
  invalid_path,
  io_error,
  not_found,
  budget_exceeded,
  precondition_failed,
};

std::string_view to_string(ErrorKind kind);

// Every precondition failure in the library surfaces as this type; callers
// dispatch on kind(). Search outcomes (not found, budget exceeded) are
// verdicts, not errors.
class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string &what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

class ParseError : public Error {
public:
  ParseError(std::size_t line, const std::string &what)
      : Error(ErrorKind::parse_error,
              "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

} // namespace powerlab
