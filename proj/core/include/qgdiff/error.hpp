#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qgdiff {

enum class Errc {
  // graph construction and queries
  LoopEdge,
  DuplicateEdge,
  Disconnected,
  NonPositiveLength,
  ExponentOutOfRange,
  DanglingReference,
  UnknownVertex,
  UnknownEdge,
  FractionOutOfRange,
  // grid functions
  NotIncident,
  GridMismatch,
  EmptyKGrid,
  TraceMismatch,
  // nonlinearity
  InvalidNonlinearity,
  // expressions
  SyntaxError,
  UnknownIdentifier,
  ArityMismatch,
  DomainError,
  // solvers
  ShapeMismatch,
  NewtonDiverged,
  BracketNotFound,
  InitialDatumNotFinite,
  NotLinearCase,
  // io
  GraphHashMismatch,
  Schema,
  Io,
};

std::string_view to_string(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

/// Parse and evaluation failures carry a byte span into the source text.
class ExprError : public Error {
 public:
  ExprError(Errc code, const std::string& what, std::size_t offset, std::size_t end,
            std::vector<std::string> expected = {})
      : Error(code, what), offset_(offset), end_(end), expected_(std::move(expected)) {}

  std::size_t offset() const noexcept { return offset_; }
  std::size_t end() const noexcept { return end_; }
  const std::vector<std::string>& expected() const noexcept { return expected_; }

 private:
  std::size_t offset_;
  std::size_t end_;
  std::vector<std::string> expected_;
};

/// Newton failure after continuation and Picard fallback are exhausted.
class SolverError : public Error {
 public:
  SolverError(Errc code, const std::string& what, std::vector<double> best_iterate = {},
              std::vector<double> residual_history = {}, long step_index = -1)
      : Error(code, what),
        best_iterate_(std::move(best_iterate)),
        residual_history_(std::move(residual_history)),
        step_index_(step_index) {}

  const std::vector<double>& best_iterate() const noexcept { return best_iterate_; }
  const std::vector<double>& residual_history() const noexcept { return residual_history_; }
  long step_index() const noexcept { return step_index_; }

 private:
  std::vector<double> best_iterate_;
  std::vector<double> residual_history_;
  long step_index_;
};

}  // namespace qgdiff
