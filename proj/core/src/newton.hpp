#pragma once

#include <span>
#include <vector>

#include "qgdiff/solver_config.hpp"

namespace qgdiff::detail {

enum class StepKind { Newton, Picard };

/// Nonlinear algebraic system F_eps(u) = 0 with eps = 0 the exact model.
class DiscreteSystem {
 public:
  virtual ~DiscreteSystem() = default;
  virtual std::size_t size() const = 0;
  /// Fills r and returns the scale used for the relative test.
  virtual double residual(std::span<const double> u, double eps, std::vector<double>& r) = 0;
  /// Solves J d = -r with J the Jacobian (or secant matrix) at regularization eps.
  virtual bool step(std::span<const double> u, double eps, StepKind kind, const std::vector<double>& r,
                    std::vector<double>& d) = 0;
};

struct NewtonStats {
  int newton_iterations = 0;
  int continuation_steps = 0;
  double residual_sup = 0.0;
  double scale = 1.0;
  std::vector<double> history;  // relative sup residual after each accepted step
};

/// Damped Newton with eps-continuation and Picard fallback. On return u solves
/// the exact model to cfg.tol (relative); otherwise throws SolverError.
NewtonStats solve_system(DiscreteSystem& sys, std::vector<double>& u, const SolverConfig& cfg);

double sup_norm(const std::vector<double>& r);

}  // namespace qgdiff::detail
