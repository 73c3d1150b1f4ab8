#pragma once

#include <cstddef>

namespace qgdiff {

struct SolverConfig {
  double tol = 1e-10;        // relative sup-norm residual tolerance
  double match_tol = 1e-8;   // endpoint matching tolerance for shooting and gluing
  int max_doublings = 60;    // bracket expansions in flux shooting
  int max_newton = 60;       // Newton iterations per continuation stage
  int max_backtracks = 30;
  double armijo = 1e-4;
  int picard_iterations = 50;
  double eps_start = 1e-2;   // continuation schedule, geometric
  double eps_end = 1e-10;
  double eps_factor = 0.1;
  double jacobian_floor = 1e-10;  // regularization used in the Jacobian of the exact model
  bool try_direct = true;         // attempt the exact model before continuation
  std::size_t cells_default = 64;
};

}  // namespace qgdiff
