#pragma once

#include <span>
#include <utility>
#include <vector>

#include "qgdiff/nonlinearity.hpp"
#include "qgdiff/solver_config.hpp"

namespace qgdiff {

/// alpha*gamma(u) - (rho_p(u'))' = g on (0, length) with
/// -rho_p(u')(0) = a and rho_p(u')(length) = b.
struct EdgeBVP {
  double length = 1.0;
  double p = 2.0;
  Nonlinearity gamma;
  std::vector<double> g;  // nodal load, cells + 1 values
  double a = 0.0;
  double b = 0.0;
  double alpha = 1.0;

  std::size_t cells() const { return g.empty() ? 0 : g.size() - 1; }
  double h() const { return length / static_cast<double>(cells()); }
};

struct EdgeSolution {
  std::vector<double> u;
  std::vector<double> v;  // gamma(u)
  std::vector<double> z;  // rho_p(u') on each cell
  double residual_sup = 0.0;
  double residual_scale = 1.0;
  int newton_iters = 0;
  int continuation_steps = 0;
};

struct Tridiagonal {
  std::vector<double> lower;  // lower[j] couples row j to j-1, lower[0] unused
  std::vector<double> diag;
  std::vector<double> upper;  // upper[j] couples row j to j+1, upper[N] unused
};

/// Lumped P1 residual; eps > 0 evaluates the regularized model.
std::vector<double> assemble_edge_residual(const EdgeBVP& bvp, std::span<const double> u,
                                           double eps = 0.0);
Tridiagonal assemble_edge_jacobian(const EdgeBVP& bvp, std::span<const double> u, double eps = 0.0);
/// Scale of the relative residual test for iterate u.
double edge_residual_scale(const EdgeBVP& bvp, std::span<const double> u);

/// Solves a tridiagonal system in place (Thomas algorithm); returns false on a zero pivot.
bool solve_tridiagonal(Tridiagonal m, std::vector<double>& rhs);

/// `warm` (optional) replaces the default constant initial iterate.
EdgeSolution solve_edge_bvp(const EdgeBVP& bvp, const SolverConfig& cfg = {},
                            const std::vector<double>* warm = nullptr);

/// |alpha int gamma(u) - int g - a - b| for a solved edge.
double edge_mass_gap(const EdgeBVP& bvp, const EdgeSolution& sol);

/// (u(0), u(length)) of the solved problem.
std::pair<double, double> endpoint_map(const EdgeBVP& bvp, const SolverConfig& cfg = {});

enum class Side { Left, Right };

/// Flux perturbation eps (added to a for Left, to b for Right) that moves the
/// endpoint value on that side to `target`.
double flux_shoot(const EdgeBVP& bvp, Side side, double target, const SolverConfig& cfg = {});

/// Root of the increasing function f - target. Expands [lo, hi] by doubling, then
/// runs Brent's method. Stops when |f - target| <= ftol
/// or the bracket is shorter than xtol.
template <class F>
double solve_increasing(F&& f, double target, double lo, double hi, double ftol, double xtol,
                        int max_doublings);

}  // namespace qgdiff

#include "qgdiff/detail/root_finding.hpp"
