#include "qgdiff/edge_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "newton.hpp"
#include "qgdiff/error.hpp"

namespace qgdiff {
namespace {

constexpr double kSlopeCap = 1e12;

double clamp_slope(double s) {
  if (!std::isfinite(s) || s > kSlopeCap) return kSlopeCap;
  return std::max(s, 0.0);
}

double mass(const EdgeBVP& bvp, std::size_t j) {
  const std::size_t n = bvp.cells();
  return (j == 0 || j == n) ? 0.5 * bvp.h() : bvp.h();
}

void check_shape(const EdgeBVP& bvp, std::size_t n) {
  if (bvp.g.size() < 3) throw Error(Errc::ShapeMismatch, "edge problem needs at least 2 cells");
  if (n != bvp.g.size()) {
    throw Error(Errc::ShapeMismatch, "iterate has " + std::to_string(n) + " values, expected " +
                                         std::to_string(bvp.g.size()));
  }
}

void fill_residual(const EdgeBVP& bvp, std::span<const double> u, double eps, std::vector<double>& r) {
  const std::size_t n = bvp.cells();
  const double h = bvp.h();
  const FluxLaw law{bvp.p, eps};
  r.assign(n + 1, 0.0);
  for (std::size_t j = 0; j <= n; ++j) {
    const double m = mass(bvp, j);
    r[j] = m * (bvp.alpha * bvp.gamma.eval_smoothed(u[j], eps) - bvp.g[j]);
  }
  for (std::size_t c = 1; c <= n; ++c) {
    const double z = law.rho((u[c] - u[c - 1]) / h);
    r[c] += z;
    r[c - 1] -= z;
  }
  r[0] -= bvp.a;
  r[n] -= bvp.b;
}

Tridiagonal fill_matrix(const EdgeBVP& bvp, std::span<const double> u, double eps, bool secant) {
  const std::size_t n = bvp.cells();
  const double h = bvp.h();
  const FluxLaw law{bvp.p, eps};
  Tridiagonal t{std::vector<double>(n + 1, 0.0), std::vector<double>(n + 1, 0.0),
                std::vector<double>(n + 1, 0.0)};
  for (std::size_t j = 0; j <= n; ++j) {
    double slope;
    if (secant) {
      slope = u[j] != 0.0 ? bvp.gamma.eval_smoothed(u[j], eps) / u[j] : bvp.gamma.derivative_smoothed(0.0, eps);
    } else {
      slope = bvp.gamma.derivative_smoothed(u[j], eps);
    }
    t.diag[j] = mass(bvp, j) * bvp.alpha * clamp_slope(slope);
  }
  for (std::size_t c = 1; c <= n; ++c) {
    const double s = (u[c] - u[c - 1]) / h;
    const double k = clamp_slope(secant ? law.secant(s) : law.rho_prime(s)) / h;
    t.diag[c] += k;
    t.diag[c - 1] += k;
    t.upper[c - 1] = -k;
    t.lower[c] = -k;
  }
  return t;
}

class EdgeSystem final : public detail::DiscreteSystem {
 public:
  explicit EdgeSystem(const EdgeBVP& bvp) : bvp_(bvp) {}
  std::size_t size() const override { return bvp_.g.size(); }

  double residual(std::span<const double> u, double eps, std::vector<double>& r) override {
    fill_residual(bvp_, u, eps, r);
    return edge_residual_scale(bvp_, u);
  }

  bool step(std::span<const double> u, double eps, detail::StepKind kind, const std::vector<double>& r,
            std::vector<double>& d) override {
    d.resize(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) d[i] = -r[i];
    return solve_tridiagonal(fill_matrix(bvp_, u, eps, kind == detail::StepKind::Picard), d);
  }

 private:
  const EdgeBVP& bvp_;
};

double initial_level(const EdgeBVP& bvp) {
  double total = bvp.a + bvp.b;
  for (std::size_t j = 0; j <= bvp.cells(); ++j) total += mass(bvp, j) * bvp.g[j];
  return bvp.gamma.inverse(total / (bvp.alpha * bvp.length));
}

}  // namespace

std::vector<double> assemble_edge_residual(const EdgeBVP& bvp, std::span<const double> u, double eps) {
  check_shape(bvp, u.size());
  std::vector<double> r;
  fill_residual(bvp, u, eps, r);
  return r;
}

Tridiagonal assemble_edge_jacobian(const EdgeBVP& bvp, std::span<const double> u, double eps) {
  check_shape(bvp, u.size());
  return fill_matrix(bvp, u, eps, false);
}

double edge_residual_scale(const EdgeBVP& bvp, std::span<const double> u) {
  const std::size_t n = bvp.cells();
  const FluxLaw law{bvp.p, 0.0};
  double reaction = 0.0, load = 0.0, flux = 0.0;
  for (std::size_t j = 0; j <= n; ++j) {
    const double m = mass(bvp, j);
    reaction = std::max(reaction, std::abs(m * bvp.alpha * bvp.gamma(u[j])));
    load = std::max(load, std::abs(m * bvp.g[j]));
  }
  for (std::size_t c = 1; c <= n; ++c) flux = std::max(flux, std::abs(law.rho((u[c] - u[c - 1]) / bvp.h())));
  const double s = 1.0 + reaction + load + flux + std::abs(bvp.a) + std::abs(bvp.b);
  return std::isfinite(s) ? s : std::numeric_limits<double>::max();
}

bool solve_tridiagonal(Tridiagonal m, std::vector<double>& rhs) {
  const std::size_t n = m.diag.size();
  for (std::size_t i = 1; i < n; ++i) {
    if (m.diag[i - 1] == 0.0) return false;
    const double w = m.lower[i] / m.diag[i - 1];
    m.diag[i] -= w * m.upper[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  if (m.diag[n - 1] == 0.0) return false;
  rhs[n - 1] /= m.diag[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] = (rhs[i] - m.upper[i] * rhs[i + 1]) / m.diag[i];
  return true;
}

EdgeSolution solve_edge_bvp(const EdgeBVP& bvp, const SolverConfig& cfg, const std::vector<double>* warm) {
  if (!(bvp.length > 0.0) || !(bvp.p > 1.0) || !(bvp.alpha > 0.0)) {
    throw Error(Errc::ShapeMismatch, "edge problem needs length > 0, p > 1 and alpha > 0");
  }
  check_shape(bvp, bvp.g.size());
  std::vector<double> u;
  if (warm && warm->size() == bvp.g.size()) u = *warm;
  else u.assign(bvp.g.size(), initial_level(bvp));

  EdgeSystem sys(bvp);
  const detail::NewtonStats stats = detail::solve_system(sys, u, cfg);

  EdgeSolution sol;
  sol.u = std::move(u);
  sol.v.resize(sol.u.size());
  for (std::size_t j = 0; j < sol.u.size(); ++j) sol.v[j] = bvp.gamma(sol.u[j]);
  const FluxLaw law{bvp.p, 0.0};
  for (std::size_t c = 1; c < sol.u.size(); ++c) sol.z.push_back(law.rho((sol.u[c] - sol.u[c - 1]) / bvp.h()));
  sol.residual_sup = stats.residual_sup;
  sol.residual_scale = stats.scale;
  sol.newton_iters = stats.newton_iterations;
  sol.continuation_steps = stats.continuation_steps;
  return sol;
}

double edge_mass_gap(const EdgeBVP& bvp, const EdgeSolution& sol) {
  double total = -bvp.a - bvp.b;
  for (std::size_t j = 0; j <= bvp.cells(); ++j) total += mass(bvp, j) * (bvp.alpha * sol.v[j] - bvp.g[j]);
  return std::abs(total);
}

std::pair<double, double> endpoint_map(const EdgeBVP& bvp, const SolverConfig& cfg) {
  const EdgeSolution sol = solve_edge_bvp(bvp, cfg);
  return {sol.u.front(), sol.u.back()};
}

double flux_shoot(const EdgeBVP& bvp, Side side, double target, const SolverConfig& cfg) {
  EdgeBVP work = bvp;
  std::vector<double> warm;
  auto endpoint = [&](double eps) {
    if (side == Side::Left) work.a = bvp.a + eps;
    else work.b = bvp.b + eps;
    const EdgeSolution sol = solve_edge_bvp(work, cfg, warm.empty() ? nullptr : &warm);
    warm = sol.u;
    return side == Side::Left ? sol.u.front() : sol.u.back();
  };
  return solve_increasing(endpoint, target, -1.0, 1.0, 1e-3 * cfg.match_tol, 1e-14, cfg.max_doublings);
}

}  // namespace qgdiff
