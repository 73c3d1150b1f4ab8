#pragma once

#include <cstdint>
#include <limits>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "qgdiff/graph_elliptic.hpp"
#include "qgdiff/parabolic.hpp"

namespace qgdiff {

struct PropertyReport {
  std::string name;
  std::size_t samples = 0;
  double worst_violation = -std::numeric_limits<double>::infinity();  // signed, <= tolerance passes
  double tolerance = 0.0;
  bool pass = true;
  std::uint64_t seed = 0;

  void record(double violation);
  void merge(const PropertyReport& other);
};

enum class PoincareMethod { Eigen, Sampled };

struct PoincareEstimate {
  double lambda = 0.0;
  PoincareMethod method = PoincareMethod::Eigen;
  std::size_t samples = 0;
};

// ---- reproducible randomness ------------------------------------------------

/// 64-bit Mersenne twister with a fixed, library-independent uniform map.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n; }
  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

struct RandomGraphOptions {
  std::size_t max_edges = 6;
  std::vector<double> exponents{1.5, 2.0, 3.0, 4.0};
  std::vector<double> gamma_powers{0.0, 0.5, 2.0};  // 0 stands for the identity
  bool common_gamma = false;                          // one nonlinearity for the whole graph
  bool allow_cycles = true;
  std::vector<std::size_t> cells{16, 32, 64};
};

MetricGraph random_graph(Rng& rng, const RandomGraphOptions& opt = {});
/// Smooth random load on every edge: c + a sin(k x + phi).
GridFunction random_load(Rng& rng, const MetricGraph& g, double amplitude = 1.0);
std::map<std::string, double> random_fluxes(Rng& rng, const MetricGraph& g, double amplitude = 1.0);

/// Worker count: QGDIFF_THREADS if set, else hardware concurrency (at least 1).
std::size_t worker_count();
/// Runs body(i) for i in [0, n) on worker_count() threads. Results must be
/// written to per-index slots so the outcome does not depend on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

// ---- property checks ----------------------------------------------------------

/// Signed gap alpha int (v1-v2)^+ - int (g1-g2)^+ - sum (omega1-omega2)^+, and
/// when the data are ordered also the nodewise violation max(v2 - v1).
PropertyReport comparison_test(const EllipticProblem& p1, const EllipticProblem& p2, const SolverConfig& cfg = {},
                               double tol = 1e-8);

/// Per-step gaps of the L1 contraction estimate between two trajectories.
PropertyReport contraction_test(const Trajectory& t1, const Schedule& s1, const Trajectory& t2, const Schedule& s2,
                                double tol = 1e-7);

/// Order preservation: max over steps and nodes of v2 - v1.
double order_violation(const Trajectory& t1, const Trajectory& t2);

/// k-grid built from the nodal magnitudes of a and b, refined by midpoints.
std::vector<double> standard_k_grid(const GridFunction& a, const GridFunction& b);

/// ||v||_inf <= ||g||_inf and v << g for omega = 0, alpha = 1.
PropertyReport linf_and_ll_test(const EllipticProblem& prob, const SolverConfig& cfg = {}, double tol = 1e-8);
PropertyReport linf_and_ll_check(const EllipticProblem& prob, const EllipticSolution& sol, double tol = 1e-8);

/// Element (z, (v, w)) of the accretive operator: z = gamma(u) where u solves the
/// alpha = 1 problem with load h and fluxes w, and v = h - z.
struct OperatorSample {
  GridFunction z;
  GridFunction v;
  std::map<std::string, double> w;
};
OperatorSample make_operator_sample(const MetricGraph& g, const GridFunction& h, const std::map<std::string, double>& w,
                                    const SolverConfig& cfg = {});

/// Per step: |v_i - z|_1 - |v_{i-1} - z|_1 - tau ([v_i - z, f_i - v] + sum_v |omega_i - w|).
PropertyReport integral_solution_check(const Trajectory& traj, const Schedule& sched,
                                       const std::vector<OperatorSample>& samples, double tol = 1e-7);

struct SweepResult {
  PropertyReport report;
  std::vector<double> values;        // u at the swept vertex (single) or at the + vertex (pair)
  std::vector<double> minus_values;  // pair variant: u at the - vertex
};

/// omega_v + eps over the ascending grid; u(v) must be nondecreasing (1e-10 slack)
/// and strictly larger between grid points at least 0.5 apart when `strict`.
SweepResult monotone_flux_sweep(const EllipticProblem& prob, const std::string& vertex,
                                const std::vector<double>& eps_grid, bool strict = true,
                                const SolverConfig& cfg = {});
/// omega + eps (e_plus - e_minus): u(plus) nondecreasing, u(minus) nonincreasing.
SweepResult compensated_flux_sweep(const EllipticProblem& prob, const std::string& plus, const std::string& minus,
                                   const std::vector<double>& eps_grid, bool strict = true,
                                   const SolverConfig& cfg = {});
/// |u_{eps+d}(v) - u_eps(v)| for d, d/2, d/4 must decrease.
PropertyReport flux_continuity_check(const EllipticProblem& prob, const std::string& vertex, double eps, double d,
                                     const SolverConfig& cfg = {});

/// Eigen: sqrt of the smallest nonzero eigenvalue of the (stiffness, lumped mass)
/// pencil when every p_e = 2. Sampled: min of |u'|/|u| over zero-mean samples.
PoincareEstimate poincare_estimate(const MetricGraph& g, std::size_t samples = 2000, std::uint64_t seed = 1);

/// Backward Euler for p = 2, gamma = id by dense LU of the assembled system.
Trajectory heat_oracle(const MetricGraph& g, const GridFunction& v0, const Schedule& sched, const TimeGrid& tgrid);

// ---- named suites ---------------------------------------------------------------

struct NamedProblem {
  std::string name;
  EllipticProblem problem;
};

/// Fixed battery: single edge, 2-path, 3-star, triangle, 5-edge tree.
std::vector<NamedProblem> standard_battery(std::size_t cells = 64);

/// Seed of trial i of a suite run with the given base seed.
std::uint64_t trial_seed(std::uint64_t seed, std::size_t trial);

/// Suites: mass-balance, comparison, linf, gluing, flux-sweep, contraction,
/// integral, energy, poincare. `trials` = 0 uses each suite's default.
std::vector<std::string> suite_names();
std::vector<PropertyReport> run_suite(const std::string& name, std::uint64_t seed, std::size_t trials = 0);

}  // namespace qgdiff
