#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qgdiff/expr.hpp"
#include "qgdiff/graph_elliptic.hpp"

namespace qgdiff {

/// 0 = t_0 < t_1 < ... < t_N = T.
class TimeGrid {
 public:
  TimeGrid() = default;
  explicit TimeGrid(std::vector<double> points);
  static TimeGrid uniform(double t_end, double dt);

  const std::vector<double>& points() const { return t_; }
  std::size_t steps() const { return t_.empty() ? 0 : t_.size() - 1; }
  double tau(std::size_t i) const { return t_[i] - t_[i - 1]; }  // i >= 1
  double max_step() const;

 private:
  std::vector<double> t_{0.0};
};

/// Edge load override: an expression in (x, t) or a time-independent nodal table.
struct SourceTerm {
  std::optional<expr::Expression> expr;
  std::vector<double> nodal;
};

/// Vertex flux: constant, expression in t, or piecewise-constant table of
/// (t_k, value) pairs where value holds from t_k on.
struct FluxTerm {
  double constant = 0.0;
  std::optional<expr::Expression> expr;
  std::vector<std::pair<double, double>> table;

  double at(double t) const;
};

/// Time-dependent data. Edges without an override use their own source term.
/// Steps sample data at the right end point t_i.
struct Schedule {
  std::map<std::string, SourceTerm> f;
  std::map<std::string, FluxTerm> omega;

  GridFunction sample_f(const MetricGraph& g, double t) const;
  std::map<std::string, double> sample_omega(const MetricGraph& g, double t) const;
};

struct StepRecord {
  std::size_t index = 0;
  double t = 0.0;
  double tau = 0.0;
  GridFunction v;  // EdgeWise
  GridFunction u;  // VertexCoupled
  double mass = 0.0;
  double mass_gap = 0.0;          // |int v_i - int v_{i-1} - tau (int f_i + sum omega_i)|
  double energy_residual = 0.0;   // r_i of the energy ledger
  double residual_sup = 0.0;
  double residual_scale = 1.0;
  int newton_iterations = 0;
};

struct Trajectory {
  MetricGraph graph;
  TimeGrid grid;
  std::vector<StepRecord> records;  // records[0] is the initial state
};

/// Saved state for bit-identical continuation of a run.
struct Checkpoint {
  std::uint64_t scenario_hash = 0;
  std::size_t step = 0;
  double t = 0.0;
  GridFunction v;
  GridFunction u;
  std::vector<std::uint64_t> rng_seeds;
};

struct ParabolicConfig {
  SolverConfig solver;
  Method method = Method::Monolithic;
  bool keep_records = true;                               // store every record in the trajectory
  std::function<void(const StepRecord&)> on_record;        // called for each new record
  std::size_t checkpoint_every = 0;                        // 0 disables
  std::function<void(const Checkpoint&)> on_checkpoint;
  std::uint64_t scenario_hash = 0;
};

/// Vertex-coupled u0 = gamma^{-1}(v0), with vertex values averaged over incident traces.
GridFunction initial_u(const MetricGraph& g, const GridFunction& v0);

/// Sum over edges of the lumped integral of j*_{gamma_e}(v).
double conjugate_energy(const MetricGraph& g, const GridFunction& v);

/// Implicit Euler. With `resume` the run continues after resume->step.
Trajectory solve_parabolic(const MetricGraph& g, const GridFunction& v0, const Schedule& sched, const TimeGrid& tgrid,
                           const ParabolicConfig& cfg = {}, const Checkpoint* resume = nullptr);

struct LedgerEntry {
  double residual = 0.0;
  double scale = 1.0;
};

/// r_i = int j*(v_i) - int j*(v_{i-1}) + tau sum_e int |u_i'|^{p_e} - tau (int f_i u_i + sum omega_i u_i).
std::vector<LedgerEntry> energy_ledger(const Trajectory& traj, const Schedule& sched);

struct RichardsonResult {
  bool applicable = false;
  double order = 0.0;                  // log2 of consecutive differences
  std::vector<double> differences;     // |v_dt - v_dt/2|_1, |v_dt/2 - v_dt/4|_1
  std::vector<double> reference_errors;  // dt, dt/2, dt/4 against dt/8
  double reference_order = 0.0;        // log2(e(dt/2)/e(dt/4)) against dt/8
};

RichardsonResult richardson_order(const MetricGraph& g, const Schedule& sched, const GridFunction& v0, double t_end,
                                  double dt, const SolverConfig& cfg = {});

}  // namespace qgdiff
