#include "qgdiff/parabolic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qgdiff/error.hpp"

namespace qgdiff {
namespace {

double flux_total(const std::map<std::string, double>& omega) {
  double s = 0.0;
  for (const auto& [id, w] : omega) s += w;
  return s;
}

double lumped_integral(const GridFunction& f) { return integrate(f); }

// Per-step energy residual and its scale.
LedgerEntry ledger_entry(const MetricGraph& g, const GridFunction& v_prev, const StepRecord& rec,
                         const GridFunction& f, const std::map<std::string, double>& omega) {
  const double jn = conjugate_energy(g, rec.v);
  const double jp = conjugate_energy(g, v_prev);
  double dissipation = 0.0, work = 0.0, work_abs = 0.0;
  const auto& layout = rec.u.layout();
  for (std::size_t e = 0; e < layout.edges.size(); ++e) {
    const auto& grid = layout.edges[e];
    const double p = g.edge(e).p;
    for (std::size_t c = 1; c <= grid.cells; ++c) {
      const double d = (rec.u.at(e, c) - rec.u.at(e, c - 1)) / grid.h();
      dissipation += grid.h() * std::pow(std::abs(d), p);
    }
    for (std::size_t j = 0; j <= grid.cells; ++j) {
      const double w = grid.mass(j) * f.at(e, j) * rec.u.at(e, j);
      work += w;
      work_abs += std::abs(w);
    }
  }
  for (const auto& [id, w] : omega) {
    const double x = w * rec.u.vertex_value(g.vertex_index(id));
    work += x;
    work_abs += std::abs(x);
  }
  LedgerEntry out;
  out.residual = jn - jp + rec.tau * dissipation - rec.tau * work;
  out.scale = 1.0 + std::abs(jn) + std::abs(jp) + rec.tau * (dissipation + work_abs);
  return out;
}

}  // namespace

TimeGrid::TimeGrid(std::vector<double> points) : t_(std::move(points)) {
  if (t_.empty() || t_.front() != 0.0) throw Error(Errc::Schema, "time grid must start at 0");
  for (std::size_t i = 1; i < t_.size(); ++i) {
    if (!(t_[i] > t_[i - 1])) throw Error(Errc::Schema, "time grid must be strictly increasing");
  }
}

TimeGrid TimeGrid::uniform(double t_end, double dt) {
  if (!(dt > 0.0) || !(t_end >= 0.0) || !std::isfinite(t_end)) {
    throw Error(Errc::Schema, "time grid needs dt > 0 and t_end >= 0");
  }
  const double ratio = t_end / dt;
  auto n = static_cast<std::size_t>(std::llround(ratio));
  if (std::abs(ratio - static_cast<double>(n)) > 1e-9 * std::max(1.0, ratio)) n = static_cast<std::size_t>(std::ceil(ratio));
  std::vector<double> t(n + 1);
  for (std::size_t i = 0; i <= n; ++i) t[i] = static_cast<double>(i) * dt;
  if (n > 0) t[n] = t_end;
  return TimeGrid(std::move(t));
}

double TimeGrid::max_step() const {
  double m = 0.0;
  for (std::size_t i = 1; i < t_.size(); ++i) m = std::max(m, t_[i] - t_[i - 1]);
  return m;
}

double FluxTerm::at(double t) const {
  if (expr) return expr->evaluate({0.0, t});
  if (!table.empty()) {
    double value = table.front().second;
    for (const auto& [tk, vk] : table) {
      if (tk <= t) value = vk;
    }
    return value;
  }
  return constant;
}

GridFunction Schedule::sample_f(const MetricGraph& g, double t) const {
  const GridLayout layout = GridLayout::of(g);
  GridFunction out(layout, GridKind::EdgeWise);
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    const Edge& edge = g.edge(e);
    const auto& grid = layout.edges[e];
    const auto it = f.find(edge.id);
    if (it != f.end() && !it->second.nodal.empty()) {
      if (it->second.nodal.size() != grid.cells + 1) {
        throw Error(Errc::ShapeMismatch, "nodal source for edge '" + edge.id + "' has the wrong length");
      }
      out.set_edge_values(e, it->second.nodal);
      continue;
    }
    for (std::size_t j = 0; j <= grid.cells; ++j) {
      const double x = grid.node(j);
      double value;
      if (it != f.end() && it->second.expr) value = it->second.expr->evaluate({x, t});
      else value = edge.source(t, x);
      out.set(e, j, value);
    }
  }
  return out;
}

std::map<std::string, double> Schedule::sample_omega(const MetricGraph& g, double t) const {
  std::map<std::string, double> out;
  for (const auto& [id, term] : omega) {
    if (!g.find_vertex(id)) throw Error(Errc::UnknownVertex, "flux schedule names unknown vertex '" + id + "'");
    out[id] = term.at(t);
  }
  return out;
}

GridFunction initial_u(const MetricGraph& g, const GridFunction& v0) {
  GridFunction u(v0.layout(), GridKind::VertexCoupled);
  std::vector<double> sum(g.vertex_count(), 0.0);
  for (std::size_t e = 0; e < v0.edge_count(); ++e) {
    const Nonlinearity& gamma = g.edge(e).gamma;
    const std::size_t n = v0.layout().edges[e].cells;
    for (std::size_t j = 1; j < n; ++j) u.set(e, j, gamma.inverse(v0.at(e, j)));
    sum[g.from_index(e)] += gamma.inverse(v0.at(e, 0));
    sum[g.to_index(e)] += gamma.inverse(v0.at(e, n));
  }
  for (std::size_t v = 0; v < g.vertex_count(); ++v) u.set_vertex_value(v, sum[v] / static_cast<double>(g.degree(v)));
  return u;
}

double conjugate_energy(const MetricGraph& g, const GridFunction& v) {
  double total = 0.0;
  for (std::size_t e = 0; e < v.edge_count(); ++e) {
    const auto& grid = v.layout().edges[e];
    const Nonlinearity& gamma = g.edge(e).gamma;
    for (std::size_t j = 0; j <= grid.cells; ++j) total += grid.mass(j) * gamma.conjugate(v.at(e, j));
  }
  return total;
}

Trajectory solve_parabolic(const MetricGraph& g, const GridFunction& v0, const Schedule& sched, const TimeGrid& tgrid,
                           const ParabolicConfig& cfg, const Checkpoint* resume) {
  const GridLayout layout = GridLayout::of(g);
  if (!(v0.layout() == layout)) throw Error(Errc::GridMismatch, "initial datum does not live on the graph grid");

  Trajectory traj;
  traj.graph = g;
  traj.grid = tgrid;

  StepRecord current;
  if (resume) {
    if (resume->step > tgrid.steps() || std::abs(resume->t - tgrid.points()[resume->step]) > 1e-12 * (1.0 + resume->t)) {
      throw Error(Errc::Schema, "checkpoint time does not lie on the time grid");
    }
    if (!(resume->v.layout() == layout) || !(resume->u.layout() == layout)) {
      throw Error(Errc::GridMismatch, "checkpoint state does not live on the graph grid");
    }
    current.index = resume->step;
    current.t = resume->t;
    current.v = resume->v.to_edgewise();
    current.u = resume->u.kind() == GridKind::VertexCoupled ? resume->u : resume->u.to_vertex_coupled();
  } else {
    for (std::size_t e = 0; e < v0.edge_count(); ++e) {
      for (std::size_t j = 0; j < v0.nodes(e); ++j) {
        if (!std::isfinite(v0.at(e, j))) throw Error(Errc::InitialDatumNotFinite, "initial datum is not finite");
      }
    }
    const double energy = conjugate_energy(g, v0);
    if (!std::isfinite(energy)) {
      throw Error(Errc::InitialDatumNotFinite, "integral of the conjugate energy of the initial datum diverges");
    }
    current.index = 0;
    current.t = 0.0;
    current.v = v0.to_edgewise();
    current.u = initial_u(g, current.v);
  }
  current.mass = lumped_integral(current.v);
  if (!resume && cfg.on_record) cfg.on_record(current);
  if (cfg.keep_records) traj.records.push_back(current);

  for (std::size_t i = current.index + 1; i <= tgrid.steps(); ++i) {
    const double t = tgrid.points()[i];
    const double tau = tgrid.tau(i);
    const GridFunction f = sched.sample_f(g, t);
    const auto omega = sched.sample_omega(g, t);

    EllipticSolution sol;
    try {
      sol = resolvent(g, tau, current.v, f, omega, cfg.solver, &current.u, cfg.method);
    } catch (const SolverError& err) {
      throw SolverError(err.code(), std::string(err.what()) + " at step " + std::to_string(i), err.best_iterate(),
                        err.residual_history(), static_cast<long>(i));
    } catch (const Error& err) {
      throw SolverError(err.code(), std::string(err.what()) + " at step " + std::to_string(i), {}, {},
                        static_cast<long>(i));
    }

    StepRecord rec;
    rec.index = i;
    rec.t = t;
    rec.tau = tau;
    rec.v = std::move(sol.v);
    rec.u = std::move(sol.u);
    rec.mass = lumped_integral(rec.v);
    rec.mass_gap = std::abs(rec.mass - current.mass - tau * (lumped_integral(f) + flux_total(omega)));
    rec.energy_residual = ledger_entry(g, current.v, rec, f, omega).residual;
    rec.residual_sup = sol.residual_sup;
    rec.residual_scale = sol.residual_scale;
    rec.newton_iterations = sol.diagnostics.newton_iterations;

    if (cfg.on_record) cfg.on_record(rec);
    if (cfg.checkpoint_every > 0 && cfg.on_checkpoint && i % cfg.checkpoint_every == 0) {
      cfg.on_checkpoint(Checkpoint{cfg.scenario_hash, i, t, rec.v, rec.u, {}});
    }
    current = std::move(rec);
    if (cfg.keep_records) traj.records.push_back(current);
  }
  if (!cfg.keep_records) traj.records.push_back(current);
  return traj;
}

std::vector<LedgerEntry> energy_ledger(const Trajectory& traj, const Schedule& sched) {
  std::vector<LedgerEntry> out;
  for (std::size_t k = 1; k < traj.records.size(); ++k) {
    const StepRecord& rec = traj.records[k];
    const GridFunction f = sched.sample_f(traj.graph, rec.t);
    const auto omega = sched.sample_omega(traj.graph, rec.t);
    out.push_back(ledger_entry(traj.graph, traj.records[k - 1].v, rec, f, omega));
  }
  return out;
}

RichardsonResult richardson_order(const MetricGraph& g, const Schedule& sched, const GridFunction& v0, double t_end,
                                  double dt, const SolverConfig& cfg) {
  ParabolicConfig pc;
  pc.solver = cfg;
  pc.keep_records = false;
  std::vector<GridFunction> finals;
  for (double step : {dt, dt / 2, dt / 4, dt / 8}) {
    finals.push_back(solve_parabolic(g, v0, sched, TimeGrid::uniform(t_end, step), pc).records.back().v);
  }
  RichardsonResult r;
  r.differences = {l1_norm(finals[0] - finals[1]), l1_norm(finals[1] - finals[2])};
  for (std::size_t k = 0; k < 3; ++k) r.reference_errors.push_back(l1_norm(finals[k] - finals[3]));
  const double size = 1.0 + l1_norm(finals[3]);
  r.applicable = r.differences[1] > 1e-12 * size && r.differences[0] > 1e-12 * size;
  if (r.applicable) {
    r.order = std::log2(r.differences[0] / r.differences[1]);
    r.reference_order = std::log2(r.reference_errors[1] / r.reference_errors[2]);
  }
  return r;
}

}  // namespace qgdiff
