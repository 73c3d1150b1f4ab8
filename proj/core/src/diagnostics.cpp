#include "qgdiff/diagnostics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <numbers>
#include <thread>

#include "qgdiff/error.hpp"

namespace qgdiff {
namespace {

Nonlinearity gamma_from_power(double m) { return m == 0.0 ? Nonlinearity::identity() : Nonlinearity::power(m); }

double positive_part_integral(const GridFunction& a, const GridFunction& b) { return integrate_positive_part(a - b); }

double flux_positive_part(const std::map<std::string, double>& w1, const std::map<std::string, double>& w2) {
  std::map<std::string, double> diff = w1;
  for (const auto& [id, w] : w2) diff[id] -= w;
  double s = 0.0;
  for (const auto& [id, d] : diff) s += std::max(d, 0.0);
  return s;
}

bool data_ordered(const EllipticProblem& p1, const EllipticProblem& p2) {
  for (std::size_t e = 0; e < p1.g.edge_count(); ++e) {
    for (std::size_t j = 0; j < p1.g.nodes(e); ++j) {
      if (p1.g.at(e, j) < p2.g.at(e, j)) return false;
    }
  }
  for (const auto& v : p1.graph.vertices()) {
    if (p1.omega_at(v) < p2.omega_at(v)) return false;
  }
  return true;
}

double max_difference(const GridFunction& a, const GridFunction& b) {
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t e = 0; e < a.edge_count(); ++e) {
    for (std::size_t j = 0; j < a.nodes(e); ++j) m = std::max(m, a.at(e, j) - b.at(e, j));
  }
  return m;
}

// Vertex unknowns first, then interior nodes; shared by the linear oracles.
struct LinearNumbering {
  std::vector<std::size_t> offset;
  std::size_t size = 0;
  GridLayout layout;

  explicit LinearNumbering(const MetricGraph& g) : layout(GridLayout::of(g)) {
    size = layout.vertex_count;
    for (const auto& e : layout.edges) {
      offset.push_back(size);
      size += e.cells - 1;
    }
  }
  std::size_t index(std::size_t e, std::size_t j) const {
    const auto& grid = layout.edges[e];
    if (j == 0) return grid.from;
    if (j == grid.cells) return grid.to;
    return offset[e] + j - 1;
  }
};

void assemble_linear(const LinearNumbering& num, Eigen::MatrixXd& K, Eigen::VectorXd& M) {
  const auto n = static_cast<Eigen::Index>(num.size);
  K = Eigen::MatrixXd::Zero(n, n);
  M = Eigen::VectorXd::Zero(n);
  for (std::size_t e = 0; e < num.layout.edges.size(); ++e) {
    const auto& grid = num.layout.edges[e];
    const double k = 1.0 / grid.h();
    for (std::size_t j = 0; j <= grid.cells; ++j) M[static_cast<Eigen::Index>(num.index(e, j))] += grid.mass(j);
    for (std::size_t c = 1; c <= grid.cells; ++c) {
      const auto i0 = static_cast<Eigen::Index>(num.index(e, c - 1));
      const auto i1 = static_cast<Eigen::Index>(num.index(e, c));
      K(i0, i0) += k;
      K(i1, i1) += k;
      K(i0, i1) -= k;
      K(i1, i0) -= k;
    }
  }
}

GridFunction zero_mean_sample(Rng& rng, const MetricGraph& g, const GridLayout& layout) {
  std::vector<double> vertex(g.vertex_count());
  for (double& x : vertex) x = rng.uniform(-1.0, 1.0);
  GridFunction u(layout, GridKind::VertexCoupled);
  for (std::size_t v = 0; v < g.vertex_count(); ++v) u.set_vertex_value(v, vertex[v]);
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    const auto& grid = layout.edges[e];
    double amp[3];
    for (int k = 0; k < 3; ++k) amp[k] = rng.uniform(-1.0, 1.0) / (k + 1);
    const double a = vertex[grid.from], b = vertex[grid.to];
    for (std::size_t j = 1; j < grid.cells; ++j) {
      const double s = grid.node(j) / grid.length;
      double val = a + (b - a) * s;
      for (int k = 0; k < 3; ++k) val += amp[k] * std::sin((k + 1) * std::numbers::pi * s);
      u.set(e, j, val);
    }
  }
  double total = 0.0;
  for (const auto& e : g.edges()) total += e.length;
  const double mean = integrate(u) / total;
  GridFunction shifted(layout, GridKind::VertexCoupled);
  for (std::size_t v = 0; v < g.vertex_count(); ++v) shifted.set_vertex_value(v, u.vertex_value(v) - mean);
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    for (std::size_t j = 1; j < layout.edges[e].cells; ++j) shifted.set(e, j, u.at(e, j) - mean);
  }
  return shifted;
}

}  // namespace

void PropertyReport::record(double violation) {
  ++samples;
  if (std::isnan(violation)) violation = std::numeric_limits<double>::infinity();
  worst_violation = std::max(worst_violation, violation);
  pass = worst_violation <= tolerance;
}

void PropertyReport::merge(const PropertyReport& other) {
  samples += other.samples;
  worst_violation = std::max(worst_violation, other.worst_violation);
  pass = worst_violation <= tolerance;
}

MetricGraph random_graph(Rng& rng, const RandomGraphOptions& opt) {
  const std::size_t edges = 1 + rng.index(std::max<std::size_t>(opt.max_edges, 1));
  bool cycle = opt.allow_cycles && edges >= 3 && rng.uniform() < 0.3;
  const std::size_t vertices = cycle ? edges : edges + 1;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t k = 1; k < vertices; ++k) pairs.emplace_back(rng.index(k), k);
  auto adjacent = [&](std::size_t a, std::size_t b) {
    return std::any_of(pairs.begin(), pairs.end(), [&](const auto& pr) {
      return (pr.first == a && pr.second == b) || (pr.first == b && pr.second == a);
    });
  };
  while (pairs.size() < edges) {
    std::vector<std::pair<std::size_t, std::size_t>> free;
    for (std::size_t a = 0; a < vertices; ++a) {
      for (std::size_t b = a + 1; b < vertices; ++b) {
        if (!adjacent(a, b)) free.emplace_back(a, b);
      }
    }
    if (free.empty()) break;
    pairs.push_back(free[rng.index(free.size())]);
  }
  const double common = opt.gamma_powers[rng.index(opt.gamma_powers.size())];
  GraphSpec spec;
  for (std::size_t v = 0; v < vertices; ++v) spec.vertices.push_back("v" + std::to_string(v));
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    Edge e;
    e.id = "e" + std::to_string(k);
    auto [a, b] = pairs[k];
    if (rng.uniform() < 0.5) std::swap(a, b);
    e.from = spec.vertices[a];
    e.to = spec.vertices[b];
    e.length = rng.uniform(0.5, 2.0);
    e.p = opt.exponents[rng.index(opt.exponents.size())];
    e.gamma = gamma_from_power(opt.common_gamma ? common : opt.gamma_powers[rng.index(opt.gamma_powers.size())]);
    e.cells = opt.cells[rng.index(opt.cells.size())];
    spec.edges.push_back(std::move(e));
  }
  return MetricGraph::build(std::move(spec));
}

GridFunction random_load(Rng& rng, const MetricGraph& g, double amplitude) {
  const GridLayout layout = GridLayout::of(g);
  std::vector<std::array<double, 4>> coef(g.edge_count());
  for (auto& c : coef) {
    c = {rng.uniform(-1.0, 1.0) * amplitude, rng.uniform(0.0, 1.0) * amplitude, rng.uniform(0.5, 4.0),
         rng.uniform(0.0, 2.0 * std::numbers::pi)};
  }
  return GridFunction::sample_edgewise(layout, [&](std::size_t e, double x) {
    return coef[e][0] + coef[e][1] * std::sin(coef[e][2] * x + coef[e][3]);
  });
}

std::map<std::string, double> random_fluxes(Rng& rng, const MetricGraph& g, double amplitude) {
  std::map<std::string, double> w;
  for (const auto& v : g.vertices()) {
    const double pick = rng.uniform();
    const double value = rng.uniform(-amplitude, amplitude);
    if (pick < 0.5) w[v] = value;
  }
  return w;
}

std::size_t worker_count() {
  std::size_t n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("QGDIFF_THREADS")) {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap > 0) n = std::min<std::size_t>(n, static_cast<std::size_t>(cap));
  }
  return n;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::min(worker_count(), n);
  std::vector<std::exception_ptr> errors(n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) {
      try {
        body(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            body(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

PropertyReport comparison_test(const EllipticProblem& p1, const EllipticProblem& p2, const SolverConfig& cfg,
                               double tol) {
  require_same_grid(p1.g, p2.g);
  PropertyReport rep{"comparison", 0, -std::numeric_limits<double>::infinity(), tol, true, 0};
  const EllipticSolution s1 = solve_monolithic(p1, cfg);
  const EllipticSolution s2 = solve_monolithic(p2, cfg);
  const double gap = p1.alpha * positive_part_integral(s1.v, s2.v) - positive_part_integral(p1.g, p2.g) -
                     flux_positive_part(p1.omega, p2.omega);
  rep.record(gap);
  if (data_ordered(p1, p2)) rep.record(max_difference(s2.v, s1.v));
  return rep;
}

PropertyReport contraction_test(const Trajectory& t1, const Schedule& s1, const Trajectory& t2, const Schedule& s2,
                                double tol) {
  PropertyReport rep{"contraction", 0, -std::numeric_limits<double>::infinity(), tol, true, 0};
  if (t1.records.size() != t2.records.size()) throw Error(Errc::ShapeMismatch, "trajectories have different lengths");
  double budget = positive_part_integral(t1.records.front().v, t2.records.front().v);
  for (std::size_t k = 1; k < t1.records.size(); ++k) {
    const StepRecord& a = t1.records[k];
    const StepRecord& b = t2.records[k];
    if (a.t != b.t) throw Error(Errc::ShapeMismatch, "trajectories use different time grids");
    budget += a.tau * positive_part_integral(s1.sample_f(t1.graph, a.t), s2.sample_f(t2.graph, b.t));
    budget += a.tau * flux_positive_part(s1.sample_omega(t1.graph, a.t), s2.sample_omega(t2.graph, b.t));
    rep.record(positive_part_integral(a.v, b.v) - budget);
  }
  return rep;
}

double order_violation(const Trajectory& t1, const Trajectory& t2) {
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < std::min(t1.records.size(), t2.records.size()); ++k) {
    worst = std::max(worst, max_difference(t2.records[k].v, t1.records[k].v));
  }
  return worst;
}

std::vector<double> standard_k_grid(const GridFunction& a, const GridFunction& b) {
  std::vector<double> ks;
  for (const GridFunction* f : {&a, &b}) {
    for (std::size_t e = 0; e < f->edge_count(); ++e) {
      for (std::size_t j = 0; j < f->nodes(e); ++j) {
        const double x = std::abs(f->at(e, j));
        if (x > 0.0) ks.push_back(x);
      }
    }
  }
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
  std::vector<double> grid;
  if (ks.empty()) return {1.0};
  grid.push_back(0.5 * ks.front());
  for (std::size_t i = 0; i < ks.size(); ++i) {
    grid.push_back(ks[i]);
    if (i + 1 < ks.size()) grid.push_back(0.5 * (ks[i] + ks[i + 1]));
  }
  grid.push_back(1.01 * ks.back());
  return grid;
}

PropertyReport linf_and_ll_check(const EllipticProblem& prob, const EllipticSolution& sol, double tol) {
  PropertyReport rep{"linf-ll", 0, -std::numeric_limits<double>::infinity(), tol, true, 0};
  rep.record(sol.v.max_abs() - prob.g.max_abs());
  const auto ks = standard_k_grid(sol.v, prob.g);
  rep.record(ll_violation(sol.v, prob.g, ks));
  return rep;
}

PropertyReport linf_and_ll_test(const EllipticProblem& prob, const SolverConfig& cfg, double tol) {
  return linf_and_ll_check(prob, solve_monolithic(prob, cfg), tol);
}

OperatorSample make_operator_sample(const MetricGraph& g, const GridFunction& h, const std::map<std::string, double>& w,
                                    const SolverConfig& cfg) {
  EllipticProblem prob{g, h, w, 1.0};
  const EllipticSolution sol = solve_monolithic(prob, cfg);
  return OperatorSample{sol.v, h - sol.v, w};
}

PropertyReport integral_solution_check(const Trajectory& traj, const Schedule& sched,
                                       const std::vector<OperatorSample>& samples, double tol) {
  PropertyReport rep{"integral-solution", 0, -std::numeric_limits<double>::infinity(), tol, true, 0};
  for (std::size_t k = 1; k < traj.records.size(); ++k) {
    const StepRecord& rec = traj.records[k];
    const GridFunction f = sched.sample_f(traj.graph, rec.t);
    const auto omega = sched.sample_omega(traj.graph, rec.t);
    for (const OperatorSample& s : samples) {
      const double lhs = l1_norm(rec.v - s.z) - l1_norm(traj.records[k - 1].v - s.z);
      double vertex = 0.0;
      for (const auto& v : traj.graph.vertices()) {
        const auto a = omega.find(v);
        const auto b = s.w.find(v);
        vertex += std::abs((a == omega.end() ? 0.0 : a->second) - (b == s.w.end() ? 0.0 : b->second));
      }
      const double rhs = rec.tau * (bracket_l1(rec.v - s.z, f - s.v) + vertex);
      rep.record(lhs - rhs);
    }
  }
  return rep;
}

namespace {

std::vector<double> sweep_values(const EllipticProblem& prob, const std::vector<std::pair<std::string, double>>& dirs,
                                 const std::vector<double>& eps_grid, const SolverConfig& cfg,
                                 std::vector<double>* second) {
  std::vector<double> first;
  GridFunction warm;
  bool have_warm = false;
  for (double eps : eps_grid) {
    EllipticProblem p = prob;
    for (const auto& [v, sign] : dirs) p.omega[v] = prob.omega_at(v) + sign * eps;
    const EllipticSolution sol = solve_monolithic(p, cfg, have_warm ? &warm : nullptr);
    warm = sol.u;
    have_warm = true;
    first.push_back(sol.u.vertex_value(prob.graph.vertex_index(dirs.front().first)));
    if (second) second->push_back(sol.u.vertex_value(prob.graph.vertex_index(dirs.back().first)));
  }
  return first;
}

void check_monotone(PropertyReport& rep, const std::vector<double>& eps, const std::vector<double>& values, double sign,
                    bool strict) {
  for (std::size_t k = 0; k + 1 < values.size(); ++k) rep.record(sign * (values[k] - values[k + 1]) - 1e-10);
  if (!strict) return;
  for (std::size_t i = 0; i < values.size(); ++i) {
    for (std::size_t j = i + 1; j < values.size(); ++j) {
      if (eps[j] - eps[i] >= 0.5) rep.record(1e-12 - sign * (values[j] - values[i]));
    }
  }
}

}  // namespace

SweepResult monotone_flux_sweep(const EllipticProblem& prob, const std::string& vertex,
                                const std::vector<double>& eps_grid, bool strict, const SolverConfig& cfg) {
  SweepResult out;
  out.report = PropertyReport{"flux-sweep:" + vertex, 0, -std::numeric_limits<double>::infinity(), 0.0, true, 0};
  out.values = sweep_values(prob, {{vertex, 1.0}}, eps_grid, cfg, nullptr);
  check_monotone(out.report, eps_grid, out.values, 1.0, strict);
  return out;
}

SweepResult compensated_flux_sweep(const EllipticProblem& prob, const std::string& plus, const std::string& minus,
                                   const std::vector<double>& eps_grid, bool strict, const SolverConfig& cfg) {
  SweepResult out;
  out.report = PropertyReport{"compensated-sweep:" + plus + "/" + minus, 0,
                              -std::numeric_limits<double>::infinity(), 0.0, true, 0};
  out.values = sweep_values(prob, {{plus, 1.0}, {minus, -1.0}}, eps_grid, cfg, &out.minus_values);
  check_monotone(out.report, eps_grid, out.values, 1.0, strict);
  check_monotone(out.report, eps_grid, out.minus_values, -1.0, strict);
  return out;
}

PropertyReport flux_continuity_check(const EllipticProblem& prob, const std::string& vertex, double eps, double d,
                                     const SolverConfig& cfg) {
  PropertyReport rep{"flux-continuity:" + vertex, 0, -std::numeric_limits<double>::infinity(), 0.0, true, 0};
  const std::vector<double> grid{eps, eps + d / 4, eps + d / 2, eps + d};
  const auto values = sweep_values(prob, {{vertex, 1.0}}, grid, cfg, nullptr);
  const double d1 = std::abs(values[3] - values[0]);
  const double d2 = std::abs(values[2] - values[0]);
  const double d3 = std::abs(values[1] - values[0]);
  rep.record(d2 - d1 - 1e-12);
  rep.record(d3 - d2 - 1e-12);
  return rep;
}

PoincareEstimate poincare_estimate(const MetricGraph& g, std::size_t samples, std::uint64_t seed) {
  const bool linear = std::all_of(g.edges().begin(), g.edges().end(), [](const Edge& e) { return e.p == 2.0; });
  PoincareEstimate est;
  if (linear) {
    const LinearNumbering num(g);
    Eigen::MatrixXd K;
    Eigen::VectorXd M;
    assemble_linear(num, K, M);
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(K, Eigen::MatrixXd(M.asDiagonal()),
                                                                       Eigen::EigenvaluesOnly);
    // the constants span the kernel; the next eigenvalue belongs to zero-mean functions
    est.lambda = std::sqrt(std::max(solver.eigenvalues()[1], 0.0));
    est.method = PoincareMethod::Eigen;
    return est;
  }
  const GridLayout layout = GridLayout::of(g);
  const PBar pbar = pbar_of(g);
  Rng rng(seed);
  est.method = PoincareMethod::Sampled;
  est.samples = std::max<std::size_t>(samples, 1000);
  est.lambda = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < est.samples; ++s) {
    const GridFunction u = zero_mean_sample(rng, g, layout);
    const double denom = lp_norms(u, pbar).aggregate;
    if (denom <= 0.0) continue;
    est.lambda = std::min(est.lambda, derivative_lp_norms(u, pbar).aggregate / denom);
  }
  return est;
}

Trajectory heat_oracle(const MetricGraph& g, const GridFunction& v0, const Schedule& sched, const TimeGrid& tgrid) {
  for (const auto& e : g.edges()) {
    if (e.p != 2.0 || !e.gamma.is_identity()) {
      throw Error(Errc::NotLinearCase, "heat oracle needs p = 2 and identity nonlinearity on every edge");
    }
  }
  const LinearNumbering num(g);
  Eigen::MatrixXd K;
  Eigen::VectorXd M;
  assemble_linear(num, K, M);
  const auto n = static_cast<Eigen::Index>(num.size);

  Trajectory traj;
  traj.graph = g;
  traj.grid = tgrid;
  StepRecord first;
  first.v = v0.to_edgewise();
  first.u = initial_u(g, first.v);
  first.mass = integrate(first.v);
  traj.records.push_back(first);

  Eigen::PartialPivLU<Eigen::MatrixXd> lu;
  double factored_tau = -1.0;
  for (std::size_t i = 1; i <= tgrid.steps(); ++i) {
    const double t = tgrid.points()[i];
    const double tau = tgrid.tau(i);
    if (tau != factored_tau) {
      Eigen::MatrixXd A = K;
      for (Eigen::Index k = 0; k < n; ++k) A(k, k) += M[k] / tau;
      lu.compute(A);
      factored_tau = tau;
    }
    const GridFunction f = sched.sample_f(g, t);
    const auto omega = sched.sample_omega(g, t);
    const GridFunction& prev = traj.records.back().v;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    for (std::size_t e = 0; e < g.edge_count(); ++e) {
      const auto& grid = num.layout.edges[e];
      for (std::size_t j = 0; j <= grid.cells; ++j) {
        rhs[static_cast<Eigen::Index>(num.index(e, j))] += grid.mass(j) * (prev.at(e, j) / tau + f.at(e, j));
      }
    }
    for (const auto& [id, w] : omega) rhs[static_cast<Eigen::Index>(g.vertex_index(id))] += w;
    const Eigen::VectorXd x = lu.solve(rhs);

    StepRecord rec;
    rec.index = i;
    rec.t = t;
    rec.tau = tau;
    rec.u = GridFunction(num.layout, GridKind::VertexCoupled);
    for (std::size_t e = 0; e < g.edge_count(); ++e) {
      for (std::size_t j = 0; j <= num.layout.edges[e].cells; ++j) {
        rec.u.set(e, j, x[static_cast<Eigen::Index>(num.index(e, j))]);
      }
    }
    rec.v = rec.u.to_edgewise();
    rec.mass = integrate(rec.v);
    double flux = 0.0;
    for (const auto& [id, w] : omega) flux += w;
    rec.mass_gap = std::abs(rec.mass - traj.records.back().mass - tau * (integrate(f) + flux));
    traj.records.push_back(std::move(rec));
  }
  return traj;
}

}  // namespace qgdiff
