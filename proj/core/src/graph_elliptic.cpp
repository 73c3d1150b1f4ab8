#include "qgdiff/graph_elliptic.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <optional>

#include "newton.hpp"
#include "qgdiff/edge_solver.hpp"
#include "qgdiff/error.hpp"

namespace qgdiff {
namespace {

constexpr double kSlopeCap = 1e12;

double clamp_slope(double s) {
  if (!std::isfinite(s) || s > kSlopeCap) return kSlopeCap;
  return std::max(s, 0.0);
}

// Unknowns: one per vertex, then the interior nodes of each edge.
struct Numbering {
  std::vector<std::size_t> offset;
  std::size_t size = 0;
  const GridLayout* layout = nullptr;

  explicit Numbering(const GridLayout& l) : layout(&l) {
    size = l.vertex_count;
    for (const auto& e : l.edges) {
      offset.push_back(size);
      size += e.cells - 1;
    }
  }
  std::size_t index(std::size_t e, std::size_t j) const {
    const auto& grid = layout->edges[e];
    if (j == 0) return grid.from;
    if (j == grid.cells) return grid.to;
    return offset[e] + j - 1;
  }
};

std::vector<double> pack(const Numbering& num, const GridFunction& u) {
  std::vector<double> x(num.size);
  for (std::size_t e = 0; e < u.edge_count(); ++e) {
    for (std::size_t j = 0; j < u.nodes(e); ++j) x[num.index(e, j)] = u.at(e, j);
  }
  return x;
}

GridFunction unpack(const Numbering& num, const std::vector<double>& x) {
  GridFunction u(*num.layout, GridKind::VertexCoupled);
  for (std::size_t e = 0; e < u.edge_count(); ++e) {
    for (std::size_t j = 0; j < u.nodes(e); ++j) u.set(e, j, x[num.index(e, j)]);
  }
  return u;
}

class GraphSystem final : public detail::DiscreteSystem {
 public:
  GraphSystem(const EllipticProblem& prob, const GridLayout& layout)
      : prob_(prob), layout_(layout), num_(layout_), omega_(prob.omega_vector()) {}

  std::size_t size() const override { return num_.size; }
  const Numbering& numbering() const { return num_; }

  double residual(std::span<const double> u, double eps, std::vector<double>& r) override {
    r.assign(num_.size, 0.0);
    double reaction = 0.0, load = 0.0, flux = 0.0, vertex = 0.0;
    for (std::size_t e = 0; e < layout_.edges.size(); ++e) {
      const auto& grid = layout_.edges[e];
      const Edge& edge = prob_.graph.edge(e);
      const FluxLaw law{edge.p, eps};
      const double h = grid.h();
      for (std::size_t j = 0; j <= grid.cells; ++j) {
        const std::size_t i = num_.index(e, j);
        const double m = grid.mass(j);
        const double rx = m * prob_.alpha * edge.gamma.eval_smoothed(u[i], eps);
        const double ld = m * prob_.g.at(e, j);
        r[i] += rx - ld;
        reaction = std::max(reaction, std::abs(rx));
        load = std::max(load, std::abs(ld));
      }
      for (std::size_t c = 1; c <= grid.cells; ++c) {
        const std::size_t i0 = num_.index(e, c - 1), i1 = num_.index(e, c);
        const double z = law.rho((u[i1] - u[i0]) / h);
        r[i1] += z;
        r[i0] -= z;
        flux = std::max(flux, std::abs(z));
      }
    }
    for (std::size_t v = 0; v < layout_.vertex_count; ++v) {
      r[v] -= omega_[v];
      vertex = std::max(vertex, std::abs(omega_[v]));
    }
    const double s = 1.0 + reaction + load + flux + vertex;
    return std::isfinite(s) ? s : std::numeric_limits<double>::max();
  }

  bool step(std::span<const double> u, double eps, detail::StepKind kind, const std::vector<double>& r,
            std::vector<double>& d) override {
    const bool secant = kind == detail::StepKind::Picard;
    triplets_.clear();
    for (std::size_t e = 0; e < layout_.edges.size(); ++e) {
      const auto& grid = layout_.edges[e];
      const Edge& edge = prob_.graph.edge(e);
      const FluxLaw law{edge.p, eps};
      const double h = grid.h();
      for (std::size_t j = 0; j <= grid.cells; ++j) {
        const std::size_t i = num_.index(e, j);
        double slope;
        if (secant) {
          slope = u[i] != 0.0 ? edge.gamma.eval_smoothed(u[i], eps) / u[i] : edge.gamma.derivative_smoothed(0.0, eps);
        } else {
          slope = edge.gamma.derivative_smoothed(u[i], eps);
        }
        add(i, i, grid.mass(j) * prob_.alpha * clamp_slope(slope));
      }
      for (std::size_t c = 1; c <= grid.cells; ++c) {
        const std::size_t i0 = num_.index(e, c - 1), i1 = num_.index(e, c);
        const double s = (u[i1] - u[i0]) / h;
        const double k = clamp_slope(secant ? law.secant(s) : law.rho_prime(s)) / h;
        add(i0, i0, k);
        add(i1, i1, k);
        add(i0, i1, -k);
        add(i1, i0, -k);
      }
    }
    Eigen::SparseMatrix<double> J(static_cast<Eigen::Index>(num_.size), static_cast<Eigen::Index>(num_.size));
    J.setFromTriplets(triplets_.begin(), triplets_.end());
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(num_.size));
    for (std::size_t i = 0; i < num_.size; ++i) rhs[static_cast<Eigen::Index>(i)] = -r[i];

    Eigen::VectorXd x;
    if (!ldlt_) {
      ldlt_ = std::make_unique<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>>();
      ldlt_->analyzePattern(J);
    }
    ldlt_->factorize(J);
    bool ok = ldlt_->info() == Eigen::Success;
    if (ok) {
      x = ldlt_->solve(rhs);
      ok = ldlt_->info() == Eigen::Success && x.allFinite();
    }
    if (!ok) {
      Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
      lu.compute(J);
      if (lu.info() != Eigen::Success) return false;
      x = lu.solve(rhs);
      if (lu.info() != Eigen::Success) return false;
    }
    d.assign(x.data(), x.data() + x.size());
    return true;
  }

 private:
  void add(std::size_t i, std::size_t j, double v) {
    triplets_.emplace_back(static_cast<int>(i), static_cast<int>(j), v);
  }

  const EllipticProblem& prob_;
  const GridLayout& layout_;
  Numbering num_;
  std::vector<double> omega_;
  std::vector<Eigen::Triplet<double>> triplets_;
  std::unique_ptr<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>> ldlt_;
};

// Constant c with alpha * sum_e length_e gamma_e(c) = int g + sum omega.
double balanced_constant(const EllipticProblem& prob) {
  double total = integrate(prob.g);
  for (const auto& [id, w] : prob.omega) total += w;
  auto f = [&](double c) {
    double s = 0.0;
    for (const auto& e : prob.graph.edges()) s += prob.alpha * e.length * e.gamma(c);
    return s;
  };
  const double ftol = 1e-14 * (1.0 + std::abs(total));
  return solve_increasing(f, total, -1.0, 1.0, ftol, 1e-15, 200);
}

void check_problem(const EllipticProblem& prob, const GridLayout& layout) {
  if (!(prob.alpha > 0.0)) throw Error(Errc::ShapeMismatch, "alpha must be positive");
  if (!(prob.g.layout() == layout)) throw Error(Errc::GridMismatch, "load does not live on the graph grid");
  for (const auto& [id, w] : prob.omega) {
    if (!prob.graph.find_vertex(id)) throw Error(Errc::UnknownVertex, "flux given for unknown vertex '" + id + "'");
  }
  for (const auto& e : prob.graph.edges()) {
    if (e.cells < 2) throw Error(Errc::ShapeMismatch, "edge '" + e.id + "' needs at least 2 cells");
  }
}

void fill_diagnostics(const EllipticProblem& prob, EllipticSolution& sol) {
  auto& d = sol.diagnostics;
  double reaction = 0.0;
  for (std::size_t e = 0; e < sol.v.edge_count(); ++e) {
    const auto& grid = sol.v.layout().edges[e];
    for (std::size_t j = 0; j <= grid.cells; ++j) reaction += grid.mass(j) * sol.v.at(e, j);
  }
  const double load = integrate(prob.g);
  double flux_sum = 0.0, flux_abs = 0.0;
  for (const auto& [id, w] : prob.omega) {
    flux_sum += w;
    flux_abs += std::abs(w);
  }
  d.mass_gap = std::abs(prob.alpha * reaction - load - flux_sum);
  d.mass_scale = 1.0 + std::abs(load) + flux_abs;

  sol.edge_fluxes = decompose_edge_fluxes(prob, sol.u);
  d.kirchhoff_gaps.assign(prob.graph.vertex_count(), 0.0);
  for (std::size_t e = 0; e < prob.graph.edge_count(); ++e) {
    const EdgeFlux& fl = sol.edge_fluxes.at(prob.graph.edge(e).id);
    d.kirchhoff_gaps[prob.graph.from_index(e)] += fl.a;
    d.kirchhoff_gaps[prob.graph.to_index(e)] += fl.b;
  }
  for (std::size_t v = 0; v < prob.graph.vertex_count(); ++v) {
    d.kirchhoff_gaps[v] -= prob.omega_at(prob.graph.vertices()[v]);
  }
}

EllipticSolution make_solution(const EllipticProblem& prob, GridFunction u, Method method) {
  EllipticSolution sol;
  sol.method = method;
  sol.v = GridFunction(u.layout(), GridKind::EdgeWise);
  for (std::size_t e = 0; e < u.edge_count(); ++e) {
    const Nonlinearity& gamma = prob.graph.edge(e).gamma;
    for (std::size_t j = 0; j < u.nodes(e); ++j) sol.v.set(e, j, gamma(u.at(e, j)));
  }
  sol.u = std::move(u);
  sol.residual_sup = elliptic_residual(prob, sol.u, &sol.residual_scale);
  fill_diagnostics(prob, sol);
  return sol;
}

// ---- gluing ----------------------------------------------------------------

using EdgeArrays = std::map<std::string, std::vector<double>>;
using VertexFluxes = std::map<std::string, double>;

double get_or_zero(const VertexFluxes& m, const std::string& k) {
  const auto it = m.find(k);
  return it == m.end() ? 0.0 : it->second;
}

double trace_at(const MetricGraph& g, const EdgeArrays& u, std::size_t e, std::size_t v) {
  const auto& arr = u.at(g.edge(e).id);
  return v == g.from_index(e) ? arr.front() : arr.back();
}

double vertex_mean(const MetricGraph& g, const EdgeArrays& u, std::size_t v) {
  double s = 0.0;
  for (const auto& inc : g.incident(v)) s += trace_at(g, u, inc.edge, v);
  return s / static_cast<double>(g.degree(v));
}

std::string signature(const MetricGraph& g) {
  std::vector<std::string> ids;
  for (const auto& e : g.edges()) ids.push_back(e.id);
  std::sort(ids.begin(), ids.end());
  std::string s;
  for (const auto& id : ids) s += id + ";";
  return s;
}

class Gluer {
 public:
  Gluer(double alpha, const SolverConfig& cfg) : alpha_(alpha), cfg_(cfg) {}

  EdgeArrays solve(const MetricGraph& g, const EdgeArrays& loads, const VertexFluxes& omega) {
    if (g.edge_count() == 1) return solve_single(g, loads, omega);
    const auto boundary = g.boundary_vertices();
    if (!boundary.empty()) return peel(g, loads, omega, boundary);
    return split(g, loads, omega);
  }

  int evaluations() const { return evaluations_; }
  int newton_iterations() const { return newton_iterations_; }

 private:
  EdgeBVP edge_problem(const Edge& e, const EdgeArrays& loads) const {
    EdgeBVP bvp;
    bvp.length = e.length;
    bvp.p = e.p;
    bvp.gamma = e.gamma;
    bvp.g = loads.at(e.id);
    bvp.alpha = alpha_;
    return bvp;
  }

  std::vector<double> solve_edge(const EdgeBVP& bvp, const std::string& id) {
    const auto it = warm_.find(id);
    const EdgeSolution sol = solve_edge_bvp(bvp, cfg_, it == warm_.end() ? nullptr : &it->second);
    newton_iterations_ += sol.newton_iters;
    warm_[id] = sol.u;
    return sol.u;
  }

  EdgeArrays solve_single(const MetricGraph& g, const EdgeArrays& loads, const VertexFluxes& omega) {
    const Edge& e = g.edge(0);
    EdgeBVP bvp = edge_problem(e, loads);
    bvp.a = get_or_zero(omega, e.from);
    bvp.b = get_or_zero(omega, e.to);
    return {{e.id, solve_edge(bvp, e.id)}};
  }

  // Root of an increasing mismatch; the returned arrays belong to the root.
  template <class Eval>
  EdgeArrays match(const std::string& key, Eval&& eval) {
    std::optional<std::pair<double, EdgeArrays>> last;
    auto f = [&](double eps) {
      ++evaluations_;
      auto [mismatch, arrays] = eval(eps);
      last.emplace(eps, std::move(arrays));
      return mismatch;
    };
    const auto it = warm_eps_.find(key);
    double x0 = 0.0, dx = 1.0, slope = 0.0;
    if (it != warm_eps_.end()) {
      x0 = it->second.first;
      slope = it->second.second;
      dx = 1e-3 * (1.0 + std::abs(x0));
    }
    const double ftol = 1e-4 * cfg_.match_tol;
    const double root = find_root_increasing(f, 0.0, x0, dx, slope, ftol, 1e-15, cfg_.max_doublings, &slope);
    warm_eps_[key] = {root, slope};
    if (!last || last->first != root) f(root);
    return std::move(last->second);
  }

  // Case (a): detach the edge at the smallest boundary vertex.
  EdgeArrays peel(const MetricGraph& g, const EdgeArrays& loads, const VertexFluxes& omega,
                  const std::vector<std::size_t>& boundary) {
    std::size_t leaf = boundary.front();
    for (std::size_t v : boundary) {
      if (g.vertices()[v] < g.vertices()[leaf]) leaf = v;
    }
    const std::size_t ei = g.incident(leaf).front().edge;
    const Edge& edge = g.edge(ei);
    const bool leaf_is_from = g.from_index(ei) == leaf;
    const std::string& leaf_id = g.vertices()[leaf];
    const std::string w_id = leaf_is_from ? edge.to : edge.from;
    const MetricGraph reduced = remove_leaf_edge(g, ei);
    const std::size_t w_reduced = reduced.vertex_index(w_id);
    EdgeBVP bvp = edge_problem(edge, loads);

    auto eval = [&](double eps) {
      VertexFluxes om = omega;
      om[w_id] = get_or_zero(omega, w_id) + eps;
      EdgeArrays arrays = solve(reduced, loads, om);
      const double u_reduced = vertex_mean(reduced, arrays, w_reduced);
      EdgeBVP b = bvp;
      if (leaf_is_from) {
        b.a = get_or_zero(omega, leaf_id);
        b.b = -eps;
      } else {
        b.b = get_or_zero(omega, leaf_id);
        b.a = -eps;
      }
      std::vector<double> u = solve_edge(b, edge.id);
      const double u_edge = leaf_is_from ? u.back() : u.front();
      arrays[edge.id] = std::move(u);
      return std::pair{u_reduced - u_edge, std::move(arrays)};
    };
    return match("peel:" + signature(g), eval);
  }

  // Case (b): split the highest-id edge on a cycle and cut the new vertex.
  EdgeArrays split(const MetricGraph& g, const EdgeArrays& loads, const VertexFluxes& omega) {
    std::optional<std::size_t> pick;
    for (std::size_t e = 0; e < g.edge_count(); ++e) {
      if (g.is_bridge(e)) continue;
      if (!pick || g.edge(e).id > g.edge(*pick).id) pick = e;
    }
    if (!pick) throw Error(Errc::Schema, "graph without boundary vertices has no cycle edge");
    const Edge& edge = g.edge(*pick);
    const std::size_t n = edge.cells;
    const std::size_t k = n / 2;
    const SplitResult sp = split_edge(g, edge.id, static_cast<double>(k) / static_cast<double>(n));
    const auto [cut, ends] = cut_vertex(sp.graph, sp.vertex);
    const std::size_t first_index = cut.edge_index(sp.first);
    const std::string va = cut.edge(first_index).to;
    const std::string vb = va == ends.first ? ends.second : ends.first;

    EdgeArrays sub_loads = loads;
    const auto& full = loads.at(edge.id);
    sub_loads.erase(edge.id);
    sub_loads[sp.first] = std::vector<double>(full.begin(), full.begin() + static_cast<std::ptrdiff_t>(k) + 1);
    sub_loads[sp.second] = std::vector<double>(full.begin() + static_cast<std::ptrdiff_t>(k), full.end());
    if (const auto it = warm_.find(edge.id); it != warm_.end() && !warm_.count(sp.first)) {
      warm_[sp.first] = std::vector<double>(it->second.begin(), it->second.begin() + static_cast<std::ptrdiff_t>(k) + 1);
      warm_[sp.second] = std::vector<double>(it->second.begin() + static_cast<std::ptrdiff_t>(k), it->second.end());
    }

    auto eval = [&](double eps) {
      VertexFluxes om = omega;
      om[va] = eps;
      om[vb] = -eps;
      EdgeArrays arrays = solve(cut, sub_loads, om);
      const double mismatch = arrays.at(sp.first).back() - arrays.at(sp.second).front();
      return std::pair{mismatch, std::move(arrays)};
    };
    EdgeArrays arrays = match("split:" + signature(g), eval);

    const auto& a = arrays.at(sp.first);
    const auto& b = arrays.at(sp.second);
    std::vector<double> merged(a.begin(), a.end());
    merged.back() = 0.5 * (a.back() + b.front());
    merged.insert(merged.end(), b.begin() + 1, b.end());
    arrays.erase(sp.first);
    arrays.erase(sp.second);
    arrays[edge.id] = merged;
    warm_[edge.id] = std::move(merged);
    return arrays;
  }

  double alpha_;
  const SolverConfig& cfg_;
  EdgeArrays warm_;
  std::map<std::string, std::pair<double, double>> warm_eps_;  // root and slope
  int evaluations_ = 0;
  int newton_iterations_ = 0;
};

}  // namespace

EllipticProblem EllipticProblem::zero(const MetricGraph& graph, double alpha) {
  EllipticProblem p{graph, GridFunction::edgewise(GridLayout::of(graph)), {}, alpha};
  return p;
}

double EllipticProblem::omega_at(const std::string& vertex) const {
  const auto it = omega.find(vertex);
  return it == omega.end() ? 0.0 : it->second;
}

std::vector<double> EllipticProblem::omega_vector() const {
  std::vector<double> w;
  for (const auto& v : graph.vertices()) w.push_back(omega_at(v));
  return w;
}

double elliptic_residual(const EllipticProblem& prob, const GridFunction& u, double* scale) {
  const GridLayout layout = GridLayout::of(prob.graph);
  check_problem(prob, layout);
  require_same_grid(u, prob.g);
  GraphSystem sys(prob, layout);
  const GridFunction uc = u.kind() == GridKind::VertexCoupled ? u : u.to_vertex_coupled(1e300);
  std::vector<double> r;
  const double s = sys.residual(pack(sys.numbering(), uc), 0.0, r);
  if (scale) *scale = s;
  return detail::sup_norm(r);
}

EllipticSolution solve_monolithic(const EllipticProblem& prob, const SolverConfig& cfg, const GridFunction* warm) {
  const GridLayout layout = GridLayout::of(prob.graph);
  check_problem(prob, layout);
  GraphSystem sys(prob, layout);
  std::vector<double> x;
  if (warm && warm->layout() == layout && warm->kind() == GridKind::VertexCoupled) {
    x = pack(sys.numbering(), *warm);
  } else {
    x.assign(sys.size(), balanced_constant(prob));
  }
  const detail::NewtonStats stats = detail::solve_system(sys, x, cfg);
  EllipticSolution sol = make_solution(prob, unpack(sys.numbering(), x), Method::Monolithic);
  sol.diagnostics.newton_iterations = stats.newton_iterations;
  sol.diagnostics.continuation_steps = stats.continuation_steps;
  return sol;
}

EllipticSolution solve_monolithic(const EllipticProblem& prob, const SolverConfig& cfg) {
  return solve_monolithic(prob, cfg, nullptr);
}

EllipticSolution solve_by_gluing(const EllipticProblem& prob, const SolverConfig& cfg) {
  const GridLayout layout = GridLayout::of(prob.graph);
  check_problem(prob, layout);
  EdgeArrays loads;
  for (std::size_t e = 0; e < prob.graph.edge_count(); ++e) loads[prob.graph.edge(e).id] = prob.g.edge_values(e);
  Gluer gluer(prob.alpha, cfg);
  const EdgeArrays arrays = gluer.solve(prob.graph, loads, prob.omega);

  GridFunction u(layout, GridKind::VertexCoupled);
  for (std::size_t e = 0; e < prob.graph.edge_count(); ++e) {
    const auto& arr = arrays.at(prob.graph.edge(e).id);
    for (std::size_t j = 1; j + 1 < arr.size(); ++j) u.set(e, j, arr[j]);
  }
  double gap = 0.0;
  for (std::size_t v = 0; v < prob.graph.vertex_count(); ++v) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& inc : prob.graph.incident(v)) {
      const double t = trace_at(prob.graph, arrays, inc.edge, v);
      lo = std::min(lo, t);
      hi = std::max(hi, t);
    }
    gap = std::max(gap, hi - lo);
    u.set_vertex_value(v, vertex_mean(prob.graph, arrays, v));
  }
  EllipticSolution sol = make_solution(prob, std::move(u), Method::Gluing);
  sol.diagnostics.continuity_gap = gap;
  sol.diagnostics.shooting_evaluations = gluer.evaluations();
  sol.diagnostics.newton_iterations = gluer.newton_iterations();
  return sol;
}

EllipticSolution solve_elliptic(const EllipticProblem& prob, Method method, const SolverConfig& cfg) {
  return method == Method::Gluing ? solve_by_gluing(prob, cfg) : solve_monolithic(prob, cfg);
}

std::map<std::string, EdgeFlux> decompose_edge_fluxes(const EllipticProblem& prob, const GridFunction& u) {
  std::map<std::string, EdgeFlux> out;
  for (std::size_t e = 0; e < prob.graph.edge_count(); ++e) {
    const Edge& edge = prob.graph.edge(e);
    const auto& grid = u.layout().edges[e];
    const FluxLaw law{edge.p, 0.0};
    const double h = grid.h();
    const std::size_t n = grid.cells;
    auto reaction = [&](std::size_t j) { return prob.alpha * edge.gamma(u.at(e, j)) - prob.g.at(e, j); };
    EdgeFlux f;
    f.a = -law.rho((u.at(e, 1) - u.at(e, 0)) / h) + 0.5 * h * reaction(0);
    f.b = law.rho((u.at(e, n) - u.at(e, n - 1)) / h) + 0.5 * h * reaction(n);
    out[edge.id] = f;
  }
  return out;
}

std::map<std::string, EdgeFlux> decompose_edge_fluxes(const EllipticProblem& prob, const EllipticSolution& sol) {
  return decompose_edge_fluxes(prob, sol.u);
}

EllipticProblem resolvent_problem(const MetricGraph& graph, double tau, const GridFunction& v_prev,
                                  const GridFunction& f, const std::map<std::string, double>& omega) {
  if (!(tau > 0.0)) throw Error(Errc::ShapeMismatch, "time step must be positive");
  require_same_grid(v_prev, f);
  EllipticProblem prob;
  prob.graph = graph;
  prob.alpha = 1.0 / tau;
  prob.g = GridFunction(v_prev.layout(), GridKind::EdgeWise);
  for (std::size_t e = 0; e < v_prev.edge_count(); ++e) {
    for (std::size_t j = 0; j < v_prev.nodes(e); ++j) prob.g.set(e, j, v_prev.at(e, j) / tau + f.at(e, j));
  }
  prob.omega = omega;
  return prob;
}

EllipticSolution resolvent(const MetricGraph& graph, double tau, const GridFunction& v_prev, const GridFunction& f,
                           const std::map<std::string, double>& omega, const SolverConfig& cfg,
                           const GridFunction* warm, Method method) {
  const EllipticProblem prob = resolvent_problem(graph, tau, v_prev, f, omega);
  if (method == Method::Gluing) return solve_by_gluing(prob, cfg);
  return solve_monolithic(prob, cfg, warm);
}

}  // namespace qgdiff
