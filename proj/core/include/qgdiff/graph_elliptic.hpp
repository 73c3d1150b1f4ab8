#pragma once

#include <map>
#include <string>
#include <vector>

#include "qgdiff/grid_functions.hpp"
#include "qgdiff/metric_graph.hpp"
#include "qgdiff/solver_config.hpp"

namespace qgdiff {

/// alpha*gamma_e(u) - Delta_{p_e} u = g on every edge, u continuous, Kirchhoff
/// flux at vertex v equal to omega_v.
struct EllipticProblem {
  MetricGraph graph;
  GridFunction g;                        // EdgeWise load on GridLayout::of(graph)
  std::map<std::string, double> omega;   // absent vertices carry zero flux
  double alpha = 1.0;

  /// Zero load and zero fluxes.
  static EllipticProblem zero(const MetricGraph& graph, double alpha = 1.0);
  double omega_at(const std::string& vertex) const;
  std::vector<double> omega_vector() const;  // indexed like graph.vertices()
};

enum class Method { Monolithic, Gluing };

struct EdgeFlux {
  double a = 0.0;  // -rho(u')(0)
  double b = 0.0;  // rho(u')(length)
};

struct EllipticDiagnostics {
  double mass_gap = 0.0;                // |alpha int gamma(u) - int g - sum omega|
  double mass_scale = 1.0;              // 1 + |int g| + sum |omega|
  std::vector<double> kirchhoff_gaps;   // per vertex, consistent flux minus omega
  double continuity_gap = 0.0;          // largest trace disagreement before averaging (gluing)
  int newton_iterations = 0;
  int continuation_steps = 0;
  int shooting_evaluations = 0;
};

struct EllipticSolution {
  GridFunction u;  // VertexCoupled
  GridFunction v;  // EdgeWise, gamma_e(u)
  std::map<std::string, EdgeFlux> edge_fluxes;
  double residual_sup = 0.0;    // sup norm of the assembled weak-form residual
  double residual_scale = 1.0;  // relative test: residual_sup <= tol * residual_scale
  Method method = Method::Monolithic;
  EllipticDiagnostics diagnostics;
};

/// Global damped Newton on the assembled system with shared vertex unknowns.
EllipticSolution solve_monolithic(const EllipticProblem& prob, const SolverConfig& cfg = {});

/// Constructive solver: peels boundary edges and splits cycle edges, matching
/// vertex values by root finding on the transferred flux.
EllipticSolution solve_by_gluing(const EllipticProblem& prob, const SolverConfig& cfg = {});

EllipticSolution solve_elliptic(const EllipticProblem& prob, Method method, const SolverConfig& cfg = {});

/// Per-edge boundary fluxes (a_e, b_e). Uses the consistent endpoint flux (last
/// cell gradient plus the half-cell reaction) so the vertex sums reproduce omega.
std::map<std::string, EdgeFlux> decompose_edge_fluxes(const EllipticProblem& prob, const GridFunction& u);
std::map<std::string, EdgeFlux> decompose_edge_fluxes(const EllipticProblem& prob, const EllipticSolution& sol);

/// Residual of the assembled system at a continuous iterate u; returns the sup
/// norm and writes the relative scale.
double elliptic_residual(const EllipticProblem& prob, const GridFunction& u, double* scale = nullptr);

/// One implicit Euler step: alpha = 1/tau, g = v_prev/tau + f.
EllipticProblem resolvent_problem(const MetricGraph& graph, double tau, const GridFunction& v_prev,
                                  const GridFunction& f, const std::map<std::string, double>& omega);
EllipticSolution resolvent(const MetricGraph& graph, double tau, const GridFunction& v_prev,
                           const GridFunction& f, const std::map<std::string, double>& omega,
                           const SolverConfig& cfg = {}, const GridFunction* warm = nullptr,
                           Method method = Method::Monolithic);

/// Monolithic solve from an optional warm start (VertexCoupled u).
EllipticSolution solve_monolithic(const EllipticProblem& prob, const SolverConfig& cfg, const GridFunction* warm);

}  // namespace qgdiff
