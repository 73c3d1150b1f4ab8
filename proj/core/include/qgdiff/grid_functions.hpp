#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "qgdiff/metric_graph.hpp"

namespace qgdiff {

struct EdgeGrid {
  std::size_t cells = 0;
  double length = 0.0;
  std::size_t from = 0;  // vertex index of node 0
  std::size_t to = 0;    // vertex index of node `cells`

  double h() const { return length / static_cast<double>(cells); }
  double node(std::size_t j) const { return static_cast<double>(j) * h(); }
  /// Lumped (trapezoid) mass of node j.
  double mass(std::size_t j) const { return (j == 0 || j == cells) ? 0.5 * h() : h(); }

  friend bool operator==(const EdgeGrid&, const EdgeGrid&) = default;
};

/// Per-edge uniform grids of a metric graph, plus the edge-vertex incidence.
struct GridLayout {
  std::vector<EdgeGrid> edges;
  std::size_t vertex_count = 0;

  static GridLayout of(const MetricGraph& g);
  std::size_t edge_count() const { return edges.size(); }
  friend bool operator==(const GridLayout&, const GridLayout&) = default;
};

enum class GridKind { VertexCoupled, EdgeWise };

/// Nodal values of a piecewise-linear function on the graph. A VertexCoupled
/// function stores one slot per vertex that every incident edge endpoint
/// aliases, so it is continuous by construction. EdgeWise functions keep
/// independent traces on each edge.
class GridFunction {
 public:
  GridFunction() = default;
  GridFunction(GridLayout layout, GridKind kind);

  static GridFunction edgewise(const GridLayout& layout, double value = 0.0);
  static GridFunction vertex_coupled(const GridLayout& layout, double value = 0.0);
  /// Sample f(edge, x) at every node.
  static GridFunction sample_edgewise(const GridLayout& layout,
                                      const std::function<double(std::size_t, double)>& f);

  GridKind kind() const { return kind_; }
  const GridLayout& layout() const { return layout_; }
  std::size_t edge_count() const { return layout_.edges.size(); }
  std::size_t nodes(std::size_t e) const { return layout_.edges[e].cells + 1; }

  double at(std::size_t e, std::size_t j) const;
  void set(std::size_t e, std::size_t j, double value);
  /// Full nodal array of edge e including both endpoint traces.
  std::vector<double> edge_values(std::size_t e) const;
  void set_edge_values(std::size_t e, std::span<const double> values);

  double vertex_value(std::size_t v) const { return vertex_values_[v]; }
  void set_vertex_value(std::size_t v, double value) { vertex_values_[v] = value; }
  const std::vector<double>& vertex_values() const { return vertex_values_; }

  GridFunction to_edgewise() const;
  /// Fails with TraceMismatch if incident traces differ by more than tol.
  GridFunction to_vertex_coupled(double tol = 1e-10) const;

  /// Nodewise map into an EdgeWise function.
  GridFunction map(const std::function<double(std::size_t, double)>& f) const;
  double max_abs() const;

  friend GridFunction operator+(const GridFunction& a, const GridFunction& b);
  friend GridFunction operator-(const GridFunction& a, const GridFunction& b);
  friend GridFunction operator*(double s, const GridFunction& a);

 private:
  GridLayout layout_;
  GridKind kind_ = GridKind::EdgeWise;
  // EdgeWise: all nodes; VertexCoupled: interior nodes 1..cells-1 only.
  std::vector<std::vector<double>> values_;
  std::vector<double> vertex_values_;
};

using PBar = std::vector<double>;

PBar pbar_of(const MetricGraph& g);

void require_same_grid(const GridFunction& a, const GridFunction& b);

/// Sum over edges of the composite trapezoid rule.
double integrate(const GridFunction& f);
/// Trapezoid integral of the nodal positive part of f.
double integrate_positive_part(const GridFunction& f);
double l1_norm(const GridFunction& f);

struct LpNorms {
  std::vector<double> per_edge;
  double aggregate = 0.0;
};
/// Exact L^{p_e} norm of the piecewise-linear interpolant on each edge.
LpNorms lp_norms(const GridFunction& f, const PBar& pbar);
/// Sum over edges of the L^{p_e} norm of the (piecewise constant) derivative.
LpNorms derivative_lp_norms(const GridFunction& f, const PBar& pbar);

/// {z}_e(v): +z_e(length) at the terminal vertex, -z_e(0) at the initial vertex.
double upwind_value(const MetricGraph& g, const GridFunction& z, std::string_view e,
                    std::string_view v);

/// Sum over incident edges of the upwind values of rho_{p_e}(u'_e), using the
/// derivative on the cell adjacent to the vertex.
double kirchhoff_flux(const MetricGraph& g, const GridFunction& u, const PBar& pbar,
                      std::string_view v);

/// Same flux with the consistent half-cell correction: the endpoint trace of
/// the flux is rho(u') on the last cell plus the integral of `reaction` over
/// the adjacent half cell, with reaction = alpha gamma(u) - g on each edge.
double consistent_kirchhoff_flux(const MetricGraph& g, const GridFunction& u, const PBar& pbar,
                                 const GridFunction& reaction, std::string_view v);

/// |int z'w + int z w' - sum_v (sum_e {z}_e(v)) w(v)| with exact quadrature
/// for piecewise-linear z and w.
double greens_residual(const GridFunction& z, const GridFunction& w);

/// u << v on the given k-grid: int (u-k)^+ <= int (v-k)^+ and
/// int (u+k)^- <= int (v+k)^- for every k.
bool ll_compare(const GridFunction& u, const GridFunction& v, std::span<const double> k_grid,
                double tol = 0.0);
/// Largest violation of the ll inequalities over the k-grid (<= 0 means u << v).
double ll_violation(const GridFunction& u, const GridFunction& v, std::span<const double> k_grid);

/// L1 bracket [x, y] = int sign0(x) y + int_{x = 0} |y|, zero set detected
/// with the relative threshold 1e-12 * ||x||_inf.
double bracket_l1(const GridFunction& x, const GridFunction& y);

}  // namespace qgdiff
