#include "qgdiff/grid_functions.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "qgdiff/error.hpp"
#include "qgdiff/nonlinearity.hpp"

namespace qgdiff {
namespace {

double signed_power_primitive(double y, double p) {
  // antiderivative of |y|^p
  return std::copysign(std::pow(std::abs(y), p + 1.0) / (p + 1.0), y);
}

// int_0^h |a + (b - a) s/h|^p ds
double cell_power_integral(double a, double b, double h, double p) {
  const double scale = std::max(std::abs(a), std::abs(b));
  if (scale == 0.0) return 0.0;
  if (std::abs(b - a) <= 1e-3 * scale) {
    // same sign and nearly constant: 5-point Gauss-Legendre
    static constexpr std::array<double, 5> x{-0.9061798459386640, -0.5384693101056831, 0.0,
                                             0.5384693101056831, 0.9061798459386640};
    static constexpr std::array<double, 5> w{0.2369268850561891, 0.4786286704993665,
                                             0.5688888888888889, 0.4786286704993665,
                                             0.2369268850561891};
    double s = 0.0;
    for (std::size_t i = 0; i < 5; ++i) {
      const double y = 0.5 * (a + b) + 0.5 * (b - a) * x[i];
      s += w[i] * std::pow(std::abs(y), p);
    }
    return 0.5 * h * s;
  }
  return h * (signed_power_primitive(b, p) - signed_power_primitive(a, p)) / (b - a);
}

GridKind combined_kind(const GridFunction& a, const GridFunction& b) {
  return (a.kind() == GridKind::VertexCoupled && b.kind() == GridKind::VertexCoupled)
             ? GridKind::VertexCoupled
             : GridKind::EdgeWise;
}

template <class Op>
GridFunction combine(const GridFunction& a, const GridFunction& b, Op op) {
  require_same_grid(a, b);
  const GridKind kind = combined_kind(a, b);
  GridFunction out(a.layout(), kind);
  for (std::size_t e = 0; e < a.edge_count(); ++e) {
    for (std::size_t j = 0; j < a.nodes(e); ++j) out.set(e, j, op(a.at(e, j), b.at(e, j)));
  }
  if (kind == GridKind::VertexCoupled) {
    for (std::size_t v = 0; v < a.layout().vertex_count; ++v) {
      out.set_vertex_value(v, op(a.vertex_value(v), b.vertex_value(v)));
    }
  }
  return out;
}

}  // namespace

GridLayout GridLayout::of(const MetricGraph& g) {
  GridLayout l;
  l.vertex_count = g.vertex_count();
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    l.edges.push_back({g.edge(e).cells, g.edge(e).length, g.from_index(e), g.to_index(e)});
  }
  return l;
}

GridFunction::GridFunction(GridLayout layout, GridKind kind) : layout_(std::move(layout)), kind_(kind) {
  values_.resize(layout_.edges.size());
  for (std::size_t e = 0; e < layout_.edges.size(); ++e) {
    const std::size_t n = layout_.edges[e].cells + 1;
    values_[e].assign(kind_ == GridKind::EdgeWise ? n : n - 2, 0.0);
  }
  if (kind_ == GridKind::VertexCoupled) vertex_values_.assign(layout_.vertex_count, 0.0);
}

GridFunction GridFunction::edgewise(const GridLayout& layout, double value) {
  GridFunction f(layout, GridKind::EdgeWise);
  for (auto& arr : f.values_) std::fill(arr.begin(), arr.end(), value);
  return f;
}

GridFunction GridFunction::vertex_coupled(const GridLayout& layout, double value) {
  GridFunction f(layout, GridKind::VertexCoupled);
  for (auto& arr : f.values_) std::fill(arr.begin(), arr.end(), value);
  std::fill(f.vertex_values_.begin(), f.vertex_values_.end(), value);
  return f;
}

GridFunction GridFunction::sample_edgewise(const GridLayout& layout,
                                           const std::function<double(std::size_t, double)>& f) {
  GridFunction out(layout, GridKind::EdgeWise);
  for (std::size_t e = 0; e < layout.edges.size(); ++e) {
    for (std::size_t j = 0; j <= layout.edges[e].cells; ++j) out.values_[e][j] = f(e, layout.edges[e].node(j));
  }
  return out;
}

double GridFunction::at(std::size_t e, std::size_t j) const {
  if (kind_ == GridKind::EdgeWise) return values_[e][j];
  const auto& grid = layout_.edges[e];
  if (j == 0) return vertex_values_[grid.from];
  if (j == grid.cells) return vertex_values_[grid.to];
  return values_[e][j - 1];
}

void GridFunction::set(std::size_t e, std::size_t j, double value) {
  if (kind_ == GridKind::EdgeWise) {
    values_[e][j] = value;
    return;
  }
  const auto& grid = layout_.edges[e];
  if (j == 0) vertex_values_[grid.from] = value;
  else if (j == grid.cells) vertex_values_[grid.to] = value;
  else values_[e][j - 1] = value;
}

std::vector<double> GridFunction::edge_values(std::size_t e) const {
  std::vector<double> out(nodes(e));
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = at(e, j);
  return out;
}

void GridFunction::set_edge_values(std::size_t e, std::span<const double> values) {
  if (values.size() != nodes(e)) throw Error(Errc::GridMismatch, "nodal array has the wrong length");
  for (std::size_t j = 0; j < values.size(); ++j) set(e, j, values[j]);
}

GridFunction GridFunction::to_edgewise() const {
  GridFunction out(layout_, GridKind::EdgeWise);
  for (std::size_t e = 0; e < edge_count(); ++e) out.values_[e] = edge_values(e);
  return out;
}

GridFunction GridFunction::to_vertex_coupled(double tol) const {
  if (kind_ == GridKind::VertexCoupled) return *this;
  GridFunction out(layout_, GridKind::VertexCoupled);
  std::vector<char> seen(layout_.vertex_count, 0);
  auto assign = [&](std::size_t v, double value) {
    if (!seen[v]) {
      out.vertex_values_[v] = value;
      seen[v] = 1;
    } else if (std::abs(out.vertex_values_[v] - value) > tol) {
      throw Error(Errc::TraceMismatch, "edge traces disagree at vertex " + std::to_string(v));
    }
  };
  for (std::size_t e = 0; e < edge_count(); ++e) {
    const auto& grid = layout_.edges[e];
    assign(grid.from, values_[e].front());
    assign(grid.to, values_[e].back());
    for (std::size_t j = 1; j < grid.cells; ++j) out.values_[e][j - 1] = values_[e][j];
  }
  return out;
}

GridFunction GridFunction::map(const std::function<double(std::size_t, double)>& f) const {
  GridFunction out(layout_, GridKind::EdgeWise);
  for (std::size_t e = 0; e < edge_count(); ++e) {
    for (std::size_t j = 0; j < nodes(e); ++j) out.values_[e][j] = f(e, at(e, j));
  }
  return out;
}

double GridFunction::max_abs() const {
  double m = 0.0;
  for (const auto& arr : values_) {
    for (double v : arr) m = std::max(m, std::abs(v));
  }
  for (double v : vertex_values_) m = std::max(m, std::abs(v));
  return m;
}

GridFunction operator+(const GridFunction& a, const GridFunction& b) {
  return combine(a, b, [](double x, double y) { return x + y; });
}

GridFunction operator-(const GridFunction& a, const GridFunction& b) {
  return combine(a, b, [](double x, double y) { return x - y; });
}

GridFunction operator*(double s, const GridFunction& a) {
  GridFunction out = a;
  for (auto& arr : out.values_) {
    for (double& v : arr) v *= s;
  }
  for (double& v : out.vertex_values_) v *= s;
  return out;
}

PBar pbar_of(const MetricGraph& g) {
  PBar p;
  for (const auto& e : g.edges()) p.push_back(e.p);
  return p;
}

void require_same_grid(const GridFunction& a, const GridFunction& b) {
  if (!(a.layout() == b.layout())) throw Error(Errc::GridMismatch, "grid functions live on different grids");
}

double integrate(const GridFunction& f) {
  double total = 0.0;
  for (std::size_t e = 0; e < f.edge_count(); ++e) {
    const auto& grid = f.layout().edges[e];
    double s = 0.0;
    for (std::size_t j = 0; j <= grid.cells; ++j) s += grid.mass(j) * f.at(e, j);
    total += s;
  }
  return total;
}

double integrate_positive_part(const GridFunction& f) {
  double total = 0.0;
  for (std::size_t e = 0; e < f.edge_count(); ++e) {
    const auto& grid = f.layout().edges[e];
    for (std::size_t j = 0; j <= grid.cells; ++j) total += grid.mass(j) * std::max(f.at(e, j), 0.0);
  }
  return total;
}

double l1_norm(const GridFunction& f) {
  double total = 0.0;
  for (std::size_t e = 0; e < f.edge_count(); ++e) {
    const auto& grid = f.layout().edges[e];
    for (std::size_t j = 0; j <= grid.cells; ++j) total += grid.mass(j) * std::abs(f.at(e, j));
  }
  return total;
}

LpNorms lp_norms(const GridFunction& f, const PBar& pbar) {
  if (pbar.size() != f.edge_count()) throw Error(Errc::GridMismatch, "exponent list does not cover every edge");
  LpNorms out;
  for (std::size_t e = 0; e < f.edge_count(); ++e) {
    const auto& grid = f.layout().edges[e];
    const double p = pbar[e];
    double s = 0.0;
    for (std::size_t c = 1; c <= grid.cells; ++c) s += cell_power_integral(f.at(e, c - 1), f.at(e, c), grid.h(), p);
    const double norm = std::pow(s, 1.0 / p);
    out.per_edge.push_back(norm);
    out.aggregate += norm;
  }
  return out;
}

LpNorms derivative_lp_norms(const GridFunction& f, const PBar& pbar) {
  if (pbar.size() != f.edge_count()) throw Error(Errc::GridMismatch, "exponent list does not cover every edge");
  LpNorms out;
  for (std::size_t e = 0; e < f.edge_count(); ++e) {
    const auto& grid = f.layout().edges[e];
    const double p = pbar[e];
    double s = 0.0;
    for (std::size_t c = 1; c <= grid.cells; ++c) {
      const double d = (f.at(e, c) - f.at(e, c - 1)) / grid.h();
      s += grid.h() * std::pow(std::abs(d), p);
    }
    const double norm = std::pow(s, 1.0 / p);
    out.per_edge.push_back(norm);
    out.aggregate += norm;
  }
  return out;
}

double upwind_value(const MetricGraph& g, const GridFunction& z, std::string_view e, std::string_view v) {
  const std::size_t ei = g.edge_index(e);
  const std::size_t vi = g.vertex_index(v);
  const auto& grid = z.layout().edges.at(ei);
  if (vi == g.to_index(ei)) return z.at(ei, grid.cells);
  if (vi == g.from_index(ei)) return -z.at(ei, 0);
  throw Error(Errc::NotIncident, "vertex '" + std::string(v) + "' is not an endpoint of '" + std::string(e) + "'");
}

namespace {

double flux_at_vertex(const MetricGraph& g, const GridFunction& u, const PBar& pbar, std::size_t vi,
                      const GridFunction* reaction) {
  if (pbar.size() != g.edge_count()) throw Error(Errc::GridMismatch, "exponent list does not cover every edge");
  double total = 0.0;
  for (const auto& inc : g.incident(vi)) {
    const std::size_t e = inc.edge;
    const auto& grid = u.layout().edges[e];
    const FluxLaw law{pbar[e], 0.0};
    const double h = grid.h();
    if (inc.role == Role::Terminal) {
      double z = law.rho((u.at(e, grid.cells) - u.at(e, grid.cells - 1)) / h);
      if (reaction) z += 0.5 * h * reaction->at(e, grid.cells);
      total += z;
    } else {
      double z = -law.rho((u.at(e, 1) - u.at(e, 0)) / h);
      if (reaction) z += 0.5 * h * reaction->at(e, 0);
      total += z;
    }
  }
  return total;
}

}  // namespace

double kirchhoff_flux(const MetricGraph& g, const GridFunction& u, const PBar& pbar, std::string_view v) {
  return flux_at_vertex(g, u, pbar, g.vertex_index(v), nullptr);
}

double consistent_kirchhoff_flux(const MetricGraph& g, const GridFunction& u, const PBar& pbar,
                                 const GridFunction& reaction, std::string_view v) {
  require_same_grid(u, reaction);
  return flux_at_vertex(g, u, pbar, g.vertex_index(v), &reaction);
}

double greens_residual(const GridFunction& z, const GridFunction& w) {
  require_same_grid(z, w);
  const auto& layout = z.layout();
  double volume = 0.0;
  double boundary = 0.0;
  double scale = 0.0;
  for (std::size_t e = 0; e < z.edge_count(); ++e) {
    const auto& grid = layout.edges[e];
    for (std::size_t c = 1; c <= grid.cells; ++c) {
      const double za = z.at(e, c - 1), zb = z.at(e, c);
      const double wa = w.at(e, c - 1), wb = w.at(e, c);
      // int z'w and int zw' on one cell, both integrands are exact quadratics
      const double t1 = (zb - za) * 0.5 * (wa + wb);
      const double t2 = (wb - wa) * 0.5 * (za + zb);
      volume += t1 + t2;
      scale += std::abs(t1) + std::abs(t2);
    }
    // {z}_e at the terminal vertex is +z(l), at the initial vertex -z(0)
    const double wt = w.kind() == GridKind::VertexCoupled ? w.vertex_value(grid.to) : w.at(e, grid.cells);
    const double wi = w.kind() == GridKind::VertexCoupled ? w.vertex_value(grid.from) : w.at(e, 0);
    boundary += z.at(e, grid.cells) * wt - z.at(e, 0) * wi;
  }
  return std::abs(volume - boundary);
}

double ll_violation(const GridFunction& u, const GridFunction& v, std::span<const double> k_grid) {
  require_same_grid(u, v);
  if (k_grid.empty()) throw Error(Errc::EmptyKGrid, "k-grid is empty");
  double worst = -std::numeric_limits<double>::infinity();
  for (double k : k_grid) {
    double up = 0.0, vp = 0.0, un = 0.0, vn = 0.0;
    for (std::size_t e = 0; e < u.edge_count(); ++e) {
      const auto& grid = u.layout().edges[e];
      for (std::size_t j = 0; j <= grid.cells; ++j) {
        const double m = grid.mass(j);
        up += m * std::max(u.at(e, j) - k, 0.0);
        vp += m * std::max(v.at(e, j) - k, 0.0);
        un += m * std::max(-(u.at(e, j) + k), 0.0);
        vn += m * std::max(-(v.at(e, j) + k), 0.0);
      }
    }
    worst = std::max({worst, up - vp, un - vn});
  }
  return worst;
}

bool ll_compare(const GridFunction& u, const GridFunction& v, std::span<const double> k_grid, double tol) {
  return ll_violation(u, v, k_grid) <= tol;
}

double bracket_l1(const GridFunction& x, const GridFunction& y) {
  require_same_grid(x, y);
  const double zero_tol = 1e-12 * x.max_abs();
  double total = 0.0;
  for (std::size_t e = 0; e < x.edge_count(); ++e) {
    const auto& grid = x.layout().edges[e];
    for (std::size_t j = 0; j <= grid.cells; ++j) {
      const double m = grid.mass(j);
      const double xv = x.at(e, j);
      const double yv = y.at(e, j);
      if (std::abs(xv) <= zero_tol) total += m * std::abs(yv);
      else total += m * (xv > 0.0 ? yv : -yv);
    }
  }
  return total;
}

}  // namespace qgdiff
