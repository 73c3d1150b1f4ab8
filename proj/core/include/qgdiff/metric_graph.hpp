#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qgdiff/expr.hpp"
#include "qgdiff/nonlinearity.hpp"

namespace qgdiff {

inline constexpr std::size_t kDefaultCells = 64;

/// Source term on one edge, f(t, x) = expr(offset + scale * x, t). An empty
/// expression is the zero source. Reparametrisation and splitting only touch
/// offset and scale, so applying them twice restores the original exactly.
struct EdgeSource {
  std::optional<expr::Expression> expr;
  double offset = 0.0;
  double scale = 1.0;

  double operator()(double t, double x) const {
    if (!expr) return 0.0;
    return expr->evaluate({offset + scale * x, t});
  }
  bool is_zero() const { return !expr.has_value(); }
};

struct Edge {
  std::string id;
  std::string from;  // initial vertex, coordinate 0
  std::string to;    // terminal vertex, coordinate length
  double length = 1.0;
  double p = 2.0;
  Nonlinearity gamma;
  EdgeSource source;
  std::size_t cells = 0;  // 0 means "use the graph default"
};

enum class Role { Initial, Terminal };

struct Incidence {
  std::size_t edge;
  Role role;
};

struct GraphSpec {
  std::vector<std::string> vertices;
  std::vector<Edge> edges;
  std::size_t default_cells = kDefaultCells;
};

struct VertexTopology {
  std::size_t degree = 0;
  bool is_boundary = false;
  std::vector<std::pair<std::string, Role>> incident;
};

/// Connected compact metric graph without loops or multiple edges. Immutable
/// after construction; transformations return new graphs.
class MetricGraph {
 public:
  static MetricGraph build(GraphSpec spec);

  const std::vector<std::string>& vertices() const { return vertices_; }
  const std::vector<Edge>& edges() const { return edges_; }
  std::size_t vertex_count() const { return vertices_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  const Edge& edge(std::size_t e) const { return edges_[e]; }

  std::size_t vertex_index(std::string_view id) const;
  std::size_t edge_index(std::string_view id) const;
  std::optional<std::size_t> find_vertex(std::string_view id) const;
  std::optional<std::size_t> find_edge(std::string_view id) const;

  std::size_t from_index(std::size_t e) const { return endpoints_[e].first; }
  std::size_t to_index(std::size_t e) const { return endpoints_[e].second; }
  const std::vector<Incidence>& incident(std::size_t v) const { return incidence_[v]; }
  std::size_t degree(std::size_t v) const { return incidence_[v].size(); }

  VertexTopology topology(std::string_view v) const;
  std::vector<std::size_t> boundary_vertices() const;
  double total_length() const;

  /// True if removing edge e disconnects the graph.
  bool is_bridge(std::size_t e) const;

  GraphSpec to_spec() const;

 private:
  std::vector<std::string> vertices_;
  std::vector<Edge> edges_;
  std::vector<std::pair<std::size_t, std::size_t>> endpoints_;
  std::vector<std::vector<Incidence>> incidence_;
};

VertexTopology vertex_topology(const MetricGraph& g, std::string_view v);

/// Swap the orientation of edge e; the source becomes x -> f(length - x).
MetricGraph reparametrize_edge(const MetricGraph& g, std::string_view e);

struct SplitResult {
  MetricGraph graph;
  std::string vertex;  // the fresh degree-2 vertex
  std::string first;   // edge from the old initial vertex to the new vertex
  std::string second;  // edge from the new vertex to the old terminal vertex
};

/// Split edge e at fraction `at` of its length. The split point must land on a
/// grid node of e so that the node set of the result contains the original one.
SplitResult split_edge(const MetricGraph& g, std::string_view e, double at);

/// Replace degree-2 vertex v by two boundary vertices, one per incident edge.
/// Returns the new graph and the ids of the two new vertices in incidence order.
/// The result may be disconnected only if v was a cut vertex; that is rejected.
std::pair<MetricGraph, std::pair<std::string, std::string>> cut_vertex(const MetricGraph& g,
                                                                        std::string_view v);

/// Remove boundary edge e together with its degree-1 endpoint.
MetricGraph remove_leaf_edge(const MetricGraph& g, std::size_t e);

std::string fresh_id(const std::vector<std::string>& taken, const std::string& stem);

}  // namespace qgdiff
