#include "qgdiff/metric_graph.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>

#include "qgdiff/error.hpp"

namespace qgdiff {
namespace {

bool connected_without(std::size_t nv, const std::vector<std::pair<std::size_t, std::size_t>>& ends,
                       std::optional<std::size_t> skip) {
  if (nv == 0) return false;
  std::vector<std::vector<std::size_t>> adj(nv);
  for (std::size_t e = 0; e < ends.size(); ++e) {
    if (skip && *skip == e) continue;
    adj[ends[e].first].push_back(ends[e].second);
    adj[ends[e].second].push_back(ends[e].first);
  }
  std::vector<char> seen(nv, 0);
  std::vector<std::size_t> stack{0};
  seen[0] = 1;
  std::size_t count = 1;
  while (!stack.empty()) {
    const std::size_t v = stack.back();
    stack.pop_back();
    for (std::size_t w : adj[v]) {
      if (!seen[w]) {
        seen[w] = 1;
        ++count;
        stack.push_back(w);
      }
    }
  }
  return count == nv;
}

}  // namespace

MetricGraph MetricGraph::build(GraphSpec spec) {
  MetricGraph g;
  std::unordered_map<std::string, std::size_t> vindex;
  for (auto& v : spec.vertices) {
    if (v.empty()) throw Error(Errc::Schema, "vertex id must be nonempty");
    if (!vindex.emplace(v, g.vertices_.size()).second) {
      throw Error(Errc::Schema, "duplicate vertex id '" + v + "'");
    }
    g.vertices_.push_back(v);
  }
  if (g.vertices_.empty()) throw Error(Errc::Disconnected, "graph has no vertices");
  if (spec.default_cells < 2) throw Error(Errc::Schema, "default cell count must be at least 2");

  std::set<std::string> edge_ids;
  std::set<std::pair<std::size_t, std::size_t>> pairs;
  for (auto& e : spec.edges) {
    if (e.id.empty()) throw Error(Errc::Schema, "edge id must be nonempty");
    if (!edge_ids.insert(e.id).second) throw Error(Errc::Schema, "duplicate edge id '" + e.id + "'");
    auto from = vindex.find(e.from);
    auto to = vindex.find(e.to);
    if (from == vindex.end()) {
      throw Error(Errc::DanglingReference, "edge '" + e.id + "' references unknown vertex '" + e.from + "'");
    }
    if (to == vindex.end()) {
      throw Error(Errc::DanglingReference, "edge '" + e.id + "' references unknown vertex '" + e.to + "'");
    }
    if (from->second == to->second) throw Error(Errc::LoopEdge, "edge '" + e.id + "' is a loop");
    const auto key = std::minmax(from->second, to->second);
    if (!pairs.insert({key.first, key.second}).second) {
      throw Error(Errc::DuplicateEdge, "edge '" + e.id + "' duplicates the pair {" + e.from + "," + e.to + "}");
    }
    if (!(e.length > 0.0) || !std::isfinite(e.length)) {
      throw Error(Errc::NonPositiveLength, "edge '" + e.id + "' must have positive finite length");
    }
    if (!(e.p > 1.0) || !std::isfinite(e.p)) {
      throw Error(Errc::ExponentOutOfRange, "edge '" + e.id + "' needs 1 < p < inf");
    }
    if (e.cells == 0) e.cells = spec.default_cells;
    if (e.cells < 2) throw Error(Errc::Schema, "edge '" + e.id + "' needs at least 2 cells");
    g.endpoints_.emplace_back(from->second, to->second);
    g.edges_.push_back(std::move(e));
  }

  g.incidence_.assign(g.vertices_.size(), {});
  for (std::size_t e = 0; e < g.edges_.size(); ++e) {
    g.incidence_[g.endpoints_[e].first].push_back({e, Role::Initial});
    g.incidence_[g.endpoints_[e].second].push_back({e, Role::Terminal});
  }
  if (g.edges_.empty() || !connected_without(g.vertices_.size(), g.endpoints_, std::nullopt)) {
    throw Error(Errc::Disconnected, "graph is not connected");
  }
  return g;
}

std::optional<std::size_t> MetricGraph::find_vertex(std::string_view id) const {
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    if (vertices_[i] == id) return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> MetricGraph::find_edge(std::string_view id) const {
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    if (edges_[i].id == id) return i;
  }
  return std::nullopt;
}

std::size_t MetricGraph::vertex_index(std::string_view id) const {
  if (auto v = find_vertex(id)) return *v;
  throw Error(Errc::UnknownVertex, "unknown vertex '" + std::string(id) + "'");
}

std::size_t MetricGraph::edge_index(std::string_view id) const {
  if (auto e = find_edge(id)) return *e;
  throw Error(Errc::UnknownEdge, "unknown edge '" + std::string(id) + "'");
}

VertexTopology MetricGraph::topology(std::string_view v) const {
  const std::size_t vi = vertex_index(v);
  VertexTopology t;
  t.degree = incidence_[vi].size();
  t.is_boundary = t.degree == 1;
  for (const auto& inc : incidence_[vi]) t.incident.emplace_back(edges_[inc.edge].id, inc.role);
  return t;
}

std::vector<std::size_t> MetricGraph::boundary_vertices() const {
  std::vector<std::size_t> out;
  for (std::size_t v = 0; v < vertices_.size(); ++v) {
    if (incidence_[v].size() == 1) out.push_back(v);
  }
  return out;
}

double MetricGraph::total_length() const {
  double s = 0.0;
  for (const auto& e : edges_) s += e.length;
  return s;
}

bool MetricGraph::is_bridge(std::size_t e) const {
  return !connected_without(vertices_.size(), endpoints_, e);
}

GraphSpec MetricGraph::to_spec() const {
  GraphSpec s;
  s.vertices = vertices_;
  s.edges = edges_;
  return s;
}

VertexTopology vertex_topology(const MetricGraph& g, std::string_view v) { return g.topology(v); }

MetricGraph reparametrize_edge(const MetricGraph& g, std::string_view e) {
  const std::size_t ei = g.edge_index(e);
  GraphSpec s = g.to_spec();
  Edge& edge = s.edges[ei];
  std::swap(edge.from, edge.to);
  edge.source.offset += edge.source.scale * edge.length;
  edge.source.scale = -edge.source.scale;
  return MetricGraph::build(std::move(s));
}

std::string fresh_id(const std::vector<std::string>& taken, const std::string& stem) {
  auto used = [&](const std::string& id) {
    return std::find(taken.begin(), taken.end(), id) != taken.end();
  };
  if (!used(stem)) return stem;
  for (int k = 2;; ++k) {
    std::string id = stem + "#" + std::to_string(k);
    if (!used(id)) return id;
  }
}

SplitResult split_edge(const MetricGraph& g, std::string_view e, double at) {
  const std::size_t ei = g.edge_index(e);
  if (!(at > 0.0 && at < 1.0)) {
    throw Error(Errc::FractionOutOfRange, "split fraction must lie in (0, 1)");
  }
  const Edge& old = g.edge(ei);
  const double node = at * static_cast<double>(old.cells);
  const double k = std::round(node);
  if (std::abs(node - k) > 1e-9 * static_cast<double>(old.cells) || k < 1.0 ||
      k > static_cast<double>(old.cells) - 1.0) {
    throw Error(Errc::FractionOutOfRange, "split fraction does not land on an interior grid node of '" +
                                              old.id + "'");
  }
  const std::size_t cells1 = static_cast<std::size_t>(k);
  const std::size_t cells2 = old.cells - cells1;
  if (cells1 < 2 || cells2 < 2) {
    throw Error(Errc::FractionOutOfRange, "split would leave an edge with fewer than 2 cells");
  }
  // Lengths follow the node positions so that h is preserved on both halves.
  const double h = old.length / static_cast<double>(old.cells);
  const double len1 = h * static_cast<double>(cells1);
  const double len2 = old.length - len1;

  GraphSpec s = g.to_spec();
  std::vector<std::string> edge_ids;
  for (const auto& ed : s.edges) edge_ids.push_back(ed.id);

  SplitResult out{MetricGraph{}, fresh_id(s.vertices, old.id + ".mid"), {}, {}};
  out.first = fresh_id(edge_ids, old.id + ".a");
  edge_ids.push_back(out.first);
  out.second = fresh_id(edge_ids, old.id + ".b");

  Edge a = old;
  a.id = out.first;
  a.to = out.vertex;
  a.length = len1;
  a.cells = cells1;
  Edge b = old;
  b.id = out.second;
  b.from = out.vertex;
  b.length = len2;
  b.cells = cells2;
  b.source.offset = old.source.offset + old.source.scale * len1;

  s.vertices.push_back(out.vertex);
  s.edges.erase(s.edges.begin() + static_cast<std::ptrdiff_t>(ei));
  s.edges.insert(s.edges.begin() + static_cast<std::ptrdiff_t>(ei), {a, b});
  out.graph = MetricGraph::build(std::move(s));
  return out;
}

std::pair<MetricGraph, std::pair<std::string, std::string>> cut_vertex(const MetricGraph& g,
                                                                        std::string_view v) {
  const std::size_t vi = g.vertex_index(v);
  if (g.degree(vi) != 2) throw Error(Errc::Schema, "cut_vertex requires a degree-2 vertex");
  GraphSpec s = g.to_spec();
  const std::string base(v);
  std::string first = fresh_id(s.vertices, base + ".1");
  s.vertices.push_back(first);
  std::string second = fresh_id(s.vertices, base + ".2");
  s.vertices.push_back(second);
  const auto& inc = g.incident(vi);
  auto rewire = [&](const Incidence& in, const std::string& id) {
    Edge& e = s.edges[in.edge];
    (in.role == Role::Initial ? e.from : e.to) = id;
  };
  rewire(inc[0], first);
  rewire(inc[1], second);
  s.vertices.erase(s.vertices.begin() + static_cast<std::ptrdiff_t>(vi));
  return {MetricGraph::build(std::move(s)), {first, second}};
}

MetricGraph remove_leaf_edge(const MetricGraph& g, std::size_t e) {
  const std::size_t a = g.from_index(e);
  const std::size_t b = g.to_index(e);
  std::size_t leaf;
  if (g.degree(b) == 1) leaf = b;
  else if (g.degree(a) == 1) leaf = a;
  else throw Error(Errc::Schema, "edge '" + g.edge(e).id + "' has no boundary endpoint");
  GraphSpec s = g.to_spec();
  s.edges.erase(s.edges.begin() + static_cast<std::ptrdiff_t>(e));
  s.vertices.erase(s.vertices.begin() + static_cast<std::ptrdiff_t>(leaf));
  return MetricGraph::build(std::move(s));
}

}  // namespace qgdiff
