#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "qgdiff/metric_graph.hpp"

namespace testing {

inline qgdiff::Edge edge(std::string id, std::string from, std::string to, double length = 1.0, double p = 2.0,
                         qgdiff::Nonlinearity gamma = qgdiff::Nonlinearity::identity(), std::size_t cells = 0) {
  qgdiff::Edge e;
  e.id = std::move(id);
  e.from = std::move(from);
  e.to = std::move(to);
  e.length = length;
  e.p = p;
  e.gamma = std::move(gamma);
  e.cells = cells;
  return e;
}

inline qgdiff::MetricGraph graph(std::vector<std::string> vertices, std::vector<qgdiff::Edge> edges,
                                 std::size_t cells = 64) {
  return qgdiff::MetricGraph::build({std::move(vertices), std::move(edges), cells});
}

inline qgdiff::MetricGraph path3(std::size_t cells = 64) {
  return graph({"v1", "v2", "v3"}, {edge("e1", "v1", "v2"), edge("e2", "v2", "v3")}, cells);
}

inline qgdiff::MetricGraph star3(std::size_t cells = 64) {
  return graph({"c", "l1", "l2", "l3"}, {edge("e1", "c", "l1"), edge("e2", "c", "l2"), edge("e3", "c", "l3")}, cells);
}

inline qgdiff::MetricGraph triangle(std::size_t cells = 64) {
  return graph({"a", "b", "c"}, {edge("e1", "a", "b"), edge("e2", "b", "c"), edge("e3", "c", "a")}, cells);
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace testing
