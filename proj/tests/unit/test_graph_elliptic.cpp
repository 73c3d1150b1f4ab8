#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "qgdiff/diagnostics.hpp"
#include "qgdiff/edge_solver.hpp"
#include "qgdiff/error.hpp"

using namespace qgdiff;
using testing::edge;
using testing::graph;

namespace {

EllipticProblem smooth_problem(const MetricGraph& g, std::map<std::string, double> omega = {}) {
  EllipticProblem p = EllipticProblem::zero(g);
  p.g = GridFunction::sample_edgewise(p.g.layout(), [](std::size_t e, double x) {
    return std::sin(2.5 * x + 0.7 * static_cast<double>(e)) + 0.2 * static_cast<double>(e);
  });
  p.omega = std::move(omega);
  return p;
}

double max_kirchhoff(const EllipticSolution& s) {
  double m = 0.0;
  for (double k : s.diagnostics.kirchhoff_gaps) m = std::max(m, std::abs(k));
  return m;
}

}  // namespace

TEST_CASE("zero data gives zero") {
  for (Method m : {Method::Monolithic, Method::Gluing}) {
    const EllipticSolution s = solve_elliptic(EllipticProblem::zero(testing::star3(16)), m);
    CHECK(s.u.max_abs() == 0.0);
    CHECK(s.v.max_abs() == 0.0);
  }
}

TEST_CASE("constant solution forced by the load") {
  const MetricGraph g = graph({"a", "b", "c"}, {edge("e1", "a", "b", 1.0, 2.0, Nonlinearity::power(1.0)),
                                                edge("e2", "b", "c", 1.0, 2.0, Nonlinearity::power(2.0))}, 32);
  EllipticProblem p = EllipticProblem::zero(g);
  p.g = GridFunction::sample_edgewise(p.g.layout(), [](std::size_t e, double) { return e == 0 ? 2.0 : 4.0; });
  for (Method m : {Method::Monolithic, Method::Gluing}) {
    const EllipticSolution s = solve_elliptic(p, m);
    for (std::size_t e = 0; e < 2; ++e)
      for (double u : s.u.edge_values(e)) CHECK(u == doctest::Approx(2.0).epsilon(1e-10));
    for (const auto& [id, f] : s.edge_fluxes) {
      CHECK(std::abs(f.a) <= 1e-9);
      CHECK(std::abs(f.b) <= 1e-9);
    }
  }
}

TEST_CASE("mass balance and Kirchhoff residuals on random graphs") {
  SolverConfig cfg;
  for (std::size_t i = 0; i < 25; ++i) {
    Rng rng(trial_seed(99, i));
    const MetricGraph g = random_graph(rng);
    const EllipticProblem p{g, random_load(rng, g), random_fluxes(rng, g), 1.0};
    const EllipticSolution s = solve_monolithic(p, cfg);
    CHECK(s.residual_sup <= cfg.tol * s.residual_scale);
    CHECK(s.diagnostics.mass_gap <= 1e-8 * s.diagnostics.mass_scale);
    CHECK(max_kirchhoff(s) <= 1e-8 * s.diagnostics.mass_scale);
  }
}

TEST_CASE("gluing agrees with the monolithic solver") {
  for (const auto& [name, p] : standard_battery(32)) {
    const EllipticSolution a = solve_monolithic(p), b = solve_by_gluing(p);
    CHECK_MESSAGE((a.v - b.v).max_abs() <= 1e-6, name);
    CHECK_MESSAGE(b.residual_sup <= 1e-8 * b.residual_scale, name);
    CHECK_MESSAGE(b.diagnostics.continuity_gap <= 1e-6, name);
  }
}

TEST_CASE("gluing on a single edge is the edge solver") {
  const MetricGraph g = graph({"a", "b"}, {edge("e", "a", "b", 1.3, 3.0, Nonlinearity::power(2.0), 40)});
  const EllipticProblem p = smooth_problem(g, {{"a", 0.3}, {"b", -0.1}});
  EdgeBVP b{1.3, 3.0, Nonlinearity::power(2.0), p.g.edge_values(0), 0.3, -0.1, 1.0};
  const EdgeSolution e = solve_edge_bvp(b);
  const EllipticSolution s = solve_by_gluing(p);
  CHECK(testing::max_abs_diff(s.u.edge_values(0), e.u) <= 1e-12);
}

TEST_CASE("edge flux decomposition") {
  const MetricGraph one = graph({"a", "b"}, {edge("e", "a", "b", 1.0, 2.5, Nonlinearity::power(0.5), 32)});
  const EllipticSolution s1 = solve_monolithic(smooth_problem(one, {{"a", 0.4}, {"b", -0.25}}));
  CHECK(s1.edge_fluxes.at("e").a == doctest::Approx(0.4).epsilon(1e-9));
  CHECK(s1.edge_fluxes.at("e").b == doctest::Approx(-0.25).epsilon(1e-9));

  const MetricGraph tree = graph({"a", "b", "c", "d", "e"},
                                 {edge("e1", "a", "b", 1.0, 2.0), edge("e2", "c", "b", 0.6, 3.0, Nonlinearity::power(2.0)),
                                  edge("e3", "b", "d", 1.4, 1.5, Nonlinearity::power(0.5)), edge("e4", "d", "e", 0.8, 4.0)},
                                 32);
  const EllipticProblem p = smooth_problem(tree, {{"a", 0.3}, {"d", -0.4}, {"e", 0.2}});
  const EllipticSolution s = solve_monolithic(p);
  const auto fl = decompose_edge_fluxes(p, s);
  for (const auto& v : tree.vertices()) {
    double sum = 0.0;
    for (const auto& e : tree.edges()) {
      if (e.from == v) sum += fl.at(e.id).a;
      if (e.to == v) sum += fl.at(e.id).b;
    }
    CHECK(std::abs(sum - p.omega_at(v)) <= 1e-8 * s.diagnostics.mass_scale);
  }
}

TEST_CASE("reparametrization invariance") {
  const auto battery = standard_battery(32);
  const EllipticProblem& p = battery[2].problem;  // star, mixed exponents and nonlinearities
  const EllipticSolution s = solve_monolithic(p);
  for (const auto& e : p.graph.edges()) {
    const MetricGraph r = reparametrize_edge(p.graph, e.id);
    EllipticProblem pr = EllipticProblem::zero(r);
    pr.omega = p.omega;
    const std::size_t ei = r.edge_index(e.id);
    for (std::size_t k = 0; k < p.graph.edge_count(); ++k) pr.g.set_edge_values(k, p.g.edge_values(k));
    auto g = p.g.edge_values(ei);
    std::reverse(g.begin(), g.end());
    pr.g.set_edge_values(ei, g);
    const EllipticSolution sr = solve_monolithic(pr);
    auto u = s.u.edge_values(ei);
    std::reverse(u.begin(), u.end());
    CHECK(testing::max_abs_diff(sr.u.edge_values(ei), u) <= 1e-10);
  }
}

TEST_CASE("resolvent of a constant state is the identity") {
  const MetricGraph g = testing::star3(16);
  const GridLayout layout = GridLayout::of(g);
  const GridFunction c = GridFunction::edgewise(layout, 0.75);
  for (double tau : {1.0, 0.1, 0.01}) {
    const EllipticSolution s = resolvent(g, tau, c, GridFunction::edgewise(layout), {});
    CHECK((s.v - c).max_abs() <= 1e-12);
  }
}

TEST_CASE("resolvent T-contraction") {
  for (std::size_t i = 0; i < 10; ++i) {
    Rng rng(trial_seed(5, i));
    const MetricGraph g = random_graph(rng);
    const GridFunction v1 = random_load(rng, g), v2 = random_load(rng, g);
    const GridFunction f1 = random_load(rng, g, 0.5), f2 = random_load(rng, g, 0.5);
    const auto w1 = random_fluxes(rng, g), w2 = random_fluxes(rng, g);
    const double tau = rng.uniform(0.01, 1.0);
    const EllipticSolution r1 = resolvent(g, tau, v1, f1, w1), r2 = resolvent(g, tau, v2, f2, w2);
    double flux = 0.0;
    for (const auto& v : g.vertices()) {
      const double a = w1.count(v) ? w1.at(v) : 0.0, b = w2.count(v) ? w2.at(v) : 0.0;
      flux += std::max(0.0, a - b);
    }
    const double lhs = integrate_positive_part(r1.v - r2.v);
    const double rhs = tau * (integrate_positive_part(f1 - f2) + flux) + integrate_positive_part(v1 - v2);
    CHECK(lhs <= rhs + 1e-8);
  }
}

TEST_CASE("resolvent approaches the identity as the step shrinks") {
  const auto battery = standard_battery(32);
  const EllipticProblem& p = battery[4].problem;
  const GridFunction zero = GridFunction::edgewise(p.g.layout());
  std::vector<double> d;
  for (double tau : {1.0, 0.1, 0.01, 0.001, 0.0001}) {
    const EllipticSolution s = resolvent(p.graph, tau, p.g, zero, {});
    d.push_back(l1_norm(s.v - p.g));
    if (d.size() > 1) CHECK(d.back() < d[d.size() - 2]);
  }
  CHECK(d.back() < 0.2 * d.front());
}

TEST_CASE("sup bound and ll domination with a common nonlinearity") {
  for (std::size_t i = 0; i < 20; ++i) {
    Rng rng(trial_seed(17, i));
    RandomGraphOptions opt;
    opt.common_gamma = true;
    const MetricGraph g = random_graph(rng, opt);
    const EllipticProblem p{g, random_load(rng, g), {}, 1.0};
    const EllipticSolution s = solve_monolithic(p);
    CHECK(s.v.max_abs() <= p.g.max_abs() + 1e-8);
    CHECK(linf_and_ll_check(p, s).pass);
  }
}

TEST_CASE("sup bound can fail when nonlinearities differ between edges") {
  // u is continuous at the junction, so gamma_B(u) = 10 u exceeds the load there.
  const MetricGraph g = graph({"a", "b", "c"}, {edge("A", "a", "b", 1.0, 2.0, Nonlinearity::identity(), 64),
                                                edge("B", "b", "c", 1.0, 2.0, Nonlinearity::table({{-1, -10}, {0, 0}, {1, 10}}), 64)});
  EllipticProblem p = EllipticProblem::zero(g);
  p.g = GridFunction::edgewise(p.g.layout(), 1.0);
  const EllipticSolution s = solve_monolithic(p);
  CHECK(s.u.vertex_value(g.vertex_index("b")) > 0.1);
  CHECK(s.v.max_abs() > 1.5);
  CHECK_FALSE(linf_and_ll_check(p, s).pass);
}

TEST_CASE("warm start does not change the answer") {
  const auto battery = standard_battery(32);
  const EllipticProblem& p = battery[3].problem;
  const EllipticSolution cold = solve_monolithic(p);
  const GridFunction warm = 0.5 * cold.u;
  const EllipticSolution hot = solve_monolithic(p, SolverConfig{}, &warm);
  CHECK((hot.v - cold.v).max_abs() <= 1e-9);
}
