#include <cmath>
#include <numbers>

#include "doctest.h"
#include "helpers.hpp"
#include "qgdiff/diagnostics.hpp"
#include "qgdiff/error.hpp"

using namespace qgdiff;
using testing::edge;
using testing::graph;

namespace {

const NamedProblem& pick(const std::vector<NamedProblem>& b, const std::string& name) {
  for (const auto& np : b) {
    if (np.name == name) return np;
  }
  FAIL("missing problem " << name);
  return b.front();
}

}  // namespace

TEST_CASE("property report bookkeeping") {
  PropertyReport r{"x", 0, -std::numeric_limits<double>::infinity(), 1e-8, true, 0};
  r.record(-1.0);
  CHECK(r.pass);
  r.record(1e-9);
  CHECK(r.pass);
  r.record(std::nan(""));
  CHECK_FALSE(r.pass);
  CHECK(r.samples == 3);
  PropertyReport q{"x", 2, -0.5, 1e-8, true, 0};
  q.merge(PropertyReport{"x", 1, 0.1, 1e-8, false, 0});
  CHECK(q.samples == 3);
  CHECK(q.worst_violation == 0.1);
  CHECK_FALSE(q.pass);
}

TEST_CASE("rng is reproducible") {
  Rng a(9), b(9);
  for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
  Rng c(3);
  for (int i = 0; i < 1000; ++i) {
    const double x = c.uniform();
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
  }
  CHECK(trial_seed(1, 0) != trial_seed(1, 1));
  CHECK(trial_seed(1, 5) == trial_seed(1, 5));
}

TEST_CASE("random graphs are valid and deterministic") {
  for (std::uint64_t s = 0; s < 30; ++s) {
    Rng a(s), b(s);
    const MetricGraph g1 = random_graph(a), g2 = random_graph(b);
    CHECK(g1.edge_count() == g2.edge_count());
    CHECK(g1.edge_count() >= 1);
    CHECK(g1.to_spec().vertices == g2.to_spec().vertices);
  }
  RandomGraphOptions opt;
  opt.common_gamma = true;
  Rng r(4);
  for (int i = 0; i < 20; ++i) {
    const MetricGraph g = random_graph(r, opt);
    for (const auto& e : g.edges()) CHECK(e.gamma == g.edge(0).gamma);
  }
}

TEST_CASE("comparison") {
  const auto battery = standard_battery(32);
  for (const auto& np : battery) {
    SUBCASE("identical data") {
      const PropertyReport r = comparison_test(np.problem, np.problem);
      CHECK(r.pass);
      CHECK(std::abs(r.worst_violation) <= 1e-12);
    }
    SUBCASE("raised load") {
      EllipticProblem up = np.problem;
      up.g = up.g + GridFunction::edgewise(up.g.layout(), 1.0);
      CHECK(comparison_test(up, np.problem).pass);
      CHECK(comparison_test(np.problem, up).pass);
    }
    SUBCASE("raised vertex flux") {
      EllipticProblem up = np.problem;
      const std::string v = np.problem.graph.vertices().back();
      up.omega[v] = up.omega_at(v) + 0.3;
      CHECK(comparison_test(up, np.problem).pass);
    }
  }
}

TEST_CASE("contraction along trajectories") {
  const auto battery = standard_battery(32);
  const EllipticProblem& p = pick(battery, "star").problem;
  const TimeGrid tg = TimeGrid::uniform(0.2, 0.02);
  Schedule s1, s2;
  s1.omega["l1"].constant = 0.4;
  s2.omega["l2"].constant = -0.2;
  s2.f["e1"].expr = expr::parse("cos(x + t)");
  const GridFunction v2 = p.g - GridFunction::edgewise(p.g.layout(), 0.3);
  const Trajectory t1 = solve_parabolic(p.graph, p.g, s1, tg);
  const Trajectory t2 = solve_parabolic(p.graph, v2, s2, tg);
  CHECK(contraction_test(t1, s1, t2, s2).pass);
  CHECK(contraction_test(t2, s2, t1, s1).pass);

  // ordered data keep their order
  Schedule lo = s1;
  lo.omega["l1"].constant = 0.1;
  const Trajectory t3 = solve_parabolic(p.graph, v2, lo, tg);
  CHECK(order_violation(t1, t3) <= 1e-10);

  const Trajectory shorter = solve_parabolic(p.graph, p.g, s1, TimeGrid::uniform(0.1, 0.02));
  CHECK_THROWS_AS(contraction_test(t1, s1, shorter, s1), Error);
}

TEST_CASE("sup bound and ll check on simple data") {
  const MetricGraph g = testing::star3(32);
  EllipticProblem p = EllipticProblem::zero(g);
  p.g = GridFunction::sample_edgewise(p.g.layout(), [](std::size_t e, double x) {
    return (e == 1 ? -1.0 : 1.0) * std::sin(3.0 * x);
  });
  const PropertyReport r = linf_and_ll_test(p);
  CHECK(r.pass);
  CHECK(r.samples == 2);

  const auto ks = standard_k_grid(p.g, p.g);
  CHECK(std::is_sorted(ks.begin(), ks.end()));
  CHECK(ks.back() > p.g.max_abs());
  CHECK(standard_k_grid(GridFunction::edgewise(p.g.layout()), GridFunction::edgewise(p.g.layout())).size() == 1);
}

TEST_CASE("integral solution inequality") {
  const auto battery = standard_battery(32);
  const EllipticProblem& p = pick(battery, "path").problem;
  Schedule s;
  s.omega["c"].constant = -0.3;
  const Trajectory tr = solve_parabolic(p.graph, p.g, s, TimeGrid::uniform(0.2, 0.02));

  std::vector<OperatorSample> samples;
  // trivial element (0, (0, 0))
  samples.push_back(make_operator_sample(p.graph, GridFunction::edgewise(p.g.layout()), {}));
  CHECK(samples.back().z.max_abs() == 0.0);
  samples.push_back(make_operator_sample(p.graph, p.g, {{"a", 0.2}}));
  const PropertyReport r = integral_solution_check(tr, s, samples);
  CHECK(r.pass);
  CHECK(r.samples == 2 * (tr.records.size() - 1));

  // a steady state is its own operator sample
  const OperatorSample st = samples.back();
  Schedule hold;
  hold.omega["a"].constant = 0.2;
  const std::size_t e0 = 0;
  hold.f[p.graph.edge(e0).id].nodal = st.v.edge_values(e0);
  hold.f[p.graph.edge(1).id].nodal = st.v.edge_values(1);
  const Trajectory still = solve_parabolic(p.graph, st.z, hold, TimeGrid::uniform(0.1, 0.02));
  CHECK((still.records.back().v - st.z).max_abs() <= 1e-8);
}

TEST_CASE("flux sweeps") {
  const auto battery = standard_battery(32);
  const std::vector<double> eps{-1.0, -0.5, 0.0, 0.5, 1.0};
  const EllipticProblem& star = pick(battery, "star").problem;
  const SweepResult s = monotone_flux_sweep(star, "c", eps);
  CHECK(s.report.pass);
  CHECK(s.values.size() == eps.size());
  CHECK(s.values.back() > s.values.front());

  const SweepResult c = compensated_flux_sweep(star, "l1", "l3", eps);
  CHECK(c.report.pass);
  CHECK(c.values.back() > c.values.front());
  CHECK(c.minus_values.back() < c.minus_values.front());

  CHECK(flux_continuity_check(star, "c", 0.0, 0.4).pass);
}

TEST_CASE("poincare constant") {
  SUBCASE("interval") {
    const MetricGraph g = graph({"a", "b"}, {edge("e", "a", "b")}, 256);
    const PoincareEstimate p = poincare_estimate(g);
    CHECK(p.method == PoincareMethod::Eigen);
    CHECK(p.lambda == doctest::Approx(std::numbers::pi).epsilon(1e-4));
  }
  SUBCASE("path of total length two") {
    const MetricGraph g = graph({"a", "b", "c"}, {edge("e1", "a", "b"), edge("e2", "b", "c")}, 256);
    CHECK(poincare_estimate(g).lambda == doctest::Approx(std::numbers::pi / 2).epsilon(1e-4));
  }
  SUBCASE("equilateral star") {
    const PoincareEstimate p = poincare_estimate(testing::star3(256));
    CHECK(p.lambda == doctest::Approx(std::numbers::pi / 2).epsilon(1e-4));
  }
  SUBCASE("sampled for p != 2") {
    const MetricGraph g = graph({"a", "b"}, {edge("e", "a", "b", 1.0, 3.0)}, 32);
    const PoincareEstimate p = poincare_estimate(g, 1000, 5);
    CHECK(p.method == PoincareMethod::Sampled);
    CHECK(p.samples >= 1000);
    CHECK(std::isfinite(p.lambda));
    CHECK(p.lambda > 0.0);
    CHECK(poincare_estimate(g, 1000, 5).lambda == p.lambda);
  }
}

TEST_CASE("heat oracle") {
  const MetricGraph g = testing::star3(32);
  const GridLayout layout = GridLayout::of(g);
  SUBCASE("symmetric data stay symmetric and keep their mass") {
    const GridFunction v0 = GridFunction::sample_edgewise(layout, [](std::size_t, double x) { return 1.0 - x; });
    const Trajectory t = heat_oracle(g, v0, Schedule{}, TimeGrid::uniform(0.5, 0.05));
    for (const auto& r : t.records) {
      CHECK(testing::max_abs_diff(r.v.edge_values(0), r.v.edge_values(1)) <= 1e-12);
      CHECK(testing::max_abs_diff(r.v.edge_values(0), r.v.edge_values(2)) <= 1e-12);
      CHECK(integrate(r.v) == doctest::Approx(integrate(v0)).epsilon(1e-12));
    }
  }
  SUBCASE("rejects nonlinear graphs") {
    const MetricGraph h = graph({"a", "b"}, {edge("e", "a", "b", 1.0, 3.0)}, 16);
    try {
      heat_oracle(h, GridFunction::edgewise(GridLayout::of(h)), Schedule{}, TimeGrid::uniform(0.1, 0.05));
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::NotLinearCase);
    }
  }
}

TEST_CASE("parallel_for fills every slot") {
  std::vector<int> out(257, 0);
  parallel_for(out.size(), [&](std::size_t i) { out[i] = static_cast<int>(i) + 1; });
  for (std::size_t i = 0; i < out.size(); ++i) CHECK(out[i] == static_cast<int>(i) + 1);
  CHECK(worker_count() >= 1);
}

TEST_CASE("suites are deterministic") {
  CHECK(suite_names().size() == 9);
  for (const std::string name : {"comparison", "linf", "mass-balance"}) {
    const auto a = run_suite(name, 11, 4);
    const auto b = run_suite(name, 11, 4);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].name == b[i].name);
      CHECK(a[i].samples == b[i].samples);
      CHECK(a[i].worst_violation == b[i].worst_violation);
      CHECK(a[i].pass);
    }
  }
  CHECK_THROWS_AS(run_suite("nope", 1), Error);
}
