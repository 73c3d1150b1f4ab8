#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "qgdiff/diagnostics.hpp"
#include "qgdiff/error.hpp"
#include "qgdiff/parabolic.hpp"

using namespace qgdiff;
using testing::edge;
using testing::graph;

namespace {

GridFunction bump(const MetricGraph& g) {
  return GridFunction::sample_edgewise(GridLayout::of(g), [](std::size_t e, double x) {
    return e == 0 ? std::exp(-20.0 * (x - 0.5) * (x - 0.5)) : 0.1 * static_cast<double>(e);
  });
}

Schedule star_schedule() {
  Schedule s;
  s.f["e2"].expr = expr::parse("sin(3*x) * cos(t)");
  s.omega["l1"].constant = 0.2;
  s.omega["l3"].expr = expr::parse("-0.1 * t");
  return s;
}

}  // namespace

TEST_CASE("time grid") {
  const TimeGrid t = TimeGrid::uniform(1.0, 0.3);
  CHECK(t.points().front() == 0.0);
  CHECK(t.points().back() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(t.max_step() <= 0.3 + 1e-15);
  CHECK(TimeGrid::uniform(1.0, 0.25).steps() == 4);
}

TEST_CASE("flux table is piecewise constant from the left") {
  FluxTerm f;
  f.table = {{0.0, 1.0}, {0.5, -2.0}};
  CHECK(f.at(0.0) == 1.0);
  CHECK(f.at(0.49) == 1.0);
  CHECK(f.at(0.5) == -2.0);
  CHECK(f.at(3.0) == -2.0);
}

TEST_CASE("zero data stay zero") {
  const MetricGraph g = testing::star3(16);
  const Trajectory tr = solve_parabolic(g, GridFunction::edgewise(GridLayout::of(g)), Schedule{},
                                        TimeGrid::uniform(0.5, 0.1));
  REQUIRE(tr.records.size() == 6);
  for (const auto& r : tr.records) {
    CHECK(r.v.max_abs() == 0.0);
    CHECK(r.mass == 0.0);
  }
}

TEST_CASE("spatially constant porous medium run") {
  // gamma(r) = r^3 with unit source: v = t and u = t^(1/3) exactly under implicit Euler.
  const MetricGraph g = graph({"a", "b", "c"}, {edge("e1", "a", "b", 1.0, 3.0, Nonlinearity::power(3.0), 16),
                                                edge("e2", "b", "c", 0.5, 2.0, Nonlinearity::power(3.0), 16)});
  Schedule s;
  s.f["e1"].expr = expr::parse("1");
  s.f["e2"].expr = expr::parse("1");
  const Trajectory tr = solve_parabolic(g, GridFunction::edgewise(GridLayout::of(g)), s, TimeGrid::uniform(1.0, 0.1));
  for (const auto& r : tr.records) {
    const auto ev = r.v.to_edgewise();
    for (std::size_t e = 0; e < 2; ++e) {
      for (double x : r.v.edge_values(e)) CHECK(x == doctest::Approx(r.t).epsilon(1e-8));
      for (double x : r.u.edge_values(e)) CHECK(std::abs(x - std::cbrt(r.t)) <= 1e-8);
    }
  }
}

TEST_CASE("linear case agrees with the dense heat oracle") {
  const MetricGraph g = testing::star3(64);
  const GridFunction v0 = bump(g);
  const Schedule s = star_schedule();
  const TimeGrid tg = TimeGrid::uniform(1.0, 1e-2);
  const Trajectory a = solve_parabolic(g, v0, s, tg);
  const Trajectory b = heat_oracle(g, v0, s, tg);
  REQUIRE(a.records.size() == b.records.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    worst = std::max(worst, (a.records[i].v - b.records[i].v).max_abs());
  }
  CHECK(worst <= 1e-9);
}

TEST_CASE("discrete mass identity") {
  const auto battery = standard_battery(32);
  for (const auto& np : battery) {
    Schedule s;
    for (const auto& [v, w] : np.problem.omega) s.omega[v].constant = w;
    const Trajectory tr = solve_parabolic(np.problem.graph, np.problem.g, s, TimeGrid::uniform(0.2, 0.02));
    for (std::size_t i = 1; i < tr.records.size(); ++i) {
      const double scale = 1.0 + std::abs(tr.records[i].mass);
      CHECK(tr.records[i].mass_gap <= 1e-9 * scale);
    }
  }
}

TEST_CASE("energy ledger") {
  SUBCASE("zero data") {
    const MetricGraph g = testing::path3(16);
    const Trajectory tr = solve_parabolic(g, GridFunction::edgewise(GridLayout::of(g)), Schedule{},
                                          TimeGrid::uniform(0.1, 0.02));
    for (const auto& e : energy_ledger(tr, Schedule{})) CHECK(e.residual == 0.0);
  }
  SUBCASE("no forcing: conjugate energy decreases and the residual is dissipative") {
    const auto battery = standard_battery(32);
    for (const auto& np : battery) {
      const Trajectory tr = solve_parabolic(np.problem.graph, np.problem.g, Schedule{}, TimeGrid::uniform(0.2, 0.02));
      double prev = conjugate_energy(np.problem.graph, tr.records[0].v);
      for (std::size_t i = 1; i < tr.records.size(); ++i) {
        const double now = conjugate_energy(np.problem.graph, tr.records[i].v);
        CHECK(now <= prev + 1e-12);
        prev = now;
      }
      for (const auto& e : energy_ledger(tr, Schedule{})) CHECK(e.residual <= 1e-8 * e.scale);
    }
  }
  SUBCASE("records carry the ledger") {
    const MetricGraph g = testing::star3(16);
    const Schedule s = star_schedule();
    const Trajectory tr = solve_parabolic(g, bump(g), s, TimeGrid::uniform(0.1, 0.02));
    const auto ledger = energy_ledger(tr, s);
    REQUIRE(ledger.size() == tr.records.size() - 1);
    for (std::size_t i = 1; i < tr.records.size(); ++i) {
      CHECK(tr.records[i].energy_residual == doctest::Approx(ledger[i - 1].residual).epsilon(1e-12));
    }
  }
}

TEST_CASE("first order in time") {
  const MetricGraph g = testing::star3(32);
  const RichardsonResult r = richardson_order(g, star_schedule(), bump(g), 0.5, 0.05);
  REQUIRE(r.applicable);
  CHECK(r.order >= 0.8);
  CHECK(r.order <= 1.2);

  const GridFunction c = GridFunction::edgewise(GridLayout::of(g), 0.4);
  CHECK_FALSE(richardson_order(g, Schedule{}, c, 0.5, 0.05).applicable);
}

TEST_CASE("resume from a checkpoint is bit-identical") {
  const MetricGraph g = testing::star3(16);
  const Schedule s = star_schedule();
  const TimeGrid tg = TimeGrid::uniform(0.1, 0.01);
  const Trajectory full = solve_parabolic(g, bump(g), s, tg);

  std::vector<Checkpoint> saved;
  ParabolicConfig cfg;
  cfg.checkpoint_every = 5;
  cfg.on_checkpoint = [&](const Checkpoint& c) { saved.push_back(c); };
  solve_parabolic(g, bump(g), s, tg, cfg);
  const auto it = std::find_if(saved.begin(), saved.end(), [](const Checkpoint& c) { return c.step == 5; });
  REQUIRE(it != saved.end());

  std::vector<StepRecord> tail;
  ParabolicConfig rc;
  rc.on_record = [&](const StepRecord& r) { tail.push_back(r); };
  solve_parabolic(g, bump(g), s, tg, rc, &*it);
  REQUIRE(tail.size() == 5);
  for (const auto& r : tail) {
    const StepRecord& ref = full.records[r.index];
    CHECK(r.t == ref.t);
    for (std::size_t e = 0; e < g.edge_count(); ++e) {
      CHECK(r.v.edge_values(e) == ref.v.edge_values(e));
      CHECK(r.u.edge_values(e) == ref.u.edge_values(e));
    }
  }
}

TEST_CASE("initial datum must be finite") {
  const MetricGraph g = testing::path3(8);
  GridFunction v0 = GridFunction::edgewise(GridLayout::of(g));
  v0.set(1, 3, std::nan(""));
  try {
    solve_parabolic(g, v0, Schedule{}, TimeGrid::uniform(0.1, 0.05));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::InitialDatumNotFinite);
  }
}
