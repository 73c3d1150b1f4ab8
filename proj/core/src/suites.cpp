#include <algorithm>
#include <cmath>
#include <numbers>

#include "qgdiff/diagnostics.hpp"
#include "qgdiff/error.hpp"

namespace qgdiff {
namespace {

Edge make_edge(std::string id, std::string from, std::string to, double length, double p, Nonlinearity gamma,
               std::size_t cells) {
  Edge e;
  e.id = std::move(id);
  e.from = std::move(from);
  e.to = std::move(to);
  e.length = length;
  e.p = p;
  e.gamma = std::move(gamma);
  e.cells = cells;
  return e;
}

EllipticProblem battery_problem(GraphSpec spec, std::map<std::string, double> omega) {
  EllipticProblem prob = EllipticProblem::zero(MetricGraph::build(std::move(spec)));
  prob.g = GridFunction::sample_edgewise(prob.g.layout(), [](std::size_t e, double x) {
    return std::sin(3.0 * x + static_cast<double>(e)) + 0.25 * static_cast<double>(e) + 0.5;
  });
  prob.omega = std::move(omega);
  return prob;
}

PropertyReport new_report(const std::string& name, double tol, std::uint64_t seed) {
  return PropertyReport{name, 0, -std::numeric_limits<double>::infinity(), tol, true, seed};
}

// Nonnegative smooth perturbation of a load.
GridFunction nonnegative_bump(Rng& rng, const GridLayout& layout, double amplitude) {
  std::vector<std::array<double, 2>> c(layout.edge_count());
  for (auto& x : c) x = {rng.uniform(0.0, amplitude), rng.uniform(0.5, 3.0)};
  return GridFunction::sample_edgewise(layout, [&](std::size_t e, double x) {
    return c[e][0] * (1.0 + std::sin(c[e][1] * x)) * 0.5;
  });
}

std::vector<PropertyReport> suite_mass_balance(std::uint64_t seed, std::size_t trials) {
  std::vector<PropertyReport> parts(trials);
  std::vector<PropertyReport> kparts(trials);
  parallel_for(trials, [&](std::size_t i) {
    Rng rng(trial_seed(seed, i));
    const MetricGraph g = random_graph(rng);
    EllipticProblem prob{g, random_load(rng, g), random_fluxes(rng, g), 1.0};
    const EllipticSolution sol = solve_monolithic(prob);
    parts[i] = new_report("mass-balance", 1e-8, seed);
    parts[i].record(sol.diagnostics.mass_gap / sol.diagnostics.mass_scale);
    kparts[i] = new_report("kirchhoff", 1e-8, seed);
    double worst = 0.0;
    for (double k : sol.diagnostics.kirchhoff_gaps) worst = std::max(worst, std::abs(k));
    kparts[i].record(worst / sol.diagnostics.mass_scale);
  });
  PropertyReport mass = new_report("mass-balance", 1e-8, seed);
  PropertyReport kirchhoff = new_report("kirchhoff", 1e-8, seed);
  for (std::size_t i = 0; i < trials; ++i) {
    mass.merge(parts[i]);
    kirchhoff.merge(kparts[i]);
  }
  return {mass, kirchhoff};
}

std::vector<PropertyReport> suite_comparison(std::uint64_t seed, std::size_t trials) {
  std::vector<PropertyReport> parts(trials);
  parallel_for(trials, [&](std::size_t i) {
    Rng rng(trial_seed(seed, i));
    const MetricGraph g = random_graph(rng);
    EllipticProblem p1{g, random_load(rng, g), random_fluxes(rng, g), 1.0};
    EllipticProblem p2 = p1;
    p2.g = p1.g - nonnegative_bump(rng, p1.g.layout(), 1.0);
    for (const auto& v : g.vertices()) {
      if (rng.uniform() < 0.5) p2.omega[v] = p1.omega_at(v) - rng.uniform(0.0, 0.5);
    }
    parts[i] = comparison_test(p1, p2);
  });
  PropertyReport rep = new_report("comparison", 1e-8, seed);
  for (const auto& p : parts) rep.merge(p);
  return {rep};
}

std::vector<PropertyReport> suite_linf(std::uint64_t seed, std::size_t trials) {
  std::vector<PropertyReport> parts(trials);
  parallel_for(trials, [&](std::size_t i) {
    Rng rng(trial_seed(seed, i));
    RandomGraphOptions opt;
    opt.common_gamma = true;
    const MetricGraph g = random_graph(rng, opt);
    EllipticProblem prob{g, random_load(rng, g), {}, 1.0};
    parts[i] = linf_and_ll_test(prob);
  });
  PropertyReport rep = new_report("linf-ll", 1e-8, seed);
  for (const auto& p : parts) rep.merge(p);
  return {rep};
}

std::vector<PropertyReport> suite_gluing(std::uint64_t seed) {
  PropertyReport rep = new_report("gluing-agreement", 1e-6, seed);
  for (const auto& [name, prob] : standard_battery()) {
    const EllipticSolution a = solve_monolithic(prob);
    const EllipticSolution b = solve_by_gluing(prob);
    rep.record((a.v - b.v).max_abs());
  }
  return {rep};
}

std::vector<PropertyReport> suite_flux_sweep(std::uint64_t seed) {
  std::vector<double> grid;
  for (int k = 0; k <= 20; ++k) grid.push_back(-5.0 + 0.5 * k);
  PropertyReport single = new_report("flux-sweep", 0.0, seed);
  PropertyReport pair = new_report("compensated-sweep", 0.0, seed);
  PropertyReport cont = new_report("flux-continuity", 0.0, seed);
  const std::map<std::string, std::string> sweep_vertex{
      {"single-edge", "b"}, {"path", "c"}, {"star", "c"}, {"triangle", "a"}, {"tree", "d"}};
  const std::map<std::string, std::pair<std::string, std::string>> pairs{
      {"single-edge", {"b", "a"}}, {"path", {"c", "a"}}, {"star", {"l1", "l3"}}, {"tree", {"c", "e"}}};
  for (const auto& [name, prob] : standard_battery()) {
    const std::string& v = sweep_vertex.at(name);
    single.merge(monotone_flux_sweep(prob, v, grid).report);
    cont.merge(flux_continuity_check(prob, v, 0.0, 0.5));
    if (const auto it = pairs.find(name); it != pairs.end()) {
      pair.merge(compensated_flux_sweep(prob, it->second.first, it->second.second, grid).report);
    }
  }
  return {single, pair, cont};
}

struct ParabolicCase {
  MetricGraph graph;
  GridFunction v0;
  Schedule sched;
};

std::vector<PropertyReport> suite_contraction(std::uint64_t seed, std::size_t trials) {
  std::vector<PropertyReport> gaps(trials), orders(trials);
  parallel_for(trials, [&](std::size_t i) {
    Rng rng(trial_seed(seed, i));
    RandomGraphOptions opt;
    opt.max_edges = 4;
    opt.cells = {16, 32};
    const MetricGraph g = random_graph(rng, opt);
    const GridLayout layout = GridLayout::of(g);
    const int mode = static_cast<int>(i % 4);
    GridFunction v1 = random_load(rng, g);
    GridFunction v2 = v1;
    if (mode == 0 || mode == 3) v2 = v1 - nonnegative_bump(rng, layout, 1.0);
    Schedule s1, s2;
    const GridFunction f1 = random_load(rng, g, 0.5);
    GridFunction f2 = f1;
    if (mode == 1 || mode == 3) f2 = f1 - nonnegative_bump(rng, layout, 1.0);
    for (std::size_t e = 0; e < g.edge_count(); ++e) {
      s1.f[g.edge(e).id].nodal = f1.edge_values(e);
      s2.f[g.edge(e).id].nodal = f2.edge_values(e);
    }
    for (const auto& [v, w] : random_fluxes(rng, g, 0.5)) {
      s1.omega[v].constant = w;
      s2.omega[v].constant = w;
      if (mode == 2 || mode == 3) s2.omega[v].constant = w - rng.uniform(0.0, 0.5);
    }
    const TimeGrid tg = TimeGrid::uniform(0.2, 0.02);
    const Trajectory t1 = solve_parabolic(g, v1, s1, tg);
    const Trajectory t2 = solve_parabolic(g, v2, s2, tg);
    gaps[i] = contraction_test(t1, s1, t2, s2);
    orders[i] = new_report("order-preservation", 1e-8, seed);
    orders[i].record(order_violation(t1, t2));
  });
  PropertyReport gap = new_report("contraction", 1e-7, seed);
  PropertyReport order = new_report("order-preservation", 1e-8, seed);
  for (std::size_t i = 0; i < trials; ++i) {
    gap.merge(gaps[i]);
    order.merge(orders[i]);
  }
  return {gap, order};
}

ParabolicCase heat_star(std::size_t cells) {
  GraphSpec spec{{"c", "l1", "l2", "l3"},
                 {make_edge("e1", "c", "l1", 1.0, 2.0, Nonlinearity::identity(), cells),
                  make_edge("e2", "c", "l2", 1.0, 2.0, Nonlinearity::identity(), cells),
                  make_edge("e3", "l3", "c", 1.0, 2.0, Nonlinearity::identity(), cells)},
                 cells};
  ParabolicCase pc{MetricGraph::build(std::move(spec)), {}, {}};
  pc.v0 = GridFunction::sample_edgewise(GridLayout::of(pc.graph), [](std::size_t e, double x) {
    return std::cos(std::numbers::pi * x) + 0.3 * static_cast<double>(e);
  });
  return pc;
}

std::vector<PropertyReport> suite_integral(std::uint64_t seed, std::size_t trials) {
  PropertyReport rep = new_report("integral-solution", 1e-7, seed);
  Rng rng(trial_seed(seed, 0));
  ParabolicCase heat = heat_star(32);
  heat.sched.f["e1"].expr = expr::parse("sin(3*x)*exp(-t)");
  heat.sched.omega["l2"].constant = 0.2;
  std::vector<ParabolicCase> cases{heat};
  const auto battery = standard_battery(32);
  ParabolicCase star{battery[2].problem.graph, battery[2].problem.g, {}};
  star.sched.omega["l1"].constant = -0.1;
  cases.push_back(star);
  for (const auto& pc : cases) {
    std::vector<OperatorSample> samples;
    for (std::size_t k = 0; k < trials; ++k) {
      samples.push_back(make_operator_sample(pc.graph, random_load(rng, pc.graph), random_fluxes(rng, pc.graph)));
    }
    const Trajectory traj = solve_parabolic(pc.graph, pc.v0, pc.sched, TimeGrid::uniform(0.5, 0.05));
    rep.merge(integral_solution_check(traj, pc.sched, samples));
  }
  return {rep};
}

std::vector<PropertyReport> suite_energy(std::uint64_t seed, std::size_t trials) {
  PropertyReport ledger = new_report("energy-ledger", 1e-8, seed);
  PropertyReport decay = new_report("energy-decay", 1e-8, seed);
  auto check = [&](const ParabolicCase& pc, const TimeGrid& tg, bool decaying) {
    const Trajectory traj = solve_parabolic(pc.graph, pc.v0, pc.sched, tg);
    for (const auto& entry : energy_ledger(traj, pc.sched)) ledger.record(entry.residual / entry.scale);
    if (decaying) {
      decay.record(conjugate_energy(pc.graph, traj.records.back().v) - conjugate_energy(pc.graph, traj.records.front().v));
    }
  };
  {
    // spatially constant porous medium run
    GraphSpec spec{{"c", "l1", "l2", "l3"},
                   {make_edge("e1", "c", "l1", 1.0, 2.0, Nonlinearity::power(3.0), 16),
                    make_edge("e2", "c", "l2", 0.5, 2.0, Nonlinearity::power(3.0), 16),
                    make_edge("e3", "l3", "c", 2.0, 2.0, Nonlinearity::power(3.0), 16)},
                   16};
    for (auto& e : spec.edges) e.source.expr = expr::Expression::constant(1.0);
    ParabolicCase pc{MetricGraph::build(std::move(spec)), {}, {}};
    pc.v0 = GridFunction::edgewise(GridLayout::of(pc.graph));
    check(pc, TimeGrid::uniform(1.0, 0.05), false);
  }
  {
    ParabolicCase heat = heat_star(32);
    heat.sched.f["e2"].expr = expr::parse("x*(1-x)");
    heat.sched.omega["l1"].constant = 0.25;
    check(heat, TimeGrid::uniform(0.5, 0.05), false);
    check(heat_star(32), TimeGrid::uniform(0.5, 0.05), true);
  }
  for (std::size_t i = 0; i < trials; ++i) {
    Rng rng(trial_seed(seed, i));
    RandomGraphOptions opt;
    opt.max_edges = 4;
    opt.cells = {16, 32};
    const MetricGraph g = random_graph(rng, opt);
    ParabolicCase pc{g, random_load(rng, g), {}};
    const bool decaying = i % 2 == 0;
    if (!decaying) {
      const GridFunction f = random_load(rng, g, 0.5);
      for (std::size_t e = 0; e < g.edge_count(); ++e) pc.sched.f[g.edge(e).id].nodal = f.edge_values(e);
      for (const auto& [v, w] : random_fluxes(rng, g, 0.5)) pc.sched.omega[v].constant = w;
    } else {
      for (std::size_t e = 0; e < g.edge_count(); ++e) {
        pc.sched.f[g.edge(e).id].nodal.assign(g.edge(e).cells + 1, 0.0);
      }
    }
    check(pc, TimeGrid::uniform(0.2, 0.02), decaying);
  }
  return {ledger, decay};
}

std::vector<PropertyReport> suite_poincare(std::uint64_t seed) {
  PropertyReport rep = new_report("poincare", 0.0, seed);
  {
    GraphSpec spec{{"a", "b"}, {make_edge("e", "a", "b", 1.0, 2.0, Nonlinearity::identity(), 256)}, 256};
    rep.record(std::abs(poincare_estimate(MetricGraph::build(std::move(spec))).lambda - std::numbers::pi) - 0.01);
  }
  {
    GraphSpec spec{{"a", "b", "c"},
                   {make_edge("e1", "a", "b", 1.0, 2.0, Nonlinearity::identity(), 256),
                    make_edge("e2", "b", "c", 1.0, 2.0, Nonlinearity::identity(), 256)},
                   256};
    rep.record(std::abs(poincare_estimate(MetricGraph::build(std::move(spec))).lambda - 0.5 * std::numbers::pi) -
               0.01);
  }
  {
    Rng rng(trial_seed(seed, 0));
    RandomGraphOptions opt;
    opt.exponents = {1.5, 3.0, 4.0};
    const MetricGraph g = random_graph(rng, opt);
    rep.record(1e-12 - poincare_estimate(g, 1000, seed).lambda);
  }
  return {rep};
}

}  // namespace

std::vector<NamedProblem> standard_battery(std::size_t cells) {
  const auto id = Nonlinearity::identity();
  const auto sq = Nonlinearity::power(2.0);
  const auto root = Nonlinearity::power(0.5);
  std::vector<NamedProblem> out;
  out.push_back({"single-edge", battery_problem({{"a", "b"}, {make_edge("e1", "a", "b", 1.0, 3.0, sq, cells)}, cells},
                                                {{"a", 0.2}})});
  out.push_back({"path", battery_problem({{"a", "b", "c"},
                                          {make_edge("e1", "a", "b", 1.0, 2.0, id, cells),
                                           make_edge("e2", "b", "c", 0.7, 3.0, sq, cells)},
                                          cells},
                                         {{"c", -0.3}})});
  out.push_back({"star", battery_problem({{"c", "l1", "l2", "l3"},
                                          {make_edge("e1", "c", "l1", 1.0, 2.0, id, cells),
                                           make_edge("e2", "l2", "c", 0.7, 2.0, sq, cells),
                                           make_edge("e3", "c", "l3", 1.3, 3.0, root, cells)},
                                          cells},
                                         {{"l1", 0.4}})});
  out.push_back({"triangle", battery_problem({{"a", "b", "c"},
                                              {make_edge("e1", "a", "b", 1.0, 2.0, id, cells),
                                               make_edge("e2", "b", "c", 0.7, 3.0, sq, cells),
                                               make_edge("e3", "c", "a", 1.3, 1.5, root, cells)},
                                              cells},
                                             {{"a", 0.3}})});
  out.push_back({"tree", battery_problem({{"a", "b", "c", "d", "e", "f"},
                                          {make_edge("e1", "a", "b", 1.0, 2.0, id, cells),
                                           make_edge("e2", "b", "c", 0.7, 3.0, sq, cells),
                                           make_edge("e3", "b", "d", 1.3, 1.5, root, cells),
                                           make_edge("e4", "d", "e", 0.5, 4.0, id, cells),
                                           make_edge("e5", "f", "d", 0.9, 2.0, sq, cells)},
                                          cells},
                                         {{"a", 0.3}, {"e", -0.2}})});
  return out;
}

std::uint64_t trial_seed(std::uint64_t seed, std::size_t trial) {
  // splitmix64 of the pair
  std::uint64_t z = seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(trial) + 0x632BE59BD9B4E019ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::vector<std::string> suite_names() {
  return {"mass-balance", "comparison", "linf", "gluing", "flux-sweep", "contraction", "integral", "energy", "poincare"};
}

std::vector<PropertyReport> run_suite(const std::string& name, std::uint64_t seed, std::size_t trials) {
  auto n = [&](std::size_t dflt) { return trials == 0 ? dflt : trials; };
  if (name == "mass-balance") return suite_mass_balance(seed, n(100));
  if (name == "comparison") return suite_comparison(seed, n(50));
  if (name == "linf") return suite_linf(seed, n(50));
  if (name == "gluing") return suite_gluing(seed);
  if (name == "flux-sweep") return suite_flux_sweep(seed);
  if (name == "contraction") return suite_contraction(seed, n(20));
  if (name == "integral") return suite_integral(seed, n(5));
  if (name == "energy") return suite_energy(seed, n(6));
  if (name == "poincare") return suite_poincare(seed);
  throw Error(Errc::Schema, "unknown suite '" + name + "'");
}

}  // namespace qgdiff
