#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "qgdiff/cli_io.hpp"
#include "qgdiff/diagnostics.hpp"
#include "qgdiff/error.hpp"

namespace qgdiff {
namespace {

struct Options {
  std::string graph;
  std::string out;
  std::string in;
  std::string method;
  std::string suite = "all";
  std::string resume;
  std::string checkpoint;
  std::vector<std::string> vertices;
  double tol = 0.0;
  double dt = 0.0;
  double t_end = 0.0;
  std::size_t cells = 0;
  std::size_t trials = 0;
  std::uint64_t seed = 1;
  std::size_t checkpoint_every = 0;
};

ScenarioOverrides overrides_from(const Options& o) {
  ScenarioOverrides ov;
  if (o.cells) ov.cells = o.cells;
  if (o.tol > 0) ov.tol = o.tol;
  if (o.dt > 0) ov.dt = o.dt;
  if (o.t_end > 0) ov.t_end = o.t_end;
  if (o.method == "gluing") ov.method = Method::Gluing;
  else if (o.method == "newton") ov.method = Method::Monolithic;
  return ov;
}

// Writes to --out or to the given stream.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback, bool append = false) {
    if (path.empty()) {
      os_ = &fallback;
    } else {
      file_ = std::make_unique<std::ofstream>(path, append ? std::ios::app : std::ios::trunc);
      if (!*file_) throw Error(Errc::Io, "cannot write '" + path + "'");
      os_ = file_.get();
    }
  }
  std::ostream& operator*() { return *os_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* os_ = nullptr;
};

std::string sibling(const std::string& path, const std::string& suffix) {
  const auto dot = path.rfind('.');
  const auto slash = path.find_last_of('/');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return path + suffix;
  return path.substr(0, dot) + suffix;
}

int cmd_validate(const Options& o, std::ostream& out) {
  const Scenario sc = load_scenario(o.graph, overrides_from(o));
  char buf[64];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(scenario_hash(sc)));
  out << "ok: " << sc.graph.vertex_count() << " vertices, " << sc.graph.edge_count() << " edges, hash " << buf << "\n";
  return kExitOk;
}

int cmd_solve_elliptic(const Options& o, std::ostream& out) {
  const Scenario sc = load_scenario(o.graph, overrides_from(o));
  const EllipticSolution sol = solve_elliptic(sc.elliptic_problem(), sc.method, sc.solver);
  if (o.out.empty()) {
    out << solution_csv(sc.graph, sol) << "\n" << flux_csv(sc.graph, sol);
  } else {
    *Sink(o.out, out) << solution_csv(sc.graph, sol);
    *Sink(sibling(o.out, ".fluxes.csv"), out) << flux_csv(sc.graph, sol);
  }
  return kExitOk;
}

int cmd_solve_parabolic(const Options& o, std::ostream& out) {
  const Scenario sc = load_scenario(o.graph, overrides_from(o));
  const std::uint64_t hash = scenario_hash(sc);
  std::optional<Checkpoint> resume;
  if (!o.resume.empty()) resume = read_checkpoint(o.resume, sc.graph, hash);

  Sink sink(o.out, out, resume.has_value());
  std::ostream& os = *sink;
  ParabolicConfig cfg;
  cfg.solver = sc.solver;
  cfg.method = sc.method;
  cfg.keep_records = false;
  cfg.scenario_hash = hash;
  cfg.on_record = [&](const StepRecord& r) {
    os << serialize_record(to_wire(sc.graph, r)) << '\n';
    os.flush();
  };
  if (o.checkpoint_every > 0) {
    std::string path = o.checkpoint;
    if (path.empty()) path = o.out.empty() ? std::string("qgdiff.ckpt.json") : sibling(o.out, ".ckpt.json");
    cfg.checkpoint_every = o.checkpoint_every;
    cfg.on_checkpoint = [&, path](const Checkpoint& c) { write_checkpoint(path, sc.graph, c); };
  }
  solve_parabolic(sc.graph, sc.initial_datum(), sc.schedule(), sc.time_grid(), cfg, resume ? &*resume : nullptr);
  return kExitOk;
}

int cmd_verify(const Options& o, std::ostream& out) {
  std::vector<std::string> suites;
  if (o.suite == "all") {
    suites = suite_names();
  } else {
    const auto names = suite_names();
    if (std::find(names.begin(), names.end(), o.suite) == names.end()) {
      throw Error(Errc::Schema, "unknown suite '" + o.suite + "'");
    }
    suites.push_back(o.suite);
  }
  Sink sink(o.out, out);
  bool ok = true;
  for (const auto& s : suites) {
    for (const auto& r : run_suite(s, o.seed, o.trials)) {
      *sink << format_report(s, r);
      ok = ok && r.pass;
    }
  }
  return ok ? kExitOk : kExitProperty;
}

int cmd_plot(const Options& o, std::ostream& out) {
  const auto records = read_ndjson(o.in);
  std::vector<std::string> vertices = o.vertices;
  if (vertices.empty() && !records.empty()) {
    for (const auto& [id, value] : records.front().vertex_values) {
      if (vertices.size() == 4) break;
      vertices.push_back(id);
    }
  }
  *Sink(o.out, out) << render_svg(records, vertices);
  return kExitOk;
}

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case Errc::NewtonDiverged:
    case Errc::BracketNotFound:
    case Errc::ShapeMismatch:
    case Errc::DomainError:
      return kExitSolver;
    default:
      return kExitInput;
  }
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Nonlinear diffusion on metric graphs", "qgdiff"};
  app.require_subcommand(1);

  auto add_scenario = [&](CLI::App* sub) {
    sub->add_option("--graph,graph", o.graph, "Scenario JSON file")->required();
    sub->add_option("--cells", o.cells, "Default cells per edge")->check(CLI::Range(2, 1 << 24));
    sub->add_option("--tol", o.tol, "Relative residual tolerance")->check(CLI::PositiveNumber);
    sub->add_option("--method", o.method, "newton or gluing")->check(CLI::IsMember({"newton", "gluing"}));
  };
  auto* validate = app.add_subcommand("validate", "Check a scenario file");
  add_scenario(validate);
  auto* elliptic = app.add_subcommand("solve-elliptic", "Solve the stationary problem, write CSV");
  add_scenario(elliptic);
  elliptic->add_option("--out", o.out, "Solution CSV; fluxes go to <stem>.fluxes.csv");
  auto* parabolic = app.add_subcommand("solve-parabolic", "Run implicit Euler, stream NDJSON");
  add_scenario(parabolic);
  parabolic->add_option("--out", o.out, "NDJSON output");
  parabolic->add_option("--dt", o.dt, "Time step")->check(CLI::PositiveNumber);
  parabolic->add_option("--t-end", o.t_end, "Final time")->check(CLI::PositiveNumber);
  parabolic->add_option("--checkpoint-every", o.checkpoint_every, "Write a checkpoint every K steps");
  parabolic->add_option("--checkpoint", o.checkpoint, "Checkpoint path");
  parabolic->add_option("--resume", o.resume, "Continue from a checkpoint, appending to --out");
  auto* verify = app.add_subcommand("verify", "Run property suites");
  verify->add_option("--suite", o.suite, "Suite name or all");
  verify->add_option("--seed", o.seed, "Base seed");
  verify->add_option("--trials", o.trials, "Trials per randomized suite, 0 for the default");
  verify->add_option("--out", o.out, "Report file");
  auto* plot = app.add_subcommand("plot", "Render NDJSON as an SVG chart");
  plot->add_option("--in,input", o.in, "NDJSON trajectory")->required();
  plot->add_option("--out", o.out, "SVG output");
  plot->add_option("--vertex", o.vertices, "Vertex to plot, repeatable");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (validate->parsed()) return cmd_validate(o, out);
    if (elliptic->parsed()) return cmd_solve_elliptic(o, out);
    if (parabolic->parsed()) return cmd_solve_parabolic(o, out);
    if (verify->parsed()) return cmd_verify(o, out);
    if (plot->parsed()) return cmd_plot(o, out);
  } catch (const SolverError& e) {
    err << "solver failure (" << to_string(e.code()) << "): " << e.what() << "\n";
    return kExitSolver;
  } catch (const ExprError& e) {
    err << "expression error (" << to_string(e.code()) << ") at [" << e.offset() << ", " << e.end() << "): " << e.what()
        << "\n";
    return exit_code_for(e);
  } catch (const Error& e) {
    err << "error (" << to_string(e.code()) << "): " << e.what() << "\n";
    return exit_code_for(e);
  }
  return kExitInput;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"qgdiff"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace qgdiff
