#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qgdiff/diagnostics.hpp"
#include "qgdiff/expr.hpp"
#include "qgdiff/graph_elliptic.hpp"
#include "qgdiff/parabolic.hpp"
#include "qgdiff/solver_config.hpp"

namespace qgdiff {

/// A number or an expression, as written in a scenario file.
struct ScalarOrExpr {
  double value = 0.0;
  std::optional<expr::Expression> expr;

  double at(double x, double t) const { return expr ? expr->evaluate({x, t}) : value; }
};

struct TimeSettings {
  double t_end = 1.0;
  double dt = 0.01;
};

struct Scenario {
  MetricGraph graph;
  std::map<std::string, ScalarOrExpr> flux;     // by vertex id, expressions in t
  std::map<std::string, ScalarOrExpr> initial;  // v0 by edge id, expressions in x
  std::optional<TimeSettings> time;
  SolverConfig solver;
  Method method = Method::Monolithic;

  Schedule schedule() const;
  GridFunction initial_datum() const;
  /// alpha = 1, edge sources and fluxes sampled at t = 0.
  EllipticProblem elliptic_problem() const;
  TimeGrid time_grid() const;
};

/// Command-line values that take precedence over the file.
struct ScenarioOverrides {
  std::optional<std::size_t> cells;
  std::optional<double> tol;
  std::optional<double> dt;
  std::optional<double> t_end;
  std::optional<Method> method;
};

/// Schema errors are Error(Errc::Schema or a graph code) whose message starts
/// with a JSON pointer such as /edges/0/length. Expression errors keep their span.
Scenario parse_scenario(std::string_view json_text, const ScenarioOverrides& overrides = {});
Scenario load_scenario(const std::string& path, const ScenarioOverrides& overrides = {});

/// Canonical JSON (sorted keys, two-space indent).
std::string serialize_scenario(const Scenario& s);
/// FNV-1a of the canonical form without time.t_end, so a run may be extended.
std::uint64_t scenario_hash(const Scenario& s);
std::uint64_t fnv1a64(std::string_view bytes);

// ---- trajectory stream ----------------------------------------------------

struct WireRecord {
  double t = 0.0;
  double mass = 0.0;
  double energy_residual = 0.0;
  std::vector<std::pair<std::string, double>> vertex_values;
  std::vector<std::pair<std::string, std::vector<double>>> edges;

  friend bool operator==(const WireRecord&, const WireRecord&) = default;
};

WireRecord to_wire(const MetricGraph& g, const StepRecord& rec);
/// One line, no trailing newline, %.17g numbers, non-finite values as null.
std::string serialize_record(const WireRecord& rec);
WireRecord parse_record(std::string_view line);
std::vector<WireRecord> read_ndjson(const std::string& path);

// ---- checkpoints ------------------------------------------------------------

std::string serialize_checkpoint(const MetricGraph& g, const Checkpoint& c);
/// Throws Error(GraphHashMismatch) when the stored hash differs from `expected_hash`.
Checkpoint parse_checkpoint(std::string_view text, const MetricGraph& g, std::uint64_t expected_hash);
void write_checkpoint(const std::string& path, const MetricGraph& g, const Checkpoint& c);
Checkpoint read_checkpoint(const std::string& path, const MetricGraph& g, std::uint64_t expected_hash);

// ---- exports ----------------------------------------------------------------

/// edge,node,x,u,v
std::string solution_csv(const MetricGraph& g, const EllipticSolution& sol);
/// edge,from,to,a,b
std::string flux_csv(const MetricGraph& g, const EllipticSolution& sol);
/// Fixed-size line chart of mass and the chosen vertex values against t.
std::string render_svg(const std::vector<WireRecord>& records, const std::vector<std::string>& vertices);

/// One NDJSON line per report; stable across runs with the same seed.
std::string format_report(const std::string& suite, const PropertyReport& r);

// ---- command line -----------------------------------------------------------

enum ExitCode : int { kExitOk = 0, kExitSolver = 1, kExitInput = 2, kExitProperty = 3 };

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qgdiff
