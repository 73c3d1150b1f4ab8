#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "qgdiff/cli_io.hpp"
#include "qgdiff/error.hpp"

using namespace qgdiff;
namespace fs = std::filesystem;

namespace {

std::string data(const std::string& name) { return std::string(QGDIFF_TEST_DATA) + "/" + name; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "qgdiff-cli-tests";
  fs::create_directories(dir);
  return dir / name;
}

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

Errc code_of(const std::string& file) {
  try {
    load_scenario(data(file));
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected " << file << " to be rejected");
  return Errc::Io;
}

std::string message_of(const std::string& file) {
  try {
    load_scenario(data(file));
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("fnv1a reference values") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
}

TEST_CASE("minimal scenario and defaults") {
  const Scenario s = load_scenario(data("minimal.json"));
  CHECK(s.graph.vertex_count() == 2);
  CHECK(s.graph.edge(0).cells == 64);
  CHECK(s.solver.tol == 1e-10);
  CHECK(s.method == Method::Monolithic);
  CHECK_FALSE(s.time.has_value());
  CHECK(s.elliptic_problem().g.max_abs() == 0.0);
  CHECK_THROWS_AS(s.time_grid(), Error);
}

TEST_CASE("full scenario") {
  const Scenario s = load_scenario(data("heat_star.json"));
  CHECK(s.graph.edge(0).cells == 32);
  REQUIRE(s.time.has_value());
  CHECK(s.time->dt == 0.01);
  CHECK(s.time_grid().steps() == 10);
  const GridFunction v0 = s.initial_datum();
  CHECK(v0.at(0, 0) == doctest::Approx(1.0));
  CHECK(v0.at(0, 32) == doctest::Approx(-1.0));
  CHECK(v0.at(1, 7) == 0.5);
  CHECK(v0.at(2, 7) == 0.0);
  const auto w = s.schedule().sample_omega(s.graph, 0.0);
  CHECK(w.at("l2") == 0.2);
  CHECK(w.at("l3") == doctest::Approx(0.1));

  const Scenario m = load_scenario(data("mixed_path.json"));
  CHECK(m.method == Method::Gluing);
  CHECK(m.solver.match_tol == 1e-9);
  CHECK(m.graph.edge(1).cells == 24);
}

TEST_CASE("overrides win over the file") {
  ScenarioOverrides ov;
  ov.cells = 16;
  ov.tol = 1e-8;
  ov.dt = 0.05;
  ov.t_end = 0.2;
  ov.method = Method::Gluing;
  const Scenario s = load_scenario(data("heat_star.json"), ov);
  CHECK(s.graph.edge(0).cells == 16);
  CHECK(s.solver.tol == 1e-8);
  CHECK(s.time_grid().steps() == 4);
  CHECK(s.method == Method::Gluing);
  // explicit per-edge cells stay
  CHECK(load_scenario(data("star_zero.json"), ov).graph.edge(0).cells == 8);
}

TEST_CASE("invalid scenarios name the offending field") {
  CHECK(code_of("missing_length.json") == Errc::Schema);
  CHECK(message_of("missing_length.json").find("/edges/0/length") != std::string::npos);
  CHECK(code_of("bad_gamma.json") == Errc::InvalidNonlinearity);
  CHECK(message_of("bad_gamma.json").find("/edges/0/gamma") != std::string::npos);
  CHECK(code_of("unknown_key.json") == Errc::Schema);
  CHECK(message_of("unknown_key.json").find("/edges/0/colour") != std::string::npos);
  CHECK(code_of("dangling.json") == Errc::DanglingReference);
  try {
    load_scenario(data("bad_expr.json"));
    FAIL("expected an expression error");
  } catch (const ExprError& e) {
    CHECK(e.code() == Errc::SyntaxError);
    CHECK(e.offset() == 9);
    CHECK(std::string(e.what()).find("/edges/0/source") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_scenario("{"), Error);
  CHECK_THROWS_AS(parse_scenario(R"({"vertices": []})"), Error);
  CHECK_THROWS_AS(load_scenario(data("does_not_exist.json")), Error);

  const std::string base = R"({"vertices":[{"id":"a"},{"id":"b"}],"edges":[{"id":"e","from":"a","to":"b","length":1)";
  auto code = [&](const std::string& tail) {
    try {
      parse_scenario(base + tail);
    } catch (const Error& e) {
      return e.code();
    }
    return Errc::Io;
  };
  CHECK(code(R"(,"p":1}]})") == Errc::ExponentOutOfRange);
  CHECK(code(R"(,"to":"a"}]})") == Errc::LoopEdge);  // last duplicate key wins
  CHECK(code(R"(}],"flux":{"e":1}})") == Errc::DanglingReference);
  CHECK(code(R"(}],"initial":{"a":1}})") == Errc::DanglingReference);
  CHECK(code(R"(}],"flux":{"a":"x"}})") == Errc::Schema);
}

TEST_CASE("canonical form round trips") {
  for (const std::string f : {"minimal.json", "heat_star.json", "mixed_path.json", "star_zero.json"}) {
    const Scenario a = load_scenario(data(f));
    const std::string text = serialize_scenario(a);
    const Scenario b = parse_scenario(text);
    CHECK(serialize_scenario(b) == text);
    CHECK(scenario_hash(a) == scenario_hash(b));
  }
  ScenarioOverrides longer;
  longer.t_end = 5.0;
  CHECK(scenario_hash(load_scenario(data("heat_star.json"))) ==
        scenario_hash(load_scenario(data("heat_star.json"), longer)));
  ScenarioOverrides finer;
  finer.cells = 8;
  CHECK(scenario_hash(load_scenario(data("heat_star.json"))) !=
        scenario_hash(load_scenario(data("heat_star.json"), finer)));
}

TEST_CASE("trajectory records round trip") {
  const Scenario s = load_scenario(data("heat_star.json"));
  const Trajectory tr = solve_parabolic(s.graph, s.initial_datum(), s.schedule(), s.time_grid());
  for (const auto& r : tr.records) {
    const WireRecord w = to_wire(s.graph, r);
    const std::string line = serialize_record(w);
    CHECK(line.find('\n') == std::string::npos);
    CHECK(parse_record(line) == w);
  }
  WireRecord odd;
  odd.t = 1.0;
  odd.mass = std::numeric_limits<double>::infinity();
  CHECK(serialize_record(odd).find("null") != std::string::npos);
  CHECK_THROWS_AS(parse_record(R"({"t":0,"bogus":1})"), Error);
  CHECK_THROWS_AS(parse_record("not json"), Error);
}

TEST_CASE("checkpoints round trip and check the scenario") {
  const Scenario s = load_scenario(data("heat_star.json"));
  const std::uint64_t h = scenario_hash(s);
  std::vector<Checkpoint> saved;
  ParabolicConfig cfg;
  cfg.scenario_hash = h;
  cfg.checkpoint_every = 3;
  cfg.on_checkpoint = [&](const Checkpoint& c) { saved.push_back(c); };
  solve_parabolic(s.graph, s.initial_datum(), s.schedule(), s.time_grid(), cfg);
  REQUIRE(saved.size() >= 2);
  for (const auto& c : saved) {
    const Checkpoint back = parse_checkpoint(serialize_checkpoint(s.graph, c), s.graph, h);
    CHECK(back.step == c.step);
    CHECK(back.t == c.t);
    CHECK(back.scenario_hash == h);
    for (std::size_t e = 0; e < s.graph.edge_count(); ++e) {
      CHECK(back.v.edge_values(e) == c.v.edge_values(e));
      CHECK(back.u.edge_values(e) == c.u.edge_values(e));
    }
  }
  try {
    parse_checkpoint(serialize_checkpoint(s.graph, saved.front()), s.graph, h ^ 1);
    FAIL("expected a hash mismatch");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::GraphHashMismatch);
  }

  const fs::path p = scratch("ck.json");
  write_checkpoint(p.string(), s.graph, saved.back());
  CHECK(read_checkpoint(p.string(), s.graph, h).step == saved.back().step);
  CHECK_THROWS_AS(parse_checkpoint("{}", s.graph, h), Error);
}

TEST_CASE("exports") {
  const Scenario s = load_scenario(data("star_zero.json"));
  const EllipticSolution sol = solve_monolithic(s.elliptic_problem());
  const std::string csv = solution_csv(s.graph, sol);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "edge,node,x,u,v");
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ++rows;
    CHECK(line.substr(line.size() - 4) == ",0,0");
  }
  CHECK(rows == 27);
  CHECK(flux_csv(s.graph, sol).rfind("edge,from,to,a,b", 0) == 0);

  const Scenario h = load_scenario(data("heat_star.json"));
  const Trajectory tr = solve_parabolic(h.graph, h.initial_datum(), h.schedule(), h.time_grid());
  std::vector<WireRecord> recs;
  for (const auto& r : tr.records) recs.push_back(to_wire(h.graph, r));
  const std::string svg = render_svg(recs, {"c", "l1"});
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(svg == render_svg(recs, {"c", "l1"}));
  CHECK_THROWS_AS(render_svg(recs, {"nowhere"}), Error);

  PropertyReport r{"x", 3, -1.0, 1e-8, true, 4};
  const std::string rep = format_report("s", r);
  CHECK(rep.find("\"suite\":\"s\"") != std::string::npos);
  CHECK(rep.back() == '\n');
}

TEST_CASE("command line") {
  SUBCASE("validate") {
    CHECK(cli({"validate", data("minimal.json")}).code == kExitOk);
    CHECK(cli({"validate", "--graph", data("heat_star.json")}).code == kExitOk);
    const Run bad = cli({"validate", data("missing_length.json")});
    CHECK(bad.code == kExitInput);
    CHECK(bad.err.find("/edges/0/length") != std::string::npos);
    CHECK(cli({"validate", data("bad_expr.json")}).code == kExitInput);
    CHECK(cli({"validate"}).code == kExitInput);
    CHECK(cli({"frobnicate"}).code == kExitInput);
    CHECK(cli({"--help"}).code == kExitOk);
  }
  SUBCASE("solve-elliptic writes both tables") {
    const fs::path out = scratch("sol.csv");
    CHECK(cli({"solve-elliptic", data("mixed_path.json"), "--out", out.string()}).code == kExitOk);
    CHECK(slurp(out).rfind("edge,node,x,u,v", 0) == 0);
    CHECK(slurp(scratch("sol.fluxes.csv")).rfind("edge,from,to,a,b", 0) == 0);
  }
  SUBCASE("solve-parabolic streams and resumes") {
    const fs::path full = scratch("full.ndjson");
    const fs::path part = scratch("part.ndjson");
    const fs::path ck = scratch("part.ckpt.json");
    fs::remove(ck);
    CHECK(cli({"solve-parabolic", data("heat_star.json"), "--out", full.string()}).code == kExitOk);
    CHECK(read_ndjson(full.string()).size() == 11);
    CHECK(cli({"solve-parabolic", data("heat_star.json"), "--t-end", "0.05", "--checkpoint-every", "5", "--out",
               part.string()})
              .code == kExitOk);
    CHECK(cli({"solve-parabolic", data("heat_star.json"), "--resume", ck.string(), "--out", part.string()}).code ==
          kExitOk);
    CHECK(slurp(part) == slurp(full));
    const Run wrong =
        cli({"solve-parabolic", data("heat_star.json"), "--cells", "8", "--resume", ck.string(), "--out",
             scratch("x.ndjson").string()});
    CHECK(wrong.code == kExitInput);
    CHECK(wrong.err.find("GraphHashMismatch") != std::string::npos);
  }
  SUBCASE("solve-parabolic needs a time section") {
    CHECK(cli({"solve-parabolic", data("minimal.json")}).code == kExitInput);
    CHECK(cli({"solve-parabolic", data("minimal.json"), "--dt", "0.1", "--t-end", "0.2"}).code == kExitOk);
  }
  SUBCASE("verify is deterministic") {
    const Run a = cli({"verify", "--suite", "comparison", "--seed", "7", "--trials", "3"});
    const Run b = cli({"verify", "--suite", "comparison", "--seed", "7", "--trials", "3"});
    CHECK(a.code == kExitOk);
    CHECK(a.out == b.out);
    CHECK_FALSE(a.out.empty());
    CHECK(cli({"verify", "--suite", "nope"}).code == kExitInput);
  }
  SUBCASE("plot") {
    const fs::path traj = scratch("plot.ndjson");
    const fs::path svg = scratch("plot.svg");
    CHECK(cli({"solve-parabolic", data("heat_star.json"), "--out", traj.string()}).code == kExitOk);
    CHECK(cli({"plot", traj.string(), "--out", svg.string(), "--vertex", "c"}).code == kExitOk);
    CHECK(slurp(svg).rfind("<svg", 0) == 0);
    CHECK(cli({"plot", traj.string(), "--vertex", "zz"}).code == kExitInput);
  }
}

TEST_CASE("canonical form matches the golden files") {
  for (const std::string f : {"minimal.json", "heat_star.json", "mixed_path.json", "star_zero.json"}) {
    CHECK(serialize_scenario(load_scenario(data(f))) == slurp(data("golden/" + f)));
  }
}
