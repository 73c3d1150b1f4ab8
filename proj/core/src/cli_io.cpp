#include "qgdiff/cli_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "qgdiff/error.hpp"

namespace qgdiff {
namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string escape_pointer_token(const std::string& key) {
  std::string out;
  for (char c : key) {
    if (c == '~') out += "~0";
    else if (c == '/') out += "~1";
    else out += c;
  }
  return out;
}

// Walks a JSON document keeping the pointer of the current node.
class Node {
 public:
  Node(const json& j, std::string ptr) : j_(j), ptr_(std::move(ptr)) {}

  const json& raw() const { return j_; }
  const std::string& ptr() const { return ptr_; }

  [[noreturn]] void fail(const std::string& msg, Errc code = Errc::Schema) const {
    throw Error(code, (ptr_.empty() ? std::string("/") : ptr_) + ": " + msg);
  }

  Node object(std::initializer_list<std::string_view> allowed) const {
    if (!j_.is_object()) fail("expected an object");
    for (const auto& [k, v] : j_.items()) {
      if (std::find(allowed.begin(), allowed.end(), k) == allowed.end()) {
        Node(v, ptr_ + "/" + escape_pointer_token(k)).fail("unknown key '" + k + "'");
      }
    }
    return *this;
  }
  bool has(const std::string& key) const { return j_.is_object() && j_.contains(key); }
  Node at(const std::string& key) const {
    const std::string p = ptr_ + "/" + escape_pointer_token(key);
    if (!has(key)) Node(j_, p).fail("missing required key");
    return Node(j_.at(key), p);
  }
  Node at(std::size_t i) const { return Node(j_.at(i), ptr_ + "/" + std::to_string(i)); }
  std::size_t array_size() const {
    if (!j_.is_array()) fail("expected an array");
    return j_.size();
  }
  double number() const {
    if (!j_.is_number()) fail("expected a number");
    const double x = j_.get<double>();
    if (!std::isfinite(x)) fail("expected a finite number");
    return x;
  }
  double positive() const {
    const double x = number();
    if (!(x > 0.0)) fail("must be positive");
    return x;
  }
  std::size_t count() const {
    if (!j_.is_number_integer() && !j_.is_number_unsigned()) fail("expected a positive integer");
    const auto x = j_.get<long long>();
    if (x < 1) fail("expected a positive integer");
    return static_cast<std::size_t>(x);
  }
  std::string string() const {
    if (!j_.is_string()) fail("expected a string");
    return j_.get<std::string>();
  }
  expr::Expression expression() const {
    const std::string src = string();
    try {
      return expr::parse(src);
    } catch (const ExprError& e) {
      throw ExprError(e.code(), ptr_ + ": " + e.what(), e.offset(), e.end(), e.expected());
    }
  }

 private:
  const json& j_;
  std::string ptr_;
};

ScalarOrExpr scalar_or_expr(const Node& n) {
  ScalarOrExpr out;
  if (n.raw().is_number()) {
    out.value = n.number();
  } else {
    n.object({"expr"});
    out.expr = n.at("expr").expression();
  }
  return out;
}

Nonlinearity parse_gamma(const Node& n) {
  if (!n.raw().is_object()) n.fail("expected an object");
  const std::string kind = n.at("kind").string();
  try {
    if (kind == "identity") {
      n.object({"kind"});
      return Nonlinearity::identity();
    }
    if (kind == "power") {
      n.object({"kind", "m"});
      const Node m = n.at("m");
      const double mv = m.number();
      if (!(mv > 0.0)) m.fail("power exponent m must be positive", Errc::InvalidNonlinearity);
      return Nonlinearity::power(mv);
    }
    if (kind == "table") {
      n.object({"kind", "points"});
      const Node pts = n.at("points");
      std::vector<std::pair<double, double>> points;
      for (std::size_t i = 0; i < pts.array_size(); ++i) {
        const Node p = pts.at(i);
        if (p.array_size() != 2) p.fail("expected a pair [r, s]");
        points.emplace_back(p.at(0).number(), p.at(1).number());
      }
      return Nonlinearity::table(std::move(points));
    }
  } catch (const Error& e) {
    if (e.code() == Errc::InvalidNonlinearity && std::string_view(e.what()).find(": ") == std::string_view::npos) {
      n.fail(e.what(), Errc::InvalidNonlinearity);
    }
    throw;
  }
  n.at("kind").fail("unknown gamma kind '" + kind + "'");
}

Method parse_method(const Node& n) {
  const std::string m = n.string();
  if (m == "newton") return Method::Monolithic;
  if (m == "gluing") return Method::Gluing;
  n.fail("method must be \"newton\" or \"gluing\"");
}

std::string method_name(Method m) { return m == Method::Gluing ? "gluing" : "newton"; }

json gamma_json(const Nonlinearity& gamma) {
  json out;
  if (gamma.is_identity()) {
    out["kind"] = "identity";
  } else if (gamma.is_power()) {
    out["kind"] = "power";
    out["m"] = gamma.power_exponent();
  } else {
    out["kind"] = "table";
    json pts = json::array();
    for (const auto& [r, s] : std::get<Nonlinearity::Table>(gamma.spec()).points) pts.push_back({r, s});
    out["points"] = pts;
  }
  return out;
}

json scalar_or_expr_json(const ScalarOrExpr& s) {
  if (s.expr) return json{{"expr", s.expr->source()}};
  return s.value;
}

json scenario_json(const Scenario& s) {
  json doc;
  json vertices = json::array();
  for (const auto& v : s.graph.vertices()) vertices.push_back({{"id", v}});
  doc["vertices"] = vertices;
  json edges = json::array();
  for (const auto& e : s.graph.edges()) {
    json je{{"id", e.id}, {"from", e.from}, {"to", e.to}, {"length", e.length},
            {"p", e.p},   {"gamma", gamma_json(e.gamma)}, {"cells", e.cells}};
    if (e.source.expr) {
      if (e.source.offset != 0.0 || e.source.scale != 1.0) {
        throw Error(Errc::Schema, "edge '" + e.id + "' has a transformed source that has no file form");
      }
      je["source"] = {{"expr", e.source.expr->source()}};
    }
    edges.push_back(je);
  }
  doc["edges"] = edges;
  if (!s.flux.empty()) {
    json f = json::object();
    for (const auto& [v, term] : s.flux) f[v] = scalar_or_expr_json(term);
    doc["flux"] = f;
  }
  if (!s.initial.empty()) {
    json f = json::object();
    for (const auto& [e, term] : s.initial) f[e] = scalar_or_expr_json(term);
    doc["initial"] = f;
  }
  if (s.time) doc["time"] = {{"t_end", s.time->t_end}, {"dt", s.time->dt}};
  doc["solver"] = {{"tol", s.solver.tol},
                   {"match_tol", s.solver.match_tol},
                   {"method", method_name(s.method)},
                   {"cells_default", s.solver.cells_default}};
  return doc;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::Io, "cannot write '" + tmp + "'");
    out << content;
    if (!out) throw Error(Errc::Io, "write to '" + tmp + "' failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(Errc::Io, "cannot rename '" + tmp + "' to '" + path + "': " + ec.message());
}

json parse_json_text(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(Errc::Schema, std::string("/: invalid JSON: ") + e.what());
  }
}

void put_number(std::string& out, double x) {
  if (!std::isfinite(x)) {
    out += "null";
    return;
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  out += buf;
}

void put_string(std::string& out, const std::string& s) { out += json(s).dump(); }

double wire_number(const ordered_json& j) {
  if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
  if (!j.is_number()) throw Error(Errc::Schema, "record field is not a number");
  return j.get<double>();
}

std::string hex64(std::uint64_t x) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(x));
  return buf;
}

json grid_json(const MetricGraph& g, const GridFunction& f) {
  json out = json::object();
  for (std::size_t e = 0; e < g.edge_count(); ++e) out[g.edge(e).id] = f.edge_values(e);
  return out;
}

void fill_grid(const json& j, const MetricGraph& g, GridFunction& f, const char* what) {
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    const auto& id = g.edge(e).id;
    if (!j.contains(id)) throw Error(Errc::Schema, std::string("checkpoint is missing ") + what + " on edge '" + id + "'");
    const auto values = j.at(id).get<std::vector<double>>();
    if (values.size() != f.nodes(e)) {
      throw Error(Errc::GridMismatch, std::string("checkpoint ") + what + " on edge '" + id + "' has the wrong size");
    }
    f.set_edge_values(e, values);
  }
}

}  // namespace

// ---- scenario ---------------------------------------------------------------

Schedule Scenario::schedule() const {
  Schedule s;
  for (const auto& [v, term] : flux) {
    FluxTerm ft;
    ft.constant = term.value;
    ft.expr = term.expr;
    s.omega[v] = ft;
  }
  return s;
}

GridFunction Scenario::initial_datum() const {
  const GridLayout layout = GridLayout::of(graph);
  GridFunction v0 = GridFunction::edgewise(layout);
  for (std::size_t e = 0; e < graph.edge_count(); ++e) {
    const auto it = initial.find(graph.edge(e).id);
    if (it == initial.end()) continue;
    for (std::size_t j = 0; j < v0.nodes(e); ++j) v0.set(e, j, it->second.at(layout.edges[e].node(j), 0.0));
  }
  return v0;
}

EllipticProblem Scenario::elliptic_problem() const {
  EllipticProblem prob = EllipticProblem::zero(graph);
  prob.g = schedule().sample_f(graph, 0.0);
  prob.omega = schedule().sample_omega(graph, 0.0);
  return prob;
}

TimeGrid Scenario::time_grid() const {
  if (!time) throw Error(Errc::Schema, "/time: missing; pass --dt and --t-end or add a time section");
  return TimeGrid::uniform(time->t_end, time->dt);
}

Scenario parse_scenario(std::string_view json_text, const ScenarioOverrides& overrides) {
  const json doc = parse_json_text(json_text);
  const Node root = Node(doc, "").object({"vertices", "edges", "flux", "initial", "time", "solver"});

  Scenario sc;
  GraphSpec spec;
  if (root.has("solver")) {
    const Node s = root.at("solver").object({"tol", "match_tol", "method", "cells_default"});
    if (s.has("tol")) sc.solver.tol = s.at("tol").positive();
    if (s.has("match_tol")) sc.solver.match_tol = s.at("match_tol").positive();
    if (s.has("method")) sc.method = parse_method(s.at("method"));
    if (s.has("cells_default")) {
      const Node c = s.at("cells_default");
      sc.solver.cells_default = c.count();
      if (sc.solver.cells_default < 2) c.fail("at least 2 cells required");
    }
  }
  if (overrides.cells) sc.solver.cells_default = *overrides.cells;
  if (overrides.tol) sc.solver.tol = *overrides.tol;
  if (overrides.method) sc.method = *overrides.method;
  spec.default_cells = sc.solver.cells_default;

  const Node vs = root.at("vertices");
  std::set<std::string> vertex_ids;
  for (std::size_t i = 0; i < vs.array_size(); ++i) {
    const Node v = vs.at(i).object({"id"});
    const Node id = v.at("id");
    std::string name = id.string();
    if (name.empty()) id.fail("vertex id must be nonempty");
    if (!vertex_ids.insert(name).second) id.fail("duplicate vertex id '" + name + "'");
    spec.vertices.push_back(std::move(name));
  }
  if (spec.vertices.empty()) vs.fail("at least one vertex required", Errc::Disconnected);

  const Node es = root.at("edges");
  std::set<std::string> edge_ids;
  std::set<std::pair<std::string, std::string>> pairs;
  for (std::size_t i = 0; i < es.array_size(); ++i) {
    const Node en = es.at(i).object({"id", "from", "to", "length", "p", "gamma", "cells", "source"});
    Edge e;
    const Node id = en.at("id");
    e.id = id.string();
    if (e.id.empty()) id.fail("edge id must be nonempty");
    if (!edge_ids.insert(e.id).second) id.fail("duplicate edge id '" + e.id + "'");
    for (const char* key : {"from", "to"}) {
      const Node end = en.at(key);
      const std::string vid = end.string();
      if (!vertex_ids.count(vid)) end.fail("unknown vertex '" + vid + "'", Errc::DanglingReference);
      (key[0] == 'f' ? e.from : e.to) = vid;
    }
    if (e.from == e.to) en.at("to").fail("edge '" + e.id + "' is a loop", Errc::LoopEdge);
    if (!pairs.insert(std::minmax(e.from, e.to)).second) {
      en.at("to").fail("edge '" + e.id + "' duplicates an existing vertex pair", Errc::DuplicateEdge);
    }
    const Node len = en.at("length");
    e.length = len.number();
    if (!(e.length > 0.0)) len.fail("length must be positive", Errc::NonPositiveLength);
    if (en.has("p")) {
      const Node p = en.at("p");
      e.p = p.number();
      if (!(e.p > 1.0)) p.fail("p must exceed 1", Errc::ExponentOutOfRange);
    }
    e.gamma = en.has("gamma") ? parse_gamma(en.at("gamma")) : Nonlinearity::identity();
    if (en.has("cells")) {
      const Node c = en.at("cells");
      e.cells = c.count();
      if (e.cells < 2) c.fail("at least 2 cells required");
    }
    if (en.has("source")) {
      const Node src = en.at("source").object({"expr"});
      e.source.expr = src.at("expr").expression();
    }
    spec.edges.push_back(std::move(e));
  }
  if (spec.edges.empty()) es.fail("at least one edge required", Errc::Disconnected);

  try {
    sc.graph = MetricGraph::build(std::move(spec));
  } catch (const Error& e) {
    throw Error(e.code(), std::string("/edges: ") + e.what());
  }

  if (root.has("flux")) {
    const Node f = root.at("flux");
    if (!f.raw().is_object()) f.fail("expected an object");
    for (const auto& [k, v] : f.raw().items()) {
      const Node n(v, f.ptr() + "/" + escape_pointer_token(k));
      if (!vertex_ids.count(k)) n.fail("unknown vertex '" + k + "'", Errc::DanglingReference);
      sc.flux[k] = scalar_or_expr(n);
    }
  }
  if (root.has("initial")) {
    const Node f = root.at("initial");
    if (!f.raw().is_object()) f.fail("expected an object");
    for (const auto& [k, v] : f.raw().items()) {
      const Node n(v, f.ptr() + "/" + escape_pointer_token(k));
      if (!edge_ids.count(k)) n.fail("unknown edge '" + k + "'", Errc::DanglingReference);
      sc.initial[k] = scalar_or_expr(n);
    }
  }
  if (root.has("time")) {
    const Node t = root.at("time").object({"t_end", "dt"});
    sc.time = TimeSettings{t.at("t_end").positive(), t.at("dt").positive()};
  }
  if (overrides.dt || overrides.t_end) {
    if (!sc.time) {
      if (!(overrides.dt && overrides.t_end)) {
        throw Error(Errc::Schema, "/time: missing; both --dt and --t-end are needed");
      }
      sc.time = TimeSettings{};
    }
    if (overrides.dt) sc.time->dt = *overrides.dt;
    if (overrides.t_end) sc.time->t_end = *overrides.t_end;
    if (!(sc.time->dt > 0.0) || !(sc.time->t_end > 0.0)) throw Error(Errc::Schema, "/time: dt and t_end must be positive");
  }
  return sc;
}

Scenario load_scenario(const std::string& path, const ScenarioOverrides& overrides) {
  return parse_scenario(read_file(path), overrides);
}

std::string serialize_scenario(const Scenario& s) { return scenario_json(s).dump(2) + "\n"; }

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t scenario_hash(const Scenario& s) {
  json doc = scenario_json(s);
  if (doc.contains("time")) doc["time"].erase("t_end");
  return fnv1a64(doc.dump());
}

// ---- records ------------------------------------------------------------------

WireRecord to_wire(const MetricGraph& g, const StepRecord& rec) {
  WireRecord w;
  w.t = rec.t;
  w.mass = rec.mass;
  w.energy_residual = rec.energy_residual;
  for (std::size_t v = 0; v < g.vertex_count(); ++v) w.vertex_values.emplace_back(g.vertices()[v], rec.u.vertex_value(v));
  for (std::size_t e = 0; e < g.edge_count(); ++e) w.edges.emplace_back(g.edge(e).id, rec.v.edge_values(e));
  return w;
}

std::string serialize_record(const WireRecord& rec) {
  std::string out = "{\"t\":";
  put_number(out, rec.t);
  out += ",\"mass\":";
  put_number(out, rec.mass);
  out += ",\"energy_residual\":";
  put_number(out, rec.energy_residual);
  out += ",\"vertex_values\":{";
  for (std::size_t i = 0; i < rec.vertex_values.size(); ++i) {
    if (i) out += ',';
    put_string(out, rec.vertex_values[i].first);
    out += ':';
    put_number(out, rec.vertex_values[i].second);
  }
  out += "},\"edges\":{";
  for (std::size_t i = 0; i < rec.edges.size(); ++i) {
    if (i) out += ',';
    put_string(out, rec.edges[i].first);
    out += ":[";
    for (std::size_t j = 0; j < rec.edges[i].second.size(); ++j) {
      if (j) out += ',';
      put_number(out, rec.edges[i].second[j]);
    }
    out += ']';
  }
  out += "}}";
  return out;
}

WireRecord parse_record(std::string_view line) {
  ordered_json j;
  try {
    j = ordered_json::parse(line);
  } catch (const ordered_json::parse_error& e) {
    throw Error(Errc::Schema, std::string("invalid record: ") + e.what());
  }
  if (!j.is_object()) throw Error(Errc::Schema, "record is not an object");
  for (const auto& [k, v] : j.items()) {
    if (k != "t" && k != "mass" && k != "energy_residual" && k != "vertex_values" && k != "edges") {
      throw Error(Errc::Schema, "/" + k + ": unknown key in record");
    }
  }
  WireRecord w;
  try {
    w.t = wire_number(j.at("t"));
    w.mass = wire_number(j.at("mass"));
    w.energy_residual = wire_number(j.at("energy_residual"));
    for (const auto& [k, v] : j.at("vertex_values").items()) w.vertex_values.emplace_back(k, wire_number(v));
    for (const auto& [k, v] : j.at("edges").items()) {
      std::vector<double> values;
      for (const auto& x : v) values.push_back(wire_number(x));
      w.edges.emplace_back(k, std::move(values));
    }
  } catch (const ordered_json::exception& e) {
    throw Error(Errc::Schema, std::string("malformed record: ") + e.what());
  }
  return w;
}

std::vector<WireRecord> read_ndjson(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Io, "cannot open '" + path + "'");
  std::vector<WireRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      out.push_back(parse_record(line));
    } catch (const Error& e) {
      throw Error(e.code(), path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

// ---- checkpoints ----------------------------------------------------------------

std::string serialize_checkpoint(const MetricGraph& g, const Checkpoint& c) {
  json doc;
  doc["format"] = "qgdiff-checkpoint";
  doc["version"] = 1;
  doc["scenario_hash"] = hex64(c.scenario_hash);
  doc["step"] = c.step;
  doc["t"] = c.t;
  doc["v"] = grid_json(g, c.v);
  json u = grid_json(g, c.u);
  json uv = json::object();
  for (std::size_t v = 0; v < g.vertex_count(); ++v) uv[g.vertices()[v]] = c.u.vertex_value(v);
  doc["u"] = {{"edges", u}, {"vertices", uv}};
  doc["rng_seeds"] = c.rng_seeds;
  return doc.dump() + "\n";
}

Checkpoint parse_checkpoint(std::string_view text, const MetricGraph& g, std::uint64_t expected_hash) {
  const json doc = parse_json_text(text);
  Checkpoint c;
  try {
    if (doc.at("format") != "qgdiff-checkpoint" || doc.at("version") != 1) {
      throw Error(Errc::Schema, "not a version 1 checkpoint");
    }
    const auto stored = std::stoull(doc.at("scenario_hash").get<std::string>(), nullptr, 16);
    if (stored != expected_hash) {
      throw Error(Errc::GraphHashMismatch, "checkpoint was written for scenario " + hex64(stored) +
                                               " but the current scenario hashes to " + hex64(expected_hash));
    }
    c.scenario_hash = stored;
    c.step = doc.at("step").get<std::size_t>();
    c.t = doc.at("t").get<double>();
    const GridLayout layout = GridLayout::of(g);
    c.v = GridFunction::edgewise(layout);
    fill_grid(doc.at("v"), g, c.v, "v");
    c.u = GridFunction::vertex_coupled(layout);
    fill_grid(doc.at("u").at("edges"), g, c.u, "u");
    const json& uv = doc.at("u").at("vertices");
    for (std::size_t v = 0; v < g.vertex_count(); ++v) c.u.set_vertex_value(v, uv.at(g.vertices()[v]).get<double>());
    c.rng_seeds = doc.at("rng_seeds").get<std::vector<std::uint64_t>>();
  } catch (const json::exception& e) {
    throw Error(Errc::Schema, std::string("malformed checkpoint: ") + e.what());
  } catch (const std::invalid_argument&) {
    throw Error(Errc::Schema, "malformed checkpoint hash");
  }
  return c;
}

void write_checkpoint(const std::string& path, const MetricGraph& g, const Checkpoint& c) {
  write_file_atomic(path, serialize_checkpoint(g, c));
}

Checkpoint read_checkpoint(const std::string& path, const MetricGraph& g, std::uint64_t expected_hash) {
  return parse_checkpoint(read_file(path), g, expected_hash);
}

// ---- exports ----------------------------------------------------------------------

std::string solution_csv(const MetricGraph& g, const EllipticSolution& sol) {
  std::string out = "edge,node,x,u,v\n";
  const GridLayout& layout = sol.v.layout();
  char buf[128];
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    for (std::size_t j = 0; j < sol.v.nodes(e); ++j) {
      out += g.edge(e).id;
      std::snprintf(buf, sizeof buf, ",%zu,%.17g,%.17g,%.17g\n", j, layout.edges[e].node(j), sol.u.at(e, j),
                    sol.v.at(e, j));
      out += buf;
    }
  }
  return out;
}

std::string flux_csv(const MetricGraph& g, const EllipticSolution& sol) {
  std::string out = "edge,from,to,a,b\n";
  char buf[96];
  for (const auto& e : g.edges()) {
    const EdgeFlux& f = sol.edge_fluxes.at(e.id);
    out += e.id + "," + e.from + "," + e.to;
    std::snprintf(buf, sizeof buf, ",%.17g,%.17g\n", f.a, f.b);
    out += buf;
  }
  return out;
}

std::string render_svg(const std::vector<WireRecord>& records, const std::vector<std::string>& vertices) {
  constexpr double W = 800, H = 480, L = 80, R = 180, T = 40, B = 60;
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

  struct Series {
    std::string label;
    std::vector<std::pair<double, double>> pts;
  };
  std::vector<Series> series{{"mass", {}}};
  for (const auto& v : vertices) series.push_back({"u(" + v + ")", {}});
  for (const auto& r : records) {
    series[0].pts.emplace_back(r.t, r.mass);
    for (std::size_t k = 0; k < vertices.size(); ++k) {
      const auto it = std::find_if(r.vertex_values.begin(), r.vertex_values.end(),
                                   [&](const auto& p) { return p.first == vertices[k]; });
      if (it == r.vertex_values.end()) throw Error(Errc::UnknownVertex, "no vertex '" + vertices[k] + "' in records");
      series[k + 1].pts.emplace_back(r.t, it->second);
    }
  }
  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  bool first = true;
  for (const auto& s : series) {
    for (const auto& [x, y] : s.pts) {
      if (!std::isfinite(x) || !std::isfinite(y)) continue;
      if (first) {
        x0 = x1 = x;
        y0 = y1 = y;
        first = false;
      }
      x0 = std::min(x0, x), x1 = std::max(x1, x), y0 = std::min(y0, y), y1 = std::max(y1, y);
    }
  }
  if (x1 - x0 <= 0) x1 = x0 + 1;
  if (y1 - y0 <= 0) {
    y0 -= 0.5 * (1 + std::abs(y0));
    y1 += 0.5 * (1 + std::abs(y1));
  }
  const double pad = 0.05 * (y1 - y0);
  y0 -= pad, y1 += pad;
  auto sx = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
  auto sy = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };

  std::ostringstream os;
  char buf[160];
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"480\" viewBox=\"0 0 800 480\" "
        "font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"800\" height=\"480\" fill=\"white\"/>\n";
  std::snprintf(buf, sizeof buf, "<rect x=\"%g\" y=\"%g\" width=\"%g\" height=\"%g\" fill=\"none\" stroke=\"black\"/>\n",
                L, T, W - L - R, H - T - B);
  os << buf;
  for (int k = 0; k <= 4; ++k) {
    const double xv = x0 + (x1 - x0) * k / 4.0, yv = y0 + (y1 - y0) * k / 4.0;
    std::snprintf(buf, sizeof buf, "<text x=\"%.2f\" y=\"%g\" text-anchor=\"middle\">%.3g</text>\n", sx(xv), H - B + 18, xv);
    os << buf;
    std::snprintf(buf, sizeof buf, "<text x=\"%g\" y=\"%.2f\" text-anchor=\"end\">%.3g</text>\n", L - 6, sy(yv) + 4, yv);
    os << buf;
    std::snprintf(buf, sizeof buf, "<line x1=\"%g\" y1=\"%.2f\" x2=\"%g\" y2=\"%.2f\" stroke=\"#ddd\"/>\n", L, sy(yv),
                  W - R, sy(yv));
    os << buf;
  }
  std::snprintf(buf, sizeof buf, "<text x=\"%g\" y=\"%g\" text-anchor=\"middle\">t</text>\n", L + (W - L - R) / 2,
                H - 20);
  os << buf;
  for (std::size_t k = 0; k < series.size(); ++k) {
    const char* color = palette[k % (sizeof palette / sizeof *palette)];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    bool sep = false;
    for (const auto& [x, y] : series[k].pts) {
      if (!std::isfinite(x) || !std::isfinite(y)) continue;
      std::snprintf(buf, sizeof buf, "%s%.2f,%.2f", sep ? " " : "", sx(x), sy(y));
      os << buf;
      sep = true;
    }
    os << "\"/>\n";
    const double ly = T + 10 + 18.0 * static_cast<double>(k);
    std::snprintf(buf, sizeof buf, "<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"%s\" stroke-width=\"2\"/>\n",
                  W - R + 12, ly, W - R + 32, ly, color);
    os << buf;
    std::string label;
    for (char c : series[k].label) {
      if (c == '<') label += "&lt;";
      else if (c == '>') label += "&gt;";
      else if (c == '&') label += "&amp;";
      else label += c;
    }
    std::snprintf(buf, sizeof buf, "<text x=\"%g\" y=\"%g\">", W - R + 38, ly + 4);
    os << buf << label << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string format_report(const std::string& suite, const PropertyReport& r) {
  std::string out = "{\"suite\":";
  put_string(out, suite);
  out += ",\"name\":";
  put_string(out, r.name);
  out += ",\"samples\":" + std::to_string(r.samples) + ",\"worst_violation\":";
  put_number(out, r.worst_violation);
  out += ",\"tolerance\":";
  put_number(out, r.tolerance);
  out += std::string(",\"pass\":") + (r.pass ? "true" : "false") + ",\"seed\":" + std::to_string(r.seed) + "}\n";
  return out;
}

}  // namespace qgdiff
