#include "maglab/cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <json.hpp>

namespace maglab::cli {

using json = nlohmann::json;

ParseError::ParseError(const std::string& what, int line, int column)
    : Error(ErrorKind::ParseError,
            "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
      line_(line),
      column_(column) {}

ValidationError::ValidationError(std::string key, const std::string& what)
    : Error(ErrorKind::ValidationError, key + ": " + what), key_(std::move(key)) {}

DomainSpec DomainConfig::build() const {
  switch (type) {
    case Type::rectangle: return DomainSpec::rectangle(x0, x1, y0, y1);
    case Type::disc: return DomainSpec::disc(center, radius);
    case Type::annulus: return DomainSpec::annulus(center, r_inner, r_outer);
  }
  throw Error(ErrorKind::InvalidSpec, "unknown domain type");
}

CompactSetSpec SetConfig::build() const {
  switch (type) {
    case Type::point: return CompactSetSpec::point(p);
    case Type::segment: return CompactSetSpec::segment(p, q);
    case Type::closed_disc: return CompactSetSpec::closed_disc(center, radius);
    case Type::finite_union: {
      std::vector<CompactSetSpec> built;
      for (const auto& part : parts) built.push_back(part.build());
      return CompactSetSpec::finite_union(std::move(built));
    }
  }
  throw Error(ErrorKind::InvalidSpec, "unknown set type");
}

std::string_view command_name(const Command& c) noexcept {
  static constexpr std::string_view names[] = {"eig", "sweep", "kato", "flux", "pcheck", "verify"};
  return names[c.index()];
}

Weight RunConfig::effective_weight() const {
  if (const auto* flux = std::get_if<FluxCommand>(&command)) {
    WeightConfig wc = weight.value_or(WeightConfig{WeightTag::harmonic_log, {}});
    if (!weight && domain) wc.params.center = domain->center;
    wc.params.beta = flux->beta;
    return wc.build();
  }
  return weight.value_or(WeightConfig{}).build();
}

namespace {

/// An object being read; every key must be consumed before finish().
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ValidationError(path_.empty() ? "<root>" : path_, "must be an object");
  }

  std::string key(std::string_view k) const { return path_.empty() ? std::string(k) : path_ + "." + std::string(k); }
  bool has(const char* k) const { return j_.contains(k); }

  const json& raw(const char* k) {
    seen_.insert(k);
    return j_.at(k);
  }

  double number(const char* k, std::optional<double> fallback = std::nullopt) {
    if (!has(k)) {
      if (fallback) return *fallback;
      throw ValidationError(key(k), "required");
    }
    const json& v = raw(k);
    if (!v.is_number()) throw ValidationError(key(k), "must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ValidationError(key(k), "must be finite");
    return d;
  }

  std::int64_t integer(const char* k, std::int64_t fallback) {
    if (!has(k)) return fallback;
    const json& v = raw(k);
    if (!v.is_number_integer()) throw ValidationError(key(k), "must be an integer");
    return v.get<std::int64_t>();
  }

  std::string string(const char* k, std::optional<std::string> fallback = std::nullopt) {
    if (!has(k)) {
      if (fallback) return *fallback;
      throw ValidationError(key(k), "required");
    }
    const json& v = raw(k);
    if (!v.is_string()) throw ValidationError(key(k), "must be a string");
    return v.get<std::string>();
  }

  Point point(const char* k, Point fallback) {
    if (!has(k)) return fallback;
    const json& v = raw(k);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
      throw ValidationError(key(k), "must be a pair of numbers [x, y]");
    return {v[0].get<double>(), v[1].get<double>()};
  }

  std::vector<double> numbers(const char* k) {
    if (!has(k)) throw ValidationError(key(k), "required");
    const json& v = raw(k);
    if (!v.is_array()) throw ValidationError(key(k), "must be an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) {
      if (!e.is_number()) throw ValidationError(key(k), "must be an array of numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }

  void finish() const {
    for (const auto& [k, v] : j_.items())
      if (!seen_.count(k)) throw ValidationError(key(k), "unknown key");
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string, std::less<>> seen_;
};

DomainConfig parse_domain(const json& j) {
  Section s(j, "domain");
  DomainConfig d;
  const std::string type = s.string("type");
  if (type == "rectangle") {
    d.type = DomainConfig::Type::rectangle;
    d.x0 = s.number("x0");
    d.x1 = s.number("x1");
    d.y0 = s.number("y0");
    d.y1 = s.number("y1");
    if (!(d.x0 < d.x1)) throw ValidationError("domain.x1", "must exceed x0");
    if (!(d.y0 < d.y1)) throw ValidationError("domain.y1", "must exceed y0");
  } else if (type == "disc") {
    d.type = DomainConfig::Type::disc;
    d.center = s.point("center", {});
    d.radius = s.number("radius");
    if (!(d.radius > 0)) throw ValidationError("domain.radius", "must be positive");
  } else if (type == "annulus") {
    d.type = DomainConfig::Type::annulus;
    d.center = s.point("center", {});
    d.r_inner = s.number("r_inner");
    d.r_outer = s.number("r_outer");
    if (!(d.r_inner > 0)) throw ValidationError("domain.r_inner", "must be positive");
    if (!(d.r_outer > d.r_inner)) throw ValidationError("domain.r_outer", "must exceed r_inner");
  } else {
    throw ValidationError("domain.type", "expected rectangle, disc or annulus");
  }
  s.finish();
  return d;
}

WeightConfig parse_weight(const json& j) {
  Section s(j, "weight");
  WeightConfig w;
  const std::string tag = s.string("tag");
  const auto parsed = weight_tag_from_string(tag);
  if (!parsed) throw ValidationError("weight.tag", "unknown weight '" + tag + "'");
  w.tag = *parsed;
  w.params.scale = s.number("scale", 1.0);
  w.params.center = s.point("center", {});
  switch (w.tag) {
    case WeightTag::harmonic_log: w.params.beta = s.number("beta", 1.0); break;
    case WeightTag::flat_disc:
      w.params.r0 = s.number("r0", 0.25);
      if (!(w.params.r0 > 0)) throw ValidationError("weight.r0", "must be positive");
      break;
    case WeightTag::hol_squares: {
      if (!s.has("polynomials")) throw ValidationError("weight.polynomials", "required");
      const json& polys = s.raw("polynomials");
      auto bad = [] { throw ValidationError("weight.polynomials", "expected a list of coefficient lists [re, im]"); };
      if (!polys.is_array()) bad();
      for (const auto& poly : polys) {
        if (!poly.is_array()) bad();
        std::vector<std::complex<double>> coefs;
        for (const auto& c : poly) {
          if (!c.is_array() || c.size() != 2 || !c[0].is_number() || !c[1].is_number()) bad();
          coefs.emplace_back(c[0].get<double>(), c[1].get<double>());
        }
        w.params.polynomials.push_back(std::move(coefs));
      }
      break;
    }
    default: break;
  }
  s.finish();
  return w;
}

SolverOpts parse_solver(const json& j) {
  Section s(j, "solver");
  SolverOpts o;
  o.tol = s.number("tol", o.tol);
  if (!(o.tol > 0)) throw ValidationError("solver.tol", "must be positive");
  const auto max_iter = s.integer("max_iter", o.max_iter);
  if (max_iter < 1 || max_iter > 100000000) throw ValidationError("solver.max_iter", "must be in [1, 1e8]");
  o.max_iter = static_cast<int>(max_iter);
  const auto block = s.integer("block_size", o.block_size);
  if (block < 1 || block > 64) throw ValidationError("solver.block_size", "must be in [1, 64]");
  o.block_size = static_cast<int>(block);
  const auto seed = s.integer("seed", static_cast<std::int64_t>(o.seed));
  if (seed < 0) throw ValidationError("solver.seed", "must be nonnegative");
  o.seed = static_cast<std::uint64_t>(seed);
  const std::string method = s.string("method", "automatic");
  if (method == "automatic")
    o.method = SolverMethod::automatic;
  else if (method == "lobpcg")
    o.method = SolverMethod::lobpcg;
  else if (method == "inverse_iteration")
    o.method = SolverMethod::inverse_iteration;
  else
    throw ValidationError("solver.method", "expected automatic, lobpcg or inverse_iteration");
  s.finish();
  return o;
}

SetConfig parse_set(const json& j, const std::string& path) {
  Section s(j, path);
  SetConfig c;
  const std::string type = s.string("type");
  if (type == "point") {
    c.type = SetConfig::Type::point;
    c.p = s.point("p", {});
  } else if (type == "segment") {
    c.type = SetConfig::Type::segment;
    if (!s.has("p") || !s.has("q")) throw ValidationError(s.key("p"), "segment needs endpoints p and q");
    c.p = s.point("p", {});
    c.q = s.point("q", {});
  } else if (type == "closed_disc") {
    c.type = SetConfig::Type::closed_disc;
    c.center = s.point("center", {});
    c.radius = s.number("radius");
    if (!(c.radius > 0)) throw ValidationError(s.key("radius"), "must be positive");
  } else if (type == "union") {
    c.type = SetConfig::Type::finite_union;
    if (!s.has("parts")) throw ValidationError(s.key("parts"), "required");
    const json& parts = s.raw("parts");
    if (!parts.is_array() || parts.empty()) throw ValidationError(s.key("parts"), "must be a nonempty array");
    for (std::size_t k = 0; k < parts.size(); ++k)
      c.parts.push_back(parse_set(parts[k], s.key("parts") + "[" + std::to_string(k) + "]"));
  } else {
    throw ValidationError(s.key("type"), "expected point, segment, closed_disc or union");
  }
  s.finish();
  return c;
}

void check_increasing(const std::vector<double>& v, const std::string& key, bool strictly_decreasing = false) {
  if (v.empty()) throw ValidationError(key, "must not be empty");
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (!std::isfinite(v[k])) throw ValidationError(key, "must be finite");
    if (k > 0 && !(strictly_decreasing ? v[k] < v[k - 1] : v[k] > v[k - 1]))
      throw ValidationError(key, strictly_decreasing ? "must be strictly decreasing" : "must be strictly increasing");
  }
}

void check_thresholds(double ratio, double tail, const std::string& section) {
  if (!(ratio > 1)) throw ValidationError(section + ".ratio", "must exceed 1");
  if (!(tail > 0)) throw ValidationError(section + ".tail_ratio", "must be positive");
}

Command parse_command(std::string_view name, const json& j) {
  Section s(j, std::string(name));
  Command out;
  if (name == "eig") {
    EigCommand c;
    c.n = s.number("n", 1.0);
    if (c.n < 0) throw ValidationError("eig.n", "must be nonnegative");
    const std::string op = s.string("operator", "magnetic");
    if (op == "magnetic")
      c.op = EigOperator::magnetic;
    else if (op == "nonmagnetic")
      c.op = EigOperator::nonmagnetic;
    else if (op == "weighted")
      c.op = EigOperator::weighted;
    else
      throw ValidationError("eig.operator", "expected magnetic, nonmagnetic or weighted");
    out = c;
  } else if (name == "sweep") {
    SweepCommand c;
    if (s.has("n_list")) c.n_list = s.numbers("n_list");
    check_increasing(c.n_list, "sweep.n_list");
    if (c.n_list.front() < 0) throw ValidationError("sweep.n_list", "must be nonnegative");
    c.ratio = s.number("ratio", c.ratio);
    c.tail_ratio = s.number("tail_ratio", c.tail_ratio);
    check_thresholds(c.ratio, c.tail_ratio, "sweep");
    out = c;
  } else if (name == "kato") {
    KatoCommand c;
    c.n = s.number("n", 1.0);
    if (c.n < 0) throw ValidationError("kato.n", "must be nonnegative");
    out = c;
  } else if (name == "flux") {
    FluxCommand c;
    c.beta = s.number("beta", 1.0);
    if (c.beta == 0) throw ValidationError("flux.beta", "must be nonzero");
    c.t_list = s.numbers("t_list");
    check_increasing(c.t_list, "flux.t_list");
    if ((c.t_list.back() - c.t_list.front()) * std::abs(c.beta) < 1 - 1e-12)
      throw ValidationError("flux.t_list", "must span at least one period 1/beta");
    out = c;
  } else if (name == "pcheck") {
    PcheckCommand c;
    if (!s.has("set")) throw ValidationError("pcheck.set", "required");
    c.set = parse_set(s.raw("set"), "pcheck.set");
    c.radii = s.numbers("radii");
    check_increasing(c.radii, "pcheck.radii", true);
    if (!(c.radii.back() > 0)) throw ValidationError("pcheck.radii", "must be positive");
    c.cells_per_radius = s.number("cells_per_radius", c.cells_per_radius);
    if (!(c.cells_per_radius >= 4)) throw ValidationError("pcheck.cells_per_radius", "must be at least 4");
    c.ratio = s.number("ratio", c.ratio);
    c.tail_ratio = s.number("tail_ratio", c.tail_ratio);
    check_thresholds(c.ratio, c.tail_ratio, "pcheck");
    out = c;
  } else {
    out = VerifyCommand{};
  }
  s.finish();
  return out;
}

OutputConfig parse_output(const json& j) {
  Section s(j, "output");
  OutputConfig o;
  o.csv = s.string("csv", "");
  o.json = s.string("json", "");
  o.svg = s.string("svg", "");
  o.matrix = s.string("matrix", "");
  s.finish();
  return o;
}

std::pair<int, int> line_column(const std::string& text, std::size_t byte) {
  int line = 1, column = 1;
  for (std::size_t k = 0; k < std::min(byte, text.size()); ++k) {
    if (text[k] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    // e.byte is one past the offending character.
    const auto [line, column] = line_column(text, e.byte > 0 ? e.byte - 1 : 0);
    std::string msg = e.what();
    if (const auto pos = msg.find("parse error"); pos != std::string::npos) msg = msg.substr(pos);
    throw ParseError(msg, line, column);
  }

  Section top(root, "");
  RunConfig c;
  static constexpr const char* kCommands[] = {"eig", "sweep", "kato", "flux", "pcheck", "verify"};
  std::vector<const char*> present;
  for (const char* name : kCommands)
    if (top.has(name)) present.push_back(name);
  if (present.size() != 1) {
    std::string names;
    for (const char* p : present) names += names.empty() ? p : std::string(", ") + p;
    throw ValidationError("<root>", present.empty() ? "exactly one of eig, sweep, kato, flux, pcheck, verify is required"
                                                    : "exactly one subcommand section allowed, found " + names);
  }
  c.command = parse_command(present[0], top.raw(present[0]));

  if (top.has("domain")) c.domain = parse_domain(top.raw("domain"));
  if (top.has("weight")) c.weight = parse_weight(top.raw("weight"));
  if (top.has("grid")) {
    Section g(top.raw("grid"), "grid");
    c.h = g.number("h");
    if (!(*c.h > 0)) throw ValidationError("grid.h", "must be positive");
    g.finish();
  }
  if (top.has("solver")) c.solver = parse_solver(top.raw("solver"));
  if (top.has("output")) c.output = parse_output(top.raw("output"));
  top.finish();

  const bool needs_domain = !std::holds_alternative<PcheckCommand>(c.command) &&
                            !std::holds_alternative<VerifyCommand>(c.command);
  if (needs_domain) {
    if (!c.domain) throw ValidationError("domain", "required for " + std::string(command_name(c.command)));
    if (!c.h) throw ValidationError("grid.h", "required for " + std::string(command_name(c.command)));
  }
  if (std::holds_alternative<FluxCommand>(c.command)) {
    if (c.domain->type != DomainConfig::Type::annulus) throw ValidationError("domain.type", "flux needs an annulus");
    if (c.weight && c.weight->tag != WeightTag::harmonic_log)
      throw ValidationError("weight.tag", "flux needs a harmonic_log weight");
    if (c.weight && c.weight->params.beta != std::get<FluxCommand>(c.command).beta)
      throw ValidationError("weight.beta", "must match flux.beta");
  }
  if (!c.output.matrix.empty()) {
    const auto* eig = std::get_if<EigCommand>(&c.command);
    if (!eig || eig->op == EigOperator::weighted)
      throw ValidationError("output.matrix", "only available for eig with a magnetic or nonmagnetic operator");
  }
  if (!c.output.svg.empty() && std::holds_alternative<EigCommand>(c.command))
    throw ValidationError("output.svg", "eig produces a single row; nothing to plot");
  if (!c.output.svg.empty() && std::holds_alternative<KatoCommand>(c.command))
    throw ValidationError("output.svg", "kato produces a single row; nothing to plot");
  if (!c.output.svg.empty() && std::holds_alternative<VerifyCommand>(c.command))
    throw ValidationError("output.svg", "verify results are not plotted");
  if (c.weight) {
    try {
      (void)c.weight->build();
    } catch (const Error& e) {
      throw ValidationError("weight", e.what());
    }
  }
  if (c.domain) {
    try {
      (void)c.domain->build();
    } catch (const Error& e) {
      throw ValidationError("domain", e.what());
    }
  }
  return c;
}

namespace {

json point_json(Point p) { return json::array({p.x, p.y}); }

json set_json(const SetConfig& s) {
  json j;
  switch (s.type) {
    case SetConfig::Type::point:
      j["type"] = "point";
      j["p"] = point_json(s.p);
      break;
    case SetConfig::Type::segment:
      j["type"] = "segment";
      j["p"] = point_json(s.p);
      j["q"] = point_json(s.q);
      break;
    case SetConfig::Type::closed_disc:
      j["type"] = "closed_disc";
      j["center"] = point_json(s.center);
      j["radius"] = s.radius;
      break;
    case SetConfig::Type::finite_union:
      j["type"] = "union";
      j["parts"] = json::array();
      for (const auto& part : s.parts) j["parts"].push_back(set_json(part));
      break;
  }
  return j;
}

}  // namespace

std::string serialize(const RunConfig& c) {
  json root = json::object();
  if (c.domain) {
    const auto& d = *c.domain;
    json j;
    switch (d.type) {
      case DomainConfig::Type::rectangle:
        j = {{"type", "rectangle"}, {"x0", d.x0}, {"x1", d.x1}, {"y0", d.y0}, {"y1", d.y1}};
        break;
      case DomainConfig::Type::disc:
        j = {{"type", "disc"}, {"center", point_json(d.center)}, {"radius", d.radius}};
        break;
      case DomainConfig::Type::annulus:
        j = {{"type", "annulus"}, {"center", point_json(d.center)}, {"r_inner", d.r_inner}, {"r_outer", d.r_outer}};
        break;
    }
    root["domain"] = j;
  }
  if (c.weight) {
    const auto& w = *c.weight;
    json j = {{"tag", std::string(to_string(w.tag))}, {"scale", w.params.scale}, {"center", point_json(w.params.center)}};
    if (w.tag == WeightTag::harmonic_log) j["beta"] = w.params.beta;
    if (w.tag == WeightTag::flat_disc) j["r0"] = w.params.r0;
    if (w.tag == WeightTag::hol_squares) {
      json polys = json::array();
      for (const auto& poly : w.params.polynomials) {
        json coefs = json::array();
        for (const auto& z : poly) coefs.push_back(json::array({z.real(), z.imag()}));
        polys.push_back(coefs);
      }
      j["polynomials"] = polys;
    }
    root["weight"] = j;
  }
  if (c.h) root["grid"] = {{"h", *c.h}};
  {
    static constexpr const char* kMethods[] = {"automatic", "lobpcg", "inverse_iteration"};
    root["solver"] = {{"tol", c.solver.tol},
                      {"max_iter", c.solver.max_iter},
                      {"block_size", c.solver.block_size},
                      {"seed", c.solver.seed},
                      {"method", kMethods[static_cast<int>(c.solver.method)]}};
  }
  std::visit(
      [&](const auto& cmd) {
        using T = std::decay_t<decltype(cmd)>;
        json j = json::object();
        if constexpr (std::is_same_v<T, EigCommand>) {
          static constexpr const char* kOps[] = {"magnetic", "nonmagnetic", "weighted"};
          j = {{"n", cmd.n}, {"operator", kOps[static_cast<int>(cmd.op)]}};
        } else if constexpr (std::is_same_v<T, SweepCommand>) {
          j = {{"n_list", cmd.n_list}, {"ratio", cmd.ratio}, {"tail_ratio", cmd.tail_ratio}};
        } else if constexpr (std::is_same_v<T, KatoCommand>) {
          j = {{"n", cmd.n}};
        } else if constexpr (std::is_same_v<T, FluxCommand>) {
          j = {{"beta", cmd.beta}, {"t_list", cmd.t_list}};
        } else if constexpr (std::is_same_v<T, PcheckCommand>) {
          j = {{"set", set_json(cmd.set)},
               {"radii", cmd.radii},
               {"cells_per_radius", cmd.cells_per_radius},
               {"ratio", cmd.ratio},
               {"tail_ratio", cmd.tail_ratio}};
        }
        root[std::string(command_name(c.command))] = j;
      },
      c.command);
  json out = json::object();
  if (!c.output.csv.empty()) out["csv"] = c.output.csv;
  if (!c.output.json.empty()) out["json"] = c.output.json;
  if (!c.output.svg.empty()) out["svg"] = c.output.svg;
  if (!c.output.matrix.empty()) out["matrix"] = c.output.matrix;
  if (!out.empty()) root["output"] = out;
  return root.dump(2) + "\n";
}

}  // namespace maglab::cli
