#include "cli/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

namespace germrec::cli {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw Error(ErrorCode::ParameterViolation, "config: " + msg); }

void check_keys(const Json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) fail(where + " must be an object");
  for (const auto& [k, v] : j.items()) {
    if (!allowed.count(k)) fail("unknown key '" + k + "' in " + where);
  }
}

double num(const Json& j, const std::string& key, double def) {
  if (!j.contains(key)) return def;
  if (!j[key].is_number()) fail("'" + key + "' must be a number");
  return j[key].get<double>();
}

int integer(const Json& j, const std::string& key, int def) {
  if (!j.contains(key)) return def;
  if (!j[key].is_number_integer()) fail("'" + key + "' must be an integer");
  return j[key].get<int>();
}

bool boolean(const Json& j, const std::string& key, bool def) {
  if (!j.contains(key)) return def;
  if (!j[key].is_boolean()) fail("'" + key + "' must be a boolean");
  return j[key].get<bool>();
}

std::string str(const Json& j, const std::string& key, const std::string& def) {
  if (!j.contains(key)) return def;
  if (!j[key].is_string()) fail("'" + key + "' must be a string");
  return j[key].get<std::string>();
}

IntegrabilityParam param(const Json& j, const std::string& key, IntegrabilityParam def) {
  if (!j.contains(key)) return def;
  const Json& v = j[key];
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "inf" || s == "INF") return IntegrabilityParam::inf();
    fail("'" + key + "' must be a number >= 1 or \"INF\"");
  }
  if (!v.is_number()) fail("'" + key + "' must be a number >= 1 or \"INF\"");
  const double p = v.get<double>();
  if (!(p >= 1.0)) fail("'" + key + "' must be >= 1");
  return IntegrabilityParam(p);
}

std::vector<double> numbers(const Json& j, const std::string& key) {
  std::vector<double> out;
  if (!j.contains(key)) return out;
  if (!j[key].is_array()) fail("'" + key + "' must be an array");
  for (const auto& v : j[key]) {
    if (!v.is_number()) fail("'" + key + "' entries must be numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

GermKind germ_kind(const std::string& s) {
  if (s == "CONSTANT") return GermKind::Constant;
  if (s == "TAYLOR") return GermKind::Taylor;
  if (s == "MONOMIAL") return GermKind::Monomial;
  if (s == "ZERO") return GermKind::Zero;
  fail("unknown germ kind " + s);
}

std::string germ_kind_name(GermKind k) {
  switch (k) {
    case GermKind::Constant: return "CONSTANT";
    case GermKind::Taylor: return "TAYLOR";
    case GermKind::Monomial: return "MONOMIAL";
    case GermKind::Zero: return "ZERO";
  }
  return "?";
}

const std::set<std::string> kCommands{"tweak-check", "coherence", "reconstruct", "young", "besov"};

}  // namespace

Json param_to_json(IntegrabilityParam p) {
  if (p.is_inf()) return "INF";
  return p.value();
}

SignalSpec signal_from_json(const Json& j) {
  check_keys(j, {"kind", "coefficients", "amplitude", "location", "scale", "frequency", "phase", "a", "b",
                 "terms", "order", "derivative"},
             "signal");
  SignalSpec s;
  try {
    s.kind = signal_kind_from_string(str(j, "kind", "BUMP"));
  } catch (const Error& e) {
    fail(e.what());
  }
  s.coefficients = numbers(j, "coefficients");
  s.amplitude = num(j, "amplitude", s.amplitude);
  s.location = num(j, "location", s.location);
  s.scale = num(j, "scale", s.scale);
  s.frequency = num(j, "frequency", s.frequency);
  s.phase = num(j, "phase", s.phase);
  s.a = num(j, "a", s.a);
  s.b = num(j, "b", s.b);
  s.terms = integer(j, "terms", s.terms);
  s.order = integer(j, "order", s.order);
  s.derivative = boolean(j, "derivative", s.derivative);
  s.validate();
  return s;
}

Json signal_to_json(const SignalSpec& s) {
  Json j;
  j["kind"] = to_string(s.kind);
  j["coefficients"] = s.coefficients;
  j["amplitude"] = s.amplitude;
  j["location"] = s.location;
  j["scale"] = s.scale;
  j["frequency"] = s.frequency;
  j["phase"] = s.phase;
  j["a"] = s.a;
  j["b"] = s.b;
  j["terms"] = s.terms;
  j["order"] = s.order;
  j["derivative"] = s.derivative;
  return j;
}

ExperimentConfig parse_config(const Json& j, const std::string& command) {
  check_keys(j, {"command", "grid", "norm", "reconstruction", "mollifier", "germ", "young", "besov",
                 "panel_size", "tolerance"},
             "config");
  ExperimentConfig c;
  c.command = str(j, "command", command);
  if (!command.empty() && c.command != command) fail("config command '" + c.command + "' differs from '" + command + "'");
  if (!kCommands.count(c.command)) fail("unknown command '" + c.command + "'");

  if (j.contains("grid")) {
    const Json& g = j["grid"];
    check_keys(g, {"L", "J"}, "grid");
    c.grid.L = num(g, "L", c.grid.L);
    c.grid.J = integer(g, "J", c.grid.J);
  }
  if (!(c.grid.L > 0.0) || c.grid.J < 1 || c.grid.J > 20) fail("grid needs L > 0 and 1 <= J <= 20");

  if (j.contains("norm")) {
    const Json& n = j["norm"];
    check_keys(n, {"alpha", "beta", "gamma", "p", "q", "q1", "epsilon", "r", "window", "n_max", "h_radius",
                   "annulus_points", "dictionary_size", "dictionary_seed"},
               "norm");
    c.norm.exponents.alpha = num(n, "alpha", c.norm.exponents.alpha);
    c.norm.exponents.beta = num(n, "beta", c.norm.exponents.beta);
    c.norm.exponents.gamma = num(n, "gamma", c.norm.exponents.gamma);
    c.norm.p = param(n, "p", c.norm.p);
    c.norm.q = param(n, "q", c.norm.q);
    c.norm.q1 = param(n, "q1", c.norm.q1);
    c.norm.epsilon = num(n, "epsilon", c.norm.epsilon);
    c.norm.dictionary.r = integer(n, "r", c.norm.dictionary.r);
    if (n.contains("window")) {
      const auto w = numbers(n, "window");
      if (w.size() != 2 || !(w[1] > w[0])) fail("'window' must be [lo, hi] with lo < hi");
      c.norm.window = {w[0], w[1]};
    }
    c.norm.n_max = integer(n, "n_max", c.norm.n_max);
    c.norm.h_radius = num(n, "h_radius", c.norm.h_radius);
    c.norm.annulus_points = integer(n, "annulus_points", c.norm.annulus_points);
    c.norm.dictionary.size = integer(n, "dictionary_size", c.norm.dictionary.size);
    const int seed = integer(n, "dictionary_seed", static_cast<int>(c.norm.dictionary.seed));
    if (seed < 0) fail("'dictionary_seed' must be >= 0");
    c.norm.dictionary.seed = static_cast<std::uint64_t>(seed);
  }
  if (c.norm.dictionary.size < 1) fail("dictionary_size must be >= 1");
  if (c.norm.annulus_points < 1) fail("annulus_points must be >= 1");

  if (j.contains("mollifier")) {
    const Json& m = j["mollifier"];
    check_keys(m, {"r", "scales"}, "mollifier");
    c.mollifier.r = integer(m, "r", c.mollifier.r);
    c.mollifier.scales = numbers(m, "scales");
  }
  if (c.mollifier.r < 1) fail("mollifier r must be >= 1");

  c.reconstruction.norm = c.norm;
  c.reconstruction.n_max = c.norm.n_max;
  if (j.contains("reconstruction")) {
    const Json& r = j["reconstruction"];
    check_keys(r, {"n0", "n_max", "path"}, "reconstruction");
    c.reconstruction.n0 = integer(r, "n0", c.reconstruction.n0);
    c.reconstruction.n_max = integer(r, "n_max", c.reconstruction.n_max);
    const auto path = str(r, "path", "POSITIVE");
    if (path == "POSITIVE") {
      c.reconstruction.path = ReconstructionPath::Positive;
    } else if (path == "NONPOSITIVE") {
      c.reconstruction.path = ReconstructionPath::NonPositive;
    } else {
      fail("path must be POSITIVE or NONPOSITIVE");
    }
  }

  if (j.contains("germ")) {
    const Json& g = j["germ"];
    check_keys(g, {"kind", "signal", "beta", "scale"}, "germ");
    c.germ.kind = germ_kind(str(g, "kind", "CONSTANT"));
    if (g.contains("signal")) c.germ.signal = signal_from_json(g["signal"]);
    c.germ.beta = num(g, "beta", c.germ.beta);
    c.germ.scale = num(g, "scale", c.germ.scale);
  }

  if (j.contains("young")) {
    const Json& y = j["young"];
    check_keys(y, {"alpha", "beta", "p1", "p2", "q1", "q2", "r", "g", "f"}, "young");
    c.young.alpha = num(y, "alpha", c.young.alpha);
    c.young.beta = num(y, "beta", c.young.beta);
    c.young.p1 = param(y, "p1", c.young.p1);
    c.young.p2 = param(y, "p2", c.young.p2);
    c.young.q1 = param(y, "q1", c.young.q1);
    c.young.q2 = param(y, "q2", c.young.q2);
    c.young.r = integer(y, "r", c.young.r);
    if (y.contains("g")) c.young_g = signal_from_json(y["g"]);
    if (y.contains("f")) c.young_f = signal_from_json(y["f"]);
  }
  c.young.reconstruction = c.reconstruction;

  if (j.contains("besov")) {
    const Json& b = j["besov"];
    check_keys(b, {"signal", "alpha", "n0", "taylor_alpha", "h0"}, "besov");
    if (b.contains("signal")) c.besov_signal = signal_from_json(b["signal"]);
    c.besov_alpha = num(b, "alpha", c.besov_alpha);
    c.besov_n0 = integer(b, "n0", c.besov_n0);
    if (b.contains("taylor_alpha")) c.taylor_alpha = num(b, "taylor_alpha", 0.0);
    c.taylor_h0 = num(b, "h0", c.taylor_h0);
  }

  c.panel_size = integer(j, "panel_size", c.panel_size);
  if (c.panel_size < 1) fail("panel_size must be >= 1");
  c.tolerance = num(j, "tolerance", c.tolerance);

  // Module-level constraints.
  const Grid grid = c.make_grid();
  c.norm.validate(grid);
  if (c.command == "reconstruct") c.reconstruction.validate(grid);
  if (c.command == "young") c.young.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path, const std::string& command) {
  std::ifstream in(path);
  if (!in) fail("cannot open " + path);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    fail(std::string("malformed JSON: ") + e.what());
  }
  return parse_config(j, command);
}

void apply_overrides(ExperimentConfig& c, std::optional<std::uint64_t> seed, int jobs) {
  if (jobs < 1) fail("--jobs must be >= 1");
  for (NormConfig* n : {&c.norm, &c.reconstruction.norm, &c.young.reconstruction.norm}) {
    if (seed) n->dictionary.seed = *seed;
    n->jobs = jobs;
  }
  c.reconstruction.jobs = jobs;
  c.young.reconstruction.jobs = jobs;
}

Json ExperimentConfig::to_json() const {
  Json j;
  j["command"] = command;
  j["grid"] = {{"L", grid.L}, {"J", grid.J}};
  const auto& e = norm.exponents;
  j["norm"] = {{"alpha", e.alpha},
               {"beta", e.beta},
               {"gamma", e.gamma},
               {"p", param_to_json(norm.p)},
               {"q", param_to_json(norm.q)},
               {"q1", param_to_json(norm.q1)},
               {"epsilon", norm.epsilon},
               {"r", norm.dictionary.r},
               {"window", {norm.window.lo, norm.window.hi}},
               {"n_max", norm.n_max},
               {"h_radius", norm.h_radius},
               {"annulus_points", norm.annulus_points},
               {"dictionary_size", norm.dictionary.size},
               {"dictionary_seed", norm.dictionary.seed}};
  j["reconstruction"] = {
      {"n0", reconstruction.n0},
      {"n_max", reconstruction.n_max},
      {"path", reconstruction.path == ReconstructionPath::Positive ? "POSITIVE" : "NONPOSITIVE"}};
  j["mollifier"] = {{"r", mollifier.r}, {"scales", mollifier.scales}};
  j["germ"] = {{"kind", germ_kind_name(germ.kind)},
               {"signal", signal_to_json(germ.signal)},
               {"beta", germ.beta},
               {"scale", germ.scale}};
  j["young"] = {{"alpha", young.alpha},
                {"beta", young.beta},
                {"p1", param_to_json(young.p1)},
                {"p2", param_to_json(young.p2)},
                {"q1", param_to_json(young.q1)},
                {"q2", param_to_json(young.q2)},
                {"r", young.r},
                {"g", signal_to_json(young_g)},
                {"f", signal_to_json(young_f)}};
  Json b = {{"signal", signal_to_json(besov_signal)}, {"alpha", besov_alpha}, {"n0", besov_n0}, {"h0", taylor_h0}};
  if (taylor_alpha) b["taylor_alpha"] = *taylor_alpha;
  j["besov"] = b;
  j["panel_size"] = panel_size;
  j["tolerance"] = tolerance;
  return j;
}

}  // namespace germrec::cli
