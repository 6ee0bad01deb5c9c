#include "cli/commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>

#include "germrec/norms.hpp"
#include "germrec/reconstruct.hpp"
#include "germrec/signals.hpp"
#include "germrec/testfn.hpp"
#include "germrec/young.hpp"

namespace germrec::cli {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.11e", v);
  return buf;
}

class Csv {
 public:
  Csv(const std::filesystem::path& path, const std::vector<std::string>& header) : out_(path) {
    if (!out_) throw std::runtime_error("cannot write " + path.string());
    row_strings(header);
  }

  template <typename... Ts>
  void row(const Ts&... cells) {
    std::vector<std::string> s{cell(cells)...};
    row_strings(s);
  }

 private:
  static std::string cell(double v) { return fmt(v); }
  static std::string cell(int v) { return std::to_string(v); }
  static std::string cell(Index v) { return std::to_string(v); }
  static std::string cell(const std::string& v) { return v; }
  static std::string cell(const char* v) { return v; }
  static std::string cell(bool v) { return v ? "true" : "false"; }

  void row_strings(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << '\n';
  }

  std::ofstream out_;
};

struct Checks {
  Json rows = Json::array();
  bool ok = true;

  void add(Csv* csv, const std::string& name, double value, double tol) {
    const bool pass = std::isfinite(value) && value <= tol;
    ok = ok && pass;
    rows.push_back({{"check", name}, {"value", value}, {"tolerance", tol}, {"pass", pass}});
    if (csv) csv->row(name, value, tol, pass);
  }
};

void write_summary(const std::filesystem::path& dir, const ExperimentConfig& cfg, Json results) {
  Json j;
  j["config"] = cfg.to_json();
  j["results"] = std::move(results);
  std::ofstream out(dir / "summary.json");
  out << j.dump(2) << '\n';
}

TestFunction base_mollifier(const ExperimentConfig& c, TweakResult* detail = nullptr) {
  const TestFunction bump = standard_bump();
  const auto scales = c.mollifier.scales.empty() ? default_tweak_scales(bump, c.mollifier.r) : c.mollifier.scales;
  TweakResult t = tweak_detailed(bump, c.mollifier.r, scales);
  if (detail) *detail = t;
  return t.phihat;
}

int ceil_order(double beta) { return static_cast<int>(std::ceil(beta)); }

struct BuiltGerm {
  Germ germ;
  Distribution oracle;           // expected reconstruction
  std::optional<SampledFunction> oracle_density;
};

BuiltGerm build_germ(const ExperimentConfig& c, const Grid& grid) {
  const GermSpec& g = c.germ;
  BuiltGerm out;
  switch (g.kind) {
    case GermKind::Constant: {
      const Realization r = realize(g.signal, grid);
      out.germ = constant_germ(r.distribution, grid).with_exponents(c.norm.exponents);
      out.oracle = r.distribution;
      if (!r.derivatives.empty() && !g.signal.derivative) out.oracle_density = r.derivatives[0];
      break;
    }
    case GermKind::Taylor: {
      SignalSpec s = g.signal;
      s.order = std::max(s.order, ceil_order(g.beta) - 1);
      const Realization r = realize(s, grid);
      if (r.derivatives.empty()) throw Error(ErrorCode::ParameterViolation, "Taylor germs need a function signal");
      const std::span<const SampledFunction> d(r.derivatives.data(), static_cast<std::size_t>(ceil_order(g.beta)));
      out.germ = taylor_germ(d, g.beta);
      out.oracle = Distribution::density(r.derivatives[0]);
      out.oracle_density = r.derivatives[0];
      break;
    }
    case GermKind::Monomial:
      out.germ = monomial_germ(grid);
      break;
    case GermKind::Zero:
      out.germ = zero_germ();
      break;
  }
  out.germ = out.germ * g.scale;
  out.oracle = out.oracle * g.scale;
  if (out.oracle_density) out.oracle_density = *out.oracle_density * g.scale;
  return out;
}

std::vector<TestFunction> panel_for(const ExperimentConfig& c) {
  const double mid = 0.5 * (c.norm.window.lo + c.norm.window.hi);
  std::vector<TestFunction> out;
  for (const auto& psi : test_panel(c.panel_size)) out.push_back(psi.recentered(mid, 1.0));
  return out;
}

// Relative error scale: max(|oracle|, int |xi psi|) when the oracle has a density, else ||psi||_{C^r}.
double error_scale(double oracle, const std::optional<SampledFunction>& density, const SampledFunction& psi, int r) {
  if (density) {
    const double mass = integrate(SampledFunction(psi.grid(), psi.support(), (*density * psi).values().cwiseAbs()));
    return std::max(std::abs(oracle), mass);
  }
  (void)r;
  return 0.0;
}

int cmd_tweak_check(const ExperimentConfig& c, const std::filesystem::path& dir) {
  const Grid grid = c.make_grid();
  TweakResult t;
  const TestFunction phihat = base_mollifier(c, &t);
  const TestFunction phicheck = make_phicheck(phihat);
  const int r = c.mollifier.r;

  Csv csv(dir / "checks.csv", {"check_name", "value", "tolerance", "pass"});
  Checks checks;
  checks.add(&csv, "moment_0", std::abs(phihat.moment(0) - 1.0), 1e-9);
  for (int k = 1; k < r; ++k) checks.add(&csv, "moment_" + std::to_string(k), std::abs(phihat.moment(k)), 1e-8);
  for (int k = 0; k < r; ++k) {
    checks.add(&csv, "phicheck_moment_" + std::to_string(k), std::abs(phicheck.moment(k)), 1e-8);
  }
  for (int n = 0; n <= 6; ++n) {
    const double lam = std::ldexp(1.0, -n);
    const SampledFunction lhs = mollifier_at_scale(phihat, 0.5 * lam, grid) - mollifier_at_scale(phihat, lam, grid);
    const SampledFunction rhs = convolution(phihat.scaled(lam), phicheck.scaled(lam)).sample(grid);
    const double res = (lhs - rhs).values().cwiseAbs().maxCoeff();
    checks.add(&csv, "telescoping_" + std::to_string(n), res, 1e-6 * std::ldexp(1.0, n));
  }
  const auto panel = test_panel(c.panel_size);
  for (std::size_t i = 0; i < panel.size(); ++i) {
    for (double lam : {0.25, 0.125}) {
      const AnnihilationCheck a = annihilation_bound_check(phicheck, panel[i], lam, r, grid);
      checks.add(&csv, "annihilation_" + std::to_string(i) + "_" + fmt(lam), a.lhs / a.rhs, 1.0);
    }
  }

  Json res;
  res["scales"] = t.scales;
  res["coefficients"] = std::vector<double>(t.coefficients.data(), t.coefficients.data() + t.coefficients.size());
  res["checks"] = checks.rows;
  res["pass"] = checks.ok;
  write_summary(dir, c, res);
  return checks.ok ? kExitOk : kExitCheckFailed;
}

int cmd_coherence(const ExperimentConfig& c, const std::filesystem::path& dir) {
  const Grid grid = c.make_grid();
  const TestFunction phihat = base_mollifier(c);
  const BuiltGerm bg = build_germ(c, grid);
  const CoherenceTable table = fg_tables(bg.germ, phihat, c.norm, grid);
  const int r = c.norm.dictionary.r;

  {
    Csv f(dir / "f_table.csv", {"n", "h", "f_value"});
    for (int n = 0; n <= table.n_max; ++n) {
      for (Index s = 0; s < table.scheme.size(); ++s) f.row(n, table.scheme.samples()[s].h, table.f(n, s));
    }
    Csv g(dir / "g_table.csv", {"n", "g_value"});
    for (int n = 0; n <= table.n_max; ++n) g.row(n, table.g[n]);
  }
  const GNormReport rep = g_norm_report(table, c.norm, r);
  {
    Csv m(dir / "m_sequences.csv", {"n", "m1", "m2", "m3", "m4", "tail2", "tail3"});
    const auto& s = rep.sequences;
    for (int n = 0; n <= table.n_max; ++n) m.row(n, s.m1[n], s.m2[n], s.m3[n], s.m4[n], s.tail2[n], s.tail3[n]);
  }
  Json res;
  res["coherence_norm"] = coherence_norm(bg.germ, phihat, c.norm, grid);
  res["homogeneity_norm"] = homogeneity_norm(bg.germ, phihat, c.norm, grid);
  res["g_norm"] = rep.value;
  res["g_norm_parts"] = {{"g", rep.g}, {"m1", rep.m1}, {"m2", rep.m2}, {"m3", rep.m3}, {"m4", rep.m4}};
  write_summary(dir, c, res);
  return kExitOk;
}

int cmd_reconstruct(const ExperimentConfig& c, const std::filesystem::path& dir) {
  const Grid grid = c.make_grid();
  const TestFunction phihat = base_mollifier(c);
  const BuiltGerm bg = build_germ(c, grid);
  ReconstructionResult R = reconstruct(bg.germ, phihat, c.reconstruction, grid);
  reconstruction_bound_report(R, R.distribution, bg.germ, c.reconstruction, grid);

  {
    Csv s(dir / "series.csv", {"k", "abs_u1", "abs_u2"});
    for (std::size_t i = 0; i < R.levels.size(); ++i) {
      s.row(R.levels[i], std::abs(R.u1[static_cast<Index>(i)]), std::abs(R.u2[static_cast<Index>(i)]));
    }
    Csv b(dir / "bound.csv", {"n", "value", "unnormalized"});
    for (Index n = 0; n < R.bound_table.size(); ++n) b.row(n, R.bound_table[n], R.bound_unnormalized[n]);
  }
  Checks checks;
  Csv p(dir / "pairings.csv", {"index", "value", "oracle", "abs_err", "rel_err"});
  const int r = c.norm.dictionary.r;
  const auto panel = panel_for(c);
  for (std::size_t i = 0; i < panel.size(); ++i) {
    const double v = R.distribution.pair(panel[i], grid);
    const double o = bg.oracle.pair(panel[i], grid);
    double scale = error_scale(o, bg.oracle_density, panel[i].sample(grid), r);
    if (scale == 0.0) scale = panel[i].cr_norm(r);
    const double err = std::abs(v - o);
    p.row(static_cast<int>(i), v, o, err, err / scale);
    checks.add(nullptr, "pairing_" + std::to_string(i), err / scale, c.tolerance);
  }
  Json res;
  res["base_term"] = R.base_term;
  res["bound_slope"] = R.bound_slope;
  res["bound_lq"] = R.bound_lq;
  res["checks"] = checks.rows;
  res["pass"] = checks.ok;
  write_summary(dir, c, res);
  return checks.ok ? kExitOk : kExitCheckFailed;
}

int cmd_young(const ExperimentConfig& c, const std::filesystem::path& dir) {
  const Grid grid = c.make_grid();
  const TestFunction phihat = base_mollifier(c);
  const Realization g = realize(c.young_g, grid);
  SignalSpec fs = c.young_f;
  fs.order = std::max({fs.order, ceil_order(c.young.beta) - 1, 1});
  const Realization f = realize(fs, grid);
  if (f.derivatives.empty()) throw Error(ErrorCode::ParameterViolation, "f must be a function signal");
  const std::span<const SampledFunction> fd(f.derivatives.data(), static_cast<std::size_t>(ceil_order(c.young.beta)));

  const VQuantities v = v_quantities(g.distribution, fd, phihat, c.young, grid);
  {
    Csv vc(dir / "v.csv", {"name", "value"});
    vc.row("v1", v.v1);
    vc.row("v2", v.v2);
    vc.row("v3", v.v3);
    vc.row("v4", v.v4);
  }
  const ReconstructionResult R = young_product(g.distribution, fd, phihat, c.young, grid);
  {
    Csv b(dir / "bound.csv", {"n", "value", "unnormalized"});
    for (Index n = 0; n < R.bound_table.size(); ++n) b.row(n, R.bound_table[n], R.bound_unnormalized[n]);
  }
  Checks checks;
  Csv p(dir / "pairings.csv", {"index", "product", "oracle", "rel_err"});
  const auto panel = panel_for(c);
  for (std::size_t i = 0; i < panel.size(); ++i) {
    const SampledFunction psi = panel[i].sample(grid);
    const double v0 = R.distribution.pair(panel[i], grid);
    double o = 0.0;
    double scale = 0.0;
    if (c.young_g.kind == SignalKind::Dirac) {
      o = f.derivatives[0](c.young_g.location) * panel[i](c.young_g.location);
      scale = std::abs(o);
    } else if (c.young_g.derivative) {
      o = ibp_oracle(g.derivatives[0], f.derivatives[0], f.derivatives[1], psi);
      scale = std::abs(o);
    } else {
      const SampledFunction prod = g.derivatives[0] * f.derivatives[0];
      o = Distribution::density(prod).pair(panel[i], grid);
      scale = error_scale(o, prod, psi, c.young.r);
    }
    const double rel = std::abs(v0 - o) / std::max(scale, 1e-300);
    p.row(static_cast<int>(i), v0, o, rel);
    checks.add(nullptr, "pairing_" + std::to_string(i), rel, c.tolerance);
  }
  Json res;
  res["v"] = {{"v1", v.v1}, {"v2", v.v2}, {"v3", v.v3}, {"v4", v.v4}, {"tail3", v.tail3}, {"tail4", v.tail4}};
  res["p"] = param_to_json(c.young.p());
  res["q"] = param_to_json(c.young.q());
  res["bound_slope"] = R.bound_slope;
  res["checks"] = checks.rows;
  res["pass"] = checks.ok;
  write_summary(dir, c, res);
  return checks.ok ? kExitOk : kExitCheckFailed;
}

int cmd_besov(const ExperimentConfig& c, const std::filesystem::path& dir) {
  const Grid grid = c.make_grid();
  SignalSpec s = c.besov_signal;
  if (c.taylor_alpha && s.kind != SignalKind::Dirac) s.order = std::max(s.order, ceil_order(*c.taylor_alpha) - 1);
  const Realization real = realize(s, grid);
  const LocalMeansReport lm = besov_localmeans(real.distribution, c.besov_alpha, c.norm, grid, c.besov_n0);
  {
    Csv csv(dir / "localmeans.csv", {"n", "value", "unnormalized"});
    for (Index i = 0; i < lm.per_n.size(); ++i) csv.row(lm.n0 + static_cast<int>(i), lm.per_n[i], lm.unnormalized[i]);
  }
  Json res;
  res["localmeans_norm"] = lm.value;
  res["unit_term"] = lm.unit_term;
  double spread = 0.0;
  if (lm.per_n.size() > 0 && lm.per_n[0] != 0.0) {
    spread = ((lm.per_n.array() / lm.per_n[0]) - 1.0).abs().maxCoeff();
  }
  res["ratio_spread"] = spread;
  Checks checks;
  if (s.kind == SignalKind::Dirac) checks.add(nullptr, "dirac_ratio_constant", spread, 1e-6);
  if (c.taylor_alpha && !real.derivatives.empty()) {
    res["taylor_norm"] = besov_taylor_norm(real.derivatives, *c.taylor_alpha, c.norm.p, c.norm.q, c.taylor_h0,
                                           c.norm.window, c.norm.annulus_points);
  }
  res["checks"] = checks.rows;
  res["pass"] = checks.ok;
  write_summary(dir, c, res);
  return checks.ok ? kExitOk : kExitCheckFailed;
}

}  // namespace

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::SupportOverflow: return kExitSupport;
    case ErrorCode::NotConvergent: return kExitConvergence;
    default: return kExitPrecondition;
  }
}

int run_command(const ExperimentConfig& cfg, const std::string& out_dir) {
  const std::filesystem::path dir(out_dir);
  std::filesystem::create_directories(dir);
  if (cfg.command == "tweak-check") return cmd_tweak_check(cfg, dir);
  if (cfg.command == "coherence") return cmd_coherence(cfg, dir);
  if (cfg.command == "reconstruct") return cmd_reconstruct(cfg, dir);
  if (cfg.command == "young") return cmd_young(cfg, dir);
  if (cfg.command == "besov") return cmd_besov(cfg, dir);
  throw Error(ErrorCode::ParameterViolation, "unknown command " + cfg.command);
}

}  // namespace germrec::cli
