#include "germrec/norms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "germrec/parallel.hpp"

namespace germrec {

namespace {

// Tail after the last retained term with ratio max(2^-c, observed), where observed is the ratio of
// the k = N and k = N - 1 terms; ball integrals that still grow with k are then not underestimated.
double geometric_tail(double last, double observed, double c) {
  if (last == 0.0) return 0.0;
  if (!(c > 0.0)) return std::numeric_limits<double>::infinity();
  const double r = std::max(std::exp2(-c), observed);
  if (r >= 1.0) return std::numeric_limits<double>::infinity();
  return last * r / (1.0 - r);
}

// (n, sample) -> || (F_{x+h} - F_x)(phi^{2^-n}_x) / (2^{-n alpha} (2^{-n} + |h|)^{gamma - alpha}) ||_{L^p(x)}
// and g(n) = || F_x(phi^{2^-n}_x) / 2^{-n beta} ||_{L^p(x)} over the grid points of the window.
void coherence_lattice(const Germ& F, const TestFunction& phi, const NormConfig& cfg,
                       const Grid& grid, Interval window, const DyadicAnnulusScheme& scheme,
                       Eigen::MatrixXd* f, Eigen::VectorXd* g) {
  const auto [i0, i1] = index_range(grid, window);
  const auto& e = cfg.exponents;
  const Index rows = cfg.n_max + 1;
  if (f) *f = Eigen::MatrixXd::Zero(rows, scheme.size());
  if (g) *g = Eigen::VectorXd::Zero(rows);
  parallel_for(0, rows, cfg.jobs, [&](Index n) {
    const double lambda = std::ldexp(1.0, -static_cast<int>(n));
    const ScaleKernel kernel(F, phi, lambda, grid, i0, i1);
    const Eigen::VectorXd diag = kernel.diagonal();
    if (g) (*g)[n] = lp_norm_uniform(diag, grid.spacing(), cfg.p) / std::pow(lambda, e.beta);
    if (!f) return;
    for (Index s = 0; s < scheme.size(); ++s) {
      const double h = scheme.samples()[s].h;
      if (h == 0.0) continue;
      const Eigen::VectorXd diff = kernel.offset(h) - diag;
      const double norm = std::pow(lambda, e.alpha) * std::pow(lambda + std::abs(h), e.gamma - e.alpha);
      (*f)(n, s) = lp_norm_uniform(diff, grid.spacing(), cfg.p) / norm;
    }
  });
}

Dictionary localmeans_dictionary(const NormConfig& cfg, int s) {
  DictionarySpec d = cfg.dictionary;
  d.s = s;
  return d.build();
}

// max over the dictionary of |xi(psi^lambda_x)| on the lattice x = K.lo + k * step.
Eigen::VectorXd dictionary_max(const Distribution& xi, const Dictionary& dict, double lambda,
                               double step, Interval window, const Grid& grid) {
  const auto count = static_cast<Index>(std::floor(window.length() / step + 1e-9)) + 1;
  std::vector<double> xs(static_cast<std::size_t>(count));
  for (Index k = 0; k < count; ++k) xs[static_cast<std::size_t>(k)] = window.lo + static_cast<double>(k) * step;
  Eigen::VectorXd best = Eigen::VectorXd::Zero(count);
  for (const auto& psi : dict.members) {
    best = best.cwiseMax(xi.local_moments(psi, lambda, 0, grid, xs).cwiseAbs());
  }
  return best;
}

}  // namespace

DyadicAnnulusScheme NormConfig::scheme(const Grid& grid) const {
  const double cutoff = annulus_cutoff > 0.0 ? annulus_cutoff : 2.0 * grid.spacing();
  return DyadicAnnulusScheme::with_cutoff(h_radius, cutoff, annulus_points);
}

void NormConfig::validate(const Grid& grid) const {
  exponents.validate();
  if (n_max < 0) throw Error(ErrorCode::ParameterViolation, "N_max must be >= 0");
  if (std::ldexp(1.0, -n_max) < 8.0 * grid.spacing() * (1.0 - 1e-12)) {
    throw Error(ErrorCode::ParameterViolation, "2^-N_max must be >= 8 Delta");
  }
  if (!(epsilon > 0.0)) throw Error(ErrorCode::ParameterViolation, "epsilon must be positive");
  if (!(window.hi > window.lo)) throw Error(ErrorCode::ParameterViolation, "empty window");
  if (!grid.domain().contains(window.enlarged(4.0), 1e-9)) {
    throw Error(ErrorCode::SupportOverflow, "enlarged window K+4 leaves the grid domain");
  }
}

double scaling_function(double gamma, IntegrabilityParam q, double eps, double lambda) {
  if (!(lambda > 0.0) || lambda > 1.0) throw Error(ErrorCode::ParameterViolation, "lambda must lie in (0, 1]");
  if (!(eps > 0.0)) throw Error(ErrorCode::ParameterViolation, "epsilon must be positive");
  if (gamma != 0.0) return std::pow(lambda, gamma);
  const double l = std::abs(std::log(lambda));
  return q.is_inf() ? 1.0 + l : 1.0 + std::pow(l, 1.0 + eps);
}

CoherenceTable fg_tables(const Germ& F, const TestFunction& phihat, const NormConfig& cfg,
                         const Grid& grid) {
  cfg.validate(grid);
  CoherenceTable t;
  t.n_max = cfg.n_max;
  t.scheme = cfg.scheme(grid);
  coherence_lattice(F, phihat, cfg, grid, cfg.enlarged(2.0), t.scheme, &t.f, &t.g);
  return t;
}

MSequences m_sequences(const CoherenceTable& table, double c2, double c3, double c4) {
  const int N = table.n_max;
  const auto& sch = table.scheme;
  MSequences m;
  m.m1 = m.m2 = m.m3 = m.m4 = m.tail2 = m.tail3 = Eigen::VectorXd::Zero(N + 1);
  // ball(k, rho): integral of f(k, .) over B(0, rho)
  auto ball = [&](int k, double rho) { return sch.ball_integral(table.f.row(k).transpose(), rho); };
  for (int n = 0; n <= N; ++n) {
    m.m1[n] = std::ldexp(1.0, n) * ball(n, std::ldexp(1.0, 1 - n));
    double last2 = 0.0;
    double last3 = 0.0;
    for (int k = n; k <= N; ++k) {
      last2 = std::exp2(-(k - n) * c2 + k) * ball(k, std::ldexp(1.0, -k));
      last3 = std::exp2(-(k - n) * c3 + n) * ball(k, std::ldexp(1.0, 1 - n));
      m.m2[n] += last2;
      m.m3[n] += last3;
    }
    double obs2 = 0.0;
    double obs3 = 0.0;
    if (N >= 1) {
      const double b2 = ball(N - 1, std::ldexp(1.0, 1 - N));
      const double b3 = ball(N - 1, std::ldexp(1.0, 1 - n));
      if (b2 > 0.0) obs2 = std::exp2(1.0 - c2) * ball(N, std::ldexp(1.0, -N)) / b2;
      if (b3 > 0.0) obs3 = std::exp2(-c3) * ball(N, std::ldexp(1.0, 1 - n)) / b3;
    }
    m.tail2[n] = geometric_tail(last2, obs2, c2);
    m.tail3[n] = geometric_tail(last3, obs3, c3);
    for (int k = 0; k < n; ++k) {
      m.m4[n] += std::exp2(-(k - n) * c4 + k) * ball(k, std::ldexp(1.0, 1 - k));
    }
  }
  return m;
}

MSequences m_sequences(const CoherenceTable& table, const NormConfig& cfg, int r) {
  const auto& e = cfg.exponents;
  return m_sequences(table, e.gamma, e.alpha + r, e.gamma);
}

double coherence_norm(const Germ& F, const TestFunction& phi, const NormConfig& cfg,
                      const Grid& grid) {
  cfg.validate(grid);
  const DyadicAnnulusScheme scheme = cfg.scheme(grid);
  Eigen::MatrixXd f;
  coherence_lattice(F, phi, cfg, grid, cfg.window, scheme, &f, nullptr);
  return lqh_norm(f.colwise().maxCoeff().transpose(), cfg.q, scheme);
}

double homogeneity_norm(const Germ& F, const TestFunction& phi, const NormConfig& cfg,
                        const Grid& grid) {
  cfg.validate(grid);
  Eigen::VectorXd g;
  coherence_lattice(F, phi, cfg, grid, cfg.window, cfg.scheme(grid), nullptr, &g);
  return g.maxCoeff();
}

GNormReport g_norm_report(const CoherenceTable& table, const NormConfig& cfg, int r) {
  const auto& e = cfg.exponents;
  GNormReport rep;
  rep.sequences = m_sequences(table, cfg, r);
  const auto& s = rep.sequences;
  const Eigen::VectorXd m2 = s.m2 + s.tail2;
  const Eigen::VectorXd m3 = s.m3 + s.tail3;
  rep.g = lq_seq_norm(table.g, cfg.q1);
  if (e.gamma > 0.0) {
    rep.m1 = lq_seq_norm(s.m1, cfg.q);
    rep.m2 = lq_seq_norm(m2, cfg.q);
    rep.m3 = lq_seq_norm(m3, cfg.q);
    rep.value = rep.g + rep.m1 + rep.m2 + rep.m3;
  } else if (e.gamma < 0.0) {
    rep.m3 = lq_seq_norm(m3, cfg.q);
    rep.m4 = lq_seq_norm(s.m4, cfg.q);
    rep.value = rep.g + rep.m3 + rep.m4;
  } else {
    Eigen::VectorXd k(table.n_max + 1);
    for (int n = 0; n <= table.n_max; ++n) k[n] = scaling_function(0.0, cfg.q, cfg.epsilon, std::ldexp(1.0, -n));
    rep.m3 = lq_seq_norm(m3.cwiseQuotient(k), cfg.q);
    rep.m4 = lq_seq_norm(s.m4.cwiseQuotient(k), cfg.q);
    rep.value = rep.g + rep.m3 + rep.m4;
  }
  return rep;
}

double g_norm(const Germ& F, const TestFunction& phihat, const NormConfig& cfg, const Grid& grid,
              int r) {
  if (!(r > -cfg.exponents.beta)) throw Error(ErrorCode::ParameterViolation, "need r > -beta");
  return g_norm_report(fg_tables(F, phihat, cfg, grid), cfg, r).value;
}

LocalMeansReport besov_localmeans(const Distribution& xi, double alpha, const NormConfig& cfg,
                                  const Grid& grid, int n0) {
  cfg.validate(grid);
  if (!(cfg.dictionary.r > -alpha)) throw Error(ErrorCode::ParameterViolation, "need r > -alpha");
  if (n0 < 0 || n0 > cfg.n_max) throw Error(ErrorCode::ParameterViolation, "n0 out of range");
  LocalMeansReport rep;
  rep.n0 = n0;
  const int s = alpha < 0.0 ? cfg.dictionary.s : static_cast<int>(std::floor(alpha));
  const Dictionary dict = localmeans_dictionary(cfg, s);
  const Index levels = cfg.n_max - n0 + 1;
  rep.per_n = rep.unnormalized = Eigen::VectorXd::Zero(levels);
  parallel_for(0, levels, cfg.jobs, [&](Index i) {
    const int n = n0 + static_cast<int>(i);
    const double lambda = std::ldexp(1.0, -n);
    const double step = lambda * cfg.localmeans_step;
    const Eigen::VectorXd best = dictionary_max(xi, dict, lambda, step, cfg.window, grid);
    rep.unnormalized[i] = lp_norm_uniform(best, step, cfg.p);
    rep.per_n[i] = rep.unnormalized[i] / std::pow(lambda, alpha);
  });
  rep.value = lq_seq_norm(rep.per_n, cfg.q);
  if (alpha >= 0.0) {
    const Dictionary plain = localmeans_dictionary(cfg, -1);
    const Eigen::VectorXd best = dictionary_max(xi, plain, 1.0, cfg.localmeans_step, cfg.window, grid);
    rep.unit_term = lp_norm_uniform(best, cfg.localmeans_step, cfg.p);
    rep.value += rep.unit_term;
  }
  return rep;
}

double besov_localmeans_norm(const Distribution& xi, double alpha, const NormConfig& cfg,
                             const Grid& grid, int n0) {
  return besov_localmeans(xi, alpha, cfg, grid, n0).value;
}

double besov_taylor_norm(std::span<const SampledFunction> derivatives, double alpha,
                         IntegrabilityParam p, IntegrabilityParam q, double h0, Interval window,
                         int annulus_points) {
  if (!(alpha > 0.0) || alpha == std::floor(alpha)) {
    throw Error(ErrorCode::ParameterViolation, "alpha must be positive and not an integer");
  }
  const int order = static_cast<int>(std::ceil(alpha));
  if (static_cast<int>(derivatives.size()) < order) {
    throw Error(ErrorCode::ArityMismatch, "need derivatives through order ceil(alpha)-1");
  }
  const Grid& grid = derivatives[0].grid();
  for (const auto& d : derivatives) require_same_grid(d.grid(), grid);
  const auto [i0, i1] = index_range(grid, window);
  const Index count = i1 - i0 + 1;
  const DyadicAnnulusScheme scheme = DyadicAnnulusScheme::with_cutoff(h0, 2.0 * grid.spacing(), annulus_points);

  double total = 0.0;
  for (int k = 0; k < order; ++k) {
    Eigen::VectorXd vals = Eigen::VectorXd::Zero(scheme.size());
    for (Index s = 0; s < scheme.size(); ++s) {
      const auto& smp = scheme.samples()[s];
      if (smp.annulus < 0) continue;
      const double h = smp.h;
      Eigen::VectorXd rem = shifted_samples(derivatives[k], i0, count, h);
      double coef = 1.0;
      for (int l = 0; k + l < order; ++l) {
        if (l > 0) coef *= h / l;
        rem -= coef * derivatives[k + l].values().segment(i0, count);
      }
      vals[s] = lp_norm_uniform(rem, grid.spacing(), p) / std::pow(std::abs(h), alpha - k);
    }
    total += lqh_norm(vals, q, scheme);
  }
  for (int k = 0; k < order; ++k) total += lp_norm(derivatives[k], p, window);
  return total;
}

SeriesLemmaResult series_lemma_verify(const Eigen::MatrixXd& a, const Eigen::MatrixXd& f_table,
                                      const DyadicAnnulusScheme& scheme, IntegrabilityParam q,
                                      double bound_a) {
  if (a.rows() != f_table.rows() || f_table.cols() != scheme.size()) {
    throw Error(ErrorCode::ArityMismatch, "series lemma table shapes disagree");
  }
  if (std::abs(scheme.outer_radius() - 2.0) > 1e-12) {
    throw Error(ErrorCode::ParameterViolation, "series lemma needs the annulus scheme on B(0, 2)");
  }
  const double tol = bound_a * (1.0 + 1e-12);
  if (a.cwiseAbs().rowwise().sum().maxCoeff() > tol || a.cwiseAbs().colwise().sum().maxCoeff() > tol) {
    throw Error(ErrorCode::HypothesisViolated, "row or column sums of a exceed A");
  }
  if ((f_table.array() < 0.0).any()) throw Error(ErrorCode::HypothesisViolated, "f must be nonnegative");

  SeriesLemmaResult res;
  Eigen::VectorXd v(a.rows());
  for (Index k = 0; k < a.rows(); ++k) {
    const auto kk = static_cast<int>(k);
    v[k] = std::ldexp(1.0, kk) * scheme.ball_integral(f_table.row(k).transpose(), std::ldexp(1.0, 1 - kk));
  }
  res.u = a.transpose() * v;
  res.lhs = lq_seq_norm(res.u, q);

  const Eigen::VectorXd sup = f_table.colwise().maxCoeff().transpose();
  if (q.is_inf()) {
    res.witness = sup.maxCoeff();
  } else {
    double acc = 0.0;
    for (Index s = 0; s < scheme.size(); ++s) {
      const auto& smp = scheme.samples()[s];
      const double piece = smp.annulus < 0 ? 2.0 * scheme.inner_radius()
                                           : std::ldexp(scheme.outer_radius(), -smp.annulus);
      acc += smp.weight / piece * std::pow(sup[s], q.value());
    }
    res.witness = std::pow(acc, 1.0 / q.value());
  }
  res.constant = 8.0 * bound_a;
  res.bound_holds = res.lhs <= res.constant * res.witness * (1.0 + 1e-12);
  return res;
}

double fitted_slope(const Eigen::Ref<const Eigen::VectorXd>& values) {
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int n = 0;
  for (Index i = 0; i < values.size(); ++i) {
    if (!(values[i] > 0.0) || !std::isfinite(values[i])) continue;
    const double x = static_cast<double>(i);
    const double y = std::log2(values[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace germrec
