#include "germrec/reconstruct.hpp"

#include <algorithm>
#include <cmath>

#include "germrec/parallel.hpp"

namespace germrec {

namespace {

double level_scale(int k) { return std::ldexp(1.0, -k); }

// out[q] = sum_m w_m v[q0 + q + m - vlo]
Eigen::VectorXd apply_weights(const KernelWeights& kw, const Eigen::VectorXd& v, Index vlo, Index q0,
                              Index n) {
  const Index start = q0 + kw.m_min - vlo;
  if (start < 0 || start + kw.w.size() - 1 + n > v.size()) {
    throw Error(ErrorCode::SupportOverflow, "weights reach outside the sampled range");
  }
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  for (Index k = 0; k < kw.w.size(); ++k) {
    if (kw.w[k] != 0.0) out += kw.w[k] * v.segment(start + k, n);
  }
  return out;
}

// Weights of the composed pairing sum_j a_j sum_m b_m d[p + j + m].
KernelWeights compose(const KernelWeights& a, const KernelWeights& b) {
  KernelWeights c;
  c.m_min = a.m_min + b.m_min;
  c.w = Eigen::VectorXd::Zero(a.w.size() + b.w.size() - 1);
  for (Index i = 0; i < a.w.size(); ++i) {
    if (a.w[i] != 0.0) c.w.segment(i, b.w.size()) += a.w[i] * b.w;
  }
  return c;
}

KernelWeights weights_of(const TestFunction& phi, double lambda, const Grid& grid) {
  return kernel_weights(phi.scaled(lambda), grid.spacing(), 0.0, 0);
}

// Kernel T(y, x) = F_y(phihat^eps_x) over x = x_lo..x_hi with its diagonal A(x) = T(x, x).
struct Level {
  ScaleKernel kernel;
  Eigen::VectorXd diag;
  Index x_lo;

  Level(const Germ& F, const TestFunction& phihat, double eps, const Grid& grid, Index lo, Index hi)
      : kernel(F, phihat, eps, grid, lo, hi), diag(kernel.diagonal()), x_lo(lo) {}

  // sum_m w_m T(z, z + m) and sum_m w_m A(z + m) over z = q0 .. q0 + n - 1
  Eigen::VectorXd full(const KernelWeights& kw, Index q0, Index n) const { return kernel.smeared(kw, q0, n); }
  Eigen::VectorXd diagonal_part(const KernelWeights& kw, Index q0, Index n) const {
    return apply_weights(kw, diag, x_lo, q0, n);
  }
};

struct Range {
  Index lo, hi;
  Index size() const { return hi - lo + 1; }
};

Range output_range(const ReconstructionConfig& cfg, const Grid& grid) {
  const auto [lo, hi] = index_range(grid, cfg.norm.enlarged(1.0));
  // A few extra points so interpolation stencils at the edge of K+B(0,1) see real values.
  return {lo - 3, hi + 3};
}

struct SeriesDensities {
  SampledFunction total;
  Eigen::VectorXd base;
  std::vector<Eigen::VectorXd> d1, d2;
};

SeriesDensities build_series(const Germ& F, const TestFunction& phihat, const ReconstructionConfig& cfg,
                             const Grid& grid, int n0, bool keep_u2) {
  const Range z = output_range(cfg, grid);
  if (z.lo < 0 || z.hi >= grid.size()) throw Error(ErrorCode::SupportOverflow, "K + B(0, 1) leaves the grid");
  const TestFunction phicheck = make_phicheck(phihat);
  const int levels = cfg.n_max - n0 + 1;

  SeriesDensities out{SampledFunction::zero(grid), Eigen::VectorXd::Zero(z.size()), {}, {}};
  out.d1.assign(levels, Eigen::VectorXd());
  out.d2.assign(levels, Eigen::VectorXd());

  const KernelWeights base_w = weights_of(phihat, 2.0 * level_scale(n0), grid);
  parallel_for(-1, levels, cfg.jobs, [&](Index i) {
    if (i < 0) {
      const double eps = level_scale(n0);
      const Level lv(F, phihat, eps, grid, z.lo + base_w.m_min, z.hi + base_w.m_max());
      out.base = lv.full(base_w, z.lo, z.size());
      return;
    }
    const double eps = level_scale(n0 + static_cast<int>(i));
    const KernelWeights kw = weights_of(phicheck, eps, grid);
    const Level lv(F, phihat, eps, grid, z.lo + kw.m_min, z.hi + kw.m_max());
    out.d1[i] = lv.diagonal_part(kw, z.lo, z.size());
    if (keep_u2) {
      out.d2[i] = lv.full(kw, z.lo, z.size()) - out.d1[i];
    } else {
      out.d2[i] = Eigen::VectorXd::Zero(z.size());
    }
  });

  Eigen::VectorXd values = Eigen::VectorXd::Zero(grid.size());
  Eigen::VectorXd acc = out.base;
  for (int i = 0; i < levels; ++i) acc += out.d1[i] + out.d2[i];
  values.segment(z.lo, z.size()) = acc;
  out.total = SampledFunction(grid, {grid.point(z.lo), grid.point(z.hi)}, std::move(values));
  return out;
}

double pair_segment(const Eigen::VectorXd& seg, Index lo, const TestFunction& psi, const Grid& grid,
                    Interval valid) {
  Eigen::VectorXd values = Eigen::VectorXd::Zero(grid.size());
  values.segment(lo, seg.size()) = seg;
  const SampledFunction d(grid, {grid.point(lo), grid.point(lo + seg.size() - 1)}, std::move(values));
  return Distribution::density(d, valid).pair(psi, grid);
}

// Terms below 1e-13 of the largest contribution are treated as round-off.
void check_convergence(const Eigen::VectorXd& u, double base) {
  const Index n = u.size();
  if (n < 3) return;
  const double top = std::max(u.cwiseAbs().maxCoeff(), std::abs(base));
  if (top == 0.0) return;
  const double floor = 1e-13 * top;
  const double a = std::abs(u[n - 3]);
  const double b = std::abs(u[n - 2]);
  const double c = std::abs(u[n - 1]);
  if (a > floor && b > floor && c > floor && b >= a && c >= b) {
    throw Error(ErrorCode::NotConvergent, "series terms fail to decay over the last three levels");
  }
}

ReconstructionResult assemble(const Germ& F, const TestFunction& phihat, const ReconstructionConfig& cfg,
                              const Grid& grid, int n0, bool keep_u2) {
  SeriesDensities s = build_series(F, phihat, cfg, grid, n0, keep_u2);
  const Range z = output_range(cfg, grid);
  ReconstructionResult res;
  res.valid = cfg.norm.enlarged(1.0);
  res.density = s.total;
  res.distribution = Distribution::density(s.total, res.valid);

  const TestFunction psi = cfg.reference_psi();
  const int levels = cfg.n_max - n0 + 1;
  res.u1 = res.u2 = Eigen::VectorXd::Zero(levels);
  for (int i = 0; i < levels; ++i) {
    res.levels.push_back(n0 + i);
    res.u1[i] = pair_segment(s.d1[i], z.lo, psi, grid, res.valid);
    res.u2[i] = pair_segment(s.d2[i], z.lo, psi, grid, res.valid);
  }
  res.base_term = pair_segment(s.base, z.lo, psi, grid, res.valid);
  check_convergence(res.u1.cwiseAbs() + res.u2.cwiseAbs(), res.base_term);
  return res;
}

}  // namespace

void ReconstructionConfig::validate(const Grid& grid) const {
  norm.validate(grid);
  if (n_max < 0 || std::ldexp(1.0, -n_max) < 8.0 * grid.spacing() * (1.0 - 1e-12)) {
    throw Error(ErrorCode::ParameterViolation, "2^-N_max must be >= 8 Delta");
  }
  if (n0 < 0 || n0 > n_max) throw Error(ErrorCode::ParameterViolation, "n0 must lie in [0, N_max]");
  const double gamma = norm.exponents.gamma;
  if (path == ReconstructionPath::Positive && !(gamma > 0.0)) {
    throw Error(ErrorCode::ParameterViolation, "the positive path needs gamma > 0");
  }
  if (path == ReconstructionPath::NonPositive && gamma > 0.0) {
    throw Error(ErrorCode::ParameterViolation, "the nonpositive path needs gamma <= 0");
  }
  if (!grid.domain().contains(norm.enlarged(4.0), 1e-9)) {
    throw Error(ErrorCode::SupportOverflow, "K + B(0, 4) leaves the grid");
  }
}

TestFunction ReconstructionConfig::reference_psi() const {
  if (reference) return *reference;
  return standard_bump().recentered(0.5 * (norm.window.lo + norm.window.hi), 1.0);
}

ReconstructionResult reconstruct_pos(const Germ& F, const TestFunction& phihat,
                                     const ReconstructionConfig& cfg, const Grid& grid) {
  ReconstructionConfig c = cfg;
  c.path = ReconstructionPath::Positive;
  c.validate(grid);
  const auto& e = cfg.norm.exponents;
  if (!(cfg.norm.dictionary.r > -e.beta)) throw Error(ErrorCode::ParameterViolation, "need r > -beta");
  return assemble(F, phihat, c, grid, c.n0, true);
}

ReconstructionResult reconstruct_nonpos(const Germ& F, const TestFunction& phihat,
                                        const ReconstructionConfig& cfg, const Grid& grid) {
  ReconstructionConfig c = cfg;
  c.path = ReconstructionPath::NonPositive;
  c.n0 = 0;
  c.validate(grid);
  const auto& e = cfg.norm.exponents;
  if (!(e.beta + cfg.norm.dictionary.r > 0.0)) throw Error(ErrorCode::ParameterViolation, "need beta + r > 0");
  return assemble(F, phihat, c, grid, 0, false);
}

ReconstructionResult reconstruct(const Germ& F, const TestFunction& phihat,
                                 const ReconstructionConfig& cfg, const Grid& grid) {
  return cfg.path == ReconstructionPath::Positive ? reconstruct_pos(F, phihat, cfg, grid)
                                                  : reconstruct_nonpos(F, phihat, cfg, grid);
}

void reconstruction_bound_report(ReconstructionResult& result, const Distribution& R, const Germ& F,
                                 const ReconstructionConfig& cfg, const Grid& grid) {
  const NormConfig& nc = cfg.norm;
  nc.validate(grid);
  const auto [i0, i1] = index_range(grid, nc.window);
  const Dictionary dict = nc.dictionary.build();
  const int levels = nc.n_max + 1;
  result.bound_table = result.bound_unnormalized = Eigen::VectorXd::Zero(levels);
  parallel_for(0, levels, cfg.jobs, [&](Index n) {
    const double lambda = level_scale(static_cast<int>(n));
    Eigen::VectorXd best = Eigen::VectorXd::Zero(i1 - i0 + 1);
    for (const auto& psi : dict.members) {
      const Eigen::VectorXd r = R.local_moments(psi, lambda, 0, grid, i0, i1);
      const Eigen::VectorXd f = ScaleKernel(F, psi, lambda, grid, i0, i1).diagonal();
      best = best.cwiseMax((r - f).cwiseAbs());
    }
    const double v = lp_norm_uniform(best, grid.spacing(), nc.p);
    result.bound_unnormalized[n] = v;
    result.bound_table[n] = v / scaling_function(nc.exponents.gamma, nc.q, nc.epsilon, lambda);
  });
  result.bound_slope = fitted_slope(result.bound_unnormalized);
  result.bound_lq = lq_seq_norm(result.bound_table, nc.q);
}

ReconstructionResult reconstruction_bound_report(const Distribution& R, const Germ& F,
                                                 const ReconstructionConfig& cfg, const Grid& grid) {
  ReconstructionResult res;
  res.distribution = R;
  res.valid = cfg.norm.enlarged(1.0);
  reconstruction_bound_report(res, R, F, cfg, grid);
  return res;
}

ProofTerms proof_terms(const Germ& F, const TestFunction& phihat, const ReconstructionConfig& cfg,
                       const Grid& grid, int n) {
  cfg.validate(grid);
  if (n < 1 || n > cfg.n_max) throw Error(ErrorCode::ParameterViolation, "proof terms need 1 <= n <= N_max");
  const NormConfig& nc = cfg.norm;
  const auto [i0, i1] = index_range(grid, nc.window);
  const Index nw = i1 - i0 + 1;
  const Dictionary dict = nc.dictionary.build();
  const double lam = level_scale(n);
  const TestFunction phicheck = make_phicheck(phihat);

  std::vector<KernelWeights> wpsi;
  Index pmin = 0, pmax = 0;
  for (const auto& psi : dict.members) {
    wpsi.push_back(weights_of(psi, lam, grid));
    pmin = std::min(pmin, wpsi.back().m_min);
    pmax = std::max(pmax, wpsi.back().m_max());
  }
  const Range z{i0 + pmin, i1 + pmax};
  const std::size_t members = dict.members.size();

  Eigen::MatrixXd a(members, nw), b(members, nw), c = Eigen::MatrixXd::Zero(members, nw),
      d = Eigen::MatrixXd::Zero(members, nw);

  {
    const KernelWeights wphi = weights_of(phihat, 2.0 * lam, grid);
    const Level lv(F, phihat, lam, grid, z.lo + wphi.m_min, z.hi + wphi.m_max());
    const Eigen::VectorXd d1 = lv.full(wphi, z.lo, z.size()) - lv.diagonal_part(wphi, z.lo, z.size());
    for (std::size_t i = 0; i < members; ++i) {
      a.row(i) = apply_weights(wpsi[i], d1, z.lo, i0, nw).transpose();
      const KernelWeights wk = compose(wpsi[i], wphi);
      b.row(i) = (lv.diagonal_part(wk, i0, nw) - lv.full(wk, i0, nw)).transpose();
    }
  }
  const int levels = cfg.n_max - n + 1;
  std::vector<Eigen::MatrixXd> cs(levels), ds(levels);
  parallel_for(0, levels, cfg.jobs, [&](Index l) {
    const double eps = level_scale(n + static_cast<int>(l));
    const KernelWeights wc = weights_of(phicheck, eps, grid);
    const Level lv(F, phihat, eps, grid, z.lo + wc.m_min, z.hi + wc.m_max());
    const Eigen::VectorXd d2 = lv.full(wc, z.lo, z.size()) - lv.diagonal_part(wc, z.lo, z.size());
    cs[l].resize(members, nw);
    ds[l].resize(members, nw);
    for (std::size_t i = 0; i < members; ++i) {
      cs[l].row(i) = apply_weights(wpsi[i], d2, z.lo, i0, nw).transpose();
      const KernelWeights wk = compose(wpsi[i], wc);
      ds[l].row(i) = (lv.diagonal_part(wk, i0, nw) - lv.full(wk, i0, nw)).transpose();
    }
  });
  for (int l = 0; l < levels; ++l) {
    c += cs[l];
    d += ds[l];
  }

  auto norm_of = [&](const Eigen::MatrixXd& m) {
    const Eigen::VectorXd best = m.cwiseAbs().colwise().maxCoeff().transpose();
    return lp_norm_uniform(best, grid.spacing(), nc.p);
  };
  ProofTerms out;
  out.a = norm_of(a);
  out.b = norm_of(b);
  out.c = norm_of(c);
  out.d = norm_of(d);
  out.signed_total = a + b + c + d;
  return out;
}

}  // namespace germrec
