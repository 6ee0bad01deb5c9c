#include "germrec/germ.hpp"

#include <algorithm>
#include <cmath>

namespace germrec {

namespace {

double ipow(double x, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= x;
  return r;
}

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

void ExponentTriple::validate() const {
  if (!std::isfinite(alpha) || !std::isfinite(beta) || !std::isfinite(gamma)) {
    throw Error(ErrorCode::ParameterViolation, "exponents must be finite");
  }
  if (constrained && alpha > gamma) throw Error(ErrorCode::ParameterViolation, "alpha > gamma");
}

Germ::Germ(std::vector<GermTerm> terms, ExponentTriple exponents)
    : terms_(std::move(terms)), exponents_(exponents) {
  exponents_.validate();
  for (const auto& t : terms_) {
    if (t.coefficients.empty()) throw Error(ErrorCode::ArityMismatch, "germ term without coefficients");
    for (const auto& a : t.coefficients) require_same_grid(a.grid(), t.coefficients[0].grid());
  }
}

Germ Germ::from_closure(Closure fn, ExponentTriple exponents) {
  Germ g({}, exponents);
  g.closure_ = std::move(fn);
  return g;
}

Germ Germ::with_exponents(ExponentTriple e) const {
  Germ g = *this;
  e.validate();
  g.exponents_ = e;
  return g;
}

Interval Germ::domain() const {
  Interval d{-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  for (const auto& t : terms_) {
    for (const auto& a : t.coefficients) {
      d.lo = std::max(d.lo, a.support().lo);
      d.hi = std::min(d.hi, a.support().hi);
    }
  }
  return d;
}

double Germ::pair(double x, const SampledFunction& psi) const {
  double acc = closure_ ? (*closure_)(x, psi) : 0.0;
  if (!terms_.empty() && !domain().contains(x, 1e-9)) {
    throw Error(ErrorCode::SupportOverflow, "base point outside the germ domain");
  }
  const Grid& grid = psi.grid();
  for (const auto& t : terms_) {
    for (std::size_t j = 0; j < t.coefficients.size(); ++j) {
      const double a = t.coefficients[j](x);
      if (a == 0.0) continue;
      Eigen::VectorXd v = psi.values();
      for (Index i = psi.first(); i <= psi.last(); ++i) v[i] *= ipow(grid.point(i) - x, static_cast<int>(j));
      acc += a * t.base.pair(SampledFunction(grid, psi.support(), std::move(v)));
    }
  }
  return acc;
}

Germ Germ::operator+(const Germ& o) const {
  Germ g = *this;
  g.terms_.insert(g.terms_.end(), o.terms_.begin(), o.terms_.end());
  if (o.closure_) {
    if (g.closure_) {
      auto a = *g.closure_;
      auto b = *o.closure_;
      g.closure_ = [a, b](double x, const SampledFunction& p) { return a(x, p) + b(x, p); };
    } else {
      g.closure_ = o.closure_;
    }
  }
  return g;
}

Germ Germ::operator*(double t) const {
  Germ g = *this;
  for (auto& term : g.terms_) term.base = term.base * t;
  if (g.closure_) {
    auto a = *g.closure_;
    g.closure_ = [a, t](double x, const SampledFunction& p) { return t * a(x, p); };
  }
  return g;
}

Germ taylor_germ(std::span<const SampledFunction> derivatives, double beta) {
  if (!(beta > 0.0) || beta == std::floor(beta)) {
    throw Error(ErrorCode::ParameterViolation, "Taylor germ needs beta > 0 not an integer");
  }
  const auto order = static_cast<std::size_t>(std::ceil(beta));
  if (derivatives.size() != order) {
    throw Error(ErrorCode::ArityMismatch, "Taylor germ needs ceil(beta) derivative functions");
  }
  GermTerm t{Distribution::lebesgue(), {}};
  double fact = 1.0;
  for (std::size_t k = 0; k < order; ++k) {
    if (k > 0) fact *= static_cast<double>(k);
    t.coefficients.push_back(derivatives[k] * (1.0 / fact));
  }
  return Germ({t}, ExponentTriple{0.0, 0.0, beta, true});
}

Germ product_germ(const Distribution& g, const Germ& taylor) {
  if (taylor.closure() || taylor.terms().size() != 1 || !taylor.terms()[0].base.is_lebesgue()) {
    throw Error(ErrorCode::ParameterViolation, "product germ needs a Taylor germ");
  }
  GermTerm t{g, taylor.terms()[0].coefficients};
  return Germ({t}, taylor.exponents());
}

Germ constant_germ(const Distribution& xi, const Grid& grid) {
  const SampledFunction one = SampledFunction::sample(grid, grid.domain(), [](double) { return 1.0; });
  return Germ({GermTerm{xi, {one}}}, ExponentTriple{0.0, 0.0, 0.0, true});
}

Germ monomial_germ(const Grid& grid) {
  const SampledFunction one = SampledFunction::sample(grid, grid.domain(), [](double) { return 1.0; });
  const SampledFunction zero = SampledFunction::sample(grid, grid.domain(), [](double) { return 0.0; });
  return Germ({GermTerm{Distribution::lebesgue(), {zero, one}}}, ExponentTriple{0.0, 1.0, 1.0, true});
}

Germ zero_germ() { return Germ(); }

ScaleKernel::ScaleKernel(const Germ& germ, const TestFunction& phi, double lambda, const Grid& grid,
                         Index first, Index last)
    : germ_(germ), phi_(phi), lambda_(lambda), grid_(grid), first_(first), last_(last) {
  if (first < 0 || last >= grid.size() || first > last) {
    throw Error(ErrorCode::SupportOverflow, "evaluation range outside the grid");
  }
  for (const auto& t : germ.terms()) {
    std::vector<Eigen::VectorXd> mu;
    for (std::size_t i = 0; i < t.coefficients.size(); ++i) {
      mu.push_back(t.base.local_moments(phi, lambda, static_cast<int>(i), grid, first, last));
    }
    mu_.push_back(std::move(mu));
  }
}

void ScaleKernel::check_base_range(double lo, double hi) const {
  if (germ_.terms().empty()) return;
  if (!germ_.domain().contains(Interval{lo, hi}, 1e-9)) {
    throw Error(ErrorCode::SupportOverflow, "base point outside the germ domain");
  }
}

Eigen::VectorXd ScaleKernel::combine(const std::vector<Eigen::VectorXd>& a, std::size_t term,
                                     double delta) const {
  const auto& mu = mu_[term];
  Eigen::VectorXd out = Eigen::VectorXd::Zero(count());
  for (std::size_t j = 0; j < a.size(); ++j) {
    Eigen::VectorXd s = mu[j];
    for (std::size_t i = 0; i < j; ++i) {
      const double c = binomial(static_cast<int>(j), static_cast<int>(i)) * ipow(delta, static_cast<int>(j - i));
      if (c != 0.0) s += c * mu[i];
    }
    out += a[j].cwiseProduct(s);
  }
  return out;
}

Eigen::VectorXd ScaleKernel::shifted(Index m) const {
  const double delta = static_cast<double>(m) * grid_.spacing();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(count());
  if (!germ_.terms().empty()) {
    if (first_ - m < 0 || last_ - m >= grid_.size()) {
      throw Error(ErrorCode::SupportOverflow, "base point outside the grid");
    }
    check_base_range(grid_.point(first_ - m), grid_.point(last_ - m));
    for (std::size_t t = 0; t < germ_.terms().size(); ++t) {
      std::vector<Eigen::VectorXd> a;
      for (const auto& c : germ_.terms()[t].coefficients) a.push_back(c.values().segment(first_ - m, count()));
      out += combine(a, t, delta);
    }
  }
  if (germ_.closure()) {
    for (Index p = first_; p <= last_; ++p) {
      const SampledFunction psi = phi_.recentered(grid_.point(p), lambda_).sample(grid_);
      out[p - first_] += (*germ_.closure())(grid_.point(p) - delta, psi);
    }
  }
  return out;
}

Eigen::VectorXd ScaleKernel::offset(double h) const {
  const double t = h / grid_.spacing();
  const double k0 = std::floor(t + 1e-12);
  const double f = std::max(0.0, t - k0);
  if (f < 1e-12) return shifted(-static_cast<Index>(k0));
  Eigen::VectorXd out = Eigen::VectorXd::Zero(count());
  if (!germ_.terms().empty()) {
    check_base_range(grid_.point(first_) + h, grid_.point(last_) + h);
    double w[4];
    cubic_weights(f, w);
    const auto k = static_cast<Index>(k0);
    for (std::size_t term = 0; term < germ_.terms().size(); ++term) {
      std::vector<Eigen::VectorXd> a;
      for (const auto& c : germ_.terms()[term].coefficients) {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(count());
        for (int l = 0; l < 4; ++l) {
          const Index s = first_ + k + l - 1;
          if (s < 0 || s + count() > c.values().size()) {
            throw Error(ErrorCode::SupportOverflow, "interpolation stencil leaves the grid");
          }
          v += w[l] * c.values().segment(s, count());
        }
        a.push_back(std::move(v));
      }
      out += combine(a, term, -h);
    }
  }
  if (germ_.closure()) {
    for (Index p = first_; p <= last_; ++p) {
      const SampledFunction psi = phi_.recentered(grid_.point(p), lambda_).sample(grid_);
      out[p - first_] += (*germ_.closure())(grid_.point(p) + h, psi);
    }
  }
  return out;
}

Eigen::VectorXd ScaleKernel::smeared(const KernelWeights& kw, Index q0, Index n) const {
  const Index lo = q0 + kw.m_min;
  const Index hi = q0 + n - 1 + kw.m_max();
  if (lo < first_ || hi > last_) throw Error(ErrorCode::SupportOverflow, "smearing range outside the kernel");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  if (!germ_.terms().empty()) {
    check_base_range(grid_.point(q0), grid_.point(q0 + n - 1));
    for (std::size_t t = 0; t < germ_.terms().size(); ++t) {
      const auto& coeffs = germ_.terms()[t].coefficients;
      const auto J = static_cast<int>(coeffs.size());
      // conv[i][l][q] = sum_m w_m m^l mu_i[q + m]
      std::vector<std::vector<Eigen::VectorXd>> conv(J);
      for (int i = 0; i < J; ++i) {
        conv[i].assign(J - i, Eigen::VectorXd::Zero(n));
        for (Index k = 0; k < kw.w.size(); ++k) {
          const double w = kw.w[k];
          if (w == 0.0) continue;
          const auto m = static_cast<double>(kw.m_min + k);
          const auto seg = mu_[t][i].segment(lo + k - first_, n);
          double ml = 1.0;
          for (int l = 0; l < J - i; ++l) {
            conv[i][l] += (w * ml) * seg;
            ml *= m;
          }
        }
      }
      for (int j = 0; j < J; ++j) {
        Eigen::VectorXd s = Eigen::VectorXd::Zero(n);
        for (int i = 0; i <= j; ++i) {
          s += binomial(j, i) * ipow(grid_.spacing(), j - i) * conv[i][j - i];
        }
        out += coeffs[j].values().segment(q0, n).cwiseProduct(s);
      }
    }
  }
  if (germ_.closure()) {
    for (Index k = 0; k < kw.w.size(); ++k) {
      if (kw.w[k] == 0.0) continue;
      for (Index q = 0; q < n; ++q) {
        const Index x = q0 + q + kw.m_min + k;
        const SampledFunction psi = phi_.recentered(grid_.point(x), lambda_).sample(grid_);
        out[q] += kw.w[k] * (*germ_.closure())(grid_.point(q0 + q), psi);
      }
    }
  }
  return out;
}

}  // namespace germrec
