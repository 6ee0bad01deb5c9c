#include "germrec/distribution.hpp"

#include <cmath>
#include <map>

namespace germrec {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double ipow(double x, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= x;
  return r;
}

SampledFunction monomial_times(const TestFunction& phi, double x, double lambda, int power,
                               const Grid& grid) {
  const TestFunction t = phi.recentered(x, lambda);
  const double r = lambda * phi.support_radius();
  const Interval s{std::max(x - r, -grid.half_length()), std::min(x + r, grid.half_length())};
  return SampledFunction::sample(grid, s, [&](double z) { return ipow(z - x, power) * t(z); });
}

void check_window(const std::optional<Interval>& valid, double x, double reach) {
  if (valid && !valid->contains(Interval{x - reach, x + reach}, 1e-9)) {
    throw Error(ErrorCode::SupportOverflow, "test function leaves the validity window");
  }
}

}  // namespace

Distribution Distribution::zero() { return Distribution(); }

Distribution Distribution::lebesgue() {
  Distribution d;
  d.terms_.push_back({1.0, Lebesgue{}});
  return d;
}

Distribution Distribution::density(SampledFunction f, std::optional<Interval> valid) {
  Distribution d;
  d.terms_.push_back({1.0, Density{std::make_shared<const SampledFunction>(std::move(f)), false, valid}});
  return d;
}

Distribution Distribution::derivative_of(SampledFunction w) {
  Distribution d;
  d.terms_.push_back({1.0, Density{std::make_shared<const SampledFunction>(std::move(w)), true, {}}});
  return d;
}

Distribution Distribution::dirac(double x0) {
  Distribution d;
  d.terms_.push_back({1.0, Dirac{x0}});
  return d;
}

Distribution Distribution::from_functional(Functional fn) {
  Distribution d;
  d.terms_.push_back({1.0, Closure{std::move(fn)}});
  return d;
}

Distribution Distribution::operator+(const Distribution& o) const {
  Distribution d = *this;
  d.terms_.insert(d.terms_.end(), o.terms_.begin(), o.terms_.end());
  return d;
}

Distribution Distribution::operator*(double t) const {
  Distribution d = *this;
  for (auto& term : d.terms_) term.first *= t;
  return d;
}

std::optional<SampledFunction> Distribution::density() const {
  if (terms_.size() != 1) return std::nullopt;
  const auto* dens = std::get_if<Density>(&terms_[0].second);
  if (!dens || dens->derivative) return std::nullopt;
  return *dens->d * terms_[0].first;
}

bool Distribution::is_lebesgue() const {
  return terms_.size() == 1 && terms_[0].first == 1.0 &&
         std::holds_alternative<Lebesgue>(terms_[0].second);
}

double Distribution::pair(const SampledFunction& psi) const {
  double acc = 0.0;
  for (const auto& [c, term] : terms_) {
    const double v = std::visit(
        Overloaded{
            [&](const Lebesgue&) { return integrate(psi); },
            [&](const Density& d) {
              require_same_grid(d.d->grid(), psi.grid());
              if (d.valid && !d.valid->contains(psi.support(), 1e-9)) {
                throw Error(ErrorCode::SupportOverflow, "test function leaves the validity window");
              }
              if (!d.derivative) return integrate(*d.d * psi);
              // -int w psi' with centred differences, written in summation-by-parts form.
              double s = 0.0;
              const auto& w = *d.d;
              for (Index i = psi.first(); i <= psi.last(); ++i) {
                s += psi.at(i) * 0.5 * (w.at(i + 1) - w.at(i - 1));
              }
              return s;
            },
            [&](const Dirac& d) { return psi(d.x0); },
            [&](const Closure& f) { return f.fn(psi); },
        },
        term);
    acc += c * v;
  }
  return acc;
}

double Distribution::pair(const TestFunction& psi, const Grid& grid) const {
  return local_moments(psi, 1.0, 0, grid, std::vector<double>{0.0})[0];
}

Eigen::VectorXd Distribution::local_moments(const TestFunction& phi, double lambda, int power,
                                            const Grid& grid, const std::vector<double>& xs) const {
  const auto n = static_cast<Index>(xs.size());
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  const double reach = lambda * phi.support_radius();
  for (const auto& [c, term] : terms_) {
    std::visit(
        Overloaded{
            [&](const Lebesgue&) { out.array() += c * ipow(lambda, power) * phi.moment(power); },
            [&](const Density& d) {
              require_same_grid(d.d->grid(), grid);
              const TestFunction scaled = phi.scaled(lambda);
              std::map<double, KernelWeights> cache;
              const auto& v = d.d->values();
              for (Index k = 0; k < n; ++k) {
                const double x = xs[k];
                check_window(d.valid, x, reach);
                Index p = grid.floor_index(x);
                double theta = std::round((x - grid.point(p)) / grid.spacing() * 1e12) / 1e12;
                if (theta >= 1.0) {
                  ++p;
                  theta = 0.0;
                }
                if (theta < 0.0) theta = 0.0;
                auto it = cache.find(theta);
                if (it == cache.end()) {
                  it = cache.emplace(theta, kernel_weights(scaled, grid.spacing(), theta, power, d.derivative)).first;
                }
                const KernelWeights& kw = it->second;
                if (p + kw.m_min < 0 || p + kw.m_max() >= grid.size()) {
                  throw Error(ErrorCode::SupportOverflow, "local pairing leaves the grid");
                }
                out[k] += c * kw.w.dot(v.segment(p + kw.m_min, kw.w.size()));
              }
            },
            [&](const Dirac& d) {
              for (Index k = 0; k < n; ++k) {
                const double u = d.x0 - xs[k];
                out[k] += c * ipow(u, power) * phi(u / lambda) / lambda;
              }
            },
            [&](const Closure& f) {
              for (Index k = 0; k < n; ++k) {
                out[k] += c * f.fn(monomial_times(phi, xs[k], lambda, power, grid));
              }
            },
        },
        term);
  }
  return out;
}

Eigen::VectorXd Distribution::local_moments(const TestFunction& phi, double lambda, int power,
                                            const Grid& grid, Index i0, Index i1) const {
  const Index n = i1 - i0 + 1;
  if (n <= 0) return Eigen::VectorXd();
  bool fast = true;
  for (const auto& term : terms_) {
    if (!std::holds_alternative<Density>(term.second) && !std::holds_alternative<Lebesgue>(term.second)) fast = false;
  }
  if (!fast) {
    std::vector<double> xs(n);
    for (Index k = 0; k < n; ++k) xs[k] = grid.point(i0 + k);
    return local_moments(phi, lambda, power, grid, xs);
  }
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  const double reach = lambda * phi.support_radius();
  const TestFunction scaled = phi.scaled(lambda);
  for (const auto& [c, term] : terms_) {
    if (std::holds_alternative<Lebesgue>(term)) {
      out.array() += c * ipow(lambda, power) * phi.moment(power);
      continue;
    }
    const auto& d = std::get<Density>(term);
    require_same_grid(d.d->grid(), grid);
    check_window(d.valid, grid.point(i0), reach);
    check_window(d.valid, grid.point(i1), reach);
    const KernelWeights kw = kernel_weights(scaled, grid.spacing(), 0.0, power, d.derivative);
    if (i0 + kw.m_min < 0 || i1 + kw.m_max() >= grid.size()) {
      throw Error(ErrorCode::SupportOverflow, "local pairing leaves the grid");
    }
    const auto& v = d.d->values();
    for (Index m = 0; m < kw.w.size(); ++m) {
      if (kw.w[m] == 0.0) continue;
      out += (c * kw.w[m]) * v.segment(i0 + kw.m_min + m, n);
    }
  }
  return out;
}

}  // namespace germrec
