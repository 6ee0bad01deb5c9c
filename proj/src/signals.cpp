#include "germrec/signals.hpp"

#include <cmath>
#include <numbers>

#include "germrec/testfn.hpp"

namespace germrec {

namespace {

// Polynomials Q_k with bump^(k)(u) = Q_k(u) (1 - u^2)^(-2k) bump(u).
std::vector<double> bump_poly(int k) {
  std::vector<double> q{1.0};
  for (int j = 0; j < k; ++j) {
    std::vector<double> next(q.size() + 4, 0.0);
    // Q' (1 - u^2)^2
    for (std::size_t i = 1; i < q.size(); ++i) {
      const double d = static_cast<double>(i) * q[i];
      next[i - 1] += d;
      next[i + 1] -= 2.0 * d;
      next[i + 3] += d;
    }
    for (std::size_t i = 0; i < q.size(); ++i) {
      // 4 j u Q (1 - u^2) - 2 u Q
      next[i + 1] += (4.0 * j - 2.0) * q[i];
      next[i + 3] -= 4.0 * j * q[i];
    }
    while (next.size() > 1 && next.back() == 0.0) next.pop_back();
    q = std::move(next);
  }
  return q;
}

double horner(const std::vector<double>& c, double x) {
  double v = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * x + *it;
  return v;
}

double bump_derivative(int k, double u) {
  if (u <= -1.0 || u >= 1.0) return 0.0;
  const double w = 1.0 - u * u;
  return horner(bump_poly(k), u) * std::pow(w, -2.0 * k) * bump(u);
}

}  // namespace

SignalKind signal_kind_from_string(const std::string& s) {
  if (s == "BUMP") return SignalKind::Bump;
  if (s == "POLY") return SignalKind::Poly;
  if (s == "TRIG") return SignalKind::Trig;
  if (s == "WEIERSTRASS") return SignalKind::Weierstrass;
  if (s == "DIRAC") return SignalKind::Dirac;
  throw Error(ErrorCode::ParameterViolation, "unknown signal kind " + s);
}

std::string to_string(SignalKind k) {
  switch (k) {
    case SignalKind::Bump: return "BUMP";
    case SignalKind::Poly: return "POLY";
    case SignalKind::Trig: return "TRIG";
    case SignalKind::Weierstrass: return "WEIERSTRASS";
    case SignalKind::Dirac: return "DIRAC";
  }
  return "?";
}

void SignalSpec::validate() const {
  if (order < 0) throw Error(ErrorCode::ParameterViolation, "derivative order must be >= 0");
  switch (kind) {
    case SignalKind::Bump:
      if (!(scale > 0.0)) throw Error(ErrorCode::ParameterViolation, "bump scale must be positive");
      break;
    case SignalKind::Poly:
      if (coefficients.empty()) throw Error(ErrorCode::ParameterViolation, "polynomial needs coefficients");
      break;
    case SignalKind::Trig:
      break;
    case SignalKind::Weierstrass:
      if (!(a > 0.0 && a < 1.0 && b > 1.0 && a * b > 1.0)) {
        throw Error(ErrorCode::ParameterViolation, "Weierstrass needs 0 < a < 1 < b and a b > 1");
      }
      if (terms < 1) throw Error(ErrorCode::ParameterViolation, "Weierstrass needs at least one term");
      break;
    case SignalKind::Dirac:
      if (order > 0 || derivative) {
        throw Error(ErrorCode::ParameterViolation, "Dirac masses are pairing-only");
      }
      break;
  }
}

double signal_value(const SignalSpec& spec, double x, int k) {
  switch (spec.kind) {
    case SignalKind::Bump:
      return spec.amplitude * bump_derivative(k, (x - spec.location) / spec.scale) / std::pow(spec.scale, k);
    case SignalKind::Poly: {
      double v = 0.0;
      double p = 1.0;
      for (std::size_t i = static_cast<std::size_t>(k); i < spec.coefficients.size(); ++i) {
        double falling = 1.0;
        for (int j = 0; j < k; ++j) falling *= static_cast<double>(i - j);
        v += spec.coefficients[i] * falling * p;
        p *= x;
      }
      return v;
    }
    case SignalKind::Trig:
      return spec.amplitude * std::pow(spec.frequency, k) *
             std::cos(spec.frequency * x + spec.phase + k * std::numbers::pi / 2.0);
    case SignalKind::Weierstrass: {
      double v = 0.0;
      for (int t = 0; t < spec.terms; ++t) {
        const double w = std::pow(spec.b, t) * std::numbers::pi;
        v += std::pow(spec.a, t) * std::pow(w, k) * std::cos(w * x + k * std::numbers::pi / 2.0);
      }
      return v;
    }
    case SignalKind::Dirac:
      break;
  }
  throw Error(ErrorCode::ParameterViolation, "Dirac masses have no pointwise values");
}

Realization realize(const SignalSpec& spec, const Grid& grid) {
  spec.validate();
  Realization out;
  if (spec.kind == SignalKind::Dirac) {
    out.distribution = Distribution::dirac(spec.location);
    return out;
  }
  Interval support = grid.domain();
  if (spec.kind == SignalKind::Bump) {
    support = Interval{spec.location - spec.scale, spec.location + spec.scale};
    if (!grid.domain().contains(support)) throw Error(ErrorCode::SupportOverflow, "bump leaves the grid");
  }
  for (int k = 0; k <= spec.order; ++k) {
    out.derivatives.push_back(
        SampledFunction::sample(grid, support, [&](double x) { return signal_value(spec, x, k); }));
  }
  out.distribution = spec.derivative ? Distribution::derivative_of(out.derivatives[0])
                                     : Distribution::density(out.derivatives[0]);
  return out;
}

SampledFunction finite_difference(const SampledFunction& f) {
  const Eigen::VectorXd& v = f.values();
  const Index n = v.size();
  const double h = f.grid().spacing();
  Eigen::VectorXd d = Eigen::VectorXd::Zero(n);
  for (Index i = 0; i < n; ++i) {
    if (i >= 2 && i + 2 < n) {
      d[i] = (v[i - 2] - 8.0 * v[i - 1] + 8.0 * v[i + 1] - v[i + 2]) / (12.0 * h);
    } else if (i + 4 < n) {
      d[i] = (-25.0 * v[i] + 48.0 * v[i + 1] - 36.0 * v[i + 2] + 16.0 * v[i + 3] - 3.0 * v[i + 4]) / (12.0 * h);
    } else {
      d[i] = (25.0 * v[i] - 48.0 * v[i - 1] + 36.0 * v[i - 2] - 16.0 * v[i - 3] + 3.0 * v[i - 4]) / (12.0 * h);
    }
  }
  return SampledFunction(f.grid(), f.support(), std::move(d));
}

}  // namespace germrec
