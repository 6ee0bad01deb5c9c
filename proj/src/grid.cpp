#include "germrec/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace germrec {

namespace {

constexpr double kIndexTol = 1e-9;

}  // namespace

Grid::Grid(double half_length, int level) : half_length_(half_length), level_(level) {
  if (!(half_length > 0.0) || level < 1 || level > 30) {
    throw Error(ErrorCode::ParameterViolation, "grid needs L > 0 and 1 <= J <= 30");
  }
  spacing_ = std::ldexp(1.0, -level);
  const double cells = 2.0 * half_length / spacing_;
  if (std::abs(cells - std::round(cells)) > 1e-9) {
    throw Error(ErrorCode::ParameterViolation, "2L must be a multiple of the grid spacing");
  }
  size_ = static_cast<Index>(std::llround(cells)) + 1;
}

Index Grid::floor_index(double x) const {
  return static_cast<Index>(std::floor((x + half_length_) / spacing_ + kIndexTol));
}

Index Grid::ceil_index(double x) const {
  return static_cast<Index>(std::ceil((x + half_length_) / spacing_ - kIndexTol));
}

Index Grid::nearest_index(double x) const {
  return static_cast<Index>(std::llround((x + half_length_) / spacing_));
}

bool Grid::is_point(double x, double tol) const {
  const double t = (x + half_length_) / spacing_;
  return std::abs(t - std::round(t)) <= tol;
}

void require_same_grid(const Grid& a, const Grid& b) {
  if (!(a == b)) throw Error(ErrorCode::GridMismatch, "operands live on different grids");
}

SampledFunction::SampledFunction(const Grid& grid, Interval support, Eigen::VectorXd values)
    : grid_(grid), support_(support), values_(std::move(values)) {
  if (values_.size() != grid.size()) {
    throw Error(ErrorCode::GridMismatch, "value count differs from grid point count");
  }
  if (!grid.domain().contains(support_, 1e-9) || support_.lo > support_.hi) {
    throw Error(ErrorCode::SupportOverflow, "declared support leaves the grid domain");
  }
  first_ = std::max<Index>(0, grid.ceil_index(support_.lo));
  last_ = std::min<Index>(grid.size() - 1, grid.floor_index(support_.hi));
  for (Index i = 0; i < first_; ++i) values_[i] = 0.0;
  for (Index i = last_ + 1; i < values_.size(); ++i) values_[i] = 0.0;
}

SampledFunction SampledFunction::zero(const Grid& grid) {
  return SampledFunction(grid, {0.0, 0.0}, Eigen::VectorXd::Zero(grid.size()));
}

SampledFunction SampledFunction::sample(const Grid& grid, Interval support,
                                        const std::function<double(double)>& fn) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(grid.size());
  const Index a = std::max<Index>(0, grid.ceil_index(support.lo));
  const Index b = std::min<Index>(grid.size() - 1, grid.floor_index(support.hi));
  for (Index i = a; i <= b; ++i) v[i] = fn(grid.point(i));
  return SampledFunction(grid, support, std::move(v));
}

double SampledFunction::operator()(double x) const {
  const Index i = grid_.floor_index(x);
  const double f = (x - grid_.point(i)) / grid_.spacing();
  if (std::abs(f) < 1e-12) return at(i);
  double w[4];
  cubic_weights(f, w);
  return w[0] * at(i - 1) + w[1] * at(i) + w[2] * at(i + 1) + w[3] * at(i + 2);
}

namespace {

Interval hull(Interval a, Interval b) { return {std::min(a.lo, b.lo), std::max(a.hi, b.hi)}; }

}  // namespace

SampledFunction SampledFunction::operator+(const SampledFunction& o) const {
  require_same_grid(grid_, o.grid_);
  return SampledFunction(grid_, hull(support_, o.support_), values_ + o.values_);
}

SampledFunction SampledFunction::operator-(const SampledFunction& o) const {
  require_same_grid(grid_, o.grid_);
  return SampledFunction(grid_, hull(support_, o.support_), values_ - o.values_);
}

SampledFunction SampledFunction::operator*(double t) const {
  return SampledFunction(grid_, support_, values_ * t);
}

SampledFunction SampledFunction::operator*(const SampledFunction& o) const {
  require_same_grid(grid_, o.grid_);
  Interval s{std::max(support_.lo, o.support_.lo), std::min(support_.hi, o.support_.hi)};
  if (s.lo > s.hi) return zero(grid_);
  return SampledFunction(grid_, s, values_.cwiseProduct(o.values_));
}

SampledFunction SampledFunction::restricted(Interval window) const {
  Interval s{std::max(support_.lo, window.lo), std::min(support_.hi, window.hi)};
  if (s.lo > s.hi) return zero(grid_);
  return SampledFunction(grid_, s, values_);
}

IntegrabilityParam::IntegrabilityParam(double p) {
  if (std::isinf(p) && p > 0) {
    inf_ = true;
    p_ = std::numeric_limits<double>::infinity();
    return;
  }
  if (!(p >= 1.0)) throw Error(ErrorCode::ParameterViolation, "integrability exponent must be >= 1");
  p_ = p;
}

IntegrabilityParam IntegrabilityParam::inf() {
  return IntegrabilityParam(std::numeric_limits<double>::infinity());
}

double IntegrabilityParam::value() const { return p_; }

std::string IntegrabilityParam::str() const {
  if (inf_) return "inf";
  std::ostringstream os;
  os << p_;
  return os.str();
}

IntegrabilityParam harmonic_sum(IntegrabilityParam a, IntegrabilityParam b) {
  const double inv = (a.is_inf() ? 0.0 : 1.0 / a.value()) + (b.is_inf() ? 0.0 : 1.0 / b.value());
  if (inv == 0.0) return IntegrabilityParam::inf();
  if (inv > 1.0) throw Error(ErrorCode::ParameterViolation, "1/p1 + 1/p2 exceeds 1");
  return IntegrabilityParam(1.0 / inv);
}

DyadicAnnulusScheme::DyadicAnnulusScheme(double outer_radius, int j_max, int points_per_side)
    : outer_radius_(outer_radius), j_max_(j_max), points_(points_per_side) {
  if (!(outer_radius > 0.0) || j_max < 0 || points_per_side < 2) {
    throw Error(ErrorCode::ParameterViolation, "invalid annulus scheme");
  }
  for (int j = 0; j <= j_max; ++j) {
    const double b = std::ldexp(outer_radius, -j);
    const double a = 0.5 * b;
    const double step = (b - a) / (points_ - 1);
    for (int sign : {-1, 1}) {
      for (int l = 0; l < points_; ++l) {
        const double w = (l == 0 || l == points_ - 1) ? 0.5 * step : step;
        samples_.push_back({sign * (a + l * step), w, j});
      }
    }
  }
  const double c = inner_radius();
  for (int l = 0; l < 5; ++l) {
    const double w = (l == 0 || l == 4) ? 0.25 * c : 0.5 * c;
    samples_.push_back({-c + 0.5 * c * l, w, -1});
  }
}

DyadicAnnulusScheme DyadicAnnulusScheme::with_cutoff(double outer_radius, double cutoff,
                                                     int points_per_side) {
  if (!(cutoff > 0.0) || cutoff > 0.5 * outer_radius) {
    throw Error(ErrorCode::ParameterViolation, "annulus cutoff must lie in (0, R/2]");
  }
  const int j_max = static_cast<int>(std::floor(std::log2(outer_radius / cutoff) + 1e-9)) - 1;
  return DyadicAnnulusScheme(outer_radius, j_max, points_per_side);
}

double DyadicAnnulusScheme::inner_radius() const { return std::ldexp(outer_radius_, -(j_max_ + 1)); }

double DyadicAnnulusScheme::ball_integral(const Eigen::Ref<const Eigen::VectorXd>& values,
                                          double radius) const {
  if (values.size() != size()) throw Error(ErrorCode::ArityMismatch, "sample count mismatch");
  const double t = std::log2(outer_radius_ / radius);
  const int j0 = static_cast<int>(std::lround(t));
  if (std::abs(t - j0) > 1e-9 || j0 < 0 || j0 > j_max_ + 1) {
    throw Error(ErrorCode::ParameterViolation, "ball radius is not a dyadic annulus radius");
  }
  double acc = 0.0;
  for (Index s = 0; s < size(); ++s) {
    const auto& smp = samples_[s];
    if (smp.annulus < 0 || smp.annulus >= j0) acc += smp.weight * values[s];
  }
  return acc;
}

Eigen::VectorXd DyadicAnnulusScheme::evaluate(const std::function<double(double)>& fn) const {
  Eigen::VectorXd v(size());
  for (Index s = 0; s < size(); ++s) v[s] = fn(samples_[s].h);
  return v;
}

double integrate(const SampledFunction& f) {
  if (f.first() > f.last()) return 0.0;
  const auto seg = f.values().segment(f.first(), f.last() - f.first() + 1);
  return f.grid().spacing() * (seg.sum() - 0.5 * (seg[0] + seg[seg.size() - 1]));
}

SampledFunction convolve(const SampledFunction& f, const SampledFunction& g) {
  require_same_grid(f.grid(), g.grid());
  const Grid& grid = f.grid();
  const Interval s{f.support().lo + g.support().lo, f.support().hi + g.support().hi};
  if (!grid.domain().contains(s, 1e-9)) {
    throw Error(ErrorCode::SupportOverflow, "convolution support leaves the domain");
  }
  // x_i - x_j is the grid point with index i - j + c.
  const Index c = grid.nearest_index(0.0);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(grid.size());
  if (f.first() <= f.last() && g.first() <= g.last()) {
    const Index lo = std::max<Index>(0, f.first() + g.first() - c);
    const Index hi = std::min<Index>(grid.size() - 1, f.last() + g.last() - c);
    for (Index i = lo; i <= hi; ++i) {
      const Index j0 = std::max(f.first(), i + c - g.last());
      const Index j1 = std::min(f.last(), i + c - g.first());
      double acc = 0.0;
      for (Index j = j0; j <= j1; ++j) acc += f.values()[j] * g.values()[i - j + c];
      out[i] = acc * grid.spacing();
    }
  }
  return SampledFunction(grid, s, std::move(out));
}

double lp_norm_uniform(const Eigen::Ref<const Eigen::VectorXd>& values, double spacing,
                       IntegrabilityParam p) {
  const Index n = values.size();
  if (n == 0) return 0.0;
  if (p.is_inf()) return values.cwiseAbs().maxCoeff();
  if (n == 1) return 0.0;
  const double pv = p.value();
  auto powed = [pv](double v) { return pv == 1.0 ? std::abs(v) : std::pow(std::abs(v), pv); };
  double acc = 0.0;
  for (Index i = 0; i < n; ++i) acc += powed(values[i]);
  acc -= 0.5 * (powed(values[0]) + powed(values[n - 1]));
  acc *= spacing;
  return pv == 1.0 ? acc : std::pow(acc, 1.0 / pv);
}

double lp_norm(const SampledFunction& f, IntegrabilityParam p, Interval window) {
  const Grid& grid = f.grid();
  if (!grid.domain().contains(window, 1e-9)) {
    throw Error(ErrorCode::SupportOverflow, "norm window leaves the domain");
  }
  const Index a = std::max<Index>(0, grid.ceil_index(window.lo));
  const Index b = std::min<Index>(grid.size() - 1, grid.floor_index(window.hi));
  if (a > b) return 0.0;
  return lp_norm_uniform(f.values().segment(a, b - a + 1), grid.spacing(), p);
}

double lq_seq_norm(const Eigen::Ref<const Eigen::VectorXd>& a, IntegrabilityParam q) {
  if (a.size() == 0) return 0.0;
  if (q.is_inf()) return a.cwiseAbs().maxCoeff();
  const double qv = q.value();
  double acc = 0.0;
  for (Index i = 0; i < a.size(); ++i) acc += std::pow(std::abs(a[i]), qv);
  return std::pow(acc, 1.0 / qv);
}

double lqh_norm(const Eigen::Ref<const Eigen::VectorXd>& values, IntegrabilityParam q,
                const DyadicAnnulusScheme& scheme) {
  if (values.size() != scheme.size()) throw Error(ErrorCode::ArityMismatch, "sample count mismatch");
  const auto& s = scheme.samples();
  double acc = 0.0;
  for (Index k = 0; k < values.size(); ++k) {
    if (s[k].annulus < 0) continue;
    if (q.is_inf()) {
      acc = std::max(acc, std::abs(values[k]));
    } else {
      acc += std::pow(std::abs(values[k]), q.value()) * s[k].weight / std::abs(s[k].h);
    }
  }
  return q.is_inf() ? acc : std::pow(acc, 1.0 / q.value());
}

double lqh_norm(const std::function<double(double)>& phi, IntegrabilityParam q,
                const DyadicAnnulusScheme& scheme) {
  return lqh_norm(scheme.evaluate(phi), q, scheme);
}

Eigen::VectorXd shifted_samples(const SampledFunction& f, Index first, Index count, double h) {
  const Grid& grid = f.grid();
  const double t = h / grid.spacing();
  const double k0 = std::floor(t + 1e-12);
  const double frac = std::max(0.0, t - k0);
  const auto k = static_cast<Index>(k0);
  const auto& v = f.values();
  auto segment = [&](Index start) -> Eigen::VectorXd {
    if (start < 0 || start + count > v.size()) {
      throw Error(ErrorCode::SupportOverflow, "shifted samples leave the grid");
    }
    return v.segment(start, count);
  };
  if (frac < 1e-12) return segment(first + k);
  double w[4];
  cubic_weights(frac, w);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(count);
  for (int l = 0; l < 4; ++l) out += w[l] * segment(first + k + l - 1);
  return out;
}

std::pair<Index, Index> index_range(const Grid& grid, Interval window) {
  if (!grid.domain().contains(window, 1e-9)) {
    throw Error(ErrorCode::SupportOverflow, "window leaves the grid domain");
  }
  return {std::max<Index>(0, grid.ceil_index(window.lo)),
          std::min<Index>(grid.size() - 1, grid.floor_index(window.hi))};
}

}  // namespace germrec
