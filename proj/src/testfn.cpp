#include "germrec/testfn.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <random>

namespace germrec {

namespace {

constexpr double kGlNodes[8] = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                                -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                                0.7966664774136267,  0.9602898564975363};
constexpr double kGlWeights[8] = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                                  0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                                  0.2223810344533745, 0.1012285362903763};

// Panels per unit feature width.
constexpr double kPanelsPerFeature = 32.0;
// Finite-difference samples per unit feature width.
constexpr double kSamplesPerFeature = 256.0;

class BumpProfile final : public Profile {
 public:
  double operator()(double u) const override { return bump(u); }
};

class ModulatedBumpProfile final : public Profile {
 public:
  ModulatedBumpProfile(double omega, double theta) : omega_(omega), theta_(theta) {}
  double operator()(double u) const override { return std::cos(omega_ * u + theta_) * bump(u); }
  double resolution() const override { return std::min(1.0, 2.0 / (1.0 + omega_)); }

 private:
  double omega_;
  double theta_;
};

class BumpDerivativeProfile final : public Profile {
 public:
  double operator()(double u) const override {
    if (u <= -1.0 || u >= 1.0) return 0.0;
    const double t = 1.0 - u * u;
    return -2.0 * u / (t * t) * bump(u);
  }
};

class FunctionProfile final : public Profile {
 public:
  FunctionProfile(std::function<double(double)> fn, double resolution)
      : fn_(std::move(fn)), resolution_(resolution) {}
  double operator()(double u) const override {
    if (u <= -1.0 || u >= 1.0) return 0.0;
    return fn_(u);
  }
  double resolution() const override { return resolution_; }

 private:
  std::function<double(double)> fn_;
  double resolution_;
};

// u -> R * (narrow * wide)(R u) by quadrature on the nodes of the narrower factor.
class ConvolutionProfile final : public Profile {
 public:
  ConvolutionProfile(const TestFunction& narrow, TestFunction wide, double radius)
      : nodes_(narrow.nodes()), wide_(std::move(wide)), radius_(radius),
        resolution_(std::min(narrow.min_feature(), wide_.min_feature()) / radius) {}

  double operator()(double u) const override {
    if (u <= -1.0 || u >= 1.0) return 0.0;
    const double s = radius_ * u;
    double acc = 0.0;
    for (const auto& q : nodes_) acc += q.weight * wide_(s - q.s);
    return radius_ * acc;
  }
  double resolution() const override { return resolution_; }

 private:
  std::vector<QuadratureNode> nodes_;
  TestFunction wide_;
  double radius_;
  double resolution_;
};

// 4th-order centred differences for derivative orders 1..4.
Eigen::VectorXd central_difference(const Eigen::VectorXd& f, double h, int order) {
  const Index n = f.size();
  Eigen::VectorXd d = Eigen::VectorXd::Zero(n);
  auto at = [&](Index i) { return (i < 0 || i >= n) ? 0.0 : f[i]; };
  for (Index i = 0; i < n; ++i) {
    switch (order) {
      case 1:
        d[i] = (-at(i + 2) + 8.0 * at(i + 1) - 8.0 * at(i - 1) + at(i - 2)) / (12.0 * h);
        break;
      case 2:
        d[i] = (-at(i + 2) + 16.0 * at(i + 1) - 30.0 * at(i) + 16.0 * at(i - 1) - at(i - 2)) /
               (12.0 * h * h);
        break;
      case 3:
        d[i] = (-at(i + 3) + 8.0 * at(i + 2) - 13.0 * at(i + 1) + 13.0 * at(i - 1) -
                8.0 * at(i - 2) + at(i - 3)) /
               (8.0 * h * h * h);
        break;
      case 4:
        d[i] = (-at(i + 3) + 12.0 * at(i + 2) - 39.0 * at(i + 1) + 56.0 * at(i) -
                39.0 * at(i - 1) + 12.0 * at(i - 2) - at(i - 3)) /
               (6.0 * h * h * h * h);
        break;
      default:
        throw Error(ErrorCode::ParameterViolation, "unsupported difference order");
    }
  }
  return d;
}

}  // namespace

double bump(double u) {
  if (u <= -1.0 || u >= 1.0) return 0.0;
  return std::exp(-1.0 / (1.0 - u * u));
}

ProfilePtr bump_profile() {
  static const ProfilePtr p = std::make_shared<BumpProfile>();
  return p;
}

ProfilePtr modulated_bump_profile(double omega, double theta) {
  return std::make_shared<ModulatedBumpProfile>(omega, theta);
}

ProfilePtr bump_derivative_profile() {
  static const ProfilePtr p = std::make_shared<BumpDerivativeProfile>();
  return p;
}

ProfilePtr function_profile(std::function<double(double)> fn, double resolution) {
  return std::make_shared<FunctionProfile>(std::move(fn), resolution);
}

struct TestFunction::Cache {
  std::once_flag moments_once;
  Eigen::VectorXd moments;
  std::once_flag norms_once;
  Eigen::VectorXd cr;
  double l1 = 0.0;
};

TestFunction::TestFunction(std::vector<Atom> atoms)
    : atoms_(std::move(atoms)), cache_(std::make_shared<Cache>()) {
  for (const auto& a : atoms_) {
    if (!(a.scale > 0.0) || !a.profile) {
      throw Error(ErrorCode::ParameterViolation, "atom needs a positive scale and a profile");
    }
    radius_ = std::max(radius_, std::abs(a.center) + a.scale);
  }
}

double TestFunction::operator()(double s) const {
  double acc = 0.0;
  for (const auto& a : atoms_) acc += a(s);
  return acc;
}

double TestFunction::min_feature() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& a : atoms_) m = std::min(m, a.scale * a.profile->resolution());
  return m;
}

std::vector<QuadratureNode> TestFunction::nodes(double cell, double offset) const {
  std::vector<QuadratureNode> out;
  std::vector<double> breaks;
  for (const auto& a : atoms_) {
    const double lo = a.center - a.scale;
    const double hi = a.center + a.scale;
    double panel = a.scale * a.profile->resolution() / kPanelsPerFeature;
    breaks.clear();
    breaks.push_back(lo);
    if (cell > 0.0) {
      panel = std::min(panel, cell);
      const double k0 = std::floor((lo - offset) / cell) + 1.0;
      for (double k = k0;; k += 1.0) {
        const double b = offset + k * cell;
        if (b >= hi) break;
        if (b > lo) breaks.push_back(b);
      }
    }
    breaks.push_back(hi);
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
      const double u = breaks[i];
      const double v = breaks[i + 1];
      if (!(v > u)) continue;
      const int n = std::max(1, static_cast<int>(std::ceil((v - u) / panel - 1e-9)));
      const double h = (v - u) / n;
      for (int p = 0; p < n; ++p) {
        const double mid = u + (p + 0.5) * h;
        for (int g = 0; g < 8; ++g) {
          const double s = mid + 0.5 * h * kGlNodes[g];
          const double val = a(s);
          if (val != 0.0) out.push_back({s, 0.5 * h * kGlWeights[g] * val});
        }
      }
    }
  }
  return out;
}

double TestFunction::integrate_against(const std::function<double(double)>& g) const {
  double acc = 0.0;
  for (const auto& q : nodes()) acc += q.weight * g(q.s);
  return acc;
}

TestFunction::Cache& TestFunction::cache() const {
  if (!cache_) throw Error(ErrorCode::ParameterViolation, "empty test function");
  return *cache_;
}

double TestFunction::moment(int k) const {
  if (k < 0) throw Error(ErrorCode::ParameterViolation, "negative moment order");
  if (k > kMaxMoment) {
    return integrate_against([k](double s) { return std::pow(s, k); });
  }
  return moments(kMaxMoment)[k];
}

Eigen::VectorXd TestFunction::moments(int k_max) const {
  if (k_max > kMaxMoment) {
    Eigen::VectorXd m(k_max + 1);
    for (int k = 0; k <= k_max; ++k) m[k] = moment(k);
    return m;
  }
  Cache& c = cache();
  std::call_once(c.moments_once, [this, &c] {
    auto& m = c.moments;
    m = Eigen::VectorXd::Zero(kMaxMoment + 1);
    for (const auto& q : nodes()) {
      double p = q.weight;
      for (int k = 0; k <= kMaxMoment; ++k) {
        m[k] += p;
        p *= q.s;
      }
    }
  });
  return c.moments.head(k_max + 1);
}

double TestFunction::cr_norm(int r) const {
  if (r < 0 || r > kMaxOrder) throw Error(ErrorCode::ParameterViolation, "C^r order out of range");
  Cache& c = cache();
  std::call_once(c.norms_once, [this, &c] {
    auto& cc = c;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& a : atoms_) {
      lo = std::min(lo, a.center - a.scale);
      hi = std::max(hi, a.center + a.scale);
    }
    double h = min_feature() / kSamplesPerFeature;
    const double max_points = 1 << 20;
    if ((hi - lo) / h > max_points) h = (hi - lo) / max_points;
    lo -= 4.0 * h;
    const Index n = static_cast<Index>(std::ceil((hi - lo) / h)) + 9;
    Eigen::VectorXd f(n);
    for (Index i = 0; i < n; ++i) f[i] = (*this)(lo + static_cast<double>(i) * h);

    cc.cr = Eigen::VectorXd::Zero(kMaxOrder + 1);
    double running = f.cwiseAbs().maxCoeff();
    cc.cr[0] = running;
    Eigen::VectorXd d4;
    for (int k = 1; k <= kMaxOrder; ++k) {
      Eigen::VectorXd d;
      if (k <= 4) {
        d = central_difference(f, h, k);
        if (k == 4) d4 = d;
      } else {
        d = central_difference(d4, h, k - 4);
      }
      running = std::max(running, d.cwiseAbs().maxCoeff());
      cc.cr[k] = running;
    }
    const Eigen::VectorXd af = f.cwiseAbs();
    cc.l1 = h * (af.sum() - 0.5 * (af[0] + af[n - 1]));
  });
  return c.cr[r];
}

double TestFunction::l1_norm() const {
  cr_norm(0);
  return cache().l1;
}

TestFunction TestFunction::scaled(double lambda) const { return recentered(0.0, lambda); }

TestFunction TestFunction::recentered(double x, double lambda) const {
  if (!(lambda > 0.0)) throw Error(ErrorCode::ParameterViolation, "scale must be positive");
  std::vector<Atom> a = atoms_;
  for (auto& at : a) {
    at.center = at.center * lambda + x;
    at.scale *= lambda;
  }
  return TestFunction(std::move(a));
}

TestFunction TestFunction::operator+(const TestFunction& o) const {
  std::vector<Atom> a = atoms_;
  a.insert(a.end(), o.atoms_.begin(), o.atoms_.end());
  return TestFunction(std::move(a));
}

TestFunction TestFunction::operator-(const TestFunction& o) const { return *this + o * -1.0; }

TestFunction TestFunction::operator*(double t) const {
  std::vector<Atom> a = atoms_;
  for (auto& at : a) at.coefficient *= t;
  return TestFunction(std::move(a));
}

SampledFunction TestFunction::sample(const Grid& grid) const {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& a : atoms_) {
    lo = std::min(lo, a.center - a.scale);
    hi = std::max(hi, a.center + a.scale);
  }
  if (atoms_.empty()) return SampledFunction::zero(grid);
  if (!grid.domain().contains(Interval{lo, hi}, 1e-12)) {
    throw Error(ErrorCode::SupportOverflow, "test function support leaves the domain");
  }
  return SampledFunction::sample(grid, {lo, hi}, [this](double s) { return (*this)(s); });
}

TestFunction standard_bump() { return TestFunction({Atom{1.0, 0.0, 1.0, bump_profile()}}); }

TestFunction convolution(const TestFunction& a, const TestFunction& b) {
  const bool a_narrow = a.min_feature() <= b.min_feature();
  const TestFunction& narrow = a_narrow ? a : b;
  const TestFunction& wide = a_narrow ? b : a;
  const double radius = a.support_radius() + b.support_radius();
  auto profile = std::make_shared<ConvolutionProfile>(narrow, wide, radius);
  return TestFunction({Atom{1.0, 0.0, radius, profile}});
}

SampledFunction scale_recenter(const TestFunction& phi, double x, double lambda, const Grid& grid) {
  if (lambda < 8.0 * grid.spacing() * (1.0 - 1e-12)) {
    throw Error(ErrorCode::ParameterViolation, "scale below the resolution guard 8*Delta");
  }
  const double r = lambda * phi.support_radius();
  if (!grid.domain().contains(Interval{x - r, x + r}, 1e-12)) {
    throw Error(ErrorCode::SupportOverflow, "scaled test function leaves the domain");
  }
  return phi.recentered(x, lambda).sample(grid);
}

Eigen::VectorXd moments(const TestFunction& phi, int k_max) { return phi.moments(k_max); }

std::vector<double> default_tweak_scales(const TestFunction& phi, int count) {
  std::vector<double> s;
  for (int i = 0; i < count; ++i) s.push_back(std::ldexp(1.0, -(i + 2)) / (1.0 + phi.support_radius()));
  return s;
}

TweakResult tweak_detailed(const TestFunction& phi, int r, const std::vector<double>& scales) {
  if (r < 1) throw Error(ErrorCode::ParameterViolation, "tweak order r must be >= 1");
  const double R = phi.support_radius();
  for (double l : scales) {
    if (!(l > 0.0)) throw Error(ErrorCode::ParameterViolation, "tweak scales must be positive");
    if (l >= 1.0 / (2.0 * R)) throw Error(ErrorCode::ScaleTooLarge, "tweak scale >= 1/(2 R_phi)");
  }
  const Eigen::VectorXd m = phi.moments(std::max(r - 1, 0));
  const double m0 = m[0];
  if (std::abs(m0) < 1e-300) throw Error(ErrorCode::DegenerateSystem, "test function has zero mass");

  TweakResult res;
  for (int k = 0; k < r; ++k) {
    if (k == 0 || std::abs(m[k]) > 1e-10 * std::abs(m0) * std::pow(R, k)) res.active_rows.push_back(k);
  }
  const auto n = static_cast<Index>(res.active_rows.size());
  if (n > static_cast<Index>(scales.size())) {
    throw Error(ErrorCode::DegenerateSystem, "more active moment rows than tweak scales");
  }
  res.scales.assign(scales.begin(), scales.begin() + n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < i; ++j) {
      if (res.scales[i] == res.scales[j]) throw Error(ErrorCode::DegenerateSystem, "repeated tweak scale");
    }
  }
  Eigen::MatrixXd A(n, n);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  for (Index a = 0; a < n; ++a) {
    const int k = res.active_rows[a];
    for (Index i = 0; i < n; ++i) A(a, i) = m[k] / m0 * std::pow(res.scales[i], k);
    if (k == 0) b[a] = 1.0;
  }
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
  if (!(lu.rcond() > 1e-14)) throw Error(ErrorCode::DegenerateSystem, "singular tweak system");
  res.coefficients = lu.solve(b);

  std::vector<Atom> atoms;
  for (Index i = 0; i < n; ++i) {
    const TestFunction scaled = phi.scaled(res.scales[i]);
    for (Atom a : scaled.atoms()) {
      a.coefficient *= res.coefficients[i] / m0;
      atoms.push_back(a);
    }
  }
  res.phihat = TestFunction(std::move(atoms));
  return res;
}

TestFunction tweak(const TestFunction& phi, int r, const std::vector<double>& scales) {
  return tweak_detailed(phi, r, scales).phihat;
}

TestFunction tweak(const TestFunction& phi, int r) {
  return tweak(phi, r, default_tweak_scales(phi, r));
}

TestFunction make_phicheck(const TestFunction& phihat) {
  return phihat.scaled(0.5) - phihat.scaled(2.0);
}

TestFunction mollifier(const TestFunction& phihat) {
  return convolution(phihat.scaled(2.0), phihat);
}

SampledFunction mollifier_at_scale(const TestFunction& phihat, double lambda, const Grid& grid) {
  if (lambda < 8.0 * grid.spacing() * (1.0 - 1e-12)) {
    throw Error(ErrorCode::ParameterViolation, "scale below the resolution guard 8*Delta");
  }
  return convolution(phihat.scaled(2.0 * lambda), phihat.scaled(lambda)).sample(grid);
}

AnnihilationCheck annihilation_bound_check(const TestFunction& phicheck, const TestFunction& eta,
                                           double lambda, int r,
                                           const std::vector<double>& points) {
  const auto nodes = phicheck.scaled(lambda).nodes();
  double lhs = 0.0;
  for (double x : points) {
    double acc = 0.0;
    for (const auto& q : nodes) acc += q.weight * eta(x - q.s);
    lhs = std::max(lhs, std::abs(acc));
  }
  const double rhs = eta.cr_norm(r) * phicheck.l1_norm() * std::pow(lambda, r);
  return {lhs, rhs};
}

AnnihilationCheck annihilation_bound_check(const TestFunction& phicheck, const TestFunction& eta,
                                           double lambda, int r, const Grid& grid) {
  const double reach = eta.support_radius() + lambda * phicheck.support_radius();
  const Index a = std::max<Index>(0, grid.ceil_index(-reach));
  const Index b = std::min<Index>(grid.size() - 1, grid.floor_index(reach));
  const Index stride = std::max<Index>(1, (b - a) / 1024);
  std::vector<double> pts;
  for (Index i = a; i <= b; i += stride) pts.push_back(grid.point(i));
  return annihilation_bound_check(phicheck, eta, lambda, r, pts);
}

namespace {

TestFunction moment_corrected(const TestFunction& psi, int s) {
  // Correct with bumps at fixed centres; the moment matrix of these is a nonsingular
  // Vandermonde-like system.
  const int n = s + 1;
  std::vector<TestFunction> basis;
  for (int j = 0; j < n; ++j) {
    const double c = n == 1 ? 0.0 : -0.5 + static_cast<double>(j) / (n - 1);
    basis.push_back(TestFunction({Atom{1.0, c, 0.4, bump_profile()}}));
  }
  Eigen::MatrixXd M(n, n);
  Eigen::VectorXd mu(n);
  for (int k = 0; k < n; ++k) {
    mu[k] = psi.moment(k);
    for (int j = 0; j < n; ++j) M(k, j) = basis[j].moment(k);
  }
  const Eigen::VectorXd a = M.partialPivLu().solve(mu);
  TestFunction out = psi;
  for (int j = 0; j < n; ++j) out = out - basis[j] * a[j];
  return out;
}

}  // namespace

Dictionary build_dictionary(int r, int s, int size, std::uint64_t seed) {
  if (size < 1) throw Error(ErrorCode::ParameterViolation, "dictionary size must be >= 1");
  if (r < 0 || r > TestFunction::kMaxOrder) throw Error(ErrorCode::ParameterViolation, "dictionary order out of range");
  std::mt19937_64 rng(seed);
  auto uniform = [&rng](double a, double b) {
    return a + (b - a) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
  };
  Dictionary d{r, s, {}};
  for (int i = 0; i < size; ++i) {
    TestFunction psi;
    switch (i % 3) {
      case 0: {
        const double c = uniform(-0.5, 0.5);
        psi = TestFunction({Atom{1.0, c, uniform(0.3, 1.0 - std::abs(c)), bump_profile()}});
        break;
      }
      case 1: {
        const double w = uniform(1.0, 6.0);
        const double th = uniform(0.0, 2.0 * std::numbers::pi);
        psi = TestFunction({Atom{1.0, 0.0, uniform(0.5, 1.0), modulated_bump_profile(w, th)}});
        break;
      }
      default: {
        const double c = uniform(-0.3, 0.3);
        psi = TestFunction({Atom{1.0, c, uniform(0.5, 1.0 - std::abs(c)), bump_derivative_profile()}});
        break;
      }
    }
    if (s >= 0) psi = moment_corrected(psi, s);
    d.members.push_back(psi * (1.0 / psi.cr_norm(r)));
  }
  return d;
}

std::vector<TestFunction> test_panel(int size) {
  std::vector<TestFunction> out;
  for (int i = 0; i < size; ++i) {
    const double c = -0.6 + 1.2 * (i + 0.5) / size;
    const double w = 0.25 + 0.05 * (i % 4);
    switch (i % 3) {
      case 0: out.push_back(TestFunction({Atom{1.0, c, w, bump_profile()}})); break;
      case 1: out.push_back(TestFunction({Atom{1.0, c, w, modulated_bump_profile(3.0 + i, 0.3 * i)}})); break;
      default: out.push_back(TestFunction({Atom{0.5, c, w, bump_derivative_profile()}})); break;
    }
  }
  return out;
}

KernelWeights kernel_weights(const TestFunction& phi, double spacing, double theta, int power,
                             bool derivative) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& a : phi.atoms()) {
    lo = std::min(lo, a.center - a.scale);
    hi = std::max(hi, a.center + a.scale);
  }
  KernelWeights kw;
  if (phi.atoms().empty()) {
    kw.w = Eigen::VectorXd::Zero(1);
    return kw;
  }
  kw.m_min = static_cast<Index>(std::floor(theta + lo / spacing)) - 1;
  const Index m_max = static_cast<Index>(std::floor(theta + hi / spacing)) + 2;
  kw.w = Eigen::VectorXd::Zero(m_max - kw.m_min + 1);
  double l[4];
  for (const auto& q : phi.nodes(spacing, -theta * spacing)) {
    const double tau = theta + q.s / spacing;
    const double m0 = std::floor(tau);
    const double f = tau - m0;
    double wq = q.weight;
    for (int i = 0; i < power; ++i) wq *= q.s;
    if (derivative) {
      cubic_weight_derivatives(f, l);
      wq /= spacing;
    } else {
      cubic_weights(f, l);
    }
    const Index base = static_cast<Index>(m0) - 1 - kw.m_min;
    for (int j = 0; j < 4; ++j) kw.w[base + j] += wq * l[j];
  }
  return kw;
}

}  // namespace germrec
