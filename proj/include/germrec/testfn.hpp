#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "germrec/grid.hpp"

namespace germrec {

// Shape on [-1, 1], zero outside.
class Profile {
 public:
  virtual ~Profile() = default;
  virtual double operator()(double u) const = 0;
  // Smallest feature width in units of u; drives quadrature and finite-difference resolution.
  virtual double resolution() const { return 1.0; }
};

using ProfilePtr = std::shared_ptr<const Profile>;

double bump(double u);

ProfilePtr bump_profile();
// cos(omega u + theta) * bump(u)
ProfilePtr modulated_bump_profile(double omega, double theta);
// bump'(u); antisymmetric
ProfilePtr bump_derivative_profile();
// Arbitrary callable restricted to (-1, 1).
ProfilePtr function_profile(std::function<double(double)> fn, double resolution = 1.0);

struct Atom {
  double coefficient;
  double center;
  double scale;
  ProfilePtr profile;

  double operator()(double s) const {
    const double u = (s - center) / scale;
    if (u <= -1.0 || u >= 1.0) return 0.0;
    return coefficient * (*profile)(u) / scale;
  }
};

struct QuadratureNode {
  double s;
  double weight;  // quadrature weight times the test function value at s
};

// Finite sum of atoms. Moments and C^r norms are computed lazily and cached.
class TestFunction {
 public:
  static constexpr int kMaxMoment = 8;
  static constexpr int kMaxOrder = 6;

  TestFunction() = default;
  explicit TestFunction(std::vector<Atom> atoms);

  double operator()(double s) const;
  const std::vector<Atom>& atoms() const { return atoms_; }
  double support_radius() const { return radius_; }
  double min_feature() const;

  double moment(int k) const;
  Eigen::VectorXd moments(int k_max) const;
  double cr_norm(int r) const;
  double l1_norm() const;
  double sup_norm() const { return cr_norm(0); }

  // phi^lambda(s) = phi(s / lambda) / lambda
  TestFunction scaled(double lambda) const;
  // phi^lambda_x
  TestFunction recentered(double x, double lambda) const;
  TestFunction operator+(const TestFunction& o) const;
  TestFunction operator-(const TestFunction& o) const;
  TestFunction operator*(double t) const;

  // Gauss-Legendre nodes carrying phi(s) ds. With cell > 0 panels also break at offset + k*cell.
  std::vector<QuadratureNode> nodes(double cell = 0.0, double offset = 0.0) const;
  double integrate_against(const std::function<double(double)>& g) const;

  SampledFunction sample(const Grid& grid) const;

 private:
  struct Cache;
  Cache& cache() const;

  std::vector<Atom> atoms_;
  double radius_ = 0.0;
  std::shared_ptr<Cache> cache_;
};

inline TestFunction operator*(double t, const TestFunction& f) { return f * t; }

TestFunction standard_bump();
// Profile of a convolution a * b, sampled on demand by quadrature.
TestFunction convolution(const TestFunction& a, const TestFunction& b);

SampledFunction scale_recenter(const TestFunction& phi, double x, double lambda, const Grid& grid);
Eigen::VectorXd moments(const TestFunction& phi, int k_max);

struct TweakResult {
  TestFunction phihat;
  std::vector<double> scales;   // scales actually used
  Eigen::VectorXd coefficients; // c_i
  std::vector<int> active_rows;
};

std::vector<double> default_tweak_scales(const TestFunction& phi, int count);
TweakResult tweak_detailed(const TestFunction& phi, int r, const std::vector<double>& scales);
TestFunction tweak(const TestFunction& phi, int r, const std::vector<double>& scales);
TestFunction tweak(const TestFunction& phi, int r);

TestFunction make_phicheck(const TestFunction& phihat);
TestFunction mollifier(const TestFunction& phihat);
// rho^lambda = phihat^{2 lambda} * phihat^{lambda} sampled on the grid.
SampledFunction mollifier_at_scale(const TestFunction& phihat, double lambda, const Grid& grid);

struct AnnihilationCheck {
  double lhs;
  double rhs;
};

// lhs = sup |phicheck^lambda * eta| over the grid points of the support (or the given points).
AnnihilationCheck annihilation_bound_check(const TestFunction& phicheck, const TestFunction& eta,
                                           double lambda, int r, const Grid& grid);
AnnihilationCheck annihilation_bound_check(const TestFunction& phicheck, const TestFunction& eta,
                                           double lambda, int r,
                                           const std::vector<double>& points);

struct Dictionary {
  int r = 2;
  int s = -1;
  std::vector<TestFunction> members;
};

Dictionary build_dictionary(int r, int s, int size, std::uint64_t seed);

// Fixed panel of generic test functions supported in [-1, 1].
std::vector<TestFunction> test_panel(int size = 10);

// Weights w_m with  int I[d](x_p + theta*Delta + s) s^power phi(s) ds = sum_m w_m d[p + m],
// where I is local cubic interpolation of grid data d. With derivative the integrand uses I[d]'.
struct KernelWeights {
  Index m_min = 0;
  Eigen::VectorXd w;

  Index m_max() const { return m_min + w.size() - 1; }
};

KernelWeights kernel_weights(const TestFunction& phi, double spacing, double theta, int power,
                             bool derivative = false);

}  // namespace germrec
