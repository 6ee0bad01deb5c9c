#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "germrec/error.hpp"

namespace germrec {

using Index = Eigen::Index;

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double length() const { return hi - lo; }
  Interval enlarged(double r) const { return {lo - r, hi + r}; }
  bool contains(double x, double tol = 1e-12) const { return x >= lo - tol && x <= hi + tol; }
  bool contains(const Interval& o, double tol = 1e-12) const {
    return o.lo >= lo - tol && o.hi <= hi + tol;
  }
  bool operator==(const Interval&) const = default;
};

// Uniform grid x_i = -L + i * 2^-J on [-L, L].
class Grid {
 public:
  Grid(double half_length, int level);

  double half_length() const { return half_length_; }
  int level() const { return level_; }
  double spacing() const { return spacing_; }
  Index size() const { return size_; }
  Interval domain() const { return {-half_length_, half_length_}; }

  double point(Index i) const { return -half_length_ + static_cast<double>(i) * spacing_; }
  // Largest i with x_i <= x, tolerant to round-off at grid points.
  Index floor_index(double x) const;
  // Smallest i with x_i >= x.
  Index ceil_index(double x) const;
  Index nearest_index(double x) const;
  bool is_point(double x, double tol = 1e-9) const;

  bool operator==(const Grid& o) const {
    return half_length_ == o.half_length_ && level_ == o.level_;
  }

 private:
  double half_length_;
  int level_;
  double spacing_;
  Index size_;
};

// Grid samples that vanish outside the declared support.
class SampledFunction {
 public:
  SampledFunction(const Grid& grid, Interval support, Eigen::VectorXd values);

  static SampledFunction zero(const Grid& grid);
  static SampledFunction sample(const Grid& grid, Interval support,
                                const std::function<double(double)>& fn);

  const Grid& grid() const { return grid_; }
  Interval support() const { return support_; }
  // Inclusive index range of grid points inside the support; empty when first > last.
  Index first() const { return first_; }
  Index last() const { return last_; }
  const Eigen::VectorXd& values() const { return values_; }

  double at(Index i) const { return (i < 0 || i >= values_.size()) ? 0.0 : values_[i]; }
  // Local cubic Lagrange interpolation.
  double operator()(double x) const;

  SampledFunction operator+(const SampledFunction& o) const;
  SampledFunction operator-(const SampledFunction& o) const;
  SampledFunction operator*(double t) const;
  SampledFunction operator*(const SampledFunction& o) const;
  // Restriction of the support; values outside the new interval are zeroed.
  SampledFunction restricted(Interval window) const;

 private:
  Grid grid_;
  Interval support_;
  Index first_;
  Index last_;
  Eigen::VectorXd values_;
};

inline SampledFunction operator*(double t, const SampledFunction& f) { return f * t; }

void require_same_grid(const Grid& a, const Grid& b);

class IntegrabilityParam {
 public:
  IntegrabilityParam(double p = 1.0);  // NOLINT: implicit from numbers is intended
  static IntegrabilityParam inf();

  bool is_inf() const { return inf_; }
  double value() const;
  std::string str() const;
  bool operator==(const IntegrabilityParam&) const = default;

 private:
  double p_ = 1.0;
  bool inf_ = false;
};

// Hoelder conjugate combination 1/p = 1/a + 1/b.
IntegrabilityParam harmonic_sum(IntegrabilityParam a, IntegrabilityParam b);

struct AnnulusSample {
  double h;
  double weight;  // trapezoid weight for dh
  int annulus;    // -1 for the inner core [-c, c]
};

// Symmetric dyadic annuli 2^-(j+1) R <= |h| <= 2^-j R, j = 0..j_max, plus a core.
class DyadicAnnulusScheme {
 public:
  DyadicAnnulusScheme(double outer_radius, int j_max, int points_per_side = 8);
  static DyadicAnnulusScheme with_cutoff(double outer_radius, double cutoff,
                                         int points_per_side = 8);

  double outer_radius() const { return outer_radius_; }
  int j_max() const { return j_max_; }
  int points_per_side() const { return points_; }
  double inner_radius() const;
  const std::vector<AnnulusSample>& samples() const { return samples_; }
  Index size() const { return static_cast<Index>(samples_.size()); }

  // Integral over B(0, radius) w.r.t. dh; radius must be R 2^-j for an integer j.
  double ball_integral(const Eigen::Ref<const Eigen::VectorXd>& values, double radius) const;
  Eigen::VectorXd evaluate(const std::function<double(double)>& fn) const;

 private:
  double outer_radius_;
  int j_max_;
  int points_;
  std::vector<AnnulusSample> samples_;
};

// Trapezoid rule over [first, last] of the support.
double integrate(const SampledFunction& f);
// Riemann sum Delta * sum_j f_j g_{i-j}.
SampledFunction convolve(const SampledFunction& f, const SampledFunction& g);
double lp_norm(const SampledFunction& f, IntegrabilityParam p, Interval window);
// L^p norm of values on a uniform lattice with the given spacing (trapezoid weights).
double lp_norm_uniform(const Eigen::Ref<const Eigen::VectorXd>& values, double spacing,
                       IntegrabilityParam p);
double lq_seq_norm(const Eigen::Ref<const Eigen::VectorXd>& a, IntegrabilityParam q);
// L^q(dh/|h|) over the annulus samples; the core carries no weight.
double lqh_norm(const Eigen::Ref<const Eigen::VectorXd>& values, IntegrabilityParam q,
                const DyadicAnnulusScheme& scheme);
double lqh_norm(const std::function<double(double)>& phi, IntegrabilityParam q,
                const DyadicAnnulusScheme& scheme);

// f(x_p + h) for p = first .. first + count - 1 by cubic interpolation.
Eigen::VectorXd shifted_samples(const SampledFunction& f, Index first, Index count, double h);
// Inclusive index range of the grid points inside the window.
std::pair<Index, Index> index_range(const Grid& grid, Interval window);

// Cubic Lagrange cardinal functions on the stencil {-1, 0, 1, 2} at fraction f in [0, 1).
inline void cubic_weights(double f, double w[4]) {
  w[0] = -f * (f - 1.0) * (f - 2.0) / 6.0;
  w[1] = (f + 1.0) * (f - 1.0) * (f - 2.0) / 2.0;
  w[2] = -(f + 1.0) * f * (f - 2.0) / 2.0;
  w[3] = (f + 1.0) * f * (f - 1.0) / 6.0;
}

inline void cubic_weight_derivatives(double f, double w[4]) {
  w[0] = -(3.0 * f * f - 6.0 * f + 2.0) / 6.0;
  w[1] = (3.0 * f * f - 4.0 * f - 1.0) / 2.0;
  w[2] = -(3.0 * f * f - 2.0 * f - 2.0) / 2.0;
  w[3] = (3.0 * f * f - 1.0) / 6.0;
}

}  // namespace germrec
