#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include "germrec/grid.hpp"
#include "germrec/testfn.hpp"

namespace germrec {

// Linear combination of Lebesgue measure, grid densities, distributional derivatives of grid
// functions, Dirac masses and closure-defined functionals.
class Distribution {
 public:
  using Functional = std::function<double(const SampledFunction&)>;

  static Distribution zero();
  static Distribution lebesgue();
  // Optional validity window: pairings with test functions leaving it throw SupportOverflow.
  static Distribution density(SampledFunction d, std::optional<Interval> valid = std::nullopt);
  // w' in the sense of distributions: psi -> -int w psi'.
  static Distribution derivative_of(SampledFunction w);
  static Distribution dirac(double x0);
  static Distribution from_functional(Functional fn);

  double pair(const SampledFunction& psi) const;
  double pair(const TestFunction& psi, const Grid& grid) const;

  // D((. - x)^power phi^lambda_x) at grid points x_i0..x_i1.
  Eigen::VectorXd local_moments(const TestFunction& phi, double lambda, int power,
                                const Grid& grid, Index i0, Index i1) const;
  // Same at arbitrary points.
  Eigen::VectorXd local_moments(const TestFunction& phi, double lambda, int power,
                                const Grid& grid, const std::vector<double>& xs) const;

  Distribution operator+(const Distribution& o) const;
  Distribution operator-(const Distribution& o) const { return *this + o * -1.0; }
  Distribution operator*(double t) const;

  bool is_zero() const { return terms_.empty(); }
  // The density when the distribution is a single plain density term.
  std::optional<SampledFunction> density() const;
  bool is_lebesgue() const;

 private:
  struct Lebesgue {};
  struct Density {
    std::shared_ptr<const SampledFunction> d;
    bool derivative = false;
    std::optional<Interval> valid;
  };
  struct Dirac {
    double x0;
  };
  struct Closure {
    Functional fn;
  };
  using Term = std::variant<Lebesgue, Density, Dirac, Closure>;

  std::vector<std::pair<double, Term>> terms_;
};

inline Distribution operator*(double t, const Distribution& d) { return d * t; }

}  // namespace germrec
