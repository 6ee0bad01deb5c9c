#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "germrec/distribution.hpp"
#include "germrec/grid.hpp"
#include "germrec/testfn.hpp"

namespace germrec {

struct ExponentTriple {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  bool constrained = true;  // enforce alpha <= gamma

  void validate() const;
};

// One structural piece of a germ: F_y(psi) += sum_j a_j(y) base((. - y)^j psi).
struct GermTerm {
  Distribution base;
  std::vector<SampledFunction> coefficients;
};

class Germ {
 public:
  using Closure = std::function<double(double, const SampledFunction&)>;

  Germ() = default;
  Germ(std::vector<GermTerm> terms, ExponentTriple exponents);
  // Slow path: the pairing is an arbitrary closure (x, psi) -> F_x(psi).
  static Germ from_closure(Closure fn, ExponentTriple exponents);

  double pair(double x, const SampledFunction& psi) const;

  const std::vector<GermTerm>& terms() const { return terms_; }
  const std::optional<Closure>& closure() const { return closure_; }
  const ExponentTriple& exponents() const { return exponents_; }
  Germ with_exponents(ExponentTriple e) const;
  // Base points where every coefficient is defined.
  Interval domain() const;

  Germ operator+(const Germ& o) const;
  Germ operator*(double t) const;

 private:
  std::vector<GermTerm> terms_;
  std::optional<Closure> closure_;
  ExponentTriple exponents_;
};

inline Germ operator*(double t, const Germ& g) { return g * t; }

// derivatives[k] = d^k f for k = 0..ceil(beta)-1.
Germ taylor_germ(std::span<const SampledFunction> derivatives, double beta);
// P_x(psi) = g(psi * F_x) for a Taylor germ F.
Germ product_germ(const Distribution& g, const Germ& taylor);
Germ constant_germ(const Distribution& xi, const Grid& grid);
// F_x(z) = z - x
Germ monomial_germ(const Grid& grid);
Germ zero_germ();

// T(y, x_p) = F_y(phi^lambda_{x_p}) for x_p on a range of grid points.
class ScaleKernel {
 public:
  ScaleKernel(const Germ& germ, const TestFunction& phi, double lambda, const Grid& grid,
              Index first, Index last);

  Index first() const { return first_; }
  Index last() const { return last_; }
  Index count() const { return last_ - first_ + 1; }

  // T(x_p, x_p)
  Eigen::VectorXd diagonal() const { return shifted(0); }
  // T(x_p - m Delta, x_p)
  Eigen::VectorXd shifted(Index m) const;
  // T(x_p + h, x_p)
  Eigen::VectorXd offset(double h) const;
  // sum_m w_m T(x_q, x_{q+m}) for q = q0 .. q0 + n - 1; the x range must lie inside [first, last].
  Eigen::VectorXd smeared(const KernelWeights& kw, Index q0, Index n) const;

 private:
  Eigen::VectorXd combine(const std::vector<Eigen::VectorXd>& coeff_values, std::size_t term,
                          double delta) const;
  void check_base_range(double lo, double hi) const;

  Germ germ_;
  TestFunction phi_;
  double lambda_;
  Grid grid_;
  Index first_;
  Index last_;
  // mu_[t][i][p - first] = base_t((. - x_p)^i phi^lambda_{x_p})
  std::vector<std::vector<Eigen::VectorXd>> mu_;
};

}  // namespace germrec
