#pragma once

#include <optional>
#include <string>
#include <vector>

#include "germrec/distribution.hpp"
#include "germrec/grid.hpp"

namespace germrec {

enum class SignalKind { Bump, Poly, Trig, Weierstrass, Dirac };

SignalKind signal_kind_from_string(const std::string& s);
std::string to_string(SignalKind k);

struct SignalSpec {
  SignalKind kind = SignalKind::Bump;
  // Bump: amplitude * bump((x - location) / scale)
  // Poly: sum_i coefficients[i] x^i
  // Trig: amplitude * cos(frequency * x + phase)
  // Weierstrass: sum_{k < terms} a^k cos(b^k pi x)
  // Dirac: mass at location
  std::vector<double> coefficients;
  double amplitude = 1.0;
  double location = 0.0;
  double scale = 1.0;
  double frequency = 1.0;
  double phase = 0.0;
  double a = 0.5;
  double b = 3.0;
  int terms = 12;
  // Number of derivatives to sample beyond the function itself.
  int order = 0;
  // Realise the distribution as the distributional derivative of the signal.
  bool derivative = false;

  void validate() const;
};

struct Realization {
  // derivatives[k] = d^k f; empty for Dirac.
  std::vector<SampledFunction> derivatives;
  Distribution distribution;
};

// Exact value of d^k f at x (not defined for Dirac).
double signal_value(const SignalSpec& spec, double x, int k = 0);
Realization realize(const SignalSpec& spec, const Grid& grid);

// Fourth-order central difference; one-sided near the ends of the grid.
SampledFunction finite_difference(const SampledFunction& f);

}  // namespace germrec
