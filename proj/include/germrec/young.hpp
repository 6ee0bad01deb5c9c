#pragma once

#include <span>

#include "germrec/distribution.hpp"
#include "germrec/germ.hpp"
#include "germrec/grid.hpp"
#include "germrec/reconstruct.hpp"

namespace germrec {

struct YoungConfig {
  double alpha = -0.5;
  double beta = 1.5;
  IntegrabilityParam p1 = IntegrabilityParam::inf();
  IntegrabilityParam p2 = IntegrabilityParam::inf();
  IntegrabilityParam q1 = IntegrabilityParam::inf();
  IntegrabilityParam q2 = IntegrabilityParam::inf();
  int r = 2;
  ReconstructionConfig reconstruction;
  bool bound_report = true;

  IntegrabilityParam p() const { return harmonic_sum(p1, p2); }
  IntegrabilityParam q() const { return harmonic_sum(q1, q2); }
  void validate() const;
  // Reconstruction settings for the product germ: exponents (alpha, alpha, alpha + beta).
  ReconstructionConfig resolved() const;
};

// P_x = g(. F_x) for the Taylor germ F of f.
Germ young_germ(const Distribution& g, std::span<const SampledFunction> f, const YoungConfig& cfg);

ReconstructionResult young_product(const Distribution& g, std::span<const SampledFunction> f,
                                   const TestFunction& phihat, const YoungConfig& cfg, const Grid& grid);

struct VQuantities {
  double v1 = 0.0, v2 = 0.0, v3 = 0.0, v4 = 0.0;
  // Geometric tail bounds folded into v3 and v4 (sup over n).
  double tail3 = 0.0, tail4 = 0.0;
};

VQuantities v_quantities(const Distribution& g, std::span<const SampledFunction> f,
                         const TestFunction& phi, const YoungConfig& cfg, const Grid& grid);

// <W' f, psi> = -int W (f' psi + f psi'), psi' by fourth-order differences.
double ibp_oracle(const SampledFunction& W, const SampledFunction& f, const SampledFunction& df,
                  const SampledFunction& psi);

}  // namespace germrec
