#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "germrec/distribution.hpp"
#include "germrec/germ.hpp"
#include "germrec/grid.hpp"
#include "germrec/norms.hpp"
#include "germrec/testfn.hpp"

namespace germrec {

enum class ReconstructionPath { Positive, NonPositive };

struct ReconstructionConfig {
  int n0 = 0;
  int n_max = 8;
  NormConfig norm;
  ReconstructionPath path = ReconstructionPath::Positive;
  // Test function for the series diagnostics; defaults to the standard bump at the window centre.
  std::optional<TestFunction> reference;
  int jobs = 1;

  void validate(const Grid& grid) const;
  TestFunction reference_psi() const;
};

struct ReconstructionResult {
  Distribution distribution;
  // Density of R(F) on the grid; pairings are valid for test functions supported in K + B(0, 1).
  std::optional<SampledFunction> density;
  Interval valid;

  std::vector<int> levels;        // k = n0 .. n_max
  Eigen::VectorXd u1, u2;         // signed u'_k, u''_k for the reference test function
  double base_term = 0.0;

  Eigen::VectorXd bound_table;    // divided by k(2^-n)
  Eigen::VectorXd bound_unnormalized;
  double bound_slope = 0.0;
  double bound_lq = 0.0;
};

ReconstructionResult reconstruct_pos(const Germ& F, const TestFunction& phihat,
                                     const ReconstructionConfig& cfg, const Grid& grid);
ReconstructionResult reconstruct_nonpos(const Germ& F, const TestFunction& phihat,
                                        const ReconstructionConfig& cfg, const Grid& grid);
// Dispatches on cfg.path.
ReconstructionResult reconstruct(const Germ& F, const TestFunction& phihat,
                                 const ReconstructionConfig& cfg, const Grid& grid);

// Fills the bound fields of result from max over the dictionary of |(R - F_x)(psi_x^{2^-n})|.
void reconstruction_bound_report(ReconstructionResult& result, const Distribution& R, const Germ& F,
                                 const ReconstructionConfig& cfg, const Grid& grid);
ReconstructionResult reconstruction_bound_report(const Distribution& R, const Germ& F,
                                                 const ReconstructionConfig& cfg, const Grid& grid);

struct ProofTerms {
  double a = 0.0, b = 0.0, c = 0.0, d = 0.0;  // L^p(K) norms of the dictionary maxima
  // Signed sums a + b + c + d per dictionary member and x-lattice point, for consistency checks.
  Eigen::MatrixXd signed_total;
};

ProofTerms proof_terms(const Germ& F, const TestFunction& phihat, const ReconstructionConfig& cfg,
                       const Grid& grid, int n);

}  // namespace germrec
