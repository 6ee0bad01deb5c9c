#pragma once

#include <cstdint>
#include <span>

#include <Eigen/Dense>

#include "germrec/distribution.hpp"
#include "germrec/germ.hpp"
#include "germrec/grid.hpp"
#include "germrec/testfn.hpp"

namespace germrec {

struct DictionarySpec {
  int r = 2;
  int s = -1;
  int size = 16;
  std::uint64_t seed = 42;

  Dictionary build() const { return build_dictionary(r, s, size, seed); }
};

struct NormConfig {
  ExponentTriple exponents;
  IntegrabilityParam p = IntegrabilityParam::inf();
  IntegrabilityParam q = IntegrabilityParam::inf();
  IntegrabilityParam q1 = IntegrabilityParam::inf();
  double epsilon = 1.0;
  Interval window{-0.5, 0.5};
  int n_max = 8;
  double h_radius = 2.0;
  int annulus_points = 8;
  // Innermost |h| for the annulus scheme; 0 means 2 * Delta.
  double annulus_cutoff = 0.0;
  // x-lattice step at level n for local means, in units of 2^-n.
  double localmeans_step = 0x1.0p-10;
  DictionarySpec dictionary;
  int jobs = 1;

  DyadicAnnulusScheme scheme(const Grid& grid) const;
  Interval enlarged(double r) const { return window.enlarged(r); }
  void validate(const Grid& grid) const;
};

struct CoherenceTable {
  int n_max = 0;
  DyadicAnnulusScheme scheme{2.0, 0};
  Eigen::MatrixXd f;  // (n_max + 1) x scheme samples
  Eigen::VectorXd g;  // n_max + 1
};

struct MSequences {
  Eigen::VectorXd m1, m2, m3, m4;
  // Geometric-envelope bounds on the truncated tails of m2 and m3 (m4 is a finite sum).
  Eigen::VectorXd tail2, tail3;
};

double scaling_function(double gamma, IntegrabilityParam q, double eps, double lambda);

CoherenceTable fg_tables(const Germ& F, const TestFunction& phihat, const NormConfig& cfg,
                         const Grid& grid);
MSequences m_sequences(const CoherenceTable& table, double c2, double c3, double c4);
// Convention: m2 and m4 use c = gamma, m3 uses c = alpha + r.
MSequences m_sequences(const CoherenceTable& table, const NormConfig& cfg, int r);

double coherence_norm(const Germ& F, const TestFunction& phi, const NormConfig& cfg,
                      const Grid& grid);
double homogeneity_norm(const Germ& F, const TestFunction& phi, const NormConfig& cfg,
                        const Grid& grid);

struct GNormReport {
  double value = 0.0;
  double g = 0.0;
  double m1 = 0.0, m2 = 0.0, m3 = 0.0, m4 = 0.0;  // l^q norms of the (tail-augmented) sequences
  MSequences sequences;
};

GNormReport g_norm_report(const CoherenceTable& table, const NormConfig& cfg, int r);
double g_norm(const Germ& F, const TestFunction& phihat, const NormConfig& cfg, const Grid& grid,
              int r);

struct LocalMeansReport {
  double value = 0.0;
  int n0 = 0;
  Eigen::VectorXd per_n;         // normalised by 2^{-n alpha}
  Eigen::VectorXd unnormalized;
  double unit_term = 0.0;        // alpha >= 0 only
};

LocalMeansReport besov_localmeans(const Distribution& xi, double alpha, const NormConfig& cfg,
                                  const Grid& grid, int n0 = 0);
double besov_localmeans_norm(const Distribution& xi, double alpha, const NormConfig& cfg,
                             const Grid& grid, int n0 = 0);

// derivatives[k] = d^k f for k = 0..ceil(alpha)-1 at least.
double besov_taylor_norm(std::span<const SampledFunction> derivatives, double alpha,
                         IntegrabilityParam p, IntegrabilityParam q, double h0, Interval window,
                         int annulus_points = 8);

struct SeriesLemmaResult {
  Eigen::VectorXd u;
  double lhs = 0.0;
  double witness = 0.0;
  double constant = 0.0;
  bool bound_holds = false;
};

// u_n = sum_k a(k, n) 2^k int_{|h| <= 2^{1-k}} f_k(h) dh with f_table(k, s) sampled on the scheme.
SeriesLemmaResult series_lemma_verify(const Eigen::MatrixXd& a, const Eigen::MatrixXd& f_table,
                                      const DyadicAnnulusScheme& scheme, IntegrabilityParam q,
                                      double bound_a);

// Least-squares slope of log2(values[i]) against i over strictly positive entries.
double fitted_slope(const Eigen::Ref<const Eigen::VectorXd>& values);

}  // namespace germrec
