#include "germrec/young.hpp"

#include <cmath>

#include "germrec/signals.hpp"

namespace germrec {

void YoungConfig::validate() const {
  if (!(alpha < 0.0)) throw Error(ErrorCode::ParameterViolation, "Young product needs alpha < 0");
  if (!(beta > 0.0)) throw Error(ErrorCode::ParameterViolation, "Young product needs beta > 0");
  if (!(alpha + beta > 0.0)) throw Error(ErrorCode::ParameterViolation, "Young product needs alpha + beta > 0");
  if (beta == std::floor(beta)) throw Error(ErrorCode::ParameterViolation, "beta must not be an integer");
  if (!(r > -alpha)) throw Error(ErrorCode::ParameterViolation, "need r > -alpha");
}

ReconstructionConfig YoungConfig::resolved() const {
  validate();
  ReconstructionConfig c = reconstruction;
  c.path = ReconstructionPath::Positive;
  c.norm.exponents = ExponentTriple{alpha, alpha, alpha + beta, true};
  c.norm.p = p();
  c.norm.q = q();
  c.norm.q1 = q1;
  c.norm.dictionary.r = r;
  return c;
}

Germ young_germ(const Distribution& g, std::span<const SampledFunction> f, const YoungConfig& cfg) {
  cfg.validate();
  const Germ taylor = taylor_germ(f, cfg.beta);
  return product_germ(g, taylor).with_exponents(ExponentTriple{cfg.alpha, cfg.alpha, cfg.alpha + cfg.beta, true});
}

ReconstructionResult young_product(const Distribution& g, std::span<const SampledFunction> f,
                                   const TestFunction& phihat, const YoungConfig& cfg, const Grid& grid) {
  const ReconstructionConfig rc = cfg.resolved();
  const Germ P = young_germ(g, f, cfg);
  ReconstructionResult res = reconstruct_pos(P, phihat, rc, grid);
  if (cfg.bound_report) reconstruction_bound_report(res, res.distribution, P, rc, grid);
  return res;
}

VQuantities v_quantities(const Distribution& g, std::span<const SampledFunction> f,
                         const TestFunction& phi, const YoungConfig& cfg, const Grid& grid) {
  const ReconstructionConfig rc = cfg.resolved();
  const Germ P = young_germ(g, f, cfg);
  const CoherenceTable table = fg_tables(P, phi, rc.norm, grid);
  const MSequences m = m_sequences(table, cfg.alpha + cfg.beta, cfg.alpha + cfg.r, cfg.alpha + cfg.beta);
  VQuantities v;
  v.v1 = lq_seq_norm(table.g, cfg.q1);
  v.v2 = lq_seq_norm(m.m1, rc.norm.q);
  v.v3 = lq_seq_norm(m.m2 + m.tail2, rc.norm.q);
  v.v4 = lq_seq_norm(m.m3 + m.tail3, rc.norm.q);
  v.tail3 = m.tail2.maxCoeff();
  v.tail4 = m.tail3.maxCoeff();
  return v;
}

double ibp_oracle(const SampledFunction& W, const SampledFunction& f, const SampledFunction& df,
                  const SampledFunction& psi) {
  require_same_grid(W.grid(), psi.grid());
  require_same_grid(f.grid(), psi.grid());
  require_same_grid(df.grid(), psi.grid());
  const SampledFunction dpsi = finite_difference(psi);
  return -integrate(W * (df * psi + f * dpsi));
}

}  // namespace germrec
