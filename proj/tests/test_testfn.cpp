#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "germrec/testfn.hpp"

using namespace germrec;

namespace {

const Grid kGrid(8.0, 12);

// Frozen from an independent 30-digit adaptive quadrature of exp(-1/(1-x^2)).
constexpr double kBumpMass = 0.443993816168079437823;
constexpr double kBumpM2 = 0.0702014767529754099884;
constexpr double kBumpM4 = 0.0235235995711447684168;

void expect_code(ErrorCode code, const std::function<void()>& fn) {
  try {
    fn();
    ADD_FAILURE() << "no exception";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), code) << e.what();
  }
}

}  // namespace

TEST(StandardBump, Values) {
  const TestFunction phi = standard_bump();
  EXPECT_NEAR(phi(0.0), std::exp(-1.0), 1e-15);
  EXPECT_EQ(phi(1.0), 0.0);
  EXPECT_EQ(phi(-1.0), 0.0);
  EXPECT_EQ(phi(1.5), 0.0);
  EXPECT_DOUBLE_EQ(phi.support_radius(), 1.0);
  EXPECT_NEAR(phi.moment(1), 0.0, 1e-12);
}

TEST(Moments, QuadratureOracle) {
  const TestFunction phi = standard_bump();
  const Eigen::VectorXd m = moments(phi, 5);
  EXPECT_NEAR(m[0], kBumpMass, 1e-8);
  EXPECT_NEAR(m[2], kBumpM2, 1e-8);
  EXPECT_NEAR(m[4], kBumpM4, 1e-8);
  for (int k : {1, 3, 5}) EXPECT_NEAR(m[k], 0.0, 1e-12);
}

TEST(Moments, ScalingIdentity) {
  const TestFunction phi = standard_bump();
  const double lam = 0.3;
  const Eigen::VectorXd m = moments(phi, 4);
  const Eigen::VectorXd ms = moments(phi.scaled(lam), 4);
  for (int k = 0; k <= 4; ++k) EXPECT_NEAR(ms[k], std::pow(lam, k) * m[k], 1e-8);
}

TEST(ScaleRecenter, Examples) {
  const TestFunction phi = standard_bump();
  const SampledFunction one = scale_recenter(phi, 0.0, 1.0, kGrid);
  const SampledFunction direct = phi.sample(kGrid);
  EXPECT_EQ((one - direct).values().cwiseAbs().maxCoeff(), 0.0);
  EXPECT_NEAR(scale_recenter(phi, 0.0, 0.5, kGrid).at(kGrid.nearest_index(0.0)), 2.0 * std::exp(-1.0), 1e-14);
  EXPECT_NEAR(integrate(scale_recenter(phi, 0.3, 0.25, kGrid)), kBumpMass, 1e-8);
}

TEST(ScaleRecenter, Errors) {
  const TestFunction phi = standard_bump();
  expect_code(ErrorCode::SupportOverflow, [&] { scale_recenter(phi, 7.5, 1.0, kGrid); });
  expect_code(ErrorCode::ParameterViolation, [&] { scale_recenter(phi, 0.0, 4.0 * kGrid.spacing(), kGrid); });
}

TEST(ScaleRecenter, Composition) {
  const TestFunction phi = standard_bump();
  const SampledFunction a = scale_recenter(phi.scaled(0.5), 0.0, 0.5, kGrid);
  const SampledFunction b = scale_recenter(phi, 0.0, 0.25, kGrid);
  EXPECT_LT((a - b).values().cwiseAbs().maxCoeff(), 4.0 * kGrid.spacing());
}

TEST(Tweak, OrderOne) {
  const TestFunction phi = standard_bump();
  const TweakResult t = tweak_detailed(phi, 1, {0.25});
  ASSERT_EQ(t.coefficients.size(), 1);
  EXPECT_NEAR(t.coefficients[0], 1.0, 1e-14);
  EXPECT_NEAR(t.phihat(0.0), std::exp(-1.0) * 4.0 / kBumpMass, 1e-12);
}

TEST(Tweak, EvenBumpOrderThree) {
  // 2x2 linear solve: c0 + c1 = 1, c0/16 + c1/64 = 0.
  const TweakResult t = tweak_detailed(standard_bump(), 3, {0.25, 0.125});
  ASSERT_EQ(t.coefficients.size(), 2);
  EXPECT_NEAR(t.coefficients[0], -1.0 / 3.0, 1e-10);
  EXPECT_NEAR(t.coefficients[1], 4.0 / 3.0, 1e-10);
  EXPECT_EQ(t.active_rows, (std::vector<int>{0, 2}));
}

TEST(Tweak, MomentsVanish) {
  const TestFunction phi = standard_bump();
  const TestFunction shifted = phi.recentered(0.2, 1.0);  // generic moments
  for (const TestFunction& base : {phi, shifted}) {
    for (int r = 1; r <= 4; ++r) {
      const TestFunction hat = tweak(base, r);
      EXPECT_NEAR(hat.moment(0), 1.0, 1e-9);
      for (int k = 1; k < r; ++k) EXPECT_NEAR(hat.moment(k), 0.0, 1e-8) << "r=" << r << " k=" << k;
      EXPECT_LE(hat.support_radius(), 0.5 + 1e-12);
    }
  }
}

TEST(Tweak, Errors) {
  const TestFunction phi = standard_bump();
  expect_code(ErrorCode::ScaleTooLarge, [&] { tweak(phi, 2, {0.5}); });
  expect_code(ErrorCode::DegenerateSystem, [&] { tweak(phi, 3, {0.25}); });
  expect_code(ErrorCode::DegenerateSystem, [&] { tweak(phi.recentered(0.2, 1.0), 3, {0.1, 0.1}); });
}

TEST(Phicheck, Moments) {
  for (int r = 1; r <= 4; ++r) {
    const TestFunction hat = tweak(standard_bump(), r);
    const TestFunction chk = make_phicheck(hat);
    EXPECT_NEAR(chk.moment(0), 0.0, 1e-9);
    for (int k = 1; k < r; ++k) EXPECT_NEAR(chk.moment(k), 0.0, 1e-8);
    EXPECT_LE(chk.support_radius(), 1.0 + 1e-12);
    EXPECT_LE(chk.sup_norm(), 4.0 * hat.sup_norm() * (1.0 + 1e-12));
  }
}

TEST(Mollifier, MassSymmetryTelescoping) {
  const TestFunction hat = tweak(standard_bump(), 2);
  const TestFunction rho = mollifier(hat);
  EXPECT_NEAR(rho.moment(0), 1.0, 1e-8);
  EXPECT_LE(rho.support_radius(), 1.5 + 1e-12);
  for (double x : {0.1, 0.37, 0.8}) EXPECT_NEAR(rho(x), rho(-x), 1e-12);

  // n = 0 telescoping: both sides sampled independently on the grid.
  const SampledFunction lhs = mollifier_at_scale(hat, 0.5, kGrid) - mollifier_at_scale(hat, 1.0, kGrid);
  const SampledFunction rhs = convolution(hat, make_phicheck(hat)).sample(kGrid);
  const double rho_sup = rho.sample(kGrid).values().cwiseAbs().maxCoeff();
  EXPECT_LE((lhs - rhs).values().cwiseAbs().maxCoeff(), 1e-8 * rho_sup);
}

TEST(Mollifier, TelescopingLevels) {
  const TestFunction hat = tweak(standard_bump(), 3);
  const TestFunction chk = make_phicheck(hat);
  for (int n = 0; n <= 6; ++n) {
    const double lam = std::ldexp(1.0, -n);
    const SampledFunction lhs = mollifier_at_scale(hat, 0.5 * lam, kGrid) - mollifier_at_scale(hat, lam, kGrid);
    const SampledFunction rhs = convolution(hat.scaled(lam), chk.scaled(lam)).sample(kGrid);
    EXPECT_LE((lhs - rhs).values().cwiseAbs().maxCoeff(), 1e-6 * std::ldexp(1.0, n)) << "n=" << n;
  }
}

TEST(Annihilation, PolynomialPlateau) {
  const TestFunction chk = make_phicheck(tweak(standard_bump(), 3));
  // Quadratic times a wide plateau, flat near the centre.
  const TestFunction eta({Atom{1.0, 0.0, 3.0, function_profile([](double u) {
                                const double p = std::abs(u) < 0.6 ? 1.0 : bump((std::abs(u) - 0.6) / 0.4) / std::exp(-1.0);
                                return (1.0 + 3.0 * u + 2.0 * u * u) * p;
                              }, 0.1)}});
  const AnnihilationCheck a = annihilation_bound_check(chk, eta, 0.125, 3, std::vector<double>{0.0, 0.1});
  EXPECT_LE(a.lhs, 1e-8);
}

TEST(Annihilation, HalvingRatio) {
  const TestFunction chk = make_phicheck(tweak(standard_bump(), 2));
  const TestFunction eta = standard_bump().recentered(0.1, 1.0);
  const double l1 = annihilation_bound_check(chk, eta, 0.125, 2, kGrid).lhs;
  const double l2 = annihilation_bound_check(chk, eta, 0.0625, 2, kGrid).lhs;
  EXPECT_NEAR(l2 / l1, 0.25, 0.05);
}

TEST(Annihilation, RandomCases) {
  const TestFunction chk = make_phicheck(tweak(standard_bump(), 3));
  const auto panel = test_panel(10);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 20; ++i) {
    const TestFunction& eta = panel[i % panel.size()];
    const double lam = std::ldexp(1.0, -2 - static_cast<int>(u(rng) * 5));
    const AnnihilationCheck a = annihilation_bound_check(chk, eta, lam, 3, kGrid);
    EXPECT_LE(a.lhs, a.rhs * (1.0 + 1e-9)) << "case " << i;
  }
}

TEST(Dictionary, Construction) {
  const Dictionary d = build_dictionary(2, -1, 16, 42);
  ASSERT_EQ(d.members.size(), 16u);
  for (const auto& psi : d.members) {
    EXPECT_NEAR(psi.cr_norm(2), 1.0, 1e-6);
    EXPECT_LE(psi.support_radius(), 1.0 + 1e-12);
  }
  const Dictionary d0 = build_dictionary(2, 0, 8, 3);
  for (const auto& psi : d0.members) {
    EXPECT_NEAR(psi.cr_norm(2), 1.0, 1e-6);
    EXPECT_LE(std::abs(psi.moment(0)), 1e-8);
  }
  const Dictionary again = build_dictionary(2, -1, 16, 42);
  for (std::size_t i = 0; i < d.members.size(); ++i) {
    const Eigen::VectorXd a = d.members[i].sample(kGrid).values();
    const Eigen::VectorXd b = again.members[i].sample(kGrid).values();
    EXPECT_TRUE(a == b);
  }
}

TEST(KernelWeights, ReproducesCubics) {
  const TestFunction phi = tweak(standard_bump(), 2).recentered(0.0, 0.01);
  const double d = kGrid.spacing();
  const KernelWeights kw = kernel_weights(phi, d, 0.25, 1);
  // int (x_p + theta*d + s) s phi(s) ds with data x^1; exact for cubic data.
  double acc = 0.0;
  for (Index i = 0; i < kw.w.size(); ++i) acc += kw.w[i] * (static_cast<double>(kw.m_min + i) * d);
  const double oracle = phi.integrate_against([&](double s) { return (0.25 * d + s) * s; });
  EXPECT_NEAR(acc, oracle, 1e-14);
}
