#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "stathedge/density_engine.hpp"
#include "stathedge/errors.hpp"
#include "stathedge/mc_oracle.hpp"
#include "stathedge/quadrature.hpp"
#include "test_util.hpp"

using namespace stathedge;
using namespace stathedge::density;
using models::Measure;

namespace {

Vec v1(double a) { return Vec::Constant(1, a); }

double dcoeff(const DiffOperator& op, int d1) {
  for (const auto& t : op.terms())
    if (t.d[0] == d1 && t.d[1] == 0 && t.x[0] == 0 && t.x[1] == 0) return t.c;
  return 0.0;
}

const models::Cev kFig4{0.1, 0.2, 0.7, 0.0};

double max_cev_error(int order, double T) {
  const auto model = models::make_model(kFig4);
  const auto approx = density_approx(model, Measure::P, {order, std::nullopt}, 0.0, v1(0.0), T);
  const double sd = std::sqrt(approx.kernel().covariance(0, 0));
  double err = 0.0;
  for (double y = -6 * sd; y <= 6 * sd; y += sd / 50)
    err = std::max(err, std::abs(approx.evaluate(y) - cev_log_density(kFig4, Measure::P, T, 0.0, y)));
  return err;
}

}  // namespace

TEST(Taylor, ConstantCoefficientHasNoFirstOrderTerm) {
  const auto g = models::generator(models::make_model(models::Gbm1D{0.1, 0.2, 1.0}), Measure::P);
  for (const auto& [alpha, poly] : taylor_coefficients(g, v1(0.0), 1)) EXPECT_TRUE(poly.is_zero());
}

TEST(Taylor, CevFirstOrderCoefficient) {
  const auto g = models::generator(models::make_model(kFig4), Measure::P);
  const auto t = taylor_coefficients(g, v1(0.0), 1);
  const auto& a2 = t.at({2, 0});
  Vec x = v1(1.0);
  EXPECT_NEAR(a2.evaluate_polynomial(x), 0.5 * 0.04 * 2 * (0.7 - 1), 1e-12);  // -0.012
  EXPECT_NEAR(t.at({1, 0}).evaluate_polynomial(x), 0.012, 1e-12);
}

TEST(Taylor, HestonAffineCoefficientsStopAtFirstOrder) {
  const auto g = models::generator(models::make_model(models::Heston{}), Measure::P);
  Vec xb(2);
  xb << 0.0, 0.04;
  for (int n : {2, 3})
    for (const auto& [alpha, poly] : taylor_coefficients(g, xb, n)) EXPECT_TRUE(poly.is_zero()) << n;
  const auto one = taylor_coefficients(g, xb, 1);
  Vec x(2);
  x << 0.3, 0.09;
  EXPECT_NEAR(one.at({0, 2}).evaluate_polynomial(x), 0.5 * 0.01 * 0.09, 1e-12);
}

TEST(Kernel, GbmMeanAndVariance) {
  const auto g = models::generator(models::make_model(models::Gbm1D{0.1, 0.2, 1.0}), Measure::P);
  const auto k = kernel_params(g, v1(0.0), v1(0.0), 0.0, 0.5);
  EXPECT_NEAR(k.mean[0], 0.04, 1e-14);
  EXPECT_NEAR(k.covariance(0, 0), 0.02, 1e-14);
}

TEST(Kernel, AsianGbmPair) {
  const double mu = 0.1, s = 0.2, T = 1.0, b = mu - 0.5 * s * s;
  const auto m = models::with_running_average(models::make_model(models::Gbm1D{mu, s, 1.0}), T);
  const auto g = models::generator(m, Measure::P);
  Vec x(2);
  x << 0.0, 0.0;
  const auto k = kernel_params(g, x, x, 0.0, T);
  EXPECT_NEAR(k.mean[0], b * T, 1e-12);
  EXPECT_NEAR(k.mean[1], 0.5 * b * T, 1e-12);
  EXPECT_NEAR(k.covariance(0, 0), s * s * T, 1e-12);
  EXPECT_NEAR(k.covariance(0, 1), 0.5 * s * s * T, 1e-12);
  EXPECT_NEAR(k.covariance(1, 1), s * s * T / 3, 1e-12);
  const double rho = k.covariance(0, 1) / std::sqrt(k.covariance(0, 0) * k.covariance(1, 1));
  EXPECT_NEAR(rho, std::sqrt(3.0) / 2, 1e-12);
}

TEST(ExpansionOperator, ConstantCoefficientsGiveZero) {
  const auto g = models::generator(models::make_model(models::Gbm1D{0.1, 0.2, 1.0}), Measure::P);
  for (int n : {1, 2, 3}) EXPECT_TRUE(expansion_operator(g, v1(0.0), n, 0.0, 1.0).is_zero());
}

TEST(ExpansionOperator, OrderAboveCapIsUnsupported) {
  const auto g = models::generator(models::make_model(kFig4), Measure::P);
  try {
    expansion_operator(g, v1(0.0), kMaxOrder + 1, 0.0, 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Unsupported);
  }
}

TEST(ExpansionOperator, CevFirstOrderMatchesHandExpansion) {
  // L1 = int_0^T G1(tau) dtau with X' = x' + m tau + v tau d; frozen at x' = 0:
  // (T^2/2) [a1' m d + (a1' v + a2' m) d^2 + a2' v d^3]
  const double T = 0.7, a2 = 0.02, a2p = -0.012, a1p = 0.012, v = 2 * a2, m = 0.1 - a2;
  const auto g = models::generator(models::make_model(kFig4), Measure::P);
  const auto L1 = expansion_operator(g, v1(0.0), 1, 0.0, T).freeze_at(v1(0.0));
  const double f = T * T / 2;
  EXPECT_NEAR(dcoeff(L1, 1), f * a1p * m, 1e-14);
  EXPECT_NEAR(dcoeff(L1, 2), f * (a1p * v + a2p * m), 1e-14);
  EXPECT_NEAR(dcoeff(L1, 3), f * a2p * v, 1e-14);
  EXPECT_EQ(L1.max_derivative_order(), 3);
}

TEST(DensityApprox, GbmOrderZeroIsExactLognormal) {
  const auto model = models::make_model(models::Gbm1D{0.1, 0.2, 1.0});
  const auto a = density_approx(model, Measure::P, {0, std::nullopt}, 0.0, v1(0.0), 0.5);
  for (double y : {-0.3, 0.0, 0.04, 0.2}) {
    const double z = (y - 0.04) / std::sqrt(0.02);
    EXPECT_NEAR(a.evaluate(y), std::exp(-0.5 * z * z) / std::sqrt(2 * std::numbers::pi * 0.02), 1e-14);
  }
}

TEST(DensityApprox, CevWithUnitElasticityStaysGaussian) {
  const auto model = models::make_model(models::Cev{0.1, 0.2, 1.0, 0.0});
  const auto a0 = density_approx(model, Measure::P, {0, std::nullopt}, 0.0, v1(0.0), 1.0);
  const auto a3 = density_approx(model, Measure::P, {3, std::nullopt}, 0.0, v1(0.0), 1.0);
  for (double y = -0.6; y < 0.7; y += 0.1) EXPECT_NEAR(a0.evaluate(y), a3.evaluate(y), 1e-14);
}

TEST(DensityApprox, CevErrorDecreasesWithOrder) {
  const double e0 = max_cev_error(0, 1.0), e1 = max_cev_error(1, 1.0), e2 = max_cev_error(2, 1.0);
  EXPECT_LT(e1, e0);
  EXPECT_LT(e2, e1);
}

TEST(DensityApprox, NormalizationWithinTolerance) {
  const auto cev = models::make_model(kFig4);
  for (int n : {0, 1, 2, 3})
    EXPECT_NEAR(density_approx(cev, Measure::P, {n, std::nullopt}, 0.0, v1(0.0), 1.0).normalization(), 1.0, 1e-3);
  const auto asian = models::with_running_average(cev, 1.0);
  Vec x(2);
  x << 0.0, 0.0;
  EXPECT_NEAR(density_approx(asian, Measure::P, {2, std::nullopt}, 0.0, x, 1.0).normalization(), 1.0, 1e-3);
}

TEST(ExpectationApprox, ConstantAndExponential) {
  const auto cev = models::make_model(kFig4);
  for (int n : {0, 1, 2})
    EXPECT_NEAR(expectation_approx(cev, Measure::P, {n, std::nullopt}, [](const Vec&) { return 1.0; }, 0, v1(0.0), 1.0), 1.0, 1e-9);
  const auto gbm = models::make_model(models::Gbm1D{0.1, 0.2, 1.0});
  EXPECT_NEAR(expectation_approx(gbm, Measure::P, {2, std::nullopt}, [](const Vec& y) { return std::exp(y[0]); }, 0, v1(0.0), 0.5),
              1.0512711, 1e-7);
}

TEST(ExpectationApprox, CevCallAgainstMonteCarlo) {
  testutil::use_all_cores();
  const auto cev = models::make_model(kFig4);
  const auto call = [](const Vec& y) { return std::max(std::exp(y[0]) - 1.0, 0.0); };
  const double u2 = expectation_approx(cev, Measure::P, {2, std::nullopt}, call, 0, v1(0.0), 1.0);
  const auto batch = mc::simulate(cev, Measure::P, mc::default_scheme(cev), 1.0, 1000000, 42);
  const auto e = mc::estimate(batch, [](const payoffs::TerminalState& s) { return std::max(std::exp(*s.x1) - 1.0, 0.0); });
  EXPECT_TRUE(testutil::within_mc(u2, e));
}

TEST(ExactDensity, GbmModeValue) {
  const auto f = exact_density(models::make_model(models::Gbm1D{0.1, 0.2, 1.0}), Measure::P, 0, v1(0.0), 0.5);
  EXPECT_NEAR(f(v1(0.04)), 1.0 / std::sqrt(2 * std::numbers::pi * 0.02), 1e-12);
}

TEST(ExactDensity, UncorrelatedPairFactorizes) {
  const auto m = models::make_model(models::CorrelatedGbm2D{0.1, 0.05, 0.2, 0.3, 0.0, 1.0, 1.0});
  Vec x(2);
  x << 0.0, 0.0;
  const auto f = exact_density(m, Measure::P, 0, x, 1.0);
  auto g = [](double y, double mean, double var) {
    return std::exp(-0.5 * (y - mean) * (y - mean) / var) / std::sqrt(2 * std::numbers::pi * var);
  };
  for (auto [a, b] : std::vector<std::pair<double, double>>{{0, 0}, {0.1, -0.2}, {-0.3, 0.4}, {0.2, 0.2}, {0.5, -0.1}}) {
    Vec y(2);
    y << a, b;
    EXPECT_NEAR(f(y), g(a, 0.08, 0.04) * g(b, 0.005, 0.09), 1e-12);
  }
}

TEST(ExactDensity, CevMassWithAbsorption) {
  const double mass = quad::integrate_piecewise(
      [](double u) { return cev_log_density(kFig4, Measure::P, 1.0, 0.0, u); }, -4.0, 3.0, {}, 0.05);
  EXPECT_GE(mass, 0.999);
  EXPECT_LE(mass, 1.0 + 1e-9);
  EXPECT_NEAR(mass + cev_absorption(kFig4, Measure::P, 1.0, 0.0), 1.0, 1e-8);
}

TEST(ExactDensity, UnsupportedWithoutClosedForm) {
  const auto h = models::make_model(models::Heston{});
  Vec x(2);
  x << 0.0, 0.04;
  try {
    exact_density(h, Measure::P, 0, x, 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Unsupported);
  }
}
