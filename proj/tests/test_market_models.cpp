#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "stathedge/errors.hpp"
#include "stathedge/market_models.hpp"

using namespace stathedge;
using namespace stathedge::models;

namespace {
Vec v1(double a) { return Vec::Constant(1, a); }
Vec v2(double a, double b) { Vec v(2); v << a, b; return v; }
}  // namespace

TEST(Generator, GbmUnderP) {
  const auto g = generator(make_model(Gbm1D{0.1, 0.2, 1.0}), Measure::P);
  EXPECT_NEAR(g.value({1, 0}, 0.0, v1(0.0)), 0.08, 1e-15);
  EXPECT_NEAR(g.value({2, 0}, 0.0, v1(0.0)), 0.02, 1e-15);
}

TEST(Generator, GbmUnderQ) {
  const auto g = generator(make_model(Gbm1D{0.1, 0.2, 1.0}), Measure::Q);
  EXPECT_NEAR(g.value({1, 0}, 0.0, v1(0.3)), -0.02, 1e-15);
  EXPECT_NEAR(g.value({2, 0}, 0.0, v1(0.3)), 0.02, 1e-15);
}

TEST(Generator, CevMatchesDirectSubstitution) {
  const double m = 0.1, d = 0.2, eta = 0.7;
  const auto g = generator(make_model(Cev{m, d, eta, 0.0}), Measure::P);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 10; ++i) {
    const double x = u(rng);
    const double a2 = 0.5 * d * d * std::exp(2 * (eta - 1) * x);
    EXPECT_NEAR(g.value({2, 0}, 0.0, v1(x)), a2, 1e-14);
    EXPECT_NEAR(g.value({1, 0}, 0.0, v1(x)), m - a2, 1e-14);
  }
}

TEST(Generator, CevDerivativesMatchFiniteDifferences) {
  const auto g = generator(make_model(Cev{0.1, 0.2, 0.7, 0.0}), Measure::P);
  const double x = 0.13, h = 1e-4;
  const double fd = (g.value({2, 0}, 0, v1(x + h)) - g.value({2, 0}, 0, v1(x - h))) / (2 * h);
  EXPECT_NEAR(g.derivative({2, 0}, {1, 0}, 0, v1(x)), fd, 1e-9);
}

TEST(Generator, SecondOrderIndependentOfMeasure) {
  for (const NamedModel& nm : {NamedModel{CorrelatedGbm2D{0.1, 0.05, 0.2, 0.3, 0.6, 1, 1}},
                               NamedModel{Heston{0.1, 1.0, 0.04, 0.1, -0.5, 0.0, 0.04}}}) {
    const auto model = make_model(nm);
    const auto p = generator(model, Measure::P), q = generator(model, Measure::Q);
    for (const auto& a : p.indices())
      if (order(a) == 2) EXPECT_DOUBLE_EQ(p.value(a, 0, v2(0.1, 0.05)), q.value(a, 0, v2(0.1, 0.05)));
  }
}

TEST(Generator, IndexSetHasFirstAndDistinctSecondOrders) {
  const auto g = generator(make_model(Heston{}), Measure::P);
  EXPECT_EQ(g.indices().size(), 2u + 3u);
}

TEST(Generator, CorrelatedCrossTerm) {
  const auto model = make_model(CorrelatedGbm2D{0.1, 0.1, 0.2, 0.3, 0.6, 1, 1});
  const Mat c = model.covariance_rate(0, v2(0.4, -0.2));
  EXPECT_NEAR(c(0, 1), 0.6 * 0.2 * 0.3, 1e-15);
  EXPECT_NEAR(c(1, 0), c(0, 1), 0.0);
  const auto g = generator(model, Measure::P);
  EXPECT_NEAR(g.value({1, 1}, 0, v2(0, 0)), 0.6 * 0.2 * 0.3, 1e-15);
  EXPECT_NEAR(g.value({0, 2}, 0, v2(0, 0)), 0.5 * 0.09, 1e-15);
}

TEST(Generator, HestonVarianceFlooredAtZero) {
  const auto model = make_model(Heston{0.1, 1.0, 0.04, 0.1, 0.0, 0.0, 0.04});
  const Mat c = model.covariance_rate(0, v2(0.0, -0.01));
  EXPECT_EQ(c(0, 0), 0.0);
  EXPECT_EQ(c(1, 1), 0.0);
}

TEST(DriftCheck, GbmMartingaleDrift) {
  const auto model = make_model(Gbm1D{0.1, 0.2, 1.0});
  std::vector<std::pair<double, Vec>> pts{{0.0, v1(0.0)}, {0.5, v1(-1.0)}, {1.0, v1(2.0)}};
  EXPECT_TRUE(martingale_drift_check(model, pts).ok);
}

TEST(DriftCheck, ZeroDriftUnderQIsRejected) {
  auto model = make_model(Gbm1D{0.1, 0.2, 1.0});
  model.drift_q = [](double, const Vec&) { return Vec::Zero(1); };
  std::vector<std::pair<double, Vec>> pts{{0.0, v1(0.0)}};
  EXPECT_FALSE(martingale_drift_check(model, pts).ok);
}

TEST(DriftCheck, HestonAndCev) {
  std::vector<std::pair<double, Vec>> pts2{{0.0, v2(0.0, 0.04)}, {0.3, v2(0.2, 0.09)}, {1.0, v2(-0.4, 0.0)}};
  EXPECT_TRUE(martingale_drift_check(make_model(Heston{}), pts2).ok);
  std::vector<std::pair<double, Vec>> pts1{{0.0, v1(0.0)}, {0.3, v1(0.5)}};
  EXPECT_TRUE(martingale_drift_check(make_model(Cev{0.1, 0.2, 0.7, 0.0}), pts1).ok);
}

TEST(Validate, RejectsBadParameters) {
  EXPECT_THROW(validate(Heston{0.1, -1.0, 0.04, 0.1, 0.0, 0.0, 0.04}), Error);
  EXPECT_THROW(validate(Heston{0.1, 1.0, 0.04, 0.1, 1.5, 0.0, 0.04}), Error);
  EXPECT_THROW(validate(Cev{0.1, 0.2, 1.2, 0.0}), Error);
  EXPECT_THROW(validate(Cev{0.1, 0.0, 0.7, 0.0}), Error);
  EXPECT_THROW(validate(CorrelatedGbm2D{0, 0, 0.2, 0.2, -1.01, 1, 1}), Error);
  EXPECT_NO_THROW(validate(Cev{0.1, 0.2, 1.0, 0.0}));
}

TEST(Measure, ParsesTags) {
  EXPECT_EQ(parse_measure("P"), Measure::P);
  EXPECT_EQ(parse_measure("Q"), Measure::Q);
  EXPECT_THROW(parse_measure("R"), Error);
}

TEST(RunningAverage, AppendsAverageCoordinate) {
  const auto m = with_running_average(make_model(Gbm1D{0.1, 0.2, 1.0}), 2.0);
  EXPECT_EQ(m.dim, 2);
  EXPECT_NEAR(m.drift(Measure::P, 0, v2(0.6, 0.0))[1], 0.3, 1e-15);
  EXPECT_NEAR(m.covariance_rate(0, v2(0.0, 0.0))(1, 1), 0.0, 0.0);
}
