#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "stathedge/csv.hpp"
#include "stathedge/errors.hpp"
#include "stathedge/parallel.hpp"
#include "stathedge/quadrature.hpp"

using namespace stathedge;

TEST(Quadrature, GaussLegendreIsExactForPolynomials) {
  // degree 2n-1 = 15 with 8 nodes
  const double v = quad::integrate([](double x) { return std::pow(x, 15) + 3 * std::pow(x, 14); }, -1, 2, 8);
  const double exact = (std::pow(2.0, 16) - 1) / 16 + 3 * (std::pow(2.0, 15) + 1) / 15;
  EXPECT_NEAR(v, exact, 1e-9 * exact);
}

TEST(Quadrature, SimpsonHandlesOddIntervalCounts) {
  for (std::size_t n : {5u, 6u, 101u, 102u}) {
    const auto x = quad::linspace(0.0, 1.0, n);
    std::vector<double> f(n);
    for (std::size_t i = 0; i < n; ++i) f[i] = x[i] * x[i] * x[i];
    EXPECT_NEAR(quad::simpson(f, x[1] - x[0]), 0.25, 1e-14) << n;
  }
}

TEST(Quadrature, SplitWeightsIntegrateEachBranchSeparately) {
  // left branch x^2, right branch 5 + x^3, jump at 1.03 between nodes
  const auto K = quad::linspace(0.5, 1.5, 101);
  const double split = 1.03;
  const auto w = quad::split_weights(K, split);
  double s = 0.0;
  for (std::size_t j = 0; j < K.size(); ++j) s += w[j] * (K[j] < split ? K[j] * K[j] : 5 + std::pow(K[j], 3));
  const double exact = (std::pow(split, 3) - 0.125) / 3 + 5 * (1.5 - split) + (std::pow(1.5, 4) - std::pow(split, 4)) / 4;
  EXPECT_NEAR(s, exact, 1e-12);
}

TEST(Quadrature, SplitAtNodeMatchesTwoSimpsonRules) {
  const auto K = quad::linspace(0.5, 1.5, 401);
  const auto w = quad::split_weights(K, 1.0);
  double s = 0.0;
  for (std::size_t j = 0; j < K.size(); ++j) s += w[j] * (K[j] < 1.0 ? 1.0 : 2.0);
  EXPECT_NEAR(s, 0.5 + 1.0, 1e-13);
}

TEST(Quadrature, SecondDerivativeExactForQuintics) {
  const auto x = quad::linspace(-1.0, 2.0, 31);
  std::vector<double> f(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) f[i] = std::pow(x[i], 4) - 2 * x[i] * x[i] + x[i];
  const auto d = quad::second_derivative(f, x[1] - x[0]);
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(d[i], 12 * x[i] * x[i] - 4, 1e-9);
}

TEST(Quadrature, SecondDerivativeSplitIgnoresLinearJump) {
  const auto x = quad::linspace(0.0, 2.0, 41);
  const std::size_t m = quad::split_index(x, 1.0);
  std::vector<double> f(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) f[i] = std::sin(x[i]) + (i >= m ? 3.0 - 2.0 * x[i] : 0.0);
  const auto d = quad::second_derivative_split(f, x[1] - x[0], m);
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(d[i], -std::sin(x[i]), 1e-5);
}

TEST(Quadrature, NormalCdfTails) {
  EXPECT_NEAR(quad::normal_cdf(0.0), 0.5, 1e-16);
  EXPECT_NEAR(quad::normal_cdf(-8.0), 6.220960574271784e-16, 1e-28);
}

TEST(Parallel, ForPropagatesWorkerExceptions) {
  EXPECT_THROW(parallel_for(100, [](std::size_t i) { if (i == 77) throw std::runtime_error("x"); }, 4),
               std::runtime_error);
}

TEST(Parallel, ForCoversEveryIndexOnce) {
  std::vector<int> hit(1000, 0);
  parallel_for(hit.size(), [&](std::size_t i) { hit[i] += 1; }, 7);
  for (int h : hit) EXPECT_EQ(h, 1);
}

TEST(Parallel, PairwiseSumIsAccurate) {
  std::vector<double> v(1 << 20, 0.1);
  EXPECT_NEAR(pairwise_sum(v), 0.1 * (1 << 20), 1e-9);
}

TEST(Parallel, PhiloxKnownAnswers) {
  // Random123 known-answer vectors for Philox4x32-10
  auto a = philox4x32({0, 0, 0, 0}, {0, 0});
  EXPECT_EQ(a, (std::array<std::uint32_t, 4>{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
  auto b = philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0});
  EXPECT_EQ(b, (std::array<std::uint32_t, 4>{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
  // counter + 1, from the randomgen Philox(number=4, width=32) stream
  auto c = philox4x32({1, 0, 0, 0}, {0, 0});
  EXPECT_EQ(c, (std::array<std::uint32_t, 4>{0xf8e4cca4, 0x5cb200db, 0xb1a574eb, 0x097eff67}));
}

TEST(Parallel, PathStreamsAreReproducibleAndDistinct) {
  PathRng a(42, 7), b(42, 7), c(42, 8), d(43, 7);
  for (int i = 0; i < 10; ++i) {
    const auto x = a.next_u64();
    EXPECT_EQ(x, b.next_u64());
    EXPECT_NE(x, c.next_u64());
    EXPECT_NE(x, d.next_u64());
  }
}

TEST(Parallel, NormalsHaveUnitMoments) {
  double m1 = 0, m2 = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    PathRng r(5, static_cast<std::uint64_t>(i));
    const double z = r.normal();
    m1 += z;
    m2 += z * z;
  }
  EXPECT_NEAR(m1 / n, 0.0, 5 / std::sqrt(n));
  EXPECT_NEAR(m2 / n, 1.0, 5 * std::sqrt(2.0 / n));
}

TEST(Csv, SeventeenDigitsAndLf) {
  csv::Table t({"a", "b"});
  t.meta("k", 0.1);
  t.row({1.0 / 3.0, -2.5e-300});
  EXPECT_EQ(t.str(), "# k=0.10000000000000001\na,b\n0.33333333333333331,-2.5e-300\n");
}
