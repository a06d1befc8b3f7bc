#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "stathedge/errors.hpp"
#include "stathedge/experiments.hpp"
#include "stathedge/hedge_optimizer.hpp"
#include "stathedge/quadrature.hpp"
#include "test_util.hpp"

using namespace stathedge;
using namespace stathedge::hedge;
using models::Measure;

namespace {

const models::CorrelatedGbm2D kFig(double rho) { return {0.1, 0.1, 0.2, 0.2, rho, 1.0, 1.0}; }

payoffs::InstrumentSet discrete_set(std::vector<double> k, bool forward = false) {
  payoffs::InstrumentSet s;
  s.includes_forward = forward;
  s.strikes = payoffs::DiscreteStrikes{std::move(k)};
  return s;
}

moments::DiscreteMoments fig2_moments() {
  return moments::discrete_moments(models::make_model(kFig(0.9)), discrete_set({0.7, 0.8, 0.9, 1.0, 1.1, 1.2, 1.3}),
                                   payoffs::CorrelatedCall{1.0}, {1.0, 2, 1e-12});
}

moments::ContinuousMoments fig1_moments(double rho) {
  return moments::continuous_moments(models::make_model(kFig(rho)), {0.5, 1.5, 401}, payoffs::CorrelatedCall{1.0},
                                     {0.5, 2, 1e-12});
}

payoffs::GenericEuropean square() {
  payoffs::GenericEuropean g;
  g.f = [](double s) { return (s - 1) * (s - 1); };
  g.df = [](double s) { return 2 * (s - 1); };
  g.d2f = [](double) { return 2.0; };
  return g;
}

double gbm_log_density(double x, double mu, double sigma, double T) {
  const double m = (mu - 0.5 * sigma * sigma) * T, v = sigma * sigma * T;
  return std::exp(-0.5 * (x - m) * (x - m) / v) / std::sqrt(2 * std::numbers::pi * v);
}

double portfolio_value(const ContinuousPortfolio& p, double s) { return portfolio_profile(p, {s})[0]; }

}  // namespace

TEST(SolveDiscrete, ReplicableClaim) {
  const auto m = models::make_model(models::Gbm1D{0.1, 0.2, 1.0});
  payoffs::GenericEuropean call;
  call.f = [](double s) { return std::max(s - 1.1, 0.0); };
  const auto d = moments::discrete_moments(m, discrete_set({0.9, 1.1}, true), call, {0.5, 2, 1e-12});
  const auto p = solve_discrete(d);
  ASSERT_EQ(p.pi.size(), 4);
  EXPECT_NEAR(p.pi[0], 0.0, 1e-7);
  EXPECT_NEAR(p.pi[1], 0.0, 1e-7);
  EXPECT_NEAR(p.pi[2], 0.0, 1e-7);
  EXPECT_NEAR(p.pi[3], 1.0, 1e-7);
  EXPECT_NEAR(p.objective, 0.0, 1e-8);
}

TEST(SolveDiscrete, BondOnlyGivesMeanAndVariance) {
  const auto d = moments::discrete_moments(models::make_model(kFig(0.5)), discrete_set({}), payoffs::CorrelatedCall{1.0},
                                           {1.0, 2, 1e-12});
  const auto p = solve_discrete(d);
  EXPECT_NEAR(p.pi[0], d.claim_mean, 1e-14);
  EXPECT_NEAR(p.objective, d.claim_second_moment - d.claim_mean * d.claim_mean, 1e-14);
  EXPECT_NEAR(hedge_error(d, p.pi), p.objective, 1e-14);
}

TEST(SolveDiscrete, FigureTwoConstrainedBranch) {
  const auto d = fig2_moments();
  const auto u = solve_discrete(d);
  EXPECT_EQ(u.branch, Branch::Unconstrained);
  EXPECT_EQ(u.lambda, 0.0);
  const double C = 0.5 * u.cost;
  const auto c = solve_discrete(d, CostConstraint{C});
  EXPECT_EQ(c.branch, Branch::Constrained);
  EXPECT_NEAR(d.ztilde.dot(c.pi), C, 1e-12);
  EXPECT_NEAR(c.cost, C, 1e-12);
  EXPECT_GE(hedge_error(d, c.pi), hedge_error(d, u.pi));
  EXPECT_LT(c.lambda, 0.0);
  EXPECT_LT(c.stationarity_residual, 1e-10);
  EXPECT_LT(std::abs(c.complementary_slackness), 1e-8);
}

TEST(SolveDiscrete, FirstOrderOptimality) {
  const auto d = fig2_moments();
  const auto u = solve_discrete(d);
  const auto c = solve_discrete(d, CostConstraint{0.5 * u.cost});
  const double ju = hedge_error(d, u.pi), jc = hedge_error(d, c.pi);
  for (Eigen::Index i = 0; i < u.pi.size(); ++i)
    for (double eps : {1e-4, -1e-4}) {
      Vec e = Vec::Zero(u.pi.size());
      e[i] = eps;
      EXPECT_GE(hedge_error(d, u.pi + e), ju - 1e-12);
      if (d.ztilde.dot(e) <= 0) EXPECT_GE(hedge_error(d, c.pi + e), jc - 1e-12);
    }
}

TEST(SolveDiscrete, BranchConsistency) {
  const auto d = fig2_moments();
  const auto u = solve_discrete(d);
  const auto c = solve_discrete(d, CostConstraint{u.cost + 1e-3});
  EXPECT_EQ(c.branch, Branch::Unconstrained);
  EXPECT_EQ(c.lambda, 0.0);
  EXPECT_LT((c.pi - u.pi).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(SolveDiscrete, ScaleEquivariance) {
  const auto m = models::make_model(models::Cev{0.1, 0.2, 0.7, 0.0});
  const auto set = discrete_set({0.9, 1.1}, true);
  const auto d1 = moments::discrete_moments(m, set, payoffs::power_claim(2.0, 1.0), {1.0, 2, 1e-12});
  const auto d2 = moments::discrete_moments(m, set, payoffs::power_claim(2.0, 3.0), {1.0, 2, 1e-12});
  EXPECT_LT((d2.gamma - 3.0 * d1.gamma).cwiseAbs().maxCoeff(), 1e-10);
  const auto u1 = solve_discrete(d1);
  const auto c1 = solve_discrete(d1, CostConstraint{0.6 * u1.cost});
  const auto c3 = solve_discrete(d2, CostConstraint{3.0 * 0.6 * u1.cost});
  EXPECT_EQ(c1.branch, c3.branch);
  EXPECT_LT((c3.pi - 3.0 * c1.pi).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(SolveDiscrete, ObjectiveAgainstMonteCarlo) {
  testutil::use_all_cores();
  const auto d = fig2_moments();
  const auto u = solve_discrete(d);
  const auto m = models::make_model(kFig(0.9));
  const auto b = mc::simulate(m, Measure::P, mc::default_scheme(m), 1.0, 1000000, 23);
  const auto e = mc::estimate(b, [&](const payoffs::TerminalState& s) {
    double v = 0.0;
    for (std::size_t i = 0; i < d.instruments.size(); ++i)
      v += u.pi[static_cast<Eigen::Index>(i)] * d.instruments[i].payoff(std::exp(*s.x1), 1.0);
    const double r = v - payoffs::claim_payoff(payoffs::CorrelatedCall{1.0}, s);
    return r * r;
  });
  EXPECT_TRUE(testutil::within_mc(u.objective, e));
}

TEST(PiOfKLambda, CarrMadanForSquare) {
  const auto c = moments::continuous_moments(models::make_model(models::Gbm1D{0.1, 0.2, 1.0}), {0.5, 1.5, 401}, square(),
                                             {0.5, 2, 1e-12});
  const auto pi = pi_of_K_lambda(c, 0.0);
  for (std::size_t j = 2; j + 2 < pi.size(); ++j) EXPECT_NEAR(pi[j], 2.0, 1e-4);
}

TEST(PiOfKLambda, IndependentClaimGivesZero) {
  const auto pi = pi_of_K_lambda(fig1_moments(0.0), 0.0);
  for (double v : pi) EXPECT_NEAR(v, 0.0, 1e-6);
}

TEST(PiOfKLambda, TooFewPoints) {
  moments::ContinuousMoments m;
  m.K = {0.9, 1.0, 1.1, 1.2};
  m.cond_claim = m.Gamma = m.Gamma_tilde = {1, 1, 1, 1};
  m.h = 0.1;
  EXPECT_THROW(pi_of_K_lambda(m, 0.0), Error);
}

TEST(SolveContinuous, QuadraticClaimOnWideBand) {
  const auto c = moments::continuous_moments(models::make_model(models::Gbm1D{0.1, 0.2, 1.0}), {0.2, 3.0, 401}, square(),
                                             {0.5, 2, 1e-12});
  const auto p = solve_continuous_unconstrained(c);
  EXPECT_NEAR(p.q, 0.0, 1e-6);
  EXPECT_NEAR(p.p, 0.0, 1e-6);
  for (std::size_t j = 2; j + 2 < p.pi.size(); ++j) EXPECT_NEAR(p.pi[j], 2.0, 1e-4);
  EXPECT_LT(p.objective, 1e-8);
  EXPECT_EQ(p.lambda, 0.0);
}

TEST(SolveContinuous, BondClaim) {
  payoffs::GenericEuropean one;
  one.f = [](double) { return 1.0; };
  one.df = one.d2f = [](double) { return 0.0; };
  const auto c = moments::continuous_moments(models::make_model(models::Gbm1D{0.1, 0.2, 1.0}), {0.5, 1.5, 201}, one,
                                             {0.5, 2, 1e-12});
  const auto p = solve_continuous_unconstrained(c);
  EXPECT_NEAR(p.q, 1.0, 1e-12);
  EXPECT_NEAR(p.p, 0.0, 1e-12);
  for (double v : p.pi) EXPECT_NEAR(v, 0.0, 1e-12);
  EXPECT_NEAR(p.objective, 0.0, 1e-12);
}

TEST(SolveContinuous, FigureOneObjectiveAgainstMonteCarlo) {
  const auto cfg = experiments::fig1_config(0.7);
  const auto run = experiments::run_continuous(cfg);
  const auto e = experiments::mc_objective(cfg, [&](double s) { return portfolio_value(run.portfolio, s); }, 17);
  EXPECT_TRUE(testutil::within_mc(run.portfolio.objective, e));
  EXPECT_NEAR(hedge_error(run.moments, run.portfolio), run.portfolio.objective, 1e-12);
}

TEST(SolveContinuous, ConstrainedBranchFigureOneRight) {
  const auto c = fig1_moments(0.55);
  const auto u = solve_continuous_unconstrained(c);
  const auto same = solve_continuous_constrained(c, CostConstraint{u.cost * 1.01});
  EXPECT_EQ(same.branch, Branch::Unconstrained);
  EXPECT_NEAR(same.q, u.q, 1e-8);
  EXPECT_NEAR(same.p, u.p, 1e-8);
  for (std::size_t j = 0; j < u.pi.size(); ++j) EXPECT_NEAR(same.pi[j], u.pi[j], 1e-8);
  const auto c75 = solve_continuous_constrained(c, CostConstraint{0.75 * u.cost});
  const auto c50 = solve_continuous_constrained(c, CostConstraint{0.5 * u.cost});
  EXPECT_EQ(c75.branch, Branch::Constrained);
  EXPECT_NEAR(c75.cost, 0.75 * u.cost, 1e-6);
  EXPECT_NEAR(c50.cost, 0.5 * u.cost, 1e-6);
  EXPECT_NE(c75.lambda, 0.0);
  EXPECT_GE(c50.objective, c75.objective);
  EXPECT_GE(c75.objective, u.objective);
}

TEST(SolveContinuous, AsianBeatsNaiveCall) {
  const auto cfg = experiments::fig4_config();
  const auto run = experiments::run_continuous(cfg);
  const auto model = cfg.build_model();
  const auto b = mc::simulate(model, Measure::P, experiments::scheme_for(cfg, model), cfg.maturity, 1000000, 19);
  const auto e = mc::estimate(b, [&](const payoffs::TerminalState& s) {
    const double xi = payoffs::claim_payoff(cfg.claim, s), st = std::exp(*s.x1);
    const double opt = portfolio_value(run.portfolio, st) - xi, naive = payoffs::vanilla_payoff(1.0, st, 1.0) - xi;
    return opt * opt - naive * naive;
  });
  EXPECT_LT(e.value + 3 * e.std_error, 0.0) << e.value << " " << e.std_error;
}

TEST(IntegralEquation, RoundTripGaussianBump) {
  const double mu = 0.1, sigma = 0.2, T = 0.5, s0 = 1.0;
  const auto K = quad::linspace(0.5, 1.5, 401);
  auto bump = [](double k) { return std::exp(-0.5 * std::pow((k - 1.05) / 0.1, 2)); };
  std::vector<double> pi0(K.size()), f(K.size()), Gamma(K.size());
  for (std::size_t j = 0; j < K.size(); ++j) pi0[j] = bump(K[j]);
  auto Pi = [&](double s) {
    const double brk[] = {s, s0};
    return quad::integrate_piecewise([&](double k) { return bump(k) * payoffs::vanilla_payoff(k, s, s0); }, 0.5, 1.5, brk, 0.05);
  };
  for (std::size_t j = 0; j < K.size(); ++j) {
    const double brk[] = {std::log(K[j]), 0.0, std::log(0.5), std::log(1.5)};
    f[j] = quad::integrate_piecewise(
        [&](double x) { return payoffs::vanilla_payoff(K[j], std::exp(x), s0) * Pi(std::exp(x)) * gbm_log_density(x, mu, sigma, T); },
        -2.0, 2.0, brk, 0.02);
    Gamma[j] = gbm_log_density(std::log(K[j]), mu, sigma, T) / K[j];
  }
  const auto pi = integral_equation_solve(K, f, Gamma, s0);
  double worst = 0.0;
  for (std::size_t j = 10; j + 10 < K.size(); ++j) worst = std::max(worst, std::abs(pi[j] - pi0[j]));
  EXPECT_LT(worst, 1e-2);
}

TEST(IntegralEquation, ClaimGammaRecoversSecondDerivative) {
  const auto c = moments::continuous_moments(models::make_model(models::Gbm1D{0.1, 0.2, 1.0}), {0.5, 1.5, 401}, square(),
                                             {0.5, 2, 1e-12});
  const auto pi = integral_equation_solve(c.K, c.gamma, c.Gamma, c.s0);
  for (std::size_t j = 10; j + 10 < pi.size(); ++j) EXPECT_NEAR(pi[j], 2.0, 1e-2) << c.K[j];
}

TEST(IntegralEquation, ZeroInZeroOut) {
  const auto K = quad::linspace(0.5, 1.5, 41);
  const std::vector<double> zero(K.size(), 0.0), G(K.size(), 1.0);
  for (double v : integral_equation_solve(K, zero, G, 1.0)) EXPECT_EQ(v, 0.0);
}

TEST(Profile, BondOnlyIsFlat) {
  DiscretePortfolio p;
  p.instruments = {moments::Instrument{moments::InstrumentKind::Bond, 0.0}};
  p.pi = Vec::Ones(1);
  for (double v : portfolio_profile(p, 1.0, quad::linspace(0.5, 1.5, 11))) EXPECT_EQ(v, 1.0);
}

TEST(Profile, CarrMadanSquare) {
  const auto g = square();
  const auto p = carr_madan_weights(g.f, g.df, g.d2f, 1.0, quad::linspace(0.5, 1.5, 401));
  EXPECT_EQ(p.q, 0.0);
  EXPECT_EQ(p.p, 0.0);
  for (double v : p.pi) EXPECT_EQ(v, 2.0);
  const auto s = quad::linspace(0.5, 1.5, 101);
  const auto phi = portfolio_profile(p, s);
  for (std::size_t i = 0; i < s.size(); ++i) EXPECT_NEAR(phi[i], (s[i] - 1) * (s[i] - 1), 1e-4);
}

TEST(CarrMadan, Linear) {
  const auto p = carr_madan_weights([](double s) { return s; }, [](double) { return 1.0; }, [](double) { return 0.0; }, 1.3,
                                    quad::linspace(0.5, 1.5, 11));
  EXPECT_EQ(p.q, 1.3);
  EXPECT_EQ(p.p, 1.0);
  for (double v : p.pi) EXPECT_EQ(v, 0.0);
}

TEST(CarrMadan, SoftplusApproximatesCall) {
  const auto g = payoffs::softplus_call(1.05, 1e-3);
  const auto p = carr_madan_weights(g.f, g.df, g.d2f, 1.0, quad::linspace(0.5, 1.5, 4001));
  const auto peak = std::max_element(p.pi.begin(), p.pi.end()) - p.pi.begin();
  EXPECT_NEAR(p.K[static_cast<std::size_t>(peak)], 1.05, 1e-3);
  const auto m = models::make_model(models::Gbm1D{0.1, 0.2, 1.0});
  const auto b = mc::simulate(m, Measure::P, mc::default_scheme(m), 0.5, 100000, 29);
  const auto e = mc::estimate(b, [&](const payoffs::TerminalState& s) {
    const double st = std::exp(*s.x1), r = portfolio_value(p, st) - std::max(st - 1.05, 0.0);
    return r * r;
  });
  EXPECT_LE(e.value, 1e-4);
}

TEST(Csv, ContinuousHeaderCarriesScalars) {
  const auto c = fig1_moments(0.7);
  const auto p = solve_continuous_unconstrained(c);
  const auto path = (std::filesystem::temp_directory_path() / "stathedge_cont.csv").string();
  write_continuous_csv(p, path);
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  const auto text = ss.str();
  for (const char* key : {"# q=", "# p=", "# lambda=", "# cost=", "# J=", "K,pi_K"})
    EXPECT_NE(text.find(key), std::string::npos) << key;
  EXPECT_EQ(text.find('\r'), std::string::npos);
}
