#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "stathedge/moment_engine.hpp"

namespace stathedge::hedge {

using models::Mat;
using models::Vec;

/// Budget on the initial cost of the hedge: E_Q[portfolio] <= C.
struct CostConstraint {
  double C = 0.0;
};

enum class Branch { Unconstrained, Constrained };

const char* to_string(Branch b);

struct DiscretePortfolio {
  std::vector<moments::Instrument> instruments;
  Vec pi;
  double lambda = 0.0;
  Branch branch = Branch::Unconstrained;
  double cost = 0.0;
  double objective = 0.0;
  /// ||2 psi pi - 2 (gamma + lambda ztilde / 2)||_inf
  double stationarity_residual = 0.0;
  /// lambda (cost - C); zero when unconstrained.
  double complementary_slackness = 0.0;
};

/// Redundant-instrument error when psi has no Cholesky factor.
DiscretePortfolio solve_discrete(const moments::DiscreteMoments& m,
                                 std::optional<CostConstraint> constraint = std::nullopt);

/// pi' psi pi - 2 gamma' pi + E[Xi^2].
double hedge_error(const moments::DiscreteMoments& m, const Vec& pi);

struct ContinuousPortfolio {
  std::vector<double> K;
  std::vector<double> pi;
  double q = 0.0;  // bond
  double p = 0.0;  // forward
  double lambda = 0.0;
  Branch branch = Branch::Unconstrained;
  double cost = 0.0;
  double objective = 0.0;
  double s0 = 1.0;
};

/// d^2/dK^2 [ c(K) + (lambda/2) Gamma~(K)/Gamma(K) ] on the grid, c the conditional claim.
/// Grid error below 5 points.
std::vector<double> pi_of_K_lambda(const moments::ContinuousMoments& m, double lambda);

ContinuousPortfolio solve_continuous_unconstrained(const moments::ContinuousMoments& m);

/// Returns the unconstrained solution when its cost is within budget.
ContinuousPortfolio solve_continuous_constrained(const moments::ContinuousMoments& m,
                                                 CostConstraint constraint);

ContinuousPortfolio solve_continuous(const moments::ContinuousMoments& m,
                                     std::optional<CostConstraint> constraint = std::nullopt);

/// E[(Phi(S_T) - Xi)^2] of a strip portfolio, from the conditional claim moments.
double hedge_error(const moments::ContinuousMoments& m, const ContinuousPortfolio& port);

/// Solves f(K) = int pi(K') psi(K, K') dK' for pi, i.e. pi = d^2/dK^2 [ f''(K) / Gamma(K) ].
/// f follows the put/call convention so it may jump at `split` (usually S0); the derivatives are
/// taken separately on each side.
std::vector<double> integral_equation_solve(const std::vector<double>& K,
                                            const std::vector<double>& f,
                                            const std::vector<double>& Gamma, double split);

/// int pi(K) g(K, s) dK over the strip, split at the put/call boundary.
double strip_value(const std::vector<double>& K, const std::vector<double>& weights,
                   const std::vector<double>& pi, double s, double s0);

/// Payoff of the hedge at each terminal price.
std::vector<double> portfolio_profile(const ContinuousPortfolio& port, const std::vector<double>& s);
std::vector<double> portfolio_profile(const DiscretePortfolio& port, double s0,
                                      const std::vector<double>& s);

/// Static replication f(S) = f(S0) + f'(S0)(S - S0) + int f''(K) g(K, S) dK.
ContinuousPortfolio carr_madan_weights(const std::function<double(double)>& f,
                                       const std::function<double(double)>& df,
                                       const std::function<double(double)>& d2f, double s0,
                                       const std::vector<double>& K);

void write_discrete_csv(const DiscretePortfolio& port, const std::string& path);
void write_continuous_csv(const ContinuousPortfolio& port, const std::string& path);
void write_profile_csv(const std::vector<double>& s, const std::vector<double>& phi,
                       const std::string& path);

}  // namespace stathedge::hedge
