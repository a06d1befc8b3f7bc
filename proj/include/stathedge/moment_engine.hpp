#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "stathedge/market_models.hpp"
#include "stathedge/mc_oracle.hpp"
#include "stathedge/payoffs.hpp"

namespace stathedge::moments {

using models::Mat;
using models::Vec;

struct EngineOptions {
  double maturity = 1.0;
  /// Expansion order for models without a closed-form joint density.
  int expansion_order = 2;
  double density_floor = 1e-12;
};

/// Law of the log-price X = log S_T together with the claim conditioned on it:
/// c(x) = E[Xi | X = x], c2(x) = E[Xi^2 | X = x].
struct TerminalLaw {
  double s0 = 1.0;
  double center = 0.0;
  double spread = 1.0;
  std::function<double(double)> density_p;
  std::function<double(double)> density_q;
  std::function<std::pair<double, double>(double)> claim_moments;
  std::string engine;
};

/// Fails with unsupported for (model, claim) pairs without a conditional route (LETF under Heston).
TerminalLaw terminal_law(const models::ModelSpec& model, const payoffs::ClaimSpec& claim,
                         const EngineOptions& opt);

/// Quadrature nodes in x with the densities and conditional claim moments on them.
struct MarginalQuadrature {
  std::vector<double> x, w, p, pq, c, c2;
};

MarginalQuadrature build_quadrature(const TerminalLaw& law, std::vector<double> breaks,
                                    int workers = 0);

enum class InstrumentKind { Bond, Forward, Vanilla };

struct Instrument {
  InstrumentKind kind = InstrumentKind::Vanilla;
  double strike = 0.0;
  std::string label() const;
  double payoff(double s, double s0) const;
};

std::vector<Instrument> discrete_instruments(const payoffs::InstrumentSet& set);

struct DiscreteMoments {
  std::vector<Instrument> instruments;
  Mat psi;
  Vec gamma;
  Vec ztilde;
  double s0 = 1.0;
  double claim_mean = 0.0;
  double claim_second_moment = 0.0;
  std::string engine;
};

/// Redundant-instrument error (naming the strike pair) when psi is not positive definite.
DiscreteMoments discrete_moments(const models::ModelSpec& model,
                                 const payoffs::InstrumentSet& instruments,
                                 const payoffs::ClaimSpec& claim, const EngineOptions& opt);

struct ContinuousMoments {
  double s0 = 1.0;
  double beta = 0.0;           // E[S_T - S0]
  double Sigma = 0.0;          // E[(S_T - S0)^2]
  double xi_claim = 0.0;       // E[Xi]
  double theta_claim = 0.0;    // E[(S_T - S0) Xi]
  double claim_second_moment = 0.0;
  double h = 0.0;
  std::vector<double> K, z, y, ztilde, gamma, Gamma, Gamma_tilde, cond_claim;
  MarginalQuadrature quadrature;
  std::vector<std::string> warnings;
  std::string engine;
  std::size_t floored_points = 0;
};

ContinuousMoments continuous_moments(const models::ModelSpec& model,
                                     const payoffs::ContinuousBand& band,
                                     const payoffs::ClaimSpec& claim, const EngineOptions& opt);

/// E[Xi | S_T = K].
double conditional_claim(const models::ModelSpec& model, const payoffs::ClaimSpec& claim, double K,
                         const EngineOptions& opt);

/// Gamma~(K) / Gamma(K), with both log-price densities floored at opt.density_floor.
double density_ratio(const models::ModelSpec& model, double K, const EngineOptions& opt);

/// Monte Carlo estimate of E[f] under the model's default scheme.
mc::McEstimate mc_check(const models::ModelSpec& model, models::Measure measure,
                        const mc::Functional& f, double T, std::size_t paths, std::uint64_t seed,
                        std::optional<mc::SimScheme> scheme = std::nullopt);

void write_moments_csv(const ContinuousMoments& m, const std::string& path);

}  // namespace stathedge::moments
