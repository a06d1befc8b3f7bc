#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "stathedge/config.hpp"
#include "stathedge/hedge_optimizer.hpp"
#include "stathedge/mc_oracle.hpp"

namespace stathedge::experiments {

struct Context {
  std::string out_dir = "out";
  std::uint64_t seed = 1;
  int workers = 0;
};

struct Check {
  std::string name;
  bool ok = true;
  std::string detail;
};

struct Report {
  std::vector<std::string> files;
  std::vector<Check> checks;
  std::vector<std::string> warnings;
  bool ok() const;
};

/// C from the config: absolute cap, or a fraction of the unconstrained cost.
std::optional<hedge::CostConstraint> resolve_constraint(const config::ExperimentConfig& cfg,
                                                        double unconstrained_cost);

struct DiscreteRun {
  moments::DiscreteMoments moments;
  hedge::DiscretePortfolio unconstrained;
  hedge::DiscretePortfolio portfolio;
};
DiscreteRun run_discrete(const config::ExperimentConfig& cfg);

struct ContinuousRun {
  moments::ContinuousMoments moments;
  hedge::ContinuousPortfolio unconstrained;
  hedge::ContinuousPortfolio portfolio;
};
ContinuousRun run_continuous(const config::ExperimentConfig& cfg);

/// Terminal prices at which profiles are emitted.
std::vector<double> profile_grid(const config::ExperimentConfig& cfg);

mc::SimScheme scheme_for(const config::ExperimentConfig& cfg, const models::ModelSpec& model);

/// MC estimate of E[(V_T - Xi_T)^2] under P.
mc::McEstimate mc_objective(const config::ExperimentConfig& cfg,
                            const std::function<double(double)>& portfolio_payoff,
                            std::uint64_t seed, int workers = 0);

Report hedge_discrete(const config::ExperimentConfig& cfg, const Context& ctx);
Report hedge_continuous(const config::ExperimentConfig& cfg, const Context& ctx);
Report profile(const config::ExperimentConfig& cfg, const Context& ctx);
/// Cross-engine and Monte Carlo checks of the moments and of the objective.
Report validate(const config::ExperimentConfig& cfg, const Context& ctx);
/// Data behind figure 1..4.
Report figure(int which, const Context& ctx);

config::ExperimentConfig fig1_config(double rho);
config::ExperimentConfig fig2_config(double rho);
config::ExperimentConfig fig3_config(double ell);
config::ExperimentConfig fig4_config();

}  // namespace stathedge::experiments
