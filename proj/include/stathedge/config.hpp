#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "stathedge/market_models.hpp"
#include "stathedge/moment_engine.hpp"
#include "stathedge/payoffs.hpp"

namespace stathedge::config {

struct SolverSettings {
  int expansion_order = 2;
  double density_floor = 1e-12;
  std::size_t mc_paths = 1000000;
  int steps_per_year = 250;
  std::optional<int> total_steps;
  int workers = 0;
};

struct ExperimentConfig {
  models::NamedModel model;
  /// Adds the running average of the log-price as coordinate 2 (Asian claims).
  bool running_average = false;
  payoffs::ClaimSpec claim;
  payoffs::InstrumentSet instruments;
  std::optional<double> cost_cap;       // absolute C
  std::optional<double> cost_fraction;  // C as a fraction of the unconstrained cost, in (0, 1]
  double maturity = 1.0;
  SolverSettings solver;
  std::uint64_t seed = 1;
  std::string output_dir = "out";

  models::ModelSpec build_model() const;
  moments::EngineOptions engine_options() const;
  bool continuous() const;
};

/// Config errors carry the dotted field path, e.g. "model.sigma: expected a number".
ExperimentConfig parse_string(const std::string& text, const std::string& origin = "<string>");
ExperimentConfig parse_file(const std::string& path);

}  // namespace stathedge::config
