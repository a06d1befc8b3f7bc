#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "stathedge/market_models.hpp"
#include "stathedge/payoffs.hpp"

namespace stathedge::mc {

enum class SchemeKind { ExactLognormal, ExactGaussian2D, EulerFullTruncation, EulerLog };

struct SimScheme {
  SchemeKind kind = SchemeKind::EulerLog;
  int steps_per_year = 250;
  /// Overrides steps_per_year when set.
  std::optional<int> total_steps;
  bool record_second = true;  // X2_T (second asset, variance, or running average)
  bool record_qv = true;      // <X1>_T
};

SimScheme default_scheme(const models::ModelSpec& model);

struct PathBatch {
  std::vector<double> x1;  // log S_T
  std::vector<double> x2;
  std::vector<double> qv;
  double x1_0 = 0.0;
  std::uint64_t seed = 0;
  std::size_t paths = 0;
  int steps = 0;
  SimScheme scheme;

  payoffs::TerminalState state(std::size_t i) const;
};

/// Simulates `paths` independent paths to maturity T. Path i always uses stream i of the seed,
/// so the batch does not depend on the worker count.
PathBatch simulate(const models::ModelSpec& model, models::Measure measure, const SimScheme& scheme,
                   double T, std::size_t paths, std::uint64_t seed, int workers = 0);

struct McEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t paths = 0;
  std::uint64_t seed = 0;
};

using Functional = std::function<double(const payoffs::TerminalState&)>;

McEstimate estimate(const PathBatch& batch, const Functional& f, int workers = 0);

/// Mean and standard error of precomputed per-path samples (pairwise reduction).
McEstimate summarize(std::span<const double> samples, std::uint64_t seed);

}  // namespace stathedge::mc
