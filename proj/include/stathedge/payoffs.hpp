#pragma once

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace stathedge::payoffs {

/// Put below s0, call at or above: (K - s)^+ for K < s0, (s - K)^+ for K >= s0.
double vanilla_payoff(double strike, double s, double s0);

inline bool is_call(double strike, double s0) { return strike >= s0; }

/// L0 * exp(ell (x1_T - x1_0) + ell (1 - ell) qv_T / 2).
double letf_terminal(double ell, double l0, double x1_T, double x1_0, double qv_T);

/// Claim on a second asset: (exp(X2_T) - K')^+.
struct CorrelatedCall {
  double kprime = 1.0;
};

/// Call on a leveraged fund: (L_T - K')^+ with L_T from letf_terminal.
struct LetfCall {
  double kprime = 1.0;
  double ell = 3.0;
  double l0 = 1.0;
};

/// (exp(X2_T) - K')^+ where X2 is the running average of the log-price.
struct GeometricAsianCall {
  double kprime = 1.0;
};

/// f(S_T). Derivatives are optional; missing ones fall back to central differences (h = 1e-4).
struct GenericEuropean {
  std::function<double(double)> f;
  std::function<double(double)> df;
  std::function<double(double)> d2f;
  std::string label = "generic";

  double value(double s) const { return f(s); }
  double first_derivative(double s) const;
  double second_derivative(double s) const;
};

using ClaimSpec = std::variant<CorrelatedCall, LetfCall, GeometricAsianCall, GenericEuropean>;

/// Coordinates recorded at maturity. A claim reads only what it needs.
struct TerminalState {
  std::optional<double> x1;      // log-price of the hedging underlying
  std::optional<double> x2;      // second coordinate (correlated log-price or running average)
  std::optional<double> qv;      // quadratic variation of x1
  std::optional<double> x1_0;    // initial log-price, needed by LETF claims
};

/// Payoff of the claim; state-mismatch error when a needed coordinate is absent.
double claim_payoff(const ClaimSpec& claim, const TerminalState& state);

/// Warns (returns false) when ell is outside the common ratios {-3,-2,-1,2,3}.
bool is_common_leverage(double ell);

std::string claim_name(const ClaimSpec& claim);

/// Continuous strike band [lower, upper] with grid_size points.
struct ContinuousBand {
  double lower = 0.5;
  double upper = 1.5;
  std::size_t grid_size = 401;
};

struct DiscreteStrikes {
  std::vector<double> strikes;
};

struct InstrumentSet {
  bool includes_bond = true;
  bool includes_forward = true;
  std::variant<ContinuousBand, DiscreteStrikes> strikes;
  double s0 = 1.0;
};

/// Checks 0 <= L <= s0 <= R and sorted, distinct discrete strikes.
void validate(const InstrumentSet& set);

/// Smooth (s - k)^+ via a softplus of the given width.
GenericEuropean softplus_call(double strike, double width);

GenericEuropean power_claim(double exponent, double scale);

}  // namespace stathedge::payoffs
