#include "stathedge/payoffs.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "stathedge/errors.hpp"

namespace stathedge::payoffs {

double vanilla_payoff(double strike, double s, double s0) {
  return is_call(strike, s0) ? std::max(s - strike, 0.0) : std::max(strike - s, 0.0);
}

double letf_terminal(double ell, double l0, double x1_T, double x1_0, double qv_T) {
  require(qv_T >= 0.0, ErrorKind::InvalidArgument, "letf_terminal: negative quadratic variation");
  return l0 * std::exp(ell * (x1_T - x1_0) + 0.5 * ell * (1.0 - ell) * qv_T);
}

double GenericEuropean::first_derivative(double s) const {
  if (df) return df(s);
  const double h = 1e-4;
  return (f(s + h) - f(s - h)) / (2.0 * h);
}

double GenericEuropean::second_derivative(double s) const {
  if (d2f) return d2f(s);
  const double h = 1e-4;
  return (f(s + h) - 2.0 * f(s) + f(s - h)) / (h * h);
}

namespace {

double need(const std::optional<double>& v, const char* what) {
  if (!v) fail(ErrorKind::StateMismatch, std::string("terminal state lacks ") + what);
  return *v;
}

}  // namespace

double claim_payoff(const ClaimSpec& claim, const TerminalState& st) {
  return std::visit(
      [&](const auto& c) -> double {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, CorrelatedCall> || std::is_same_v<T, GeometricAsianCall>) {
          return std::max(std::exp(need(st.x2, "x2")) - c.kprime, 0.0);
        } else if constexpr (std::is_same_v<T, LetfCall>) {
          const double l = letf_terminal(c.ell, c.l0, need(st.x1, "x1"), need(st.x1_0, "x1_0"),
                                         need(st.qv, "quadratic variation"));
          return std::max(l - c.kprime, 0.0);
        } else {
          return c.value(std::exp(need(st.x1, "x1")));
        }
      },
      claim);
}

bool is_common_leverage(double ell) {
  for (double c : {-3.0, -2.0, -1.0, 2.0, 3.0})
    if (ell == c) return true;
  return false;
}

std::string claim_name(const ClaimSpec& claim) {
  return std::visit(
      [](const auto& c) -> std::string {
        using T = std::decay_t<decltype(c)>;
        std::ostringstream os;
        if constexpr (std::is_same_v<T, CorrelatedCall>) os << "correlated_call(K'=" << c.kprime << ")";
        else if constexpr (std::is_same_v<T, LetfCall>)
          os << "letf_call(ell=" << c.ell << ", K'=" << c.kprime << ")";
        else if constexpr (std::is_same_v<T, GeometricAsianCall>)
          os << "geometric_asian_call(K'=" << c.kprime << ")";
        else os << c.label;
        return os.str();
      },
      claim);
}

void validate(const InstrumentSet& set) {
  require(set.s0 > 0, ErrorKind::InvalidArgument, "instrument set: s0 must be positive");
  if (const auto* band = std::get_if<ContinuousBand>(&set.strikes)) {
    require(band->lower >= 0 && band->lower <= set.s0 && set.s0 <= band->upper,
            ErrorKind::InvalidArgument, "instrument set: need 0 <= L <= S0 <= R");
    require(band->lower < band->upper, ErrorKind::InvalidArgument, "instrument set: empty band");
  } else {
    const auto& k = std::get<DiscreteStrikes>(set.strikes).strikes;
    for (std::size_t i = 0; i < k.size(); ++i) {
      require(k[i] > 0, ErrorKind::InvalidArgument, "instrument set: strikes must be positive");
      if (i > 0)
        require(k[i] > k[i - 1], ErrorKind::InvalidArgument,
                "instrument set: strikes must be sorted and distinct");
    }
  }
}

GenericEuropean softplus_call(double strike, double width) {
  GenericEuropean g;
  g.label = "softplus_call";
  g.f = [=](double s) {
    const double z = (s - strike) / width;
    return z > 40 ? s - strike : width * std::log1p(std::exp(z));
  };
  g.df = [=](double s) { return 1.0 / (1.0 + std::exp(-(s - strike) / width)); };
  g.d2f = [=](double s) {
    const double z = (s - strike) / width;
    if (std::abs(z) > 700) return 0.0;
    const double e = std::exp(-std::abs(z));
    return e / ((1.0 + e) * (1.0 + e) * width);
  };
  return g;
}

GenericEuropean power_claim(double exponent, double scale) {
  GenericEuropean g;
  g.label = "power";
  g.f = [=](double s) { return scale * std::pow(s, exponent); };
  g.df = [=](double s) { return scale * exponent * std::pow(s, exponent - 1.0); };
  g.d2f = [=](double s) { return scale * exponent * (exponent - 1.0) * std::pow(s, exponent - 2.0); };
  return g;
}

}  // namespace stathedge::payoffs
