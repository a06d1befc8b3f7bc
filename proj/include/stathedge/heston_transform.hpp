#pragma once

#include <complex>
#include <optional>
#include <utility>
#include <vector>

#include "stathedge/market_models.hpp"

namespace stathedge::heston {

using cplx = std::complex<double>;

/// Psi(xi, lambda) = E[exp(i xi X1_T + lambda <X1>_T)] for the Heston model started at (x1, x2).
class JointCmgf {
 public:
  JointCmgf(const models::Heston& params, double T, models::Measure measure = models::Measure::P);

  cplx operator()(cplx xi, cplx lambda) const;
  const models::Heston& params() const { return p_; }
  double maturity() const { return T_; }
  models::Measure measure() const { return measure_; }

 private:
  models::Heston p_;
  double T_;
  models::Measure measure_;
};

JointCmgf joint_cmgf(const models::Heston& params, double T,
                     models::Measure measure = models::Measure::P);

/// Fourier-Laplace transform of f(x, y) = (exp(ell x - theta y) - exp(k))^+, ell, theta > 0:
///   fhat = ell^2 exp(k - i k xi / ell) / (xi (ell - i xi) (theta xi - i lambda ell)).
/// Inversion: E f = (1/2pi) (1/2pi i) int int Psi fhat dlambda dxi.
struct TransformPayoff {
  double ell = 1.0;
  double theta = 1.0;
  double k = 0.0;

  bool admissible(cplx xi, cplx lambda) const;
  /// Domain error outside Im(xi) < -ell, Re(lambda) > Im(theta xi / ell).
  cplx operator()(cplx xi, cplx lambda) const;
  /// Residue of fhat in lambda at lambda0 = -i theta xi / ell.
  cplx residue(cplx xi) const;
  double value(double x, double y) const;
};

TransformPayoff payoff_transform(double ell, double theta, double k);

/// p(z) = sum_j c_j exp(a_j z) on z > z0 (Above) or z < z0 (Below); zero elsewhere.
/// Covers calls, puts, their products and squares, and the LETF call in its reduced variable.
struct ExpPolyPayoff {
  enum class Side { Above, Below };
  Side side = Side::Above;
  double z0 = 0.0;
  std::vector<std::pair<double, double>> terms;  // (c_j, a_j)

  double value(double z) const;
  /// int exp(-i zeta z) p(z) dz.
  cplx transform(cplx zeta) const;
  bool admissible(double im_zeta) const;
  double default_contour() const;
};

ExpPolyPayoff call_payoff(double strike);
ExpPolyPayoff put_payoff(double strike);
/// (exp(z) - s0) p(z).
ExpPolyPayoff times_forward(const ExpPolyPayoff& p, double s0);
/// Product of two exp-poly payoffs on the same variable; empty terms when the supports are disjoint.
ExpPolyPayoff product(const ExpPolyPayoff& a, const ExpPolyPayoff& b);

/// Z = sx X1_T + sq <X1>_T; expectations are weighted by exp(tilt X1_T).
struct Projection {
  double sx = 1.0;
  double sq = 0.0;
  double tilt = 0.0;
};

/// The LETF call (L_T - K')^+ written as scale * p(Z).
struct ReducedLetf {
  double scale = 1.0;
  ExpPolyPayoff payoff;  // (exp(ell_exp z) - exp(k))^+ on z > k / ell_exp
  Projection projection;
  double ell_exp = 1.0;
  double theta_exp = 1.0;
  double k = 0.0;
};

/// ell_exp = |ell|, theta_exp = ell (ell - 1) / 2, and X negated when ell < 0.
ReducedLetf reduce_letf(double ell, double kprime, double l0, double x1_0);

struct InversionOptions {
  std::optional<double> contour;      // Im(zeta); defaults per payoff
  std::optional<double> contour2;     // second variable in 2-d inversions
  double truncation = 200.0;
  bool half_axis = true;
  double panel_width = 0.5;
};

struct InversionResult {
  double value = 0.0;
  double imag_residual = 0.0;
  double contour = 0.0;
  double refinement_change = 0.0;
};

/// E[exp(tilt X1) p(Z)] = (1/2pi) int Psi(sx zeta - i tilt, i sq zeta) phat(zeta) dzeta along
/// Im(zeta) = contour.
InversionResult expectation_1d(const JointCmgf& psi, const ExpPolyPayoff& p, const Projection& z,
                               const InversionOptions& opt = {});

/// E[p1(sx1 X1) p2(Z)] by a separable 2-d Fourier inversion.
InversionResult expectation_2d(const JointCmgf& psi, const ExpPolyPayoff& p1, double sx1,
                               const ExpPolyPayoff& p2, const Projection& z,
                               const InversionOptions& opt = {});

struct Contour {
  double xi_im;
  double eta;
};

/// E[f(X1_T, <X1>_T)] for the transform payoff. The lambda integral is evaluated exactly by its
/// residue, which makes the result independent of eta.
InversionResult joint_expectation(const JointCmgf& psi, const TransformPayoff& payoff,
                                  std::optional<Contour> contour = std::nullopt,
                                  const InversionOptions& opt = {});

/// Recovers f(x, y) from fhat by numerical inversion.
double invert_payoff(const TransformPayoff& payoff, double x, double y, double truncation = 5000.0);

/// Density of X1_T by Fourier inversion of Psi(xi, 0).
double marginal_log_density(const JointCmgf& psi, double x);

}  // namespace stathedge::heston
