#include "stathedge/heston_transform.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

#include "stathedge/errors.hpp"
#include "stathedge/parallel.hpp"
#include "stathedge/quadrature.hpp"

namespace stathedge::heston {

namespace {

constexpr cplx I{0.0, 1.0};
constexpr double kPi = std::numbers::pi;

cplx log1p_c(cplx w) {
  if (std::abs(w) < 1e-4) return w * (1.0 - w * (0.5 - w * (1.0 / 3.0 - 0.25 * w)));
  return std::log(1.0 + w);
}

// int_a^b f(u) du with 16-point panels of the given width.
cplx line_integral(const std::function<cplx(double)>& f, double a, double b, double width) {
  const auto& rule = quad::gauss_legendre(16);
  const int panels = std::max(1, static_cast<int>(std::ceil((b - a) / width - 1e-12)));
  const double h = (b - a) / panels;
  cplx total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * h, mid = lo + 0.5 * h;
    cplx s = 0.0;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) s += rule.weights[k] * f(mid + 0.5 * h * rule.nodes[k]);
    total += 0.5 * h * s;
  }
  return total;
}

// (1/2pi) int_R g(u) du for g with g(-u) = conj(g(u)).
InversionResult invert_line(const std::function<cplx(double)>& g, const InversionOptions& opt) {
  InversionResult r;
  auto run = [&](double width) {
    if (opt.half_axis) return cplx(line_integral(g, 0.0, opt.truncation, width).real() / kPi, 0.0);
    return line_integral(g, -opt.truncation, opt.truncation, width) / (2.0 * kPi);
  };
  const cplx coarse = run(2.0 * opt.panel_width);
  const cplx fine = run(opt.panel_width);
  r.value = fine.real();
  r.imag_residual = std::abs(fine.imag());
  r.refinement_change = std::abs(fine.real() - coarse.real());
  require(std::isfinite(r.value), ErrorKind::Numerical,
          "contour error: transform integrand is not finite along the inversion contour");
  require(r.imag_residual <= 1e-6 * std::max(std::abs(r.value), 1e-300) || r.imag_residual < 1e-14,
          ErrorKind::Numerical, "inversion-inaccuracy: imaginary residual too large");
  return r;
}

}  // namespace

JointCmgf::JointCmgf(const models::Heston& params, double T, models::Measure measure)
    : p_(params), T_(T), measure_(measure) {
  models::validate(params);
  require(T > 0, ErrorKind::InvalidArgument, "joint_cmgf: maturity must be positive");
}

cplx JointCmgf::operator()(cplx xi, cplx lambda) const {
  const double a = 0.5 * p_.delta * p_.delta;
  const cplx b = p_.rho * p_.delta * I * xi - p_.kappa;
  const cplx c = -0.5 * (xi * xi + I * xi) + lambda;
  cplx d = std::sqrt(b * b - 4.0 * a * c);
  if (d.real() < 0.0) d = -d;
  const cplx den = -b + d;
  const cplx rm = 2.0 * c / den;
  const cplx g = 4.0 * a * c / (den * den);
  const cplx e = std::exp(-d * T_);
  const cplx B = rm * (1.0 - e) / (1.0 - g * e);
  const double drift = measure_ == models::Measure::P ? p_.m : 0.0;
  const cplx A = I * xi * drift * T_ +
                 p_.kappa * p_.theta * (rm * T_ - log1p_c(g * (1.0 - e) / (1.0 - g)) / a);
  return std::exp(I * xi * p_.x1 + A + B * p_.x2);
}

JointCmgf joint_cmgf(const models::Heston& params, double T, models::Measure measure) {
  return JointCmgf(params, T, measure);
}

bool TransformPayoff::admissible(cplx xi, cplx lambda) const {
  return xi.imag() < -ell && lambda.real() > (theta * xi / ell).imag();
}

cplx TransformPayoff::operator()(cplx xi, cplx lambda) const {
  require(admissible(xi, lambda), ErrorKind::InvalidArgument,
          "domain error: transform payoff evaluated outside its admissible region");
  return ell * ell * std::exp(k - I * k * xi / ell) / (xi * (ell - I * xi) * (theta * xi - I * lambda * ell));
}

cplx TransformPayoff::residue(cplx xi) const {
  return I * ell * std::exp(k - I * k * xi / ell) / (xi * (ell - I * xi));
}

double TransformPayoff::value(double x, double y) const {
  return std::max(std::exp(ell * x - theta * y) - std::exp(k), 0.0);
}

TransformPayoff payoff_transform(double ell, double theta, double k) {
  require(ell > 0 && theta > 0, ErrorKind::InvalidArgument,
          "payoff_transform: ell and theta must be positive");
  return {ell, theta, k};
}

double ExpPolyPayoff::value(double z) const {
  if (side == Side::Above ? z <= z0 : z >= z0) return 0.0;
  double s = 0.0;
  for (const auto& [c, a] : terms) s += c * std::exp(a * z);
  return s;
}

cplx ExpPolyPayoff::transform(cplx zeta) const {
  cplx s = 0.0;
  for (const auto& [c, a] : terms) {
    const cplx r = a - I * zeta;
    const cplx v = std::exp(r * z0) / r;
    s += side == Side::Above ? -c * v : c * v;
  }
  return s;
}

bool ExpPolyPayoff::admissible(double im) const {
  for (const auto& [c, a] : terms) {
    if (side == Side::Above ? a + im >= 0.0 : a + im <= 0.0) return false;
  }
  return true;
}

double ExpPolyPayoff::default_contour() const {
  double amax = 0.0, amin = 0.0;
  bool first = true;
  for (const auto& t : terms) {
    amax = first ? t.second : std::max(amax, t.second);
    amin = first ? t.second : std::min(amin, t.second);
    first = false;
  }
  return side == Side::Above ? -(amax + 1.0) : -amin + 1.0;
}

ExpPolyPayoff call_payoff(double strike) {
  require(strike > 0, ErrorKind::InvalidArgument, "call_payoff: strike must be positive");
  return {ExpPolyPayoff::Side::Above, std::log(strike), {{1.0, 1.0}, {-strike, 0.0}}};
}

ExpPolyPayoff put_payoff(double strike) {
  require(strike > 0, ErrorKind::InvalidArgument, "put_payoff: strike must be positive");
  return {ExpPolyPayoff::Side::Below, std::log(strike), {{strike, 0.0}, {-1.0, 1.0}}};
}

ExpPolyPayoff product(const ExpPolyPayoff& a, const ExpPolyPayoff& b) {
  ExpPolyPayoff out;
  if (a.side != b.side) {
    const auto& above = a.side == ExpPolyPayoff::Side::Above ? a : b;
    const auto& below = a.side == ExpPolyPayoff::Side::Above ? b : a;
    require(above.z0 >= below.z0, ErrorKind::Unsupported,
            "product of payoffs with overlapping opposite-side supports");
    out.side = ExpPolyPayoff::Side::Above;
    out.z0 = above.z0;
    return out;  // disjoint supports
  }
  out.side = a.side;
  out.z0 = a.side == ExpPolyPayoff::Side::Above ? std::max(a.z0, b.z0) : std::min(a.z0, b.z0);
  for (const auto& [c1, a1] : a.terms) {
    for (const auto& [c2, a2] : b.terms) {
      auto it = std::find_if(out.terms.begin(), out.terms.end(),
                             [&](const auto& t) { return t.second == a1 + a2; });
      if (it == out.terms.end()) out.terms.emplace_back(c1 * c2, a1 + a2);
      else it->first += c1 * c2;
    }
  }
  return out;
}

ExpPolyPayoff times_forward(const ExpPolyPayoff& p, double s0) {
  ExpPolyPayoff out{p.side, p.z0, {}};
  for (const auto& [c, a] : p.terms) {
    out.terms.emplace_back(c, a + 1.0);
    out.terms.emplace_back(-s0 * c, a);
  }
  return out;
}

ReducedLetf reduce_letf(double ell, double kprime, double l0, double x1_0) {
  require(ell != 0.0, ErrorKind::InvalidArgument, "LETF leverage must be nonzero");
  require(kprime > 0 && l0 > 0, ErrorKind::InvalidArgument, "LETF strike and L0 must be positive");
  ReducedLetf r;
  r.ell_exp = std::abs(ell);
  r.theta_exp = 0.5 * ell * (ell - 1.0);
  require(r.theta_exp > 0, ErrorKind::Unsupported,
          "LETF reduction needs ell (ell - 1) > 0 (ell outside [0, 1])");
  // L_T - K' = L0 exp(-ell x1_0) (exp(ell X - theta Q) - exp(k)), k = log(K'/L0) + ell x1_0.
  r.k = std::log(kprime / l0) + ell * x1_0;
  r.scale = l0 * std::exp(-ell * x1_0);
  const double sx = ell > 0 ? 1.0 : -1.0;
  r.projection = {sx, -r.theta_exp / r.ell_exp};
  r.payoff = {ExpPolyPayoff::Side::Above, r.k / r.ell_exp, {{1.0, r.ell_exp}, {-std::exp(r.k), 0.0}}};
  return r;
}

InversionResult expectation_1d(const JointCmgf& psi, const ExpPolyPayoff& p, const Projection& z,
                               const InversionOptions& opt) {
  if (p.terms.empty()) return {};
  const double c = opt.contour.value_or(p.default_contour());
  require(p.admissible(c), ErrorKind::InvalidArgument,
          "contour outside the admissible strip of the payoff transform");
  auto g = [&](double u) {
    const cplx zeta(u, c);
    return psi(z.sx * zeta - I * z.tilt, I * z.sq * zeta) * p.transform(zeta);
  };
  InversionResult r = invert_line(g, opt);
  r.contour = c;
  return r;
}

InversionResult expectation_2d(const JointCmgf& psi, const ExpPolyPayoff& p1, double sx1,
                               const ExpPolyPayoff& p2, const Projection& z,
                               const InversionOptions& opt) {
  if (p1.terms.empty() || p2.terms.empty()) return {};
  require(sx1 != 0.0, ErrorKind::InvalidArgument, "expectation_2d: sx1 must be nonzero");
  const double c1 = opt.contour.value_or(p1.default_contour());
  const double c2 = opt.contour2.value_or(p2.default_contour());
  require(p1.admissible(c1) && p2.admissible(c2), ErrorKind::InvalidArgument,
          "contour outside the admissible strip of the payoff transforms");
  const double cw = sx1 * c1 + z.sx * c2;
  const cplx lam_mid = I * z.sq * cplx(0.0, c2);
  // Psi decays along the combined frequency; cut where it falls below 1e-15 of its peak.
  const double psi0 = std::abs(psi(cplx(0.0, cw), lam_mid));
  double W = 1.0;
  while (W < opt.truncation && std::abs(psi(cplx(W, cw), lam_mid)) > 1e-15 * psi0) W += 1.0;

  const auto& rule = quad::gauss_legendre(16);
  std::vector<double> wn, ww;
  for (double lo = -W; lo < W - 1e-12; lo += 1.0)
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
      wn.push_back(lo + 0.5 + 0.5 * rule.nodes[k]);
      ww.push_back(0.5 * rule.weights[k]);
    }
  std::vector<double> vn, vw;
  const double V = opt.truncation;
  for (double lo = opt.half_axis ? 0.0 : -V; lo < V - 1e-12;) {
    const double width = std::abs(lo) < 16.0 ? 1.0 : 4.0;
    const double hi = std::min(V, lo + width);
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
      vn.push_back(0.5 * (lo + hi) + 0.5 * (hi - lo) * rule.nodes[k]);
      vw.push_back(0.5 * (hi - lo) * rule.weights[k]);
    }
    lo = hi;
  }
  std::vector<cplx> rows(vn.size());
  parallel_for(vn.size(), [&](std::size_t j) {
    const cplx zeta2(vn[j], c2);
    const cplx lam = I * z.sq * zeta2;
    cplx row = 0.0;
    for (std::size_t i = 0; i < wn.size(); ++i) {
      const cplx zeta1((wn[i] - z.sx * vn[j]) / sx1, c1);
      row += ww[i] * psi(cplx(wn[i], cw), lam) * p1.transform(zeta1);
    }
    rows[j] = vw[j] * row * p2.transform(zeta2);
  });
  cplx total = 0.0;
  for (const auto& r : rows) total += r;
  const double norm = 1.0 / (4.0 * kPi * kPi * std::abs(sx1));
  InversionResult r;
  if (opt.half_axis) {
    r.value = 2.0 * norm * total.real();
  } else {
    r.value = norm * total.real();
    r.imag_residual = norm * std::abs(total.imag());
  }
  r.contour = c1;
  require(std::isfinite(r.value), ErrorKind::Numerical,
          "contour error: transform integrand is not finite along the inversion contour");
  require(r.imag_residual <= 1e-6 * std::max(std::abs(r.value), 1e-300) || r.imag_residual < 1e-14,
          ErrorKind::Numerical, "inversion-inaccuracy: imaginary residual too large");
  return r;
}

InversionResult joint_expectation(const JointCmgf& psi, const TransformPayoff& payoff,
                                  std::optional<Contour> contour, const InversionOptions& opt) {
  const double xi_im = contour ? contour->xi_im : -(payoff.ell + 1.0);
  const double eta = contour ? contour->eta : payoff.theta * xi_im / payoff.ell + 1.0;
  require(payoff.admissible(cplx(0.0, xi_im), cplx(eta, 0.0)), ErrorKind::InvalidArgument,
          "joint_expectation: contour outside the admissible region");
  auto g = [&](double u) {
    const cplx xi(u, xi_im);
    const cplx lam0 = -I * payoff.theta * xi / payoff.ell;
    return psi(xi, lam0) * payoff.residue(xi);
  };
  InversionResult r = invert_line(g, opt);
  r.contour = xi_im;
  return r;
}

double invert_payoff(const TransformPayoff& payoff, double x, double y, double truncation) {
  const double c = -(payoff.ell + 1.0);
  const double s = x - payoff.theta * y / payoff.ell;
  auto g = [&](double u) {
    const cplx xi(u, c);
    return std::exp(I * xi * s) * payoff.residue(xi);
  };
  return line_integral(g, 0.0, truncation, 1.0).real() / kPi;
}

double marginal_log_density(const JointCmgf& psi, double x) {
  auto g = [&](double u) { return std::exp(-I * u * x) * psi(cplx(u, 0.0), 0.0); };
  double U = 1.0;
  while (U < 1000.0 && std::abs(psi(cplx(U, 0.0), 0.0)) > 1e-16) U += 1.0;
  return line_integral(g, 0.0, U, 0.5).real() / kPi;
}

}  // namespace stathedge::heston
