#include "stathedge/hedge_optimizer.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <algorithm>
#include <cmath>

#include "stathedge/csv.hpp"
#include "stathedge/errors.hpp"
#include "stathedge/parallel.hpp"
#include "stathedge/payoffs.hpp"
#include "stathedge/quadrature.hpp"

namespace stathedge::hedge {

const char* to_string(Branch b) {
  return b == Branch::Constrained ? "constrained" : "unconstrained";
}

double hedge_error(const moments::DiscreteMoments& m, const Vec& pi) {
  return pi.dot(m.psi * pi) - 2.0 * m.gamma.dot(pi) + m.claim_second_moment;
}

DiscretePortfolio solve_discrete(const moments::DiscreteMoments& m,
                                 std::optional<CostConstraint> constraint) {
  const Eigen::Index n = m.psi.rows();
  require(n > 0 && m.psi.cols() == n && m.gamma.size() == n && m.ztilde.size() == n,
          ErrorKind::InvalidArgument, "solve_discrete: inconsistent moment dimensions");
  Eigen::LLT<Mat> llt(m.psi);
  if (llt.info() != Eigen::Success)
    fail(ErrorKind::RedundantInstrument, "psi is not positive definite; remove a redundant instrument");

  DiscretePortfolio out;
  out.instruments = m.instruments;
  const Vec a = llt.solve(m.gamma);
  out.pi = a;
  out.cost = m.ztilde.dot(a);
  if (constraint && out.cost > constraint->C) {
    const Vec b = llt.solve(m.ztilde);
    const double zb = m.ztilde.dot(b);
    require(zb > 0.0 && std::isfinite(zb), ErrorKind::Numerical,
            "constraint-degeneracy: ztilde' psi^-1 ztilde is not positive");
    const double shift = (constraint->C - m.ztilde.dot(a)) / zb;
    out.pi = a + shift * b;
    out.lambda = 2.0 * shift;
    out.branch = Branch::Constrained;
    out.cost = m.ztilde.dot(out.pi);
    out.complementary_slackness = out.lambda * (out.cost - constraint->C);
  }
  out.objective = hedge_error(m, out.pi);
  const Vec r = 2.0 * (m.psi * out.pi) - 2.0 * (m.gamma + 0.5 * out.lambda * m.ztilde);
  out.stationarity_residual = r.cwiseAbs().maxCoeff();
  return out;
}

std::vector<double> pi_of_K_lambda(const moments::ContinuousMoments& m, double lambda) {
  const std::size_t n = m.K.size();
  require(n >= 5, ErrorKind::InvalidArgument, "grid error: pi(K, lambda) needs at least 5 strikes");
  require(m.cond_claim.size() == n && m.Gamma.size() == n && m.Gamma_tilde.size() == n,
          ErrorKind::InvalidArgument, "grid error: moment arrays do not match the strike grid");
  std::vector<double> f(n);
  for (std::size_t j = 0; j < n; ++j)
    f[j] = m.cond_claim[j] + 0.5 * lambda * m.Gamma_tilde[j] / m.Gamma[j];
  if (n < 6) {
    // 3-point stencil, edges copied
    std::vector<double> d(n);
    for (std::size_t j = 1; j + 1 < n; ++j) d[j] = (f[j - 1] - 2 * f[j] + f[j + 1]) / (m.h * m.h);
    d[0] = d[1];
    d[n - 1] = d[n - 2];
    return d;
  }
  return quad::second_derivative(f, m.h);
}

namespace {

struct StripIntegrals {
  std::vector<double> w;
  double operator()(const std::vector<double>& a, const std::vector<double>& b) const {
    double s = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) s += w[j] * a[j] * b[j];
    return s;
  }
};

StripIntegrals strip(const moments::ContinuousMoments& m) { return {quad::split_weights(m.K, m.s0)}; }

std::vector<double> ratio_curvature(const moments::ContinuousMoments& m) {
  // d^2/dK^2 of Gamma~/Gamma is pi(K, 2) - pi(K, 0)
  const auto a = pi_of_K_lambda(m, 2.0);
  const auto b = pi_of_K_lambda(m, 0.0);
  std::vector<double> d(a.size());
  for (std::size_t j = 0; j < a.size(); ++j) d[j] = a[j] - b[j];
  return d;
}

void finish(const moments::ContinuousMoments& m, const StripIntegrals& I, ContinuousPortfolio& out) {
  out.K = m.K;
  out.s0 = m.s0;
  out.cost = out.q + I(out.pi, m.ztilde);
  for (double v : out.pi)
    require(std::isfinite(v), ErrorKind::Numerical, "non-finite strike weight");
  out.objective = hedge_error(m, out);
}

}  // namespace

ContinuousPortfolio solve_continuous_unconstrained(const moments::ContinuousMoments& m) {
  const StripIntegrals I = strip(m);
  ContinuousPortfolio out;
  out.pi = pi_of_K_lambda(m, 0.0);
  Eigen::Matrix2d A;
  A << 1.0, m.beta, m.beta, m.Sigma;
  const Eigen::Vector2d rhs(m.xi_claim - I(m.z, out.pi), m.theta_claim - I(m.y, out.pi));
  const double det = A.determinant();
  require(std::isfinite(det) && std::abs(det) > 1e-14 * std::max(1.0, std::abs(m.Sigma)),
          ErrorKind::Numerical, "degenerate-underlying: Var(S_T) is numerically zero");
  const Eigen::Vector2d qp = A.partialPivLu().solve(rhs);
  out.q = qp[0];
  out.p = qp[1];
  finish(m, I, out);
  return out;
}

ContinuousPortfolio solve_continuous_constrained(const moments::ContinuousMoments& m,
                                                 CostConstraint constraint) {
  ContinuousPortfolio u = solve_continuous_unconstrained(m);
  if (u.cost <= constraint.C) return u;

  const StripIntegrals I = strip(m);
  const auto pi0 = pi_of_K_lambda(m, 0.0);
  const auto rpp = ratio_curvature(m);
  Eigen::Matrix3d A;
  A << 1.0, m.beta, -0.5 + 0.5 * I(m.z, rpp),
       m.beta, m.Sigma, 0.5 * I(m.y, rpp),
       1.0, 0.0, 0.5 * I(m.ztilde, rpp);
  const Eigen::Vector3d rhs(m.xi_claim - I(m.z, pi0), m.theta_claim - I(m.y, pi0),
                            constraint.C - I(m.ztilde, pi0));
  Eigen::FullPivLU<Eigen::Matrix3d> lu(A);
  lu.setThreshold(1e-12);
  require(lu.isInvertible(), ErrorKind::Numerical,
          "constraint-degeneracy: the constrained system is singular");
  const Eigen::Vector3d sol = lu.solve(rhs);

  ContinuousPortfolio out;
  out.q = sol[0];
  out.p = sol[1];
  out.lambda = sol[2];
  out.branch = Branch::Constrained;
  out.pi.resize(pi0.size());
  for (std::size_t j = 0; j < pi0.size(); ++j) out.pi[j] = pi0[j] + 0.5 * out.lambda * rpp[j];
  finish(m, I, out);
  return out;
}

ContinuousPortfolio solve_continuous(const moments::ContinuousMoments& m,
                                     std::optional<CostConstraint> constraint) {
  return constraint ? solve_continuous_constrained(m, *constraint) : solve_continuous_unconstrained(m);
}

double strip_value(const std::vector<double>& K, const std::vector<double>& weights,
                   const std::vector<double>& pi, double s, double s0) {
  double v = 0.0;
  for (std::size_t j = 0; j < K.size(); ++j)
    v += weights[j] * pi[j] * payoffs::vanilla_payoff(K[j], s, s0);
  return v;
}

std::vector<double> portfolio_profile(const ContinuousPortfolio& port, const std::vector<double>& s) {
  const auto w = quad::split_weights(port.K, port.s0);
  std::vector<double> out(s.size());
  parallel_for(s.size(), [&](std::size_t i) {
    out[i] = port.q + port.p * (s[i] - port.s0) + strip_value(port.K, w, port.pi, s[i], port.s0);
  });
  return out;
}

std::vector<double> portfolio_profile(const DiscretePortfolio& port, double s0,
                                      const std::vector<double>& s) {
  std::vector<double> out(s.size(), 0.0);
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = 0; j < port.instruments.size(); ++j)
      out[i] += port.pi[static_cast<Eigen::Index>(j)] * port.instruments[j].payoff(s[i], s0);
  return out;
}

double hedge_error(const moments::ContinuousMoments& m, const ContinuousPortfolio& port) {
  const auto& q = m.quadrature;
  std::vector<double> s(q.x.size());
  for (std::size_t k = 0; k < s.size(); ++k) s[k] = std::exp(q.x[k]);
  const auto phi = portfolio_profile(port, s);
  std::vector<double> terms(s.size());
  for (std::size_t k = 0; k < s.size(); ++k) {
    const double d = phi[k] - q.c[k];
    terms[k] = q.w[k] * q.p[k] * (d * d + std::max(0.0, q.c2[k] - q.c[k] * q.c[k]));
  }
  return pairwise_sum(terms);
}

std::vector<double> integral_equation_solve(const std::vector<double>& K,
                                            const std::vector<double>& f,
                                            const std::vector<double>& Gamma, double split) {
  const std::size_t n = K.size();
  require(n >= 12 && f.size() == n && Gamma.size() == n, ErrorKind::InvalidArgument,
          "integral_equation_solve: need matching arrays with at least 12 points");
  const double h = (K.back() - K.front()) / static_cast<double>(n - 1);
  const std::size_t m = quad::split_index(K, split);
  const auto f2 = quad::second_derivative_split(f, h, m);
  std::vector<double> g(n);
  for (std::size_t j = 0; j < n; ++j) {
    require(Gamma[j] > 0.0, ErrorKind::Numerical,
            "integral_equation_solve: nonpositive density on the grid");
    g[j] = f2[j] / Gamma[j];
  }
  auto pi = quad::second_derivative(g, h);
  for (double v : pi)
    require(std::isfinite(v), ErrorKind::Numerical, "smoothness error: non-finite fourth derivative");
  return pi;
}

ContinuousPortfolio carr_madan_weights(const std::function<double(double)>& f,
                                       const std::function<double(double)>& df,
                                       const std::function<double(double)>& d2f, double s0,
                                       const std::vector<double>& K) {
  ContinuousPortfolio out;
  out.K = K;
  out.s0 = s0;
  out.q = f(s0);
  out.p = df(s0);
  out.pi.resize(K.size());
  for (std::size_t j = 0; j < K.size(); ++j) out.pi[j] = d2f(K[j]);
  return out;
}

void write_discrete_csv(const DiscretePortfolio& port, const std::string& path) {
  csv::Table t({"K", "pi"});
  double q = 0.0, p = 0.0;
  for (std::size_t j = 0; j < port.instruments.size(); ++j) {
    const auto& ins = port.instruments[j];
    const double w = port.pi[static_cast<Eigen::Index>(j)];
    if (ins.kind == moments::InstrumentKind::Bond) q = w;
    else if (ins.kind == moments::InstrumentKind::Forward) p = w;
    else t.row({ins.strike, w});
  }
  t.meta("q", q);
  t.meta("p", p);
  t.meta("lambda", port.lambda);
  t.meta("cost", port.cost);
  t.meta("J", port.objective);
  t.write(path);
}

void write_continuous_csv(const ContinuousPortfolio& port, const std::string& path) {
  csv::Table t({"K", "pi_K"});
  t.meta("q", port.q);
  t.meta("p", port.p);
  t.meta("lambda", port.lambda);
  t.meta("cost", port.cost);
  t.meta("J", port.objective);
  for (std::size_t j = 0; j < port.K.size(); ++j) t.row({port.K[j], port.pi[j]});
  t.write(path);
}

void write_profile_csv(const std::vector<double>& s, const std::vector<double>& phi,
                       const std::string& path) {
  csv::Table t({"S_T", "Phi"});
  for (std::size_t i = 0; i < s.size(); ++i) t.row({s[i], phi[i]});
  t.write(path);
}

}  // namespace stathedge::hedge
