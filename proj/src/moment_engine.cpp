#include "stathedge/moment_engine.hpp"

#include <algorithm>
#include <array>
#include <memory>
#include <cmath>
#include <sstream>

#include "stathedge/csv.hpp"
#include "stathedge/density_engine.hpp"
#include "stathedge/errors.hpp"
#include "stathedge/heston_transform.hpp"
#include "stathedge/parallel.hpp"
#include "stathedge/quadrature.hpp"

namespace stathedge::moments {

using models::Measure;
using models::ModelSpec;

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

// E[(e^Y - K)^+] and E[((e^Y - K)^+)^2] for Y ~ N(a, s^2).
std::pair<double, double> gaussian_call_moments(double a, double s, double K) {
  if (s < 1e-12) {
    const double c = std::max(std::exp(a) - K, 0.0);
    return {c, c * c};
  }
  const double d = (a - std::log(K)) / s;
  using quad::normal_cdf;
  const double c = std::exp(a + 0.5 * s * s) * normal_cdf(d + s) - K * normal_cdf(d);
  const double c2 = std::exp(2 * a + 2 * s * s) * normal_cdf(d + 2 * s) -
                    2 * K * std::exp(a + 0.5 * s * s) * normal_cdf(d + s) + K * K * normal_cdf(d);
  return {c, std::max(c2, c * c)};
}

std::function<double(double)> gaussian_marginal(const density::GaussianKernelParams& k) {
  const double m = k.mean[0], sd = std::sqrt(k.covariance(0, 0));
  return [m, sd](double x) { return quad::normal_pdf((x - m) / sd) / sd; };
}

std::function<std::pair<double, double>(double)> terminal_function_moments(
    const payoffs::GenericEuropean& f) {
  return [f](double x) {
    const double v = f.value(std::exp(x));
    return std::make_pair(v, v * v);
  };
}

const payoffs::GenericEuropean* as_generic(const payoffs::ClaimSpec& c) {
  return std::get_if<payoffs::GenericEuropean>(&c);
}

[[noreturn]] void mismatch(const payoffs::ClaimSpec& claim, const char* model) {
  fail(ErrorKind::StateMismatch,
       "claim '" + payoffs::claim_name(claim) + "' needs state the " + model + " model does not carry");
}

void require_law(const ModelSpec& model) {
  require(model.x0.size() == model.dim, ErrorKind::InvalidArgument, "model has no initial state");
}

TerminalLaw heston_law(const ModelSpec& model, const payoffs::ClaimSpec& claim,
                       const EngineOptions& opt) {
  const auto p = std::get<models::Heston>(*model.named);
  const auto* g = as_generic(claim);
  require(g != nullptr, ErrorKind::Unsupported,
          "no conditional-claim route for '" + payoffs::claim_name(claim) +
              "' under Heston; use the discrete transform engine");
  TerminalLaw law;
  law.s0 = std::exp(p.x1);
  const double T = opt.maturity;
  law.center = p.x1 + (p.m - 0.5 * p.theta) * T;
  law.spread = std::sqrt(std::max(p.x2, p.theta) * T);
  const heston::JointCmgf P(p, T, Measure::P), Q(p, T, Measure::Q);
  law.density_p = [P](double x) { return heston::marginal_log_density(P, x); };
  law.density_q = [Q](double x) { return heston::marginal_log_density(Q, x); };
  law.claim_moments = terminal_function_moments(*g);
  law.engine = "fourier-marginal";
  return law;
}

}  // namespace

TerminalLaw terminal_law(const ModelSpec& model, const payoffs::ClaimSpec& claim,
                         const EngineOptions& opt) {
  require_law(model);
  require(opt.maturity > 0, ErrorKind::InvalidArgument, "maturity must be positive");
  const double T = opt.maturity;
  if (model.closed_form == models::ClosedForm::HestonJoint) return heston_law(model, claim, opt);

  TerminalLaw law;
  law.s0 = std::exp(model.x0[0]);
  const auto gP = models::generator(model, Measure::P);
  const auto gQ = models::generator(model, Measure::Q);
  const auto kP = density::kernel_params(gP, model.x0, model.x0, 0.0, T);
  const auto kQ = density::kernel_params(gQ, model.x0, model.x0, 0.0, T);
  law.center = kP.mean[0];
  law.spread = std::sqrt(kP.covariance(0, 0));
  const auto* generic = as_generic(claim);
  const bool cev_base = model.named && std::holds_alternative<models::Cev>(*model.named);

  if (model.closed_form == models::ClosedForm::Lognormal1D) {
    law.density_p = gaussian_marginal(kP);
    law.density_q = gaussian_marginal(kQ);
    law.engine = "closed-form";
    if (generic) {
      law.claim_moments = terminal_function_moments(*generic);
    } else if (const auto* l = std::get_if<payoffs::LetfCall>(&claim)) {
      // Constant volatility: the quadratic variation is deterministic.
      const double qv = model.covariance_rate(0.0, model.x0)(0, 0) * T;
      const double x0 = model.x0[0];
      const auto lc = *l;
      law.claim_moments = [lc, qv, x0](double x) {
        const double v = std::max(payoffs::letf_terminal(lc.ell, lc.l0, x, x0, qv) - lc.kprime, 0.0);
        return std::make_pair(v, v * v);
      };
    } else {
      mismatch(claim, "one-dimensional");
    }
    return law;
  }

  if (model.closed_form == models::ClosedForm::Gaussian2D) {
    law.density_p = gaussian_marginal(kP);
    law.density_q = gaussian_marginal(kQ);
    law.engine = "closed-form";
    if (generic) {
      law.claim_moments = terminal_function_moments(*generic);
      return law;
    }
    double kprime = 0.0;
    if (const auto* c = std::get_if<payoffs::CorrelatedCall>(&claim); c && !model.average_horizon) {
      kprime = c->kprime;
    } else if (const auto* a = std::get_if<payoffs::GeometricAsianCall>(&claim);
               a && model.average_horizon) {
      kprime = a->kprime;
    } else {
      mismatch(claim, "two-dimensional Gaussian");
    }
    const Vec m = kP.mean;
    const Mat C = kP.covariance;
    const double slope = C(0, 1) / C(0, 0);
    const double s = std::sqrt(std::max(C(1, 1) - C(0, 1) * slope, 0.0));
    law.claim_moments = [=](double x) { return gaussian_call_moments(m[1] + slope * (x - m[0]), s, kprime); };
    return law;
  }

  if (cev_base) {
    const auto p = std::get<models::Cev>(*model.named);
    const double x0 = model.x0[0];
    law.density_p = [p, T, x0](double x) { return density::cev_log_density(p, Measure::P, T, x0, x); };
    law.density_q = [p, T, x0](double x) { return density::cev_log_density(p, Measure::Q, T, x0, x); };
    law.engine = "cev-exact";
    if (model.dim == 1) {
      if (!generic) mismatch(claim, "one-dimensional CEV");
      law.claim_moments = terminal_function_moments(*generic);
      return law;
    }
    if (generic) {
      law.claim_moments = terminal_function_moments(*generic);
      return law;
    }
    const auto* a = std::get_if<payoffs::GeometricAsianCall>(&claim);
    if (!a || !model.average_horizon) mismatch(claim, "CEV running-average");
    // Conditional claim by the ratio of joint to marginal expansion densities.
    const auto joint = std::make_shared<density::DensityApprox>(
        density::density_approx(model, Measure::P, {opt.expansion_order, {}}, 0.0, model.x0, T));
    const double kprime = a->kprime;
    const double lk = std::log(kprime);
    const Mat C = kP.covariance;
    const Vec m = kP.mean;
    const double slope = C(0, 1) / C(0, 0);
    const double s = std::sqrt(std::max(C(1, 1) - C(0, 1) * slope, 0.0));
    law.claim_moments = [joint, kprime, lk, m, slope, s](double x) {
      const double breaks[] = {lk};
      const double den = joint->marginal_first(x);
      if (!(den > 1e-12)) return gaussian_call_moments(m[1] + slope * (x - m[0]), s, kprime);
      const double n1 = joint->slice_integral(x, [&](double v) { return std::max(std::exp(v) - kprime, 0.0); }, breaks);
      const double n2 = joint->slice_integral(x, [&](double v) {
        const double c = std::max(std::exp(v) - kprime, 0.0);
        return c * c;
      }, breaks);
      const double c = n1 / den;
      return std::make_pair(c, std::max(n2 / den, c * c));
    };
    law.engine = "cev-exact+expansion-ratio";
    return law;
  }

  // Generic one-dimensional model: expansion densities under both measures.
  require(model.dim == 1 && generic, ErrorKind::Unsupported,
          "no moment engine for this model and claim combination");
  const auto dP = std::make_shared<density::DensityApprox>(
      density::density_approx(model, Measure::P, {opt.expansion_order, {}}, 0.0, model.x0, T));
  const auto dQ = std::make_shared<density::DensityApprox>(
      density::density_approx(model, Measure::Q, {opt.expansion_order, {}}, 0.0, model.x0, T));
  law.density_p = [dP](double x) { return dP->evaluate(x); };
  law.density_q = [dQ](double x) { return dQ->evaluate(x); };
  law.claim_moments = terminal_function_moments(*generic);
  law.engine = "expansion";
  return law;
}

MarginalQuadrature build_quadrature(const TerminalLaw& law, std::vector<double> breaks, int workers) {
  double a = law.center - 12.0 * law.spread, b = law.center + 12.0 * law.spread;
  for (double v : breaks) {
    a = std::min(a, v - law.spread);
    b = std::max(b, v + law.spread);
  }
  breaks.push_back(a);
  breaks.push_back(b);
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  const auto nodes = quad::piecewise_nodes(a, b, breaks, law.spread / 8.0, 8);
  MarginalQuadrature q;
  q.x = nodes.x;
  q.w = nodes.w;
  const std::size_t n = q.x.size();
  q.p.resize(n);
  q.pq.resize(n);
  q.c.resize(n);
  q.c2.resize(n);
  parallel_for(
      n,
      [&](std::size_t i) {
        q.p[i] = law.density_p(q.x[i]);
        q.pq[i] = law.density_q(q.x[i]);
        if (law.claim_moments) {
          const auto [c, c2] = law.claim_moments(q.x[i]);
          q.c[i] = c;
          q.c2[i] = c2;
        }
      },
      workers);
  return q;
}

std::string Instrument::label() const {
  switch (kind) {
    case InstrumentKind::Bond: return "bond";
    case InstrumentKind::Forward: return "forward";
    default: return "K=" + fmt(strike);
  }
}

double Instrument::payoff(double s, double s0) const {
  switch (kind) {
    case InstrumentKind::Bond: return 1.0;
    case InstrumentKind::Forward: return s - s0;
    default: return payoffs::vanilla_payoff(strike, s, s0);
  }
}

std::vector<Instrument> discrete_instruments(const payoffs::InstrumentSet& set) {
  const auto* d = std::get_if<payoffs::DiscreteStrikes>(&set.strikes);
  require(d != nullptr, ErrorKind::InvalidArgument, "discrete moments need discrete strikes");
  std::vector<Instrument> out;
  if (set.includes_bond) out.push_back({InstrumentKind::Bond, 0.0});
  if (set.includes_forward) out.push_back({InstrumentKind::Forward, 0.0});
  for (double k : d->strikes) out.push_back({InstrumentKind::Vanilla, k});
  require(!out.empty(), ErrorKind::InvalidArgument, "instrument set is empty");
  return out;
}

namespace {

void check_redundancy(const DiscreteMoments& m) {
  const auto& ins = m.instruments;
  for (std::size_t i = 0; i < ins.size(); ++i)
    for (std::size_t j = i + 1; j < ins.size(); ++j)
      if (ins[i].kind == ins[j].kind && ins[i].strike == ins[j].strike)
        fail(ErrorKind::RedundantInstrument,
             "redundant instruments: " + ins[i].label() + " and " + ins[j].label());
  Eigen::LLT<Mat> llt(m.psi);
  bool ok = llt.info() == Eigen::Success;
  if (ok) {
    const Vec d = Mat(llt.matrixL()).diagonal();
    ok = d.minCoeff() > 1e-10 * std::sqrt(m.psi.diagonal().maxCoeff());
  }
  if (ok) return;
  std::size_t bi = 0, bj = 1;
  double worst = -1.0;
  for (std::size_t i = 0; i < ins.size(); ++i)
    for (std::size_t j = i + 1; j < ins.size(); ++j) {
      const double r = std::abs(m.psi(i, j)) / std::sqrt(m.psi(i, i) * m.psi(j, j));
      if (r > worst) {
        worst = r;
        bi = i;
        bj = j;
      }
    }
  fail(ErrorKind::RedundantInstrument, "redundant instruments: psi is not positive definite (" +
                                           ins[bi].label() + " and " + ins[bj].label() + ")");
}

DiscreteMoments heston_letf_moments(const ModelSpec& model, const std::vector<Instrument>& ins,
                                    const payoffs::LetfCall& claim, const EngineOptions& opt) {
  const auto p = std::get<models::Heston>(*model.named);
  const double T = opt.maturity;
  const heston::JointCmgf P(p, T, Measure::P), Q(p, T, Measure::Q);
  const double s0 = std::exp(p.x1);
  const auto letf = heston::reduce_letf(claim.ell, claim.kprime, claim.l0, p.x1);
  const heston::Projection X{1.0, 0.0, 0.0};
  auto ev = [&](const heston::JointCmgf& psi, const heston::ExpPolyPayoff& g) {
    return heston::expectation_1d(psi, g, X).value;
  };
  auto es = [](const heston::JointCmgf& psi, double n) { return psi({0.0, -n}, 0.0).real(); };
  auto vanilla = [&](double k) { return k < s0 ? heston::put_payoff(k) : heston::call_payoff(k); };

  const std::size_t N = ins.size();
  DiscreteMoments m;
  m.instruments = ins;
  m.s0 = s0;
  m.psi = Mat::Zero(N, N);
  m.gamma = Vec::Zero(N);
  m.ztilde = Vec::Zero(N);
  const double ES = es(P, 1.0), ES2 = es(P, 2.0);
  m.claim_mean = letf.scale * heston::expectation_1d(P, letf.payoff, letf.projection).value;
  m.claim_second_moment = letf.scale * letf.scale *
                          heston::expectation_1d(P, heston::product(letf.payoff, letf.payoff),
                                                 letf.projection).value;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = i; j < N; ++j) pairs.emplace_back(i, j);
  parallel_for(pairs.size(), [&](std::size_t k) {
    const auto [i, j] = pairs[k];
    const auto& a = ins[i];
    const auto& b = ins[j];
    double v = 0.0;
    using K = InstrumentKind;
    if (a.kind == K::Bond && b.kind == K::Bond) v = 1.0;
    else if (a.kind == K::Bond && b.kind == K::Forward) v = ES - s0;
    else if (a.kind == K::Forward && b.kind == K::Forward) v = ES2 - 2 * s0 * ES + s0 * s0;
    else if (a.kind == K::Bond) v = ev(P, vanilla(b.strike));
    else if (a.kind == K::Forward) v = ev(P, heston::times_forward(vanilla(b.strike), s0));
    else v = ev(P, heston::product(vanilla(a.strike), vanilla(b.strike)));
    m.psi(i, j) = m.psi(j, i) = v;
  }, 1);
  for (std::size_t i = 0; i < N; ++i) {
    const auto& a = ins[i];
    switch (a.kind) {
      case InstrumentKind::Bond:
        m.gamma[i] = m.claim_mean;
        m.ztilde[i] = 1.0;
        break;
      case InstrumentKind::Forward: {
        heston::Projection tilted = letf.projection;
        tilted.tilt = 1.0;
        m.gamma[i] = letf.scale * heston::expectation_1d(P, letf.payoff, tilted).value - s0 * m.claim_mean;
        m.ztilde[i] = es(Q, 1.0) - s0;
        break;
      }
      default:
        m.gamma[i] = letf.scale * heston::expectation_2d(P, vanilla(a.strike), 1.0, letf.payoff,
                                                         letf.projection).value;
        m.ztilde[i] = ev(Q, vanilla(a.strike));
    }
  }
  m.engine = "fourier-laplace";
  return m;
}

}  // namespace

DiscreteMoments discrete_moments(const ModelSpec& model, const payoffs::InstrumentSet& instruments,
                                 const payoffs::ClaimSpec& claim, const EngineOptions& opt) {
  const auto ins = discrete_instruments(instruments);
  {
    DiscreteMoments probe;
    probe.instruments = ins;
    for (std::size_t i = 0; i < ins.size(); ++i)
      for (std::size_t j = i + 1; j < ins.size(); ++j)
        if (ins[i].kind == ins[j].kind && ins[i].strike == ins[j].strike)
          fail(ErrorKind::RedundantInstrument,
               "redundant instruments: " + ins[i].label() + " and " + ins[j].label());
  }
  DiscreteMoments m;
  if (model.closed_form == models::ClosedForm::HestonJoint &&
      std::holds_alternative<payoffs::LetfCall>(claim)) {
    m = heston_letf_moments(model, ins, std::get<payoffs::LetfCall>(claim), opt);
  } else {
    const TerminalLaw law = terminal_law(model, claim, opt);
    std::vector<double> breaks;
    for (const auto& i : ins)
      if (i.kind == InstrumentKind::Vanilla) breaks.push_back(std::log(i.strike));
    const auto q = build_quadrature(law, breaks);
    const std::size_t N = ins.size(), n = q.x.size();
    m.instruments = ins;
    m.s0 = law.s0;
    m.psi = Mat::Zero(N, N);
    m.gamma = Vec::Zero(N);
    m.ztilde = Vec::Zero(N);
    Mat G(n, N);
    for (std::size_t k = 0; k < n; ++k) {
      const double s = std::exp(q.x[k]);
      for (std::size_t i = 0; i < N; ++i) G(k, i) = ins[i].payoff(s, law.s0);
    }
    Vec wp(n), wq(n), c(n), c2(n);
    for (std::size_t k = 0; k < n; ++k) {
      wp[k] = q.w[k] * q.p[k];
      wq[k] = q.w[k] * q.pq[k];
      c[k] = q.c[k];
      c2[k] = q.c2[k];
    }
    m.psi = G.transpose() * wp.asDiagonal() * G;
    m.gamma = G.transpose() * wp.cwiseProduct(c);
    m.ztilde = G.transpose() * wq;
    for (std::size_t i = 0; i < N; ++i)
      if (ins[i].kind == InstrumentKind::Bond) {
        m.psi(i, i) = 1.0;
        m.ztilde[i] = 1.0;
      }
    m.claim_mean = wp.dot(c);
    m.claim_second_moment = wp.dot(c2);
    m.engine = law.engine;
  }
  check_redundancy(m);
  return m;
}

ContinuousMoments continuous_moments(const ModelSpec& model, const payoffs::ContinuousBand& band,
                                     const payoffs::ClaimSpec& claim, const EngineOptions& opt) {
  const TerminalLaw law = terminal_law(model, claim, opt);
  require(band.grid_size >= 51, ErrorKind::InvalidArgument, "continuous band needs at least 51 grid points");
  require(band.lower > 0 && band.lower < law.s0 && law.s0 < band.upper, ErrorKind::InvalidArgument,
          "continuous band must satisfy 0 < L < S0 < R");
  ContinuousMoments m;
  m.s0 = law.s0;
  m.engine = law.engine;
  m.K = quad::linspace(band.lower, band.upper, band.grid_size);
  m.h = m.K[1] - m.K[0];
  std::vector<double> breaks;
  for (double k : m.K) breaks.push_back(std::log(k));
  m.quadrature = build_quadrature(law, breaks);
  const auto& q = m.quadrature;
  const std::size_t n = q.x.size(), G = m.K.size();
  // Prefix sums of the weighted moments; every log K is a panel boundary.
  std::vector<std::array<double, 7>> pre(n + 1);
  pre[0].fill(0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const double s = std::exp(q.x[k]);
    const double wp = q.w[k] * q.p[k], wq = q.w[k] * q.pq[k];
    const std::array<double, 7> v{wp, wp * s, wp * s * s, wp * q.c[k], wp * q.c[k] * s, wq, wq * s};
    for (int j = 0; j < 7; ++j) pre[k + 1][j] = pre[k][j] + v[j];
  }
  const auto& tot = pre[n];
  const double s0 = m.s0;
  m.beta = tot[1] - s0 * tot[0];
  m.Sigma = tot[2] - 2 * s0 * tot[1] + s0 * s0 * tot[0];
  m.xi_claim = tot[3];
  m.theta_claim = tot[4] - s0 * tot[3];
  double e2 = 0.0;
  for (std::size_t k = 0; k < n; ++k) e2 += q.w[k] * q.p[k] * q.c2[k];
  m.claim_second_moment = e2;

  m.z.resize(G);
  m.y.resize(G);
  m.ztilde.resize(G);
  m.gamma.resize(G);
  m.Gamma.resize(G);
  m.Gamma_tilde.resize(G);
  m.cond_claim.resize(G);
  std::vector<double> pk(G), pqk(G), ck(G);
  parallel_for(G, [&](std::size_t j) {
    const double x = std::log(m.K[j]);
    pk[j] = law.density_p(x);
    pqk[j] = law.density_q(x);
    ck[j] = law.claim_moments(x).first;
  });
  for (std::size_t j = 0; j < G; ++j) {
    const double K = m.K[j];
    const double lk = std::log(K);
    const std::size_t idx = std::lower_bound(q.x.begin(), q.x.end(), lk) - q.x.begin();
    std::array<double, 7> part;
    if (payoffs::is_call(K, s0)) {
      for (int i = 0; i < 7; ++i) part[i] = tot[i] - pre[idx][i];
      m.z[j] = part[1] - K * part[0];
      m.y[j] = part[2] - (K + s0) * part[1] + K * s0 * part[0];
      m.gamma[j] = part[4] - K * part[3];
      m.ztilde[j] = part[6] - K * part[5];
    } else {
      part = pre[idx];
      m.z[j] = K * part[0] - part[1];
      m.y[j] = (K + s0) * part[1] - K * s0 * part[0] - part[2];
      m.gamma[j] = K * part[3] - part[4];
      m.ztilde[j] = K * part[5] - part[6];
    }
    require(pk[j] >= 0.0 && pqk[j] >= 0.0, ErrorKind::Numerical,
            "nonpositive density at K=" + fmt(K));
    double p = pk[j], pq = pqk[j];
    if (p < opt.density_floor || pq < opt.density_floor) {
      ++m.floored_points;
      p = std::max(p, opt.density_floor);
      pq = std::max(pq, opt.density_floor);
    }
    m.Gamma[j] = p / K;
    m.Gamma_tilde[j] = pq / K;
    m.cond_claim[j] = ck[j];
  }
  if (m.floored_points > G / 20)
    m.warnings.push_back("band-too-wide: density below floor on " + std::to_string(m.floored_points) +
                         " of " + std::to_string(G) + " grid points");
  return m;
}

double conditional_claim(const ModelSpec& model, const payoffs::ClaimSpec& claim, double K,
                         const EngineOptions& opt) {
  require(K > 0, ErrorKind::InvalidArgument, "conditional_claim: K must be positive");
  const TerminalLaw law = terminal_law(model, claim, opt);
  const double x = std::log(K);
  require(law.density_p(x) > opt.density_floor, ErrorKind::Numerical,
          "conditioning error: marginal density underflow at K=" + fmt(K));
  return law.claim_moments(x).first;
}

double density_ratio(const ModelSpec& model, double K, const EngineOptions& opt) {
  require(K > 0, ErrorKind::InvalidArgument, "density_ratio: K must be positive");
  payoffs::GenericEuropean zero{[](double) { return 0.0; }, {}, {}, "zero"};
  const TerminalLaw law = terminal_law(model, zero, opt);
  const double x = std::log(K);
  const double p = std::max(law.density_p(x), opt.density_floor);
  const double pq = std::max(law.density_q(x), opt.density_floor);
  return pq / p;
}

mc::McEstimate mc_check(const ModelSpec& model, Measure measure, const mc::Functional& f, double T,
                        std::size_t paths, std::uint64_t seed, std::optional<mc::SimScheme> scheme) {
  require(paths >= 1000, ErrorKind::InvalidArgument, "mc_check needs at least 1000 paths");
  const auto batch = mc::simulate(model, measure, scheme.value_or(mc::default_scheme(model)), T, paths, seed);
  return mc::estimate(batch, f);
}

void write_moments_csv(const ContinuousMoments& m, const std::string& path) {
  csv::Table t({"K", "z", "y", "ztilde", "gamma", "Gamma", "Gamma_tilde", "cond_claim"});
  for (std::size_t j = 0; j < m.K.size(); ++j)
    t.row({m.K[j], m.z[j], m.y[j], m.ztilde[j], m.gamma[j], m.Gamma[j], m.Gamma_tilde[j], m.cond_claim[j]});
  t.write(path);
}

}  // namespace stathedge::moments
