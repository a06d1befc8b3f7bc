#include "stathedge/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <sstream>

#include "stathedge/csv.hpp"
#include "stathedge/errors.hpp"
#include "stathedge/parallel.hpp"
#include "stathedge/quadrature.hpp"

namespace stathedge::experiments {

namespace {

std::string tag(double v) {
  char buf[32];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string join(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

// |a - b| <= 3 s.e. plus an absolute quadrature floor
constexpr double kMcFloor = 1e-8;

Check mc_compare(const std::string& name, double engine, const mc::McEstimate& e) {
  const double diff = std::abs(engine - e.value);
  Check c{name, diff <= 3.0 * e.std_error + kMcFloor, ""};
  c.detail = "engine " + fmt(engine) + " mc " + fmt(e.value) + " se " + fmt(e.std_error) +
             (e.std_error > 0 ? " z " + fmt((engine - e.value) / e.std_error) : "");
  return c;
}

// Collapses a family of comparisons into one line naming the worst entry.
Check family(const std::string& name, const std::vector<Check>& items) {
  Check out{name, true, ""};
  std::size_t bad = 0;
  for (const auto& c : items)
    if (!c.ok) {
      ++bad;
      if (out.ok) out.detail = "first failure " + c.name + ": " + c.detail;
      out.ok = false;
    }
  if (out.ok) out.detail = std::to_string(items.size()) + " entries within 3 s.e.";
  else out.detail = std::to_string(bad) + "/" + std::to_string(items.size()) + " outside 3 s.e.; " + out.detail;
  return out;
}

double window_share(const std::vector<double>& K, const std::vector<double>& pi, double lo, double hi) {
  double in = 0.0, tot = 0.0;
  for (std::size_t j = 0; j < K.size(); ++j) {
    tot += std::abs(pi[j]);
    if (K[j] >= lo && K[j] <= hi) in += std::abs(pi[j]);
  }
  return tot > 0 ? in / tot : 0.0;
}

void add_kkt_checks(const hedge::DiscretePortfolio& p, Report& r) {
  r.checks.push_back({"kkt-stationarity", p.stationarity_residual <= 1e-8,
                      "residual " + fmt(p.stationarity_residual)});
  r.checks.push_back({"kkt-complementary-slackness", std::abs(p.complementary_slackness) <= 1e-8,
                      "lambda*(cost-C) " + fmt(p.complementary_slackness)});
}

void write_discrete_moments(const moments::DiscreteMoments& m, const std::string& path) {
  std::vector<std::string> cols{"kind", "K", "gamma", "ztilde"};
  for (std::size_t j = 0; j < m.instruments.size(); ++j) cols.push_back("psi_" + std::to_string(j));
  csv::Table t(cols);
  t.meta("claim_mean", m.claim_mean);
  t.meta("claim_second_moment", m.claim_second_moment);
  for (std::size_t i = 0; i < m.instruments.size(); ++i) {
    const auto e = static_cast<Eigen::Index>(i);
    std::vector<double> row{static_cast<double>(m.instruments[i].kind), m.instruments[i].strike,
                            m.gamma[e], m.ztilde[e]};
    for (std::size_t j = 0; j < m.instruments.size(); ++j)
      row.push_back(m.psi(e, static_cast<Eigen::Index>(j)));
    t.row(row);
  }
  t.write(path);
}

std::vector<double> vanilla_weights(const hedge::DiscretePortfolio& p, std::vector<double>* K = nullptr) {
  std::vector<double> w;
  for (std::size_t j = 0; j < p.instruments.size(); ++j)
    if (p.instruments[j].kind == moments::InstrumentKind::Vanilla) {
      w.push_back(p.pi[static_cast<Eigen::Index>(j)]);
      if (K) K->push_back(p.instruments[j].strike);
    }
  return w;
}

}  // namespace

bool Report::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.ok; });
}

std::optional<hedge::CostConstraint> resolve_constraint(const config::ExperimentConfig& cfg,
                                                        double unconstrained_cost) {
  if (cfg.cost_cap) return hedge::CostConstraint{*cfg.cost_cap};
  if (cfg.cost_fraction) return hedge::CostConstraint{*cfg.cost_fraction * unconstrained_cost};
  return std::nullopt;
}

DiscreteRun run_discrete(const config::ExperimentConfig& cfg) {
  require(!cfg.continuous(), ErrorKind::Config, "instruments: hedge-discrete needs instruments.strikes");
  DiscreteRun r;
  r.moments = moments::discrete_moments(cfg.build_model(), cfg.instruments, cfg.claim, cfg.engine_options());
  r.unconstrained = hedge::solve_discrete(r.moments);
  r.portfolio = hedge::solve_discrete(r.moments, resolve_constraint(cfg, r.unconstrained.cost));
  return r;
}

ContinuousRun run_continuous(const config::ExperimentConfig& cfg) {
  require(cfg.continuous(), ErrorKind::Config, "instruments: hedge-continuous needs instruments.band");
  ContinuousRun r;
  r.moments = moments::continuous_moments(cfg.build_model(),
                                          std::get<payoffs::ContinuousBand>(cfg.instruments.strikes),
                                          cfg.claim, cfg.engine_options());
  r.unconstrained = hedge::solve_continuous_unconstrained(r.moments);
  const auto con = resolve_constraint(cfg, r.unconstrained.cost);
  r.portfolio = con ? hedge::solve_continuous_constrained(r.moments, *con) : r.unconstrained;
  return r;
}

std::vector<double> profile_grid(const config::ExperimentConfig& cfg) {
  const double s0 = cfg.instruments.s0;
  return quad::linspace(0.5 * s0, 1.5 * s0, 201);
}

mc::SimScheme scheme_for(const config::ExperimentConfig& cfg, const models::ModelSpec& model) {
  mc::SimScheme s = mc::default_scheme(model);
  s.steps_per_year = cfg.solver.steps_per_year;
  s.total_steps = cfg.solver.total_steps;
  return s;
}

mc::McEstimate mc_objective(const config::ExperimentConfig& cfg,
                            const std::function<double(double)>& portfolio_payoff,
                            std::uint64_t seed, int workers) {
  const auto model = cfg.build_model();
  const auto batch = mc::simulate(model, models::Measure::P, scheme_for(cfg, model), cfg.maturity,
                                  cfg.solver.mc_paths, seed, workers);
  return mc::estimate(
      batch,
      [&](const payoffs::TerminalState& s) {
        const double d = portfolio_payoff(std::exp(*s.x1)) - payoffs::claim_payoff(cfg.claim, s);
        return d * d;
      },
      workers);
}

Report hedge_discrete(const config::ExperimentConfig& cfg, const Context& ctx) {
  Report r;
  const auto run = run_discrete(cfg);
  const auto& p = run.portfolio;
  const std::string fpi = join(ctx.out_dir, "discrete_pi.csv");
  const std::string fpr = join(ctx.out_dir, "discrete_profile.csv");
  const std::string fmo = join(ctx.out_dir, "discrete_moments.csv");
  hedge::write_discrete_csv(p, fpi);
  const auto s = profile_grid(cfg);
  hedge::write_profile_csv(s, hedge::portfolio_profile(p, cfg.instruments.s0, s), fpr);
  write_discrete_moments(run.moments, fmo);
  r.files = {fpi, fpr, fmo};
  add_kkt_checks(p, r);
  r.warnings.push_back(std::string("branch ") + hedge::to_string(p.branch) + ", cost " + fmt(p.cost) +
                       ", J " + fmt(p.objective) + ", engine " + run.moments.engine);
  return r;
}

Report hedge_continuous(const config::ExperimentConfig& cfg, const Context& ctx) {
  Report r;
  const auto run = run_continuous(cfg);
  const auto& p = run.portfolio;
  const std::string fpi = join(ctx.out_dir, "continuous_pi.csv");
  const std::string fpr = join(ctx.out_dir, "continuous_profile.csv");
  const std::string fmo = join(ctx.out_dir, "continuous_moments.csv");
  hedge::write_continuous_csv(p, fpi);
  const auto s = profile_grid(cfg);
  hedge::write_profile_csv(s, hedge::portfolio_profile(p, s), fpr);
  moments::write_moments_csv(run.moments, fmo);
  r.files = {fpi, fpr, fmo};
  r.warnings = run.moments.warnings;
  if (p.branch == hedge::Branch::Constrained) {
    const double C = resolve_constraint(cfg, run.unconstrained.cost)->C;
    r.checks.push_back({"constrained-cost", std::abs(p.cost - C) <= 1e-6, "cost - C " + fmt(p.cost - C)});
  }
  r.warnings.push_back(std::string("branch ") + hedge::to_string(p.branch) + ", q " + fmt(p.q) + ", p " +
                       fmt(p.p) + ", lambda " + fmt(p.lambda) + ", cost " + fmt(p.cost) + ", J " +
                       fmt(p.objective) + ", engine " + run.moments.engine);
  return r;
}

Report profile(const config::ExperimentConfig& cfg, const Context& ctx) {
  Report r;
  const auto s = profile_grid(cfg);
  std::vector<double> phi;
  if (cfg.continuous()) phi = hedge::portfolio_profile(run_continuous(cfg).portfolio, s);
  else phi = hedge::portfolio_profile(run_discrete(cfg).portfolio, cfg.instruments.s0, s);
  const std::string f = join(ctx.out_dir, "profile.csv");
  hedge::write_profile_csv(s, phi, f);
  r.files = {f};
  return r;
}

Report validate(const config::ExperimentConfig& cfg, const Context& ctx) {
  Report r;
  const auto model = cfg.build_model();
  const auto scheme = scheme_for(cfg, model);
  const std::size_t N = cfg.solver.mc_paths;
  const auto bp = mc::simulate(model, models::Measure::P, scheme, cfg.maturity, N, ctx.seed, ctx.workers);
  const auto bq = mc::simulate(model, models::Measure::Q, scheme, cfg.maturity, N, ctx.seed + 1, ctx.workers);
  const auto claim = [&](const payoffs::TerminalState& s) { return payoffs::claim_payoff(cfg.claim, s); };
  const auto est = [&](const mc::PathBatch& b, const mc::Functional& f) { return mc::estimate(b, f, ctx.workers); };

  if (!cfg.continuous()) {
    const auto run = run_discrete(cfg);
    const auto& m = run.moments;
    const double s0 = m.s0;
    const auto& ins = m.instruments;
    std::vector<Check> mom;
    for (std::size_t i = 0; i < ins.size(); ++i) {
      const auto ei = static_cast<Eigen::Index>(i);
      auto zi = [&, i](const payoffs::TerminalState& s) { return ins[i].payoff(std::exp(*s.x1), s0); };
      mom.push_back(mc_compare("gamma[" + ins[i].label() + "]", m.gamma[ei],
                               est(bp, [&](const payoffs::TerminalState& s) { return zi(s) * claim(s); })));
      mom.push_back(mc_compare("ztilde[" + ins[i].label() + "]", m.ztilde[ei], est(bq, zi)));
      for (std::size_t j = i; j < ins.size(); ++j) {
        auto zj = [&, j](const payoffs::TerminalState& s) { return ins[j].payoff(std::exp(*s.x1), s0); };
        mom.push_back(mc_compare("psi[" + ins[i].label() + "," + ins[j].label() + "]",
                                 m.psi(ei, static_cast<Eigen::Index>(j)),
                                 est(bp, [&](const payoffs::TerminalState& s) { return zi(s) * zj(s); })));
      }
    }
    mom.push_back(mc_compare("E[Xi^2]", m.claim_second_moment,
                             est(bp, [&](const payoffs::TerminalState& s) { const double c = claim(s); return c * c; })));
    r.checks.push_back(family("discrete-moments-vs-mc", mom));
    add_kkt_checks(run.portfolio, r);
    const auto& p = run.portfolio;
    r.checks.push_back(mc_compare("objective-vs-mc", p.objective,
                                  est(bp, [&](const payoffs::TerminalState& s) {
                                    const double st = std::exp(*s.x1);
                                    double v = 0.0;
                                    for (std::size_t j = 0; j < ins.size(); ++j)
                                      v += p.pi[static_cast<Eigen::Index>(j)] * ins[j].payoff(st, s0);
                                    const double d = v - claim(s);
                                    return d * d;
                                  })));
    if (p.branch == hedge::Branch::Constrained) {
      const double C = resolve_constraint(cfg, run.unconstrained.cost)->C;
      r.checks.push_back({"constrained-cost", std::abs(p.cost - C) <= 1e-10, "cost - C " + fmt(p.cost - C)});
    }
    return r;
  }

  const auto run = run_continuous(cfg);
  const auto& m = run.moments;
  const double s0 = m.s0;
  std::vector<Check> mom;
  auto st = [](const payoffs::TerminalState& s) { return std::exp(*s.x1); };
  mom.push_back(mc_compare("beta", m.beta, est(bp, [&](const auto& s) { return st(s) - s0; })));
  mom.push_back(mc_compare("Sigma", m.Sigma, est(bp, [&](const auto& s) { const double d = st(s) - s0; return d * d; })));
  mom.push_back(mc_compare("xi", m.xi_claim, est(bp, claim)));
  mom.push_back(mc_compare("theta", m.theta_claim, est(bp, [&](const auto& s) { return (st(s) - s0) * claim(s); })));
  mom.push_back(mc_compare("E[Xi^2]", m.claim_second_moment,
                           est(bp, [&](const auto& s) { const double c = claim(s); return c * c; })));
  const std::size_t G = m.K.size();
  for (std::size_t j : {G / 8, G / 4, (3 * G) / 8, (5 * G) / 8, (3 * G) / 4, (7 * G) / 8}) {
    const double K = m.K[j];
    auto g = [&, K](const payoffs::TerminalState& s) { return payoffs::vanilla_payoff(K, st(s), s0); };
    mom.push_back(mc_compare("z(" + fmt(K) + ")", m.z[j], est(bp, g)));
    mom.push_back(mc_compare("ztilde(" + fmt(K) + ")", m.ztilde[j], est(bq, g)));
    mom.push_back(mc_compare("gamma(" + fmt(K) + ")", m.gamma[j], est(bp, [&](const auto& s) { return g(s) * claim(s); })));
  }
  r.checks.push_back(family("continuous-moments-vs-mc", mom));
  const auto& p = run.portfolio;
  const auto w = quad::split_weights(p.K, s0);
  r.checks.push_back(mc_compare("objective-vs-mc", p.objective, est(bp, [&](const payoffs::TerminalState& s) {
    const double x = st(s);
    const double v = p.q + p.p * (x - s0) + hedge::strip_value(p.K, w, p.pi, x, s0);
    const double d = v - claim(s);
    return d * d;
  })));
  if (p.branch == hedge::Branch::Constrained) {
    const double C = resolve_constraint(cfg, run.unconstrained.cost)->C;
    r.checks.push_back({"constrained-cost", std::abs(p.cost - C) <= 1e-6, "cost - C " + fmt(p.cost - C)});
  }
  r.warnings = m.warnings;
  return r;
}

config::ExperimentConfig fig1_config(double rho) {
  config::ExperimentConfig c;
  c.model = models::CorrelatedGbm2D{0.1, 0.1, 0.2, 0.2, rho, 1.0, 1.0};
  c.claim = payoffs::CorrelatedCall{1.0};
  c.instruments.strikes = payoffs::ContinuousBand{0.5, 1.5, 401};
  c.maturity = 0.5;
  return c;
}

config::ExperimentConfig fig2_config(double rho) {
  config::ExperimentConfig c;
  c.model = models::CorrelatedGbm2D{0.1, 0.1, 0.2, 0.2, rho, 1.0, 1.0};
  c.claim = payoffs::CorrelatedCall{1.0};
  c.instruments.includes_forward = false;
  c.instruments.strikes = payoffs::DiscreteStrikes{{0.7, 0.8, 0.9, 1.0, 1.1, 1.2, 1.3}};
  c.maturity = 1.0;
  return c;
}

config::ExperimentConfig fig3_config(double ell) {
  config::ExperimentConfig c;
  c.model = models::Heston{0.1, 1.0, 0.04, 0.1, 0.0, 0.0, 0.04};
  c.claim = payoffs::LetfCall{1.0, ell, 1.0};
  c.instruments.includes_forward = false;
  c.instruments.strikes = payoffs::DiscreteStrikes{{0.8, 0.85, 0.9, 0.95, 1.0, 1.05, 1.1, 1.15, 1.2}};
  c.maturity = 0.25;
  c.solver.total_steps = 250;
  return c;
}

config::ExperimentConfig fig4_config() {
  config::ExperimentConfig c;
  c.model = models::Cev{0.1, 0.2, 0.7, 0.0};
  c.running_average = true;
  c.claim = payoffs::GeometricAsianCall{1.0};
  c.instruments.strikes = payoffs::ContinuousBand{0.4, 2.0, 401};
  c.maturity = 1.0;
  return c;
}

Report figure(int which, const Context& ctx) {
  Report r;
  auto out = [&](const std::string& name) {
    r.files.push_back(join(ctx.out_dir, name));
    return r.files.back();
  };
  const std::vector<std::string> summary_cols{"param", "fraction", "q", "p", "lambda", "cost", "J", "window_share"};
  switch (which) {
    case 1: {
      csv::Table sum(summary_cols);
      for (double rho : {0.5, 0.7, 0.9}) {
        const auto cfg = fig1_config(rho);
        const auto run = run_continuous(cfg);
        const auto& p = run.portfolio;
        hedge::write_continuous_csv(p, out("fig1_pi_rho" + tag(rho) + ".csv"));
        const auto s = profile_grid(cfg);
        hedge::write_profile_csv(s, hedge::portfolio_profile(p, s), out("fig1_profile_rho" + tag(rho) + ".csv"));
        sum.row({rho, 1.0, p.q, p.p, p.lambda, p.cost, p.objective, window_share(p.K, p.pi, 0.9, 1.1)});
      }
      const auto cfg = fig1_config(0.55);
      const auto m = moments::continuous_moments(cfg.build_model(),
                                                 std::get<payoffs::ContinuousBand>(cfg.instruments.strikes),
                                                 cfg.claim, cfg.engine_options());
      const auto u = hedge::solve_continuous_unconstrained(m);
      for (double f : {1.0, 0.75, 0.5}) {
        const auto p = hedge::solve_continuous_constrained(m, {f * u.cost});
        hedge::write_continuous_csv(p, out("fig1_pi_frac" + tag(f) + ".csv"));
        const auto s = profile_grid(cfg);
        hedge::write_profile_csv(s, hedge::portfolio_profile(p, s), out("fig1_profile_frac" + tag(f) + ".csv"));
        sum.row({0.55, f, p.q, p.p, p.lambda, p.cost, p.objective, window_share(p.K, p.pi, 0.9, 1.1)});
      }
      sum.write(out("fig1_summary.csv"));
      break;
    }
    case 2: {
      csv::Table sum(summary_cols);
      for (double rho : {0.5, 0.7, 0.9}) {
        const auto cfg = fig2_config(rho);
        const auto run = run_discrete(cfg);
        const auto& p = run.portfolio;
        hedge::write_discrete_csv(p, out("fig2_pi_rho" + tag(rho) + ".csv"));
        const auto s = profile_grid(cfg);
        hedge::write_profile_csv(s, hedge::portfolio_profile(p, cfg.instruments.s0, s),
                                 out("fig2_profile_rho" + tag(rho) + ".csv"));
        std::vector<double> K;
        const auto w = vanilla_weights(p, &K);
        sum.row({rho, 1.0, p.pi[0], 0.0, p.lambda, p.cost, p.objective, window_share(K, w, 0.9, 1.1)});
        if (rho == 0.9) {
          for (double f : {1.0, 0.75, 0.5}) {
            const auto pc = hedge::solve_discrete(run.moments, hedge::CostConstraint{f * run.unconstrained.cost});
            hedge::write_discrete_csv(pc, out("fig2_pi_frac" + tag(f) + ".csv"));
            hedge::write_profile_csv(s, hedge::portfolio_profile(pc, cfg.instruments.s0, s),
                                     out("fig2_profile_frac" + tag(f) + ".csv"));
            std::vector<double> Kc;
            const auto wc = vanilla_weights(pc, &Kc);
            sum.row({rho, f, pc.pi[0], 0.0, pc.lambda, pc.cost, pc.objective, window_share(Kc, wc, 0.9, 1.1)});
          }
          // continuous strip on the same band
          auto cc = cfg;
          cc.instruments.includes_forward = true;
          cc.instruments.strikes = payoffs::ContinuousBand{0.7, 1.3, 401};
          hedge::write_continuous_csv(run_continuous(cc).portfolio, out("fig2_continuous_pi.csv"));
        }
      }
      sum.write(out("fig2_summary.csv"));
      break;
    }
    case 3: {
      csv::Table sum({"param", "fraction", "q", "p", "lambda", "cost", "J", "share_below_kprime"});
      for (double ell : {3.0, -3.0}) {
        const auto cfg = fig3_config(ell);
        const auto run = run_discrete(cfg);
        const auto& p = run.portfolio;
        hedge::write_discrete_csv(p, out("fig3_pi_ell" + tag(ell) + ".csv"));
        const auto s = profile_grid(cfg);
        hedge::write_profile_csv(s, hedge::portfolio_profile(p, cfg.instruments.s0, s),
                                 out("fig3_profile_ell" + tag(ell) + ".csv"));
        std::vector<double> K;
        const auto w = vanilla_weights(p, &K);
        double below = 0.0, tot = 0.0;
        for (std::size_t j = 0; j < K.size(); ++j) {
          tot += std::abs(w[j]);
          if (K[j] < 1.0) below += std::abs(w[j]);
        }
        sum.row({ell, 1.0, p.pi[0], 0.0, p.lambda, p.cost, p.objective, tot > 0 ? below / tot : 0.0});
      }
      sum.write(out("fig3_summary.csv"));
      break;
    }
    case 4: {
      const auto cfg = fig4_config();
      const auto run = run_continuous(cfg);
      const auto& p = run.portfolio;
      hedge::write_continuous_csv(p, out("fig4_pi.csv"));
      const auto s = profile_grid(cfg);
      hedge::write_profile_csv(s, hedge::portfolio_profile(p, s), out("fig4_profile.csv"));
      moments::write_moments_csv(run.moments, out("fig4_moments.csv"));
      r.warnings = run.moments.warnings;
      break;
    }
    default:
      fail(ErrorKind::Config, "figure: expected 1, 2, 3 or 4");
  }
  return r;
}

}  // namespace stathedge::experiments
