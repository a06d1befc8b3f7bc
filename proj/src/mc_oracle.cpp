#include "stathedge/mc_oracle.hpp"

#include <cmath>
#include <string>

#include "stathedge/density_engine.hpp"
#include "stathedge/errors.hpp"
#include "stathedge/parallel.hpp"

namespace stathedge::mc {

using models::Measure;
using models::ModelSpec;
using models::Vec;

namespace {

constexpr std::size_t kBlock = 4096;

[[noreturn]] void blow_up(int step, std::size_t path) {
  fail(ErrorKind::Simulation, "non-finite state at step " + std::to_string(step) + " of path " +
                                  std::to_string(path));
}

struct Out {
  double x1 = 0.0, x2 = 0.0, qv = 0.0;
};

int step_count(const SimScheme& s, double T) {
  if (s.total_steps) return std::max(1, *s.total_steps);
  return std::max(1, static_cast<int>(std::lround(s.steps_per_year * T)));
}

}  // namespace

SimScheme default_scheme(const ModelSpec& model) {
  SimScheme s;
  switch (model.closed_form) {
    case models::ClosedForm::Lognormal1D: s.kind = SchemeKind::ExactLognormal; break;
    case models::ClosedForm::Gaussian2D: s.kind = SchemeKind::ExactGaussian2D; break;
    case models::ClosedForm::HestonJoint: s.kind = SchemeKind::EulerFullTruncation; break;
    default: s.kind = SchemeKind::EulerLog; break;
  }
  return s;
}

payoffs::TerminalState PathBatch::state(std::size_t i) const {
  payoffs::TerminalState s;
  s.x1 = x1[i];
  if (!x2.empty()) s.x2 = x2[i];
  if (!qv.empty()) s.qv = qv[i];
  s.x1_0 = x1_0;
  return s;
}

PathBatch simulate(const ModelSpec& model, Measure measure, const SimScheme& scheme, double T,
                   std::size_t paths, std::uint64_t seed, int workers) {
  require(paths >= 1, ErrorKind::InvalidArgument, "simulate: need at least one path");
  require(T > 0, ErrorKind::InvalidArgument, "simulate: maturity must be positive");
  PathBatch b;
  b.paths = paths;
  b.seed = seed;
  b.scheme = scheme;
  b.x1_0 = model.x0[0];
  const int steps = step_count(scheme, T);
  b.steps = steps;
  const double dt = T / steps, sdt = std::sqrt(dt);
  const Vec x0 = model.x0;
  const bool has_avg = model.average_horizon.has_value();
  const double horizon = model.average_horizon.value_or(T);

  std::function<Out(PathRng&, std::size_t)> path;

  switch (scheme.kind) {
    case SchemeKind::ExactLognormal: {
      require(model.closed_form == models::ClosedForm::Lognormal1D, ErrorKind::InvalidArgument,
              "exact lognormal scheme needs a lognormal model");
      const double mu = model.drift(measure, 0.0, x0)[0];
      const double var = model.covariance_rate(0.0, x0)(0, 0);
      const double sd = std::sqrt(var * T);
      path = [=](PathRng& r, std::size_t) {
        return Out{x0[0] + mu * T + sd * r.normal(), 0.0, var * T};
      };
      break;
    }
    case SchemeKind::ExactGaussian2D: {
      require(model.closed_form == models::ClosedForm::Gaussian2D, ErrorKind::InvalidArgument,
              "exact Gaussian scheme needs a Gaussian 2-d model");
      const auto k = density::kernel_params(models::generator(model, measure), x0, x0, 0.0, T);
      const models::Mat L = k.covariance.llt().matrixL();
      const Vec m = k.mean;
      const double qv = model.covariance_rate(0.0, x0)(0, 0) * T;
      path = [=](PathRng& r, std::size_t) {
        const double z1 = r.normal(), z2 = r.normal();
        return Out{m[0] + L(0, 0) * z1, m[1] + L(1, 0) * z1 + L(1, 1) * z2, qv};
      };
      break;
    }
    case SchemeKind::EulerFullTruncation: {
      require(model.named && std::holds_alternative<models::Heston>(*model.named),
              ErrorKind::InvalidArgument, "full-truncation scheme needs a Heston model");
      const auto p = std::get<models::Heston>(*model.named);
      const double m = measure == Measure::P ? p.m : 0.0;
      const double rc = std::sqrt(std::max(0.0, 1.0 - p.rho * p.rho));
      path = [=](PathRng& r, std::size_t i) {
        double x = p.x1, v = p.x2, qv = 0.0;
        for (int k = 0; k < steps; ++k) {
          const double vp = v > 0.0 ? v : 0.0;
          const double sv = std::sqrt(vp);
          const double z1 = r.normal(), z2 = r.normal();
          x += (m - 0.5 * vp) * dt + sv * sdt * z1;
          v += p.kappa * (p.theta - vp) * dt + p.delta * sv * sdt * (p.rho * z1 + rc * z2);
          qv += vp * dt;
          if (!std::isfinite(x) || !std::isfinite(v)) blow_up(k + 1, i);
        }
        return Out{x, v, qv};
      };
      break;
    }
    case SchemeKind::EulerLog: {
      if (model.named && std::holds_alternative<models::Cev>(*model.named)) {
        const auto p = std::get<models::Cev>(*model.named);
        const double m = measure == Measure::P ? p.m : 0.0;
        const double e = p.eta - 1.0;
        path = [=](PathRng& r, std::size_t i) {
          double x = x0[0], avg = has_avg ? x0[1] : 0.0, qv = 0.0;
          for (int k = 0; k < steps; ++k) {
            const double s = p.delta * std::exp(e * x);
            const double s2 = s * s;
            const double xn = x + (m - 0.5 * s2) * dt + s * sdt * r.normal();
            avg += 0.5 * (x + xn) * dt / horizon;
            qv += s2 * dt;
            x = xn;
            if (!std::isfinite(x)) blow_up(k + 1, i);
          }
          return Out{x, avg, qv};
        };
      } else {
        // Generic Euler on the model's own coefficients; a running average is integrated by
        // the trapezoid rule.
        const int d = model.dim;
        path = [=, &model](PathRng& r, std::size_t i) {
          Vec x = x0;
          double qv = 0.0;
          for (int k = 0; k < steps; ++k) {
            const double t = k * dt;
            const Vec mu = model.drift(measure, t, x);
            const models::Mat s = model.diffusion(t, x);
            Vec z(s.cols());
            for (int j = 0; j < z.size(); ++j) z[j] = r.normal();
            Vec xn = x + mu * dt + s * z * sdt;
            if (has_avg) xn[1] = x[1] + 0.5 * (x[0] + xn[0]) * dt / horizon;
            qv += (s.row(0) * s.row(0).transpose())(0) * dt;
            x = xn;
            if (!x.allFinite()) blow_up(k + 1, i);
          }
          return Out{x[0], d > 1 ? x[1] : 0.0, qv};
        };
      }
      break;
    }
  }

  b.x1.resize(paths);
  if (scheme.record_second && (model.dim > 1)) b.x2.resize(paths);
  if (scheme.record_qv) b.qv.resize(paths);
  const std::size_t blocks = (paths + kBlock - 1) / kBlock;
  parallel_for(
      blocks,
      [&](std::size_t blk) {
        const std::size_t lo = blk * kBlock, hi = std::min(paths, lo + kBlock);
        for (std::size_t i = lo; i < hi; ++i) {
          PathRng rng(seed, i);
          const Out o = path(rng, i);
          b.x1[i] = o.x1;
          if (!b.x2.empty()) b.x2[i] = o.x2;
          if (!b.qv.empty()) b.qv[i] = o.qv;
        }
      },
      workers);
  return b;
}

McEstimate summarize(std::span<const double> v, std::uint64_t seed) {
  McEstimate e;
  e.paths = v.size();
  e.seed = seed;
  if (v.empty()) return e;
  const double n = static_cast<double>(v.size());
  e.value = pairwise_sum(v) / n;
  std::vector<double> dev(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) dev[i] = (v[i] - e.value) * (v[i] - e.value);
  const double var = v.size() > 1 ? pairwise_sum(dev) / (n - 1.0) : 0.0;
  e.std_error = std::sqrt(var / n);
  return e;
}

McEstimate estimate(const PathBatch& batch, const Functional& f, int workers) {
  std::vector<double> v(batch.paths);
  const std::size_t blocks = (batch.paths + kBlock - 1) / kBlock;
  parallel_for(
      blocks,
      [&](std::size_t blk) {
        const std::size_t lo = blk * kBlock, hi = std::min(batch.paths, lo + kBlock);
        for (std::size_t i = lo; i < hi; ++i) v[i] = f(batch.state(i));
      },
      workers);
  for (std::size_t i = 0; i < v.size(); ++i)
    require(std::isfinite(v[i]), ErrorKind::Simulation,
            "non-finite functional value on path " + std::to_string(i));
  return summarize(v, batch.seed);
}

}  // namespace stathedge::mc
