#include "stathedge/market_models.hpp"

#include <cmath>
#include <string>

#include "stathedge/errors.hpp"

namespace stathedge::models {

namespace {

double pos(double v) { return v > 0.0 ? v : 0.0; }

ModelSpec gbm(const Gbm1D& p) {
  ModelSpec m;
  m.dim = 1;
  m.x0 = Vec::Constant(1, std::log(p.s0));
  const double s2 = p.sigma * p.sigma;
  m.drift_p = [=](double, const Vec&) { return Vec::Constant(1, p.mu - 0.5 * s2); };
  m.drift_q = [=](double, const Vec&) { return Vec::Constant(1, -0.5 * s2); };
  m.diffusion = [=](double, const Vec&) { return Mat::Constant(1, 1, p.sigma); };
  m.closed_form = ClosedForm::Lognormal1D;
  m.derivative = [=](Measure ms, const MultiIndex& a, const MultiIndex& b, double, const Vec&) {
    if (order(b) > 0) return 0.0;
    if (a[0] == 2) return 0.5 * s2;
    return ms == Measure::P ? p.mu - 0.5 * s2 : -0.5 * s2;
  };
  return m;
}

ModelSpec correlated(const CorrelatedGbm2D& p) {
  ModelSpec m;
  m.dim = 2;
  m.x0 = Vec(2);
  m.x0 << std::log(p.s0), std::log(p.v0);
  const double a1 = 0.5 * p.sigma1 * p.sigma1, a2 = 0.5 * p.sigma2 * p.sigma2;
  m.drift_p = [=](double, const Vec&) {
    Vec v(2);
    v << p.mu1 - a1, p.mu2 - a2;
    return v;
  };
  m.drift_q = [=](double, const Vec&) {
    Vec v(2);
    v << -a1, -a2;
    return v;
  };
  m.diffusion = [=](double, const Vec&) {
    Mat s(2, 2);
    s << p.sigma1, 0.0, p.sigma2 * p.rho, p.sigma2 * std::sqrt(std::max(0.0, 1.0 - p.rho * p.rho));
    return s;
  };
  m.closed_form = ClosedForm::Gaussian2D;
  m.derivative = [=](Measure ms, const MultiIndex& a, const MultiIndex& b, double, const Vec&) {
    if (order(b) > 0) return 0.0;
    if (a == MultiIndex{1, 0}) return ms == Measure::P ? p.mu1 - a1 : -a1;
    if (a == MultiIndex{0, 1}) return ms == Measure::P ? p.mu2 - a2 : -a2;
    if (a == MultiIndex{2, 0}) return a1;
    if (a == MultiIndex{0, 2}) return a2;
    return p.rho * p.sigma1 * p.sigma2;
  };
  return m;
}

ModelSpec heston(const Heston& p) {
  ModelSpec m;
  m.dim = 2;
  m.x0 = Vec(2);
  m.x0 << p.x1, p.x2;
  m.drift_p = [=](double, const Vec& x) {
    Vec v(2);
    v << p.m - 0.5 * pos(x[1]), p.kappa * (p.theta - pos(x[1]));
    return v;
  };
  m.drift_q = [=](double, const Vec& x) {
    Vec v(2);
    v << -0.5 * pos(x[1]), p.kappa * (p.theta - pos(x[1]));
    return v;
  };
  m.diffusion = [=](double, const Vec& x) {
    const double sv = std::sqrt(pos(x[1]));
    Mat s(2, 2);
    s << sv, 0.0, p.delta * p.rho * sv, p.delta * std::sqrt(std::max(0.0, 1.0 - p.rho * p.rho)) * sv;
    return s;
  };
  m.closed_form = ClosedForm::HestonJoint;
  // Coefficients are affine in x2 (above the floor) and independent of x1.
  m.derivative = [=](Measure ms, const MultiIndex& a, const MultiIndex& b, double, const Vec& x) {
    if (b[0] > 0 || b[1] > 1) return 0.0;
    const double v = pos(x[1]);
    double value = 0.0, slope = 0.0;
    if (a == MultiIndex{1, 0}) {
      value = (ms == Measure::P ? p.m : 0.0) - 0.5 * v;
      slope = -0.5;
    } else if (a == MultiIndex{0, 1}) {
      value = p.kappa * (p.theta - v);
      slope = -p.kappa;
    } else if (a == MultiIndex{2, 0}) {
      value = 0.5 * v;
      slope = 0.5;
    } else if (a == MultiIndex{1, 1}) {
      value = p.rho * p.delta * v;
      slope = p.rho * p.delta;
    } else {
      value = 0.5 * p.delta * p.delta * v;
      slope = 0.5 * p.delta * p.delta;
    }
    return b[1] == 0 ? value : slope;
  };
  return m;
}

ModelSpec cev(const Cev& p) {
  ModelSpec m;
  m.dim = 1;
  m.x0 = Vec::Constant(1, p.x1);
  const double k = 2.0 * (p.eta - 1.0);
  auto half_var = [=](double x) { return 0.5 * p.delta * p.delta * std::exp(k * x); };
  m.drift_p = [=](double, const Vec& x) { return Vec::Constant(1, p.m - half_var(x[0])); };
  m.drift_q = [=](double, const Vec& x) { return Vec::Constant(1, -half_var(x[0])); };
  m.diffusion = [=](double, const Vec& x) {
    return Mat::Constant(1, 1, p.delta * std::exp((p.eta - 1.0) * x[0]));
  };
  m.closed_form = ClosedForm::CevExact;
  m.derivative = [=](Measure ms, const MultiIndex& a, const MultiIndex& b, double, const Vec& x) {
    const int n = b[0];
    const double d = std::pow(k, n) * half_var(x[0]);
    if (a[0] == 2) return d;
    if (n == 0) return (ms == Measure::P ? p.m : 0.0) - d;
    return -d;
  };
  return m;
}

}  // namespace

Measure parse_measure(std::string_view tag) {
  if (tag == "P" || tag == "physical") return Measure::P;
  if (tag == "Q" || tag == "pricing") return Measure::Q;
  fail(ErrorKind::InvalidArgument, "unknown measure tag '" + std::string(tag) + "'");
}

void validate(const NamedModel& named) {
  std::visit(
      [](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, Gbm1D>) {
          require(p.sigma > 0 && p.s0 > 0, ErrorKind::InvalidArgument,
                  "gbm: sigma and s0 must be positive");
        } else if constexpr (std::is_same_v<T, CorrelatedGbm2D>) {
          require(p.sigma1 > 0 && p.sigma2 > 0 && p.s0 > 0 && p.v0 > 0, ErrorKind::InvalidArgument,
                  "correlated_gbm: sigmas and initial prices must be positive");
          require(std::abs(p.rho) <= 1.0, ErrorKind::InvalidArgument, "correlated_gbm: |rho| > 1");
        } else if constexpr (std::is_same_v<T, Heston>) {
          require(p.kappa > 0 && p.theta > 0 && p.delta > 0, ErrorKind::InvalidArgument,
                  "heston: kappa, theta, delta must be positive");
          require(std::abs(p.rho) <= 1.0, ErrorKind::InvalidArgument, "heston: |rho| > 1");
          require(p.x2 >= 0, ErrorKind::InvalidArgument, "heston: initial variance must be >= 0");
        } else {
          require(p.delta > 0, ErrorKind::InvalidArgument, "cev: delta must be positive");
          require(p.eta > 0 && p.eta <= 1, ErrorKind::InvalidArgument, "cev: eta must lie in (0, 1]");
        }
      },
      named);
}

ModelSpec make_model(const NamedModel& named) {
  validate(named);
  ModelSpec m = std::visit(
      [](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, Gbm1D>) return gbm(p);
        else if constexpr (std::is_same_v<T, CorrelatedGbm2D>) return correlated(p);
        else if constexpr (std::is_same_v<T, Heston>) return heston(p);
        else return cev(p);
      },
      named);
  m.named = named;
  m.linear_drift = Mat::Zero(m.dim, m.dim);
  return m;
}

ModelSpec with_running_average(const ModelSpec& base, double horizon) {
  require(base.dim == 1, ErrorKind::InvalidArgument, "running average needs a 1-d base model");
  require(horizon > 0, ErrorKind::InvalidArgument, "running average horizon must be positive");
  ModelSpec m;
  m.dim = 2;
  m.x0 = Vec(2);
  m.x0 << base.x0[0], 0.0;
  auto lift = [horizon](DriftFn f) {
    return [f, horizon](double t, const Vec& x) {
      Vec v(2);
      v << f(t, x.head(1))[0], x[0] / horizon;
      return v;
    };
  };
  m.drift_p = lift(base.drift_p);
  m.drift_q = lift(base.drift_q);
  auto sig = base.diffusion;
  m.diffusion = [sig](double t, const Vec& x) {
    Mat s = Mat::Zero(2, 2);
    s(0, 0) = sig(t, x.head(1))(0, 0);
    return s;
  };
  m.closed_form = base.closed_form == ClosedForm::Lognormal1D ? ClosedForm::Gaussian2D
                                                              : ClosedForm::None;
  m.linear_drift = Mat::Zero(2, 2);
  m.linear_drift(1, 0) = 1.0 / horizon;
  if (base.derivative) {
    auto d1 = base.derivative;
    m.derivative = [d1, horizon](Measure ms, const MultiIndex& a, const MultiIndex& b, double t,
                                 const Vec& x) {
      if (a == MultiIndex{0, 1}) {
        if (b[1] > 0) return 0.0;
        if (b[0] == 0) return x[0] / horizon;
        return b[0] == 1 ? 1.0 / horizon : 0.0;
      }
      if (a[1] > 0 || b[1] > 0) return 0.0;  // a_(1,1), a_(0,2) vanish; base ignores x2
      return d1(ms, MultiIndex{a[0], 0}, MultiIndex{b[0], 0}, t, x.head(1));
    };
  }
  m.named = base.named;
  m.average_horizon = horizon;
  m.time_homogeneous = base.time_homogeneous;
  return m;
}

GeneratorCoefficients::GeneratorCoefficients(const ModelSpec& model, Measure measure)
    : dim_(model.dim),
      measure_(measure),
      drift_(measure == Measure::P ? model.drift_p : model.drift_q),
      diffusion_(model.diffusion),
      analytic_(model.derivative),
      linear_drift_(model.linear_drift.size() ? model.linear_drift : Mat::Zero(model.dim, model.dim)),
      time_homogeneous_(model.time_homogeneous) {
  require(dim_ == 1 || dim_ == 2, ErrorKind::Unsupported, "models must have dimension 1 or 2");
  require(static_cast<bool>(drift_) && static_cast<bool>(diffusion_), ErrorKind::InvalidArgument,
          "model is missing drift or diffusion evaluators");
  if (dim_ == 1) {
    indices_ = {{1, 0}, {2, 0}};
  } else {
    indices_ = {{1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}};
  }
}

double GeneratorCoefficients::value(const MultiIndex& alpha, double t, const Vec& x) const {
  if (order(alpha) == 1) {
    const Vec mu = drift_(t, x);
    return alpha[0] == 1 ? mu[0] : mu[1];
  }
  const Mat s = diffusion_(t, x);
  const Mat c = s * s.transpose();
  if (alpha[0] == 2) return 0.5 * c(0, 0);
  if (alpha[1] == 2) return 0.5 * c(1, 1);
  return c(0, 1);
}

double GeneratorCoefficients::derivative(const MultiIndex& alpha, const MultiIndex& beta,
                                         double t, const Vec& x) const {
  if (order(beta) == 0) return value(alpha, t, x);
  if (analytic_) return analytic_(measure_, alpha, beta, t, x);
  return fd_derivative(alpha, beta, t, x);
}

double GeneratorCoefficients::fd_derivative(const MultiIndex& alpha, MultiIndex beta, double t,
                                            const Vec& x) const {
  if (order(beta) == 0) return value(alpha, t, x);
  const int i = beta[0] > 0 ? 0 : 1;
  beta[i] -= 1;
  const double h = 1e-4 * std::max(1.0, std::abs(x[i]));
  auto at = [&](double shift) {
    Vec y = x;
    y[i] += shift;
    return fd_derivative(alpha, beta, t, y);
  };
  return (-at(2 * h) + 8.0 * at(h) - 8.0 * at(-h) + at(-2 * h)) / (12.0 * h);
}

GeneratorCoefficients generator(const ModelSpec& model, Measure measure) {
  return GeneratorCoefficients(model, measure);
}

DriftCheckReport martingale_drift_check(const ModelSpec& model,
                                        std::span<const std::pair<double, Vec>> points) {
  require(!points.empty(), ErrorKind::InvalidArgument, "martingale_drift_check: no sample points");
  DriftCheckReport rep;
  for (std::size_t k = 0; k < points.size(); ++k) {
    const auto& [t, x] = points[k];
    const double drift = model.drift_q(t, x)[0];
    const double target = -0.5 * model.covariance_rate(t, x)(0, 0);
    const double scale = std::max(std::abs(target), 1e-300);
    const double err = std::abs(drift - target) / scale;
    if (err > rep.max_relative_error) {
      rep.max_relative_error = err;
      rep.worst_index = k;
    }
  }
  rep.ok = rep.max_relative_error <= 1e-12;
  return rep;
}

}  // namespace stathedge::models
