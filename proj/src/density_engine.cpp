#include "stathedge/density_engine.hpp"

#include <boost/math/distributions/non_central_chi_squared.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <numbers>
#include <unsupported/Eigen/MatrixFunctions>

#include "stathedge/errors.hpp"
#include "stathedge/quadrature.hpp"

namespace stathedge::density {

using models::GeneratorCoefficients;
using models::Measure;
using models::ModelSpec;
using models::order;

namespace {

constexpr int kTimeNodes = 16;

double factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

DiffOperator monomial(int d, const MultiIndex& beta) {
  DiffOperator m = DiffOperator::constant(1.0);
  for (int i = 0; i < d; ++i)
    if (beta[i] > 0) m = m * DiffOperator::variable(i).pow(beta[i]);
  return m;
}

std::vector<MultiIndex> indices_of_order(int d, int n) {
  std::vector<MultiIndex> out;
  if (d == 1) {
    out.push_back({n, 0});
  } else {
    for (int a = n; a >= 0; --a) out.push_back({a, n - a});
  }
  return out;
}

Mat flow(const Mat& B, double dt) {
  if (B.isZero(0.0)) return Mat::Identity(B.rows(), B.cols());
  return (B * dt).exp();
}

// Frozen covariance rate sigma sigma^T at (u, xbar) assembled from generator coefficients.
Mat frozen_covariance_rate(const GeneratorCoefficients& c, double u, const Vec& xbar) {
  const int d = c.dim();
  Mat a(d, d);
  if (d == 1) {
    a(0, 0) = 2.0 * c.value({2, 0}, u, xbar);
  } else {
    a(0, 0) = 2.0 * c.value({2, 0}, u, xbar);
    a(1, 1) = 2.0 * c.value({0, 2}, u, xbar);
    a(0, 1) = a(1, 0) = c.value({1, 1}, u, xbar);
  }
  return a;
}

Vec frozen_drift(const GeneratorCoefficients& c, double u, const Vec& xbar) {
  const int d = c.dim();
  Vec b(d);
  b[0] = c.value({1, 0}, u, xbar);
  if (d == 2) b[1] = c.value({0, 1}, u, xbar);
  return b - c.linear_drift() * xbar;
}

struct Segment {
  Mat flow;
  Vec shift;
  Mat cov;
};

// Flow, shift and covariance of the frozen kernel over [t, s].
Segment segment(const GeneratorCoefficients& c, const Vec& xbar, double t, double s) {
  const int d = c.dim();
  const Mat& B = c.linear_drift();
  Segment seg{flow(B, s - t), Vec::Zero(d), Mat::Zero(d, d)};
  if (s <= t) return seg;
  const auto& rule = quad::gauss_legendre(kTimeNodes);
  const double half = 0.5 * (s - t), mid = 0.5 * (s + t);
  for (int k = 0; k < kTimeNodes; ++k) {
    const double u = mid + half * rule.nodes[k];
    const double w = half * rule.weights[k];
    const Mat F = flow(B, s - u);
    seg.shift += w * F * frozen_drift(c, u, xbar);
    seg.cov += w * F * frozen_covariance_rate(c, u, xbar) * F.transpose();
  }
  seg.cov = 0.5 * (seg.cov + seg.cov.transpose());
  return seg;
}

// Substitutes the commuting operators X' into a polynomial in (x - xbar).
DiffOperator substitute(const DiffOperator& poly, const std::array<DiffOperator, 2>& X, int d) {
  DiffOperator out;
  std::array<std::vector<DiffOperator>, 2> powers;
  for (const auto& t : poly.terms()) {
    DiffOperator term = DiffOperator::constant(t.c);
    for (int i = 0; i < d; ++i) {
      auto& cache = powers[i];
      if (cache.empty()) cache.push_back(DiffOperator::constant(1.0));
      while (static_cast<int>(cache.size()) <= t.x[i]) cache.push_back(cache.back() * X[i]);
      if (t.x[i] > 0) term = term * cache[t.x[i]];
    }
    out += term;
  }
  return out;
}

class OperatorBuilder {
 public:
  OperatorBuilder(const GeneratorCoefficients& c, const Vec& xbar, double t, int n)
      : c_(c), xbar_(xbar), t_(t), d_(c.dim()) {
    if (c.time_homogeneous()) {
      for (int i = 1; i <= n; ++i) taylor_.push_back(taylor_coefficients(c, xbar, i, t));
    }
  }

  // G_i(t, s) = sum_alpha a_{alpha,i}(s, X(t,s)) D(t,s)^alpha.
  DiffOperator G(int i, double s) const {
    const Segment seg = segment(c_, xbar_, t_, s);
    const Mat finv_t = seg.flow.inverse().transpose();
    const Mat cd = seg.cov * finv_t;
    const Vec offset = seg.flow * xbar_ + seg.shift - xbar_;
    std::array<DiffOperator, 2> X, D;
    for (int j = 0; j < d_; ++j) {
      X[j] = DiffOperator::constant(offset[j]);
      for (int k = 0; k < d_; ++k) {
        X[j] += seg.flow(j, k) * DiffOperator::variable(k);
        X[j] += cd(j, k) * DiffOperator::partial(k);
        D[j] += finv_t(j, k) * DiffOperator::partial(k);
      }
    }
    const auto coeffs = c_.time_homogeneous() ? taylor_[i - 1] : taylor_coefficients(c_, xbar_, i, s);
    DiffOperator out;
    for (const auto& [alpha, poly] : coeffs) {
      if (poly.is_zero()) continue;
      DiffOperator dal = DiffOperator::constant(1.0);
      for (int j = 0; j < d_; ++j)
        if (alpha[j] > 0) dal = dal * D[j].pow(alpha[j]);
      out += substitute(poly, X, d_) * dal;
    }
    return out;
  }

 private:
  const GeneratorCoefficients& c_;
  Vec xbar_;
  double t_;
  int d_;
  std::vector<std::map<MultiIndex, DiffOperator>> taylor_;
};

void compositions(int n, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (n == 0) {
    out.push_back(cur);
    return;
  }
  for (int i = 1; i <= n; ++i) {
    cur.push_back(i);
    compositions(n - i, cur, out);
    cur.pop_back();
  }
}

// Nested simplex integral t < t_1 < ... < t_k < T of G_{i_1}(t_1) ... G_{i_k}(t_k).
void nested(const OperatorBuilder& b, const std::vector<int>& idx, std::size_t level, double lower,
            double T, const DiffOperator& prefix, double weight, DiffOperator& acc) {
  const auto& rule = quad::gauss_legendre(kTimeNodes);
  const double half = 0.5 * (T - lower), mid = 0.5 * (T + lower);
  for (int k = 0; k < kTimeNodes; ++k) {
    const double s = mid + half * rule.nodes[k];
    const double w = weight * half * rule.weights[k];
    DiffOperator op = prefix * b.G(idx[level], s);
    if (level + 1 == idx.size()) {
      acc += op * w;
    } else {
      nested(b, idx, level + 1, s, T, op, w, acc);
    }
  }
}

using HermiteCache = std::map<MultiIndex, DiffOperator>;

// H_beta(z) with d^beta_mu N(y - mu; C) = H_beta(z) N(z; C).
const DiffOperator& hermite(const MultiIndex& beta, const Mat& P, int d, HermiteCache& cache) {
  if (auto it = cache.find(beta); it != cache.end()) return it->second;
  DiffOperator h;
  if (order(beta) == 0) {
    h = DiffOperator::constant(1.0);
  } else {
    const int i = beta[0] > 0 ? 0 : 1;
    MultiIndex prev = beta;
    prev[i] -= 1;
    const DiffOperator hp = hermite(prev, P, d, cache);
    DiffOperator pz;
    for (int j = 0; j < d; ++j) pz += P(i, j) * DiffOperator::variable(j);
    h = hp * pz + hp.polynomial_derivative(i) * -1.0;
  }
  return cache.emplace(beta, std::move(h)).first->second;
}

DensityApprox::Polynomial to_polynomial(const DiffOperator& p) {
  DensityApprox::Polynomial out;
  for (const auto& t : p.terms()) out.push_back({{t.x[0], t.x[1]}, t.c});
  return out;
}

}  // namespace

std::map<MultiIndex, DiffOperator> taylor_coefficients(const GeneratorCoefficients& coeffs,
                                                       const Vec& xbar, int n, double t) {
  require(n >= 0, ErrorKind::InvalidArgument, "taylor_coefficients: negative order");
  const int d = coeffs.dim();
  const Mat& B = coeffs.linear_drift();
  std::map<MultiIndex, DiffOperator> out;
  for (const auto& alpha : coeffs.indices()) {
    DiffOperator poly;
    for (const auto& beta : indices_of_order(d, n)) {
      double v = coeffs.derivative(alpha, beta, t, xbar);
      if (order(alpha) == 1) {
        const int i = alpha[0] == 1 ? 0 : 1;
        if (n == 0) v -= (B.row(i) * xbar)(0);
        if (n == 1) v -= B(i, beta[0] == 1 ? 0 : 1);
      }
      require(std::isfinite(v), ErrorKind::Numerical,
              "numerical-derivative failure in Taylor coefficient of order " + std::to_string(n));
      v /= factorial(beta[0]) * factorial(beta[1]);
      if (std::abs(v) > 1e-15 * (1.0 + std::abs(v)) && v != 0.0) poly += monomial(d, beta) * v;
    }
    out.emplace(alpha, std::move(poly));
  }
  return out;
}

GaussianKernelParams kernel_params(const GeneratorCoefficients& coeffs, const Vec& x,
                                   const Vec& xbar, double t, double T) {
  require(T > t, ErrorKind::InvalidArgument, "kernel_params: T must exceed t");
  const Segment seg = segment(coeffs, xbar, t, T);
  Eigen::LLT<Mat> llt(seg.cov);
  require(llt.info() == Eigen::Success && seg.cov.diagonal().minCoeff() > 0.0,
          ErrorKind::Numerical, "ellipticity violation: kernel covariance is not positive definite");
  return {seg.flow * x + seg.shift, seg.cov, seg.flow, seg.shift};
}

DiffOperator expansion_operator(const GeneratorCoefficients& coeffs, const Vec& xbar, int n,
                                double t, double T) {
  require(n >= 0, ErrorKind::InvalidArgument, "expansion_operator: negative order");
  require(n <= kMaxOrder, ErrorKind::Unsupported,
          "unsupported expansion order " + std::to_string(n) + " (max " +
              std::to_string(kMaxOrder) + ")");
  if (n == 0) return DiffOperator::constant(1.0);
  OperatorBuilder builder(coeffs, xbar, t, n);
  std::vector<std::vector<int>> comps;
  std::vector<int> cur;
  compositions(n, cur, comps);
  DiffOperator acc;
  for (const auto& idx : comps) nested(builder, idx, 0, t, T, DiffOperator::constant(1.0), 1.0, acc);
  acc.prune(1e-300);
  return acc;
}

DensityApprox::DensityApprox(GaussianKernelParams kernel, std::vector<Polynomial> corrections)
    : kernel_(std::move(kernel)), poly_(std::move(corrections)) {
  const int d = dim();
  precision_ = kernel_.covariance.inverse();
  log_norm_ = -0.5 * d * std::log(2.0 * std::numbers::pi) - 0.5 * std::log(kernel_.covariance.determinant());
}

double DensityApprox::poly_value(const Vec& z, int upto) const {
  double s = 0.0;
  for (int n = 0; n <= upto && n < static_cast<int>(poly_.size()); ++n) {
    for (const auto& m : poly_[n]) {
      double v = m.c;
      for (int i = 0; i < dim(); ++i)
        if (m.power[i]) v *= std::pow(z[i], m.power[i]);
      s += v;
    }
  }
  return s;
}

double DensityApprox::evaluate(const Vec& y, int upto) const {
  const Vec z = y - kernel_.mean;
  const double q = z.dot(precision_ * z);
  return std::exp(log_norm_ - 0.5 * q) * poly_value(z, upto);
}

double DensityApprox::marginal_first(double y1, int upto) const {
  if (dim() == 1) return evaluate(Vec::Constant(1, y1), upto < 0 ? order() : upto);
  return slice_integral(y1, [](double) { return 1.0; }, {}, upto);
}

double DensityApprox::slice_integral(double y1, const std::function<double(double)>& f,
                                     std::span<const double> breaks, int upto) const {
  require(dim() == 2, ErrorKind::InvalidArgument, "slice_integral needs a 2-d density");
  const int n = upto < 0 ? order() : upto;
  // Conditional Gaussian of y2 given y1 centres the integration window.
  const auto& C = kernel_.covariance;
  const double m2 = kernel_.mean[1] + C(0, 1) / C(0, 0) * (y1 - kernel_.mean[0]);
  const double s2 = std::sqrt(std::max(C(1, 1) - C(0, 1) * C(0, 1) / C(0, 0), 1e-300));
  const double a = m2 - 10.0 * s2, b = m2 + 10.0 * s2;
  Vec y(2);
  y[0] = y1;
  return quad::integrate_piecewise(
      [&](double v) {
        y[1] = v;
        return f(v) * evaluate(y, n);
      },
      a, b, breaks, s2, 8);
}

double DensityApprox::normalization() const {
  const int d = dim();
  const std::size_t m = 401;
  std::array<std::vector<double>, 2> axes;
  std::array<double, 2> h{};
  for (int i = 0; i < d; ++i) {
    const double sd = std::sqrt(kernel_.covariance(i, i));
    axes[i] = quad::linspace(kernel_.mean[i] - 8 * sd, kernel_.mean[i] + 8 * sd, m);
    h[i] = axes[i][1] - axes[i][0];
  }
  auto tw = [m](std::size_t k) { return (k == 0 || k + 1 == m) ? 0.5 : 1.0; };
  double s = 0.0;
  if (d == 1) {
    for (std::size_t k = 0; k < m; ++k) s += tw(k) * evaluate(Vec::Constant(1, axes[0][k]), order());
    return s * h[0];
  }
  Vec y(2);
  for (std::size_t i = 0; i < m; ++i) {
    y[0] = axes[0][i];
    for (std::size_t j = 0; j < m; ++j) {
      y[1] = axes[1][j];
      s += tw(i) * tw(j) * evaluate(y, order());
    }
  }
  return s * h[0] * h[1];
}

DensityApprox density_approx(const ModelSpec& model, Measure measure, const ExpansionSpec& spec,
                             double t, const Vec& x, double T) {
  require(spec.order >= 0 && spec.order <= kMaxOrder, ErrorKind::Unsupported,
          "unsupported expansion order " + std::to_string(spec.order));
  require(x.size() == model.dim, ErrorKind::InvalidArgument, "density_approx: state dimension mismatch");
  const auto coeffs = models::generator(model, measure);
  const int d = model.dim;
  const Vec xbar = spec.expansion_point.value_or(x);
  auto kernel = kernel_params(coeffs, x, xbar, t, T);
  const Mat P = kernel.covariance.inverse();
  const Vec shift = x - xbar;
  HermiteCache cache;
  std::vector<DensityApprox::Polynomial> polys;
  polys.push_back({{{0, 0}, 1.0}});
  for (int n = 1; n <= spec.order; ++n) {
    // Frozen at x, the operator has constant coefficients in d/dx; d/dx_k = sum_j F_jk d/dmu_j.
    const DiffOperator L = expansion_operator(coeffs, xbar, n, t, T).freeze_at(shift);
    DiffOperator q;
    for (const auto& term : L.terms()) {
      DiffOperator dmu = DiffOperator::constant(term.c);
      for (int k = 0; k < d; ++k) {
        if (term.d[k] == 0) continue;
        DiffOperator dk;
        for (int j = 0; j < d; ++j) dk += kernel.flow(j, k) * DiffOperator::partial(j);
        dmu = dmu * dk.pow(term.d[k]);
      }
      for (const auto& mt : dmu.terms()) q += hermite({mt.d[0], mt.d[1]}, P, d, cache) * mt.c;
    }
    polys.push_back(to_polynomial(q));
  }
  return DensityApprox(std::move(kernel), std::move(polys));
}

double expectation_approx(const ModelSpec& model, Measure measure, const ExpansionSpec& spec,
                          const std::function<double(const Vec&)>& phi, double t, const Vec& x,
                          double T) {
  const DensityApprox p = density_approx(model, measure, spec, t, x, T);
  const auto& k = p.kernel();
  const double sd0 = std::sqrt(k.covariance(0, 0));
  const double a = k.mean[0] - 8 * sd0, b = k.mean[0] + 8 * sd0;
  double v = 0.0;
  if (p.dim() == 1) {
    v = quad::integrate_piecewise([&](double y) { return phi(Vec::Constant(1, y)) * p.evaluate(y); },
                                  a, b, {}, sd0 / 4, 16);
  } else {
    v = quad::integrate_piecewise(
        [&](double y1) {
          return p.slice_integral(y1, [&](double y2) {
            Vec y(2);
            y << y1, y2;
            return phi(y);
          });
        },
        a, b, {}, sd0 / 2, 8);
  }
  require(std::isfinite(v), ErrorKind::Numerical, "expectation_approx: quadrature did not converge");
  return v;
}

double cev_log_density(const models::Cev& p, Measure measure, double tau, double x0, double u) {
  const double m = measure == Measure::P ? p.m : 0.0;
  if (p.eta >= 1.0) {
    const double mean = x0 + (m - 0.5 * p.delta * p.delta) * tau;
    const double sd = p.delta * std::sqrt(tau);
    return quad::normal_pdf((u - mean) / sd) / sd;
  }
  const double b = 1.0 - p.eta;
  const double d2 = p.delta * p.delta;
  const double k = m == 0.0 ? 1.0 / (2.0 * d2 * b * b * tau)
                            : 2.0 * m / (d2 * 2.0 * b * std::expm1(2.0 * m * b * tau));
  const double x = k * std::exp(2.0 * b * (x0 + m * tau));
  const double y = k * std::exp(2.0 * b * u);
  boost::math::non_central_chi_squared dist(2.0 + 1.0 / b, 2.0 * y);
  const double py = 2.0 * boost::math::pdf(dist, 2.0 * x);
  return py * 2.0 * b * y;
}

double cev_absorption(const models::Cev& p, Measure measure, double tau, double x0) {
  if (p.eta >= 1.0) return 0.0;
  const double m = measure == Measure::P ? p.m : 0.0;
  const double b = 1.0 - p.eta;
  const double d2 = p.delta * p.delta;
  const double k = m == 0.0 ? 1.0 / (2.0 * d2 * b * b * tau)
                            : 2.0 * m / (d2 * 2.0 * b * std::expm1(2.0 * m * b * tau));
  const double x = k * std::exp(2.0 * b * (x0 + m * tau));
  return boost::math::gamma_q(1.0 / (2.0 * b), x);
}

std::function<double(const Vec&)> exact_density(const ModelSpec& model, Measure measure, double t,
                                                const Vec& x, double T) {
  require(T > t, ErrorKind::InvalidArgument, "exact_density: T must exceed t");
  switch (model.closed_form) {
    case models::ClosedForm::Lognormal1D:
    case models::ClosedForm::Gaussian2D: {
      // Constant coefficients: the frozen Gaussian kernel is exact.
      const auto coeffs = models::generator(model, measure);
      DensityApprox g(kernel_params(coeffs, x, x, t, T), {{{{0, 0}, 1.0}}});
      return [g](const Vec& y) { return g(y); };
    }
    case models::ClosedForm::CevExact: {
      const auto p = std::get<models::Cev>(*model.named);
      const double x0 = x[0];
      return [p, measure, tau = T - t, x0](const Vec& y) {
        return cev_log_density(p, measure, tau, x0, y[0]);
      };
    }
    default:
      fail(ErrorKind::Unsupported, "exact_density: model has no closed-form transition density");
  }
}

}  // namespace stathedge::density
