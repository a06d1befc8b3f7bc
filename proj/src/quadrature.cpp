#include "stathedge/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "stathedge/errors.hpp"

namespace stathedge::quad {

namespace {

GaussRule build_rule(int n) {
  GaussRule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.nodes[i] = -x;
    r.nodes[n - 1 - i] = x;
    r.weights[i] = w;
    r.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) r.nodes[n / 2] = 0.0;
  return r;
}

}  // namespace

const GaussRule& gauss_legendre(int n) {
  require(n >= 1, ErrorKind::InvalidArgument, "gauss_legendre: n must be >= 1");
  static std::mutex mu;
  static std::map<int, GaussRule> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, build_rule(n)).first;
  return it->second;
}

double integrate(const std::function<double(double)>& f, double a, double b, int n) {
  const auto& r = gauss_legendre(n);
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += r.weights[i] * f(c + h * r.nodes[i]);
  return s * h;
}

NodeSet piecewise_nodes(double a, double b, std::span<const double> breaks, double max_width,
                        int n) {
  std::vector<double> edges{a};
  std::vector<double> inner;
  for (double x : breaks)
    if (x > a && x < b) inner.push_back(x);
  std::sort(inner.begin(), inner.end());
  for (double x : inner)
    if (x > edges.back()) edges.push_back(x);
  edges.push_back(b);

  const auto& r = gauss_legendre(n);
  NodeSet out;
  for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
    const double lo = edges[e], hi = edges[e + 1];
    const int pieces = std::max(1, static_cast<int>(std::ceil((hi - lo) / max_width)));
    const double step = (hi - lo) / pieces;
    for (int p = 0; p < pieces; ++p) {
      const double pa = lo + p * step;
      const double c = pa + 0.5 * step, h = 0.5 * step;
      for (int i = 0; i < n; ++i) {
        out.x.push_back(c + h * r.nodes[i]);
        out.w.push_back(h * r.weights[i]);
      }
    }
  }
  return out;
}

double integrate_piecewise(const std::function<double(double)>& f, double a, double b,
                           std::span<const double> breaks, double max_width, int n) {
  const NodeSet ns = piecewise_nodes(a, b, breaks, max_width, n);
  double s = 0.0;
  for (std::size_t i = 0; i < ns.x.size(); ++i) s += ns.w[i] * f(ns.x[i]);
  return s;
}

std::vector<double> simpson_weights(std::size_t points, double h) {
  require(points >= 3, ErrorKind::InvalidArgument, "simpson: need at least 3 points");
  std::vector<double> w(points, 0.0);
  const std::size_t intervals = points - 1;
  std::size_t simpson_end = intervals;
  if (intervals % 2 == 1) {
    require(points >= 4, ErrorKind::InvalidArgument, "simpson: need at least 4 points");
    simpson_end = intervals - 3;
    const std::size_t s = simpson_end;
    w[s] += 3.0 * h / 8.0;
    w[s + 1] += 9.0 * h / 8.0;
    w[s + 2] += 9.0 * h / 8.0;
    w[s + 3] += 3.0 * h / 8.0;
  }
  for (std::size_t i = 0; i + 2 <= simpson_end; i += 2) {
    w[i] += h / 3.0;
    w[i + 1] += 4.0 * h / 3.0;
    w[i + 2] += h / 3.0;
  }
  return w;
}

double simpson(std::span<const double> values, double h) {
  const auto w = simpson_weights(values.size(), h);
  double s = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) s += w[i] * values[i];
  return s;
}

std::vector<double> second_derivative(std::span<const double> f, double h) {
  const std::size_t n = f.size();
  require(n >= 6, ErrorKind::InvalidArgument, "second_derivative: grid needs at least 6 points");
  std::vector<double> d(n);
  const double s = 12.0 * h * h;
  for (std::size_t i = 2; i + 2 < n; ++i)
    d[i] = (-f[i - 2] + 16.0 * f[i - 1] - 30.0 * f[i] + 16.0 * f[i + 1] - f[i + 2]) / s;
  d[0] = (45.0 * f[0] - 154.0 * f[1] + 214.0 * f[2] - 156.0 * f[3] + 61.0 * f[4] - 10.0 * f[5]) / s;
  d[1] = (10.0 * f[0] - 15.0 * f[1] - 4.0 * f[2] + 14.0 * f[3] - 6.0 * f[4] + f[5]) / s;
  const std::size_t m = n - 1;
  d[m] = (45.0 * f[m] - 154.0 * f[m - 1] + 214.0 * f[m - 2] - 156.0 * f[m - 3] + 61.0 * f[m - 4] -
          10.0 * f[m - 5]) / s;
  d[m - 1] = (10.0 * f[m] - 15.0 * f[m - 1] - 4.0 * f[m - 2] + 14.0 * f[m - 3] - 6.0 * f[m - 4] +
              f[m - 5]) / s;
  return d;
}

std::size_t split_index(std::span<const double> K, double split) {
  return static_cast<std::size_t>(std::lower_bound(K.begin(), K.end(), split) - K.begin());
}

namespace {

// adds the integral over [u, v] of the cubic through K[a..a+3] to w
void add_extrapolated(std::span<const double> K, std::size_t a, double u, double v,
                      std::vector<double>& w) {
  if (v <= u) return;
  const auto& r = gauss_legendre(4);
  const double c = 0.5 * (u + v), h = 0.5 * (v - u);
  for (int g = 0; g < 4; ++g) {
    const double x = c + h * r.nodes[g];
    for (std::size_t j = 0; j < 4; ++j) {
      double l = 1.0;
      for (std::size_t k = 0; k < 4; ++k)
        if (k != j) l *= (x - K[a + k]) / (K[a + j] - K[a + k]);
      w[a + j] += h * r.weights[g] * l;
    }
  }
}

}  // namespace

std::vector<double> split_weights(std::span<const double> K, double split) {
  const std::size_t n = K.size();
  require(n >= 4, ErrorKind::InvalidArgument, "split_weights: grid needs at least 4 points");
  const double h = (K[n - 1] - K[0]) / static_cast<double>(n - 1);
  const std::size_t m = split_index(K, split);
  std::vector<double> w(n, 0.0);
  if (m > 0) {
    require(m >= 4, ErrorKind::InvalidArgument, "split_weights: fewer than 4 nodes below split");
    const auto sw = simpson_weights(m, h);
    for (std::size_t i = 0; i < m; ++i) w[i] += sw[i];
    if (m < n) add_extrapolated(K, m - 4, K[m - 1], split, w);
  }
  if (m < n) {
    require(n - m >= 4, ErrorKind::InvalidArgument, "split_weights: fewer than 4 nodes above split");
    const auto sw = simpson_weights(n - m, h);
    for (std::size_t i = m; i < n; ++i) w[i] += sw[i - m];
    if (m > 0) add_extrapolated(K, m, split, K[m], w);
  }
  return w;
}

std::vector<double> second_derivative_split(std::span<const double> f, double h, std::size_t m) {
  if (m == 0 || m >= f.size()) return second_derivative(f, h);
  auto lo = second_derivative(f.subspan(0, m), h);
  const auto hi = second_derivative(f.subspan(m), h);
  lo.insert(lo.end(), hi.begin(), hi.end());
  return lo;
}

std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> v(n);
  if (n == 1) {
    v[0] = a;
    return v;
  }
  for (std::size_t i = 0; i < n; ++i) v[i] = a + (b - a) * static_cast<double>(i) / (n - 1);
  return v;
}

double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }
double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

}  // namespace stathedge::quad
