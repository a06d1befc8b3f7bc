#pragma once

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "stathedge/market_models.hpp"
#include "stathedge/operator_algebra.hpp"

namespace stathedge::density {

using models::Mat;
using models::MultiIndex;
using models::Vec;

inline constexpr int kMaxOrder = 3;

/// Degree-n homogeneous Taylor term of every generator coefficient around xbar, as a polynomial
/// in (x - xbar). First-order entries are taken on the drift minus the exact linear drift B x,
/// which the Gaussian kernel carries itself.
std::map<MultiIndex, DiffOperator> taylor_coefficients(const models::GeneratorCoefficients& coeffs,
                                                       const Vec& xbar, int n, double t = 0.0);

/// Gaussian kernel of the frozen-coefficient problem started at x at time t:
///   X_T ~ N(flow x + shift, covariance).
struct GaussianKernelParams {
  Vec mean;
  Mat covariance;
  Mat flow;
  Vec shift;
};

GaussianKernelParams kernel_params(const models::GeneratorCoefficients& coeffs, const Vec& x,
                                   const Vec& xbar, double t, double T);

/// L_n(t, T) as a normal-ordered operator in the shifted variable (x - xbar) and d/dx.
DiffOperator expansion_operator(const models::GeneratorCoefficients& coeffs, const Vec& xbar,
                                int n, double t, double T);

struct ExpansionSpec {
  int order = 2;
  /// Defaults to the starting point.
  std::optional<Vec> expansion_point;
};

/// Sum of N(z; C) Q_n(z), z = y - mean, over n = 0..order.
class DensityApprox {
 public:
  struct Monomial {
    std::array<int, 2> power{};
    double c = 0.0;
  };
  using Polynomial = std::vector<Monomial>;

  DensityApprox(GaussianKernelParams kernel, std::vector<Polynomial> corrections);

  int order() const { return static_cast<int>(poly_.size()) - 1; }
  int dim() const { return static_cast<int>(kernel_.mean.size()); }
  const GaussianKernelParams& kernel() const { return kernel_; }

  double operator()(const Vec& y) const { return evaluate(y, order()); }
  double evaluate(const Vec& y, int upto) const;
  double evaluate(double y) const { return evaluate(Vec::Constant(1, y), order()); }

  /// Integral over y2 of the 2-d density (or the density itself in 1-d).
  double marginal_first(double y1, int upto = -1) const;

  /// Integral of f(y2) against the joint density along the slice y1 (2-d only).
  double slice_integral(double y1, const std::function<double(double)>& f,
                        std::span<const double> breaks = {}, int upto = -1) const;

  /// Integral of the density over mean +- 8 sd, 401 points per axis, trapezoidal.
  double normalization() const;

 private:
  double poly_value(const Vec& z, int upto) const;
  GaussianKernelParams kernel_;
  std::vector<Polynomial> poly_;
  Mat precision_;
  double log_norm_ = 0.0;
};

DensityApprox density_approx(const models::ModelSpec& model, models::Measure measure,
                             const ExpansionSpec& spec, double t, const Vec& x, double T);

/// Expectation of phi(X_T) under the order-N density, by quadrature over mean +- 8 sd.
double expectation_approx(const models::ModelSpec& model, models::Measure measure,
                          const ExpansionSpec& spec, const std::function<double(const Vec&)>& phi,
                          double t, const Vec& x, double T);

/// Exact transition density of X_T in log coordinates, for models with a closed form:
/// lognormal GBM, bivariate Gaussian (correlated GBM, Asian GBM) and CEV.
std::function<double(const Vec&)> exact_density(const models::ModelSpec& model,
                                                models::Measure measure, double t, const Vec& x,
                                                double T);

/// Density of log S_T for CEV started at log-price x0 (noncentral chi-square representation).
double cev_log_density(const models::Cev& p, models::Measure measure, double tau, double x0,
                       double u);

/// Probability of absorption at zero by time tau under CEV.
double cev_absorption(const models::Cev& p, models::Measure measure, double tau, double x0);

}  // namespace stathedge::density
