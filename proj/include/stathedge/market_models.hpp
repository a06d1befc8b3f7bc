#pragma once

#include <Eigen/Dense>
#include <array>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <variant>

namespace stathedge::models {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

enum class Measure { P, Q };

/// Parses "P"/"physical" or "Q"/"pricing"; anything else is an invalid-argument error.
Measure parse_measure(std::string_view tag);

enum class ClosedForm { None, Lognormal1D, Gaussian2D, HestonJoint, CevExact };

/// Multi-index (alpha_1, alpha_2); models have at most two state coordinates.
using MultiIndex = std::array<int, 2>;

inline int order(const MultiIndex& a) { return a[0] + a[1]; }

// Price drifts (mu) are arithmetic drifts of S = exp(X); the log drift is mu - sigma^2/2.
struct Gbm1D {
  double mu = 0.0;
  double sigma = 0.2;
  double s0 = 1.0;
};

struct CorrelatedGbm2D {
  double mu1 = 0.0, mu2 = 0.0;
  double sigma1 = 0.2, sigma2 = 0.2;
  double rho = 0.0;
  double s0 = 1.0, v0 = 1.0;
};

/// State (log-price, instantaneous variance).
struct Heston {
  double m = 0.0;
  double kappa = 1.0;
  double theta = 0.04;
  double delta = 0.1;
  double rho = 0.0;
  double x1 = 0.0;
  double x2 = 0.04;
};

/// Log-price with local volatility delta * exp((eta - 1) x).
struct Cev {
  double m = 0.0;
  double delta = 0.2;
  double eta = 0.7;
  double x1 = 0.0;
};

using NamedModel = std::variant<Gbm1D, CorrelatedGbm2D, Heston, Cev>;

using DriftFn = std::function<Vec(double t, const Vec& x)>;
using DiffusionFn = std::function<Mat(double t, const Vec& x)>;
/// d^beta a_alpha (t, x) under the given measure.
using CoefficientDerivative =
    std::function<double(Measure, const MultiIndex& alpha, const MultiIndex& beta, double t,
                         const Vec& x)>;

struct ModelSpec {
  int dim = 1;
  DriftFn drift_p;
  DriftFn drift_q;
  DiffusionFn diffusion;
  ClosedForm closed_form = ClosedForm::None;
  Vec x0;
  /// Exactly linear part B of the drift (d x d). It stays inside the Gaussian kernel of the
  /// density expansion instead of being Taylor expanded. Zero for every base model.
  Mat linear_drift;
  /// Analytic coefficient derivatives; empty means central finite differences.
  CoefficientDerivative derivative;
  std::optional<NamedModel> named;
  /// Set when coordinate 2 is the running time-average of coordinate 1 over [0, horizon].
  std::optional<double> average_horizon;
  bool time_homogeneous = true;

  Vec drift(Measure m, double t, const Vec& x) const {
    return m == Measure::P ? drift_p(t, x) : drift_q(t, x);
  }
  Mat covariance_rate(double t, const Vec& x) const {
    const Mat s = diffusion(t, x);
    return s * s.transpose();
  }
};

ModelSpec make_model(const NamedModel& named);

/// Appends X2 with dX2 = X1 / horizon dt, X2(0) = 0, to a one-dimensional model.
ModelSpec with_running_average(const ModelSpec& base, double horizon);

/// Coefficients a_alpha of the generator sum_{1<=|alpha|<=2} a_alpha d^alpha.
/// First order: a_{e_i} = drift_i. Second order: a_{2e_i} = (sigma sigma^T)_ii / 2 and
/// a_{e_i+e_j} = (sigma sigma^T)_ij for i != j.
class GeneratorCoefficients {
 public:
  GeneratorCoefficients(const ModelSpec& model, Measure measure);

  int dim() const { return dim_; }
  Measure measure() const { return measure_; }
  const std::vector<MultiIndex>& indices() const { return indices_; }

  double value(const MultiIndex& alpha, double t, const Vec& x) const;
  /// d^beta a_alpha(t, x); analytic when the model provides it, else 4th-order central
  /// differences with step 1e-4 * max(1, |x_i|).
  double derivative(const MultiIndex& alpha, const MultiIndex& beta, double t, const Vec& x) const;
  const Mat& linear_drift() const { return linear_drift_; }
  bool time_homogeneous() const { return time_homogeneous_; }

 private:
  double fd_derivative(const MultiIndex& alpha, MultiIndex beta, double t, const Vec& x) const;

  int dim_;
  Measure measure_;
  DriftFn drift_;
  DiffusionFn diffusion_;
  CoefficientDerivative analytic_;
  Mat linear_drift_;
  bool time_homogeneous_;
  std::vector<MultiIndex> indices_;
};

GeneratorCoefficients generator(const ModelSpec& model, Measure measure);

struct DriftCheckReport {
  bool ok = true;
  double max_relative_error = 0.0;
  std::size_t worst_index = 0;
};

/// mu~_1 == -1/2 sum_j sigma_1j^2 at every sample point, within 1e-12 relative tolerance.
DriftCheckReport martingale_drift_check(const ModelSpec& model,
                                        std::span<const std::pair<double, Vec>> points);

/// Validates the parameter invariants of a named model (invalid-argument on violation).
void validate(const NamedModel& named);

}  // namespace stathedge::models
