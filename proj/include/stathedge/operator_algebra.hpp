#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace stathedge::density {

/// Normal-ordered differential operator in (at most) two variables:
///   sum c * x1^g1 x2^g2 d1^a1 d2^a2
/// with every multiplication placed left of every derivative. Polynomials are operators
/// without derivatives. Terms are kept sorted by key, so iteration order is deterministic.
class DiffOperator {
 public:
  struct Term {
    std::array<std::uint8_t, 2> x{};
    std::array<std::uint8_t, 2> d{};
    double c = 0.0;
  };

  DiffOperator() = default;
  static DiffOperator constant(double c);
  /// Multiplication by x_i.
  static DiffOperator variable(int i);
  /// d/dx_i.
  static DiffOperator partial(int i);

  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  int max_derivative_order() const;
  int max_polynomial_degree() const;

  DiffOperator& operator+=(const DiffOperator& o);
  DiffOperator& operator*=(double s);
  friend DiffOperator operator+(DiffOperator a, const DiffOperator& b) { return a += b; }
  friend DiffOperator operator*(DiffOperator a, double s) { return a *= s; }
  friend DiffOperator operator*(double s, DiffOperator a) { return a *= s; }
  /// Composition (a then b applied as a(b(.))), normal ordered by the Leibniz rule.
  friend DiffOperator operator*(const DiffOperator& a, const DiffOperator& b);

  DiffOperator pow(int n) const;

  /// Replaces every x^g by point^g, leaving a constant-coefficient operator in d.
  DiffOperator freeze_at(const Eigen::VectorXd& point) const;

  /// Polynomial value (derivative-free terms only) at a point.
  double evaluate_polynomial(const Eigen::VectorXd& point) const;

  /// d/dx_i of a polynomial (derivative-free operator).
  DiffOperator polynomial_derivative(int i) const;

  void prune(double tol = 0.0);

 private:
  static std::uint32_t key(const Term& t);
  void normalize();
  std::vector<Term> terms_;
};

}  // namespace stathedge::density
