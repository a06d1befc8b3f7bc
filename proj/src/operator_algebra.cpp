#include "stathedge/operator_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

#include "stathedge/errors.hpp"

namespace stathedge::density {

namespace {

double falling(int n, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= n - i;
  return r;
}

double binom(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

DiffOperator::Term unpack(std::uint32_t k, double c) {
  DiffOperator::Term t;
  t.x = {static_cast<std::uint8_t>(k >> 24), static_cast<std::uint8_t>((k >> 16) & 0xff)};
  t.d = {static_cast<std::uint8_t>((k >> 8) & 0xff), static_cast<std::uint8_t>(k & 0xff)};
  t.c = c;
  return t;
}

}  // namespace

std::uint32_t DiffOperator::key(const Term& t) {
  return (std::uint32_t{t.x[0]} << 24) | (std::uint32_t{t.x[1]} << 16) |
         (std::uint32_t{t.d[0]} << 8) | std::uint32_t{t.d[1]};
}

void DiffOperator::normalize() {
  std::map<std::uint32_t, double> acc;
  for (const auto& t : terms_) acc[key(t)] += t.c;
  terms_.clear();
  for (const auto& [k, c] : acc)
    if (c != 0.0) terms_.push_back(unpack(k, c));
}

DiffOperator DiffOperator::constant(double c) {
  DiffOperator o;
  if (c != 0.0) o.terms_.push_back(Term{{0, 0}, {0, 0}, c});
  return o;
}

DiffOperator DiffOperator::variable(int i) {
  DiffOperator o;
  Term t{{0, 0}, {0, 0}, 1.0};
  t.x[i] = 1;
  o.terms_.push_back(t);
  return o;
}

DiffOperator DiffOperator::partial(int i) {
  DiffOperator o;
  Term t{{0, 0}, {0, 0}, 1.0};
  t.d[i] = 1;
  o.terms_.push_back(t);
  return o;
}

int DiffOperator::max_derivative_order() const {
  int m = 0;
  for (const auto& t : terms_) m = std::max(m, t.d[0] + t.d[1]);
  return m;
}

int DiffOperator::max_polynomial_degree() const {
  int m = 0;
  for (const auto& t : terms_) m = std::max(m, t.x[0] + t.x[1]);
  return m;
}

DiffOperator& DiffOperator::operator+=(const DiffOperator& o) {
  // merge of two sorted term lists
  std::vector<Term> out;
  out.reserve(terms_.size() + o.terms_.size());
  std::size_t i = 0, j = 0;
  while (i < terms_.size() || j < o.terms_.size()) {
    if (j == o.terms_.size() || (i < terms_.size() && key(terms_[i]) < key(o.terms_[j]))) {
      out.push_back(terms_[i++]);
    } else if (i == terms_.size() || key(o.terms_[j]) < key(terms_[i])) {
      out.push_back(o.terms_[j++]);
    } else {
      Term t = terms_[i++];
      t.c += o.terms_[j++].c;
      if (t.c != 0.0) out.push_back(t);
    }
  }
  terms_ = std::move(out);
  return *this;
}

DiffOperator& DiffOperator::operator*=(double s) {
  if (s == 0.0) {
    terms_.clear();
    return *this;
  }
  for (auto& t : terms_) t.c *= s;
  return *this;
}

DiffOperator operator*(const DiffOperator& a, const DiffOperator& b) {
  std::unordered_map<std::uint32_t, double> acc;
  acc.reserve(a.terms_.size() * b.terms_.size());
  std::vector<std::uint32_t> order;
  for (const auto& ta : a.terms_) {
    for (const auto& tb : b.terms_) {
      // d^ta.d x^tb.x = prod_i sum_k C(a_i, k) g_i!/(g_i - k)! x_i^{g_i - k} d_i^{a_i - k}
      const int k0max = std::min<int>(ta.d[0], tb.x[0]);
      const int k1max = std::min<int>(ta.d[1], tb.x[1]);
      for (int k0 = 0; k0 <= k0max; ++k0) {
        const double c0 = binom(ta.d[0], k0) * falling(tb.x[0], k0);
        for (int k1 = 0; k1 <= k1max; ++k1) {
          const double c1 = binom(ta.d[1], k1) * falling(tb.x[1], k1);
          DiffOperator::Term t;
          t.x = {static_cast<std::uint8_t>(ta.x[0] + tb.x[0] - k0),
                 static_cast<std::uint8_t>(ta.x[1] + tb.x[1] - k1)};
          t.d = {static_cast<std::uint8_t>(ta.d[0] - k0 + tb.d[0]),
                 static_cast<std::uint8_t>(ta.d[1] - k1 + tb.d[1])};
          const auto k = DiffOperator::key(t);
          auto [it, inserted] = acc.try_emplace(k, 0.0);
          if (inserted) order.push_back(k);
          it->second += ta.c * tb.c * c0 * c1;
        }
      }
    }
  }
  std::sort(order.begin(), order.end());
  DiffOperator out;
  out.terms_.reserve(order.size());
  for (auto k : order) {
    const double c = acc[k];
    if (c != 0.0) out.terms_.push_back(unpack(k, c));
  }
  return out;
}

DiffOperator DiffOperator::pow(int n) const {
  require(n >= 0, ErrorKind::InvalidArgument, "DiffOperator::pow: negative exponent");
  DiffOperator r = constant(1.0);
  for (int i = 0; i < n; ++i) r = r * *this;
  return r;
}

DiffOperator DiffOperator::freeze_at(const Eigen::VectorXd& p) const {
  DiffOperator out;
  for (const auto& t : terms_) {
    double c = t.c;
    for (int i = 0; i < 2; ++i)
      if (t.x[i]) c *= std::pow(p[i], t.x[i]);
    out.terms_.push_back(Term{{0, 0}, t.d, c});
  }
  out.normalize();
  return out;
}

double DiffOperator::evaluate_polynomial(const Eigen::VectorXd& p) const {
  double s = 0.0;
  for (const auto& t : terms_) {
    if (t.d[0] || t.d[1]) continue;
    double c = t.c;
    for (int i = 0; i < 2; ++i)
      if (t.x[i]) c *= std::pow(p[i], t.x[i]);
    s += c;
  }
  return s;
}

DiffOperator DiffOperator::polynomial_derivative(int i) const {
  DiffOperator out;
  for (const auto& t : terms_) {
    if (t.x[i] == 0) continue;
    Term u = t;
    u.c *= t.x[i];
    u.x[i] -= 1;
    out.terms_.push_back(u);
  }
  out.normalize();
  return out;
}

void DiffOperator::prune(double tol) {
  std::erase_if(terms_, [tol](const Term& t) { return std::abs(t.c) <= tol; });
}

}  // namespace stathedge::density
