#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <vector>

namespace coulosc {

/// Dense univariate polynomial, coefficients stored lowest degree first.
///
/// The zero polynomial has an empty coefficient vector; every other value is
/// kept trimmed so that the leading coefficient is nonzero.
template <typename Scalar>
class Polynomial {
 public:
  using Coeffs = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Polynomial() = default;
  explicit Polynomial(Coeffs coeffs) : c_(std::move(coeffs)) { trim(); }
  Polynomial(std::initializer_list<Scalar> coeffs) : c_(static_cast<Eigen::Index>(coeffs.size())) {
    Eigen::Index i = 0;
    for (const auto& v : coeffs) c_[i++] = v;
    trim();
  }

  static Polynomial constant(const Scalar& v) { return Polynomial{v}; }
  static Polynomial monomial(int degree, const Scalar& v = Scalar(1)) {
    Coeffs c = Coeffs::Zero(degree + 1);
    c[degree] = v;
    return Polynomial(std::move(c));
  }

  [[nodiscard]] bool is_zero() const { return c_.size() == 0; }
  /// Degree; -1 for the zero polynomial.
  [[nodiscard]] int degree() const { return static_cast<int>(c_.size()) - 1; }
  [[nodiscard]] const Coeffs& coeffs() const { return c_; }
  /// Coefficient of r^k (zero beyond the degree).
  [[nodiscard]] Scalar operator[](int k) const {
    return (k >= 0 && k < c_.size()) ? c_[k] : Scalar(0);
  }
  [[nodiscard]] const Scalar& leading() const { return c_[c_.size() - 1]; }

  /// Horner evaluation.
  [[nodiscard]] Scalar operator()(const Scalar& x) const {
    Scalar acc(0);
    for (Eigen::Index k = c_.size() - 1; k >= 0; --k) acc = acc * x + c_[k];
    return acc;
  }

  Polynomial& operator+=(const Polynomial& o) {
    if (o.c_.size() > c_.size()) {
      const Eigen::Index old = c_.size();
      c_.conservativeResize(o.c_.size());
      c_.tail(o.c_.size() - old).setZero();
    }
    c_.head(o.c_.size()) += o.c_;
    trim();
    return *this;
  }
  Polynomial& operator-=(const Polynomial& o) { return *this += -o; }
  Polynomial& operator*=(const Scalar& s) {
    c_ *= s;
    trim();
    return *this;
  }

  friend Polynomial operator-(Polynomial p) {
    p.c_ = -p.c_;
    return p;
  }
  friend Polynomial operator+(Polynomial p, const Polynomial& q) { return p += q; }
  friend Polynomial operator-(Polynomial p, const Polynomial& q) { return p -= q; }
  friend Polynomial operator*(Polynomial p, const Scalar& s) { return p *= s; }
  friend Polynomial operator*(const Scalar& s, Polynomial p) { return p *= s; }
  friend Polynomial operator*(const Polynomial& p, const Polynomial& q) {
    if (p.is_zero() || q.is_zero()) return {};
    Coeffs out = Coeffs::Zero(p.c_.size() + q.c_.size() - 1);
    for (Eigen::Index i = 0; i < p.c_.size(); ++i) {
      if (p.c_[i] == Scalar(0)) continue;
      out.segment(i, q.c_.size()) += p.c_[i] * q.c_;
    }
    return Polynomial(std::move(out));
  }
  friend bool operator==(const Polynomial& p, const Polynomial& q) {
    return p.c_.size() == q.c_.size() && (p.c_.size() == 0 || p.c_ == q.c_);
  }

 private:
  void trim() {
    Eigen::Index n = c_.size();
    while (n > 0 && c_[n - 1] == Scalar(0)) --n;
    if (n != c_.size()) c_.conservativeResize(n);
  }

  Coeffs c_;
};

template <typename Scalar>
Polynomial<Scalar> derivative(const Polynomial<Scalar>& p) {
  if (p.degree() < 1) return {};
  typename Polynomial<Scalar>::Coeffs d(p.degree());
  for (int k = 1; k <= p.degree(); ++k) d[k - 1] = p[k] * Scalar(k);
  return Polynomial<Scalar>(std::move(d));
}

/// p(r) * r^k.
template <typename Scalar>
Polynomial<Scalar> shift_up(const Polynomial<Scalar>& p, int k) {
  if (p.is_zero() || k == 0) return p;
  typename Polynomial<Scalar>::Coeffs c = Polynomial<Scalar>::Coeffs::Zero(p.degree() + 1 + k);
  c.tail(p.degree() + 1) = p.coeffs();
  return Polynomial<Scalar>(std::move(c));
}

/// p(r) / r^k; the k lowest coefficients must vanish.
template <typename Scalar>
Polynomial<Scalar> shift_down(const Polynomial<Scalar>& p, int k) {
  if (p.is_zero() || k == 0) return p;
  return Polynomial<Scalar>(typename Polynomial<Scalar>::Coeffs(p.coeffs().tail(p.degree() + 1 - k)));
}

/// p(r) * (R - r)^k.
template <typename Scalar>
Polynomial<Scalar> times_wall_factor(Polynomial<Scalar> p, const Scalar& radius, int k) {
  const Polynomial<Scalar> factor{radius, Scalar(-1)};
  for (int i = 0; i < k; ++i) p = p * factor;
  return p;
}

/// Synthetic division by (R - r). Returns the quotient and the remainder p(R).
template <typename Scalar>
std::pair<Polynomial<Scalar>, Scalar> divide_wall_factor(const Polynomial<Scalar>& p, const Scalar& radius) {
  if (p.degree() < 1) return {Polynomial<Scalar>{}, p[0]};
  // p(r) = (r - R) q(r) + p(R); then p / (R - r) = -q.
  const int n = p.degree();
  typename Polynomial<Scalar>::Coeffs q(n);
  Scalar carry = p[n];
  for (int k = n - 1; k >= 0; --k) {
    q[k] = -carry;
    carry = p[k] + carry * radius;
  }
  return {Polynomial<Scalar>(std::move(q)), carry};
}

}  // namespace coulosc
