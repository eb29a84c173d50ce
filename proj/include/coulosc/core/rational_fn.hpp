#pragma once

#include "coulosc/core/polynomial.hpp"
#include "coulosc/core/types.hpp"

#include <algorithm>
#include <optional>
#include <stdexcept>

namespace coulosc {

/// N(r) / (r^p (R - r)^q): a rational function whose poles sit only at the
/// origin and at the wall. Free-space functions carry no wall and q = 0.
///
/// Values are kept canonical: exact factors of r or (R - r) shared by the
/// numerator and the denominator are cancelled after every operation.
template <typename Scalar>
class RationalFn {
 public:
  using Poly = Polynomial<Scalar>;

  RationalFn() = default;
  RationalFn(Poly numerator, int pole_origin, int pole_wall = 0,
             std::optional<Scalar> wall = std::nullopt)
      : num_(std::move(numerator)), p_(pole_origin), q_(pole_wall), wall_(std::move(wall)) {
    if (p_ < 0 || q_ < 0) throw std::invalid_argument("pole orders must be non-negative");
    if (q_ > 0 && !wall_) throw std::invalid_argument("a wall pole needs a wall radius");
    canonicalize();
  }

  static RationalFn constant(const Scalar& v, std::optional<Scalar> wall = std::nullopt) {
    return RationalFn(Poly::constant(v), 0, 0, std::move(wall));
  }

  [[nodiscard]] const Poly& numerator() const { return num_; }
  [[nodiscard]] int pole_order_origin() const { return p_; }
  [[nodiscard]] int pole_order_wall() const { return q_; }
  [[nodiscard]] const std::optional<Scalar>& wall_radius() const { return wall_; }
  [[nodiscard]] bool is_zero() const { return num_.is_zero(); }

  /// N(r0) / (r0^p (R - r0)^q); r0 must lie in the open domain.
  [[nodiscard]] Scalar operator()(const Scalar& r0) const {
    using std::isfinite;
    if (!(r0 > Scalar(0)) || (wall_ && !(r0 < *wall_))) {
      throw DomainError("rational function evaluated outside its domain");
    }
    Scalar denom = pow_int(r0, p_);
    if (q_ > 0) denom *= pow_int(*wall_ - r0, q_);
    Scalar value = num_(r0) / denom;
    if (!isfinite(value)) throw OverflowError("rational function value is not finite");
    return value;
  }

  friend RationalFn operator+(const RationalFn& f, const RationalFn& g) {
    auto wall = merged_wall(f, g);
    const int p = std::max(f.p_, g.p_);
    const int q = std::max(f.q_, g.q_);
    Poly n = f.lifted(p, q, wall) + g.lifted(p, q, wall);
    return RationalFn(std::move(n), p, q, std::move(wall));
  }
  friend RationalFn operator-(const RationalFn& f) {
    return RationalFn(-f.num_, f.p_, f.q_, f.wall_);
  }
  friend RationalFn operator-(const RationalFn& f, const RationalFn& g) { return f + (-g); }
  friend RationalFn operator*(const RationalFn& f, const RationalFn& g) {
    return RationalFn(f.num_ * g.num_, f.p_ + g.p_, f.q_ + g.q_, merged_wall(f, g));
  }
  friend RationalFn operator*(const Scalar& s, const RationalFn& f) {
    return RationalFn(f.num_ * s, f.p_, f.q_, f.wall_);
  }

  /// d/dr [N / (r^p (R-r)^q)] = [N' r (R-r) - p N (R-r) + q N r] / (r^{p+1} (R-r)^{q+1}).
  friend RationalFn derivative(const RationalFn& f) {
    if (f.is_zero()) return f;
    const Poly dn = derivative(f.num_);
    if (!f.wall_) {
      Poly n = shift_up(dn, 1) - f.num_ * Scalar(f.p_);
      return RationalFn(std::move(n), f.p_ + 1, 0, std::nullopt);
    }
    const Scalar& R = *f.wall_;
    const Poly wall_lin{R, Scalar(-1)};
    Poly n = shift_up(dn, 1) * wall_lin - (f.num_ * wall_lin) * Scalar(f.p_) +
             shift_up(f.num_, 1) * Scalar(f.q_);
    return RationalFn(std::move(n), f.p_ + 1, f.q_ + 1, f.wall_);
  }

 private:
  static Scalar pow_int(Scalar base, int e) {
    Scalar acc(1);
    while (e > 0) {
      if (e & 1) acc *= base;
      base *= base;
      e >>= 1;
    }
    return acc;
  }

  static std::optional<Scalar> merged_wall(const RationalFn& f, const RationalFn& g) {
    if (f.wall_ && g.wall_ && *f.wall_ != *g.wall_) {
      throw std::invalid_argument("rational functions with different wall radii");
    }
    return f.wall_ ? f.wall_ : g.wall_;
  }

  // Numerator re-expressed over the denominator r^p (R-r)^q.
  Poly lifted(int p, int q, const std::optional<Scalar>& wall) const {
    Poly n = shift_up(num_, p - p_);
    if (q > q_) n = times_wall_factor(std::move(n), *wall, q - q_);
    return n;
  }

  void canonicalize() {
    if (num_.is_zero()) {
      p_ = 0;
      q_ = 0;
      return;
    }
    int k = 0;
    while (k < p_ && num_[k] == Scalar(0)) ++k;
    if (k > 0) {
      num_ = shift_down(num_, k);
      p_ -= k;
    }
    while (q_ > 0) {
      auto [quot, rem] = divide_wall_factor(num_, *wall_);
      if (rem != Scalar(0)) break;
      num_ = std::move(quot);
      --q_;
    }
  }

  Poly num_;
  int p_ = 0;
  int q_ = 0;
  std::optional<Scalar> wall_;
};

template <typename Scalar>
Scalar rf_eval(const RationalFn<Scalar>& f, const Scalar& r0) {
  return f(r0);
}

template <typename Scalar>
RationalFn<Scalar> rf_derivative(const RationalFn<Scalar>& f) {
  return derivative(f);
}

}  // namespace coulosc
