#pragma once

#include "coulosc/core/polynomial.hpp"
#include "coulosc/core/precision.hpp"
#include "coulosc/core/types.hpp"

#include <array>
#include <optional>
#include <span>
#include <vector>

namespace coulosc::exact {

/// Coefficients of
///   (a30 x^3 + a31 x^2 + a32 x + a33) y'' + (a20 x^2 + a21 x + a22) y' - (t10 x + t11) y = 0.
struct OdeCoeffs {
  std::array<Real, 4> p3;   // a30 .. a33
  std::array<Real, 3> p2;   // a20 .. a22
  std::array<Real, 2> tau;  // t10, t11
};

/// Band of an (n+1)x(n+1) tridiagonal matrix: beta on the diagonal (size n+1),
/// alpha[j-1] = alpha_j above it and gamma[j-1] = gamma_j below it (size n each).
template <typename T>
struct TridiagEntries {
  std::vector<T> beta;
  std::vector<T> alpha;
  std::vector<T> gamma;
};

/// Determinant by the three-term recurrence D_j = beta_j D_{j-1} - alpha_j gamma_j D_{j-2}.
/// T may be a number or a Polynomial (the determinant as a function of one parameter).
template <typename T>
T tridiag_det(std::span<const T> beta, std::span<const T> alpha, std::span<const T> gamma) {
  if (beta.empty() || alpha.size() + 1 != beta.size() || gamma.size() != alpha.size()) {
    throw std::invalid_argument("tridiagonal band sizes are inconsistent");
  }
  T prev2{1};
  T prev = beta[0];
  for (std::size_t j = 1; j < beta.size(); ++j) {
    T cur = beta[j] * prev - (alpha[j - 1] * gamma[j - 1]) * prev2;
    prev2 = std::move(prev);
    prev = std::move(cur);
  }
  return prev;
}

template <typename T>
T tridiag_det(const TridiagEntries<T>& e) {
  return tridiag_det<T>(std::span<const T>(e.beta), std::span<const T>(e.alpha),
                        std::span<const T>(e.gamma));
}

/// Coefficients of the reduced free-space equation
///   r f'' + (-2 sqrt(2b) r^2 + 2(l+1)) f' + [(2E - (2l+3) sqrt(2b)) r + 2a] f = 0.
OdeCoeffs free_ode_coeffs(const Real& a, const Real& b, int l, const Real& energy);

/// Generic band for a degree-n polynomial solution; t10 is replaced by the
/// value n(n-1) a30 + n a20 that such a solution requires. The a33 term must vanish.
TridiagEntries<Real> polynomial_solution_entries(const OdeCoeffs& c, int n);

/// Band specialised to the free problem: beta = -2a, alpha_j = -j(j+2l+1),
/// gamma_j = 2(j-n-1) sqrt(2b).
TridiagEntries<Real> free_entries(const Real& a, const Real& b, int l, int n);

Real free_qes_energy(int n, int l, const Real& b);
Real confined_qes_energy(int n, int l, const Real& b);

enum class Param { A, B, R };

struct Fixed {
  Param which = Param::B;
  Real value{0};
};

/// One quasi-exactly solvable parameter point with its eigenfunction factor.
struct QESCondition {
  int n = 0;  // degree of the polynomial factor
  LevelLabel label;
  Real a{0};
  Real b{0};
  std::optional<Real> radius;  // set for the confined problem
  Real energy{0};
  std::vector<Real> constraint_residuals;
  Polynomial<Real> poly;
  int node_count = 0;

  [[nodiscard]] Real sqrt2b() const { return sqrt(2 * b); }
};

/// All real parameter solutions of the free degree-n condition with b > 0.
std::vector<QESCondition> free_qes_solve(int n, int l, const Fixed& fixed, const PrecisionCtx& ctx = {});

/// All parameter triples (a, b, R) for which the confined equation admits a
/// degree-n polynomial factor, given one fixed parameter.
std::vector<QESCondition> confined_qes_solve(int n, int l, const Fixed& fixed, const PrecisionCtx& ctx = {});

/// The two residual rows (m = n and m = n+1) of the confined power-matching
/// system after the polynomial coefficients have been eliminated with c0 = 1.
/// Both vanish exactly at a quasi-exact point. The coefficients are written to
/// `coeffs` when non-null.
template <typename Scalar>
std::array<Scalar, 2> confined_constraints(const Scalar& a, const Scalar& s, const Scalar& radius, int l,
                                           int n, Polynomial<Scalar>* coeffs = nullptr);

/// Free-space factor f_n from the tridiagonal three-term recurrence (c0 = 1).
Polynomial<Real> free_factor(const Real& a, const Real& b, int l, int n);

/// Distinct real roots of p strictly inside (lo, hi): sign scan on a 1024-point
/// grid, each bracket refined by bisection. With hi empty the interval is
/// closed off by the Cauchy root bound.
std::vector<Real> isolate_roots(const Polynomial<Real>& p, const Real& lo, const std::optional<Real>& hi);

int count_nodes(const Polynomial<Real>& p, const Real& lo, const std::optional<Real>& hi);

/// Real roots of a polynomial: companion-matrix eigenvalues in double
/// precision, Newton-polished at the working precision.
std::vector<Real> real_roots(const Polynomial<Real>& p);

/// Relative residual of the radial equation for the condition's eigenfunction
/// psi = r^{l+1} [(R - r)] exp(-sqrt(b/2) r^2) f(r) at r.
Real eigenfunction_residual(const QESCondition& c, const Real& r);

}  // namespace coulosc::exact
