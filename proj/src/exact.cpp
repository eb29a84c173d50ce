#include "coulosc/exact.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>

namespace coulosc::exact {

using Poly = Polynomial<Real>;

OdeCoeffs free_ode_coeffs(const Real& a_in, const Real& b, int l, const Real& energy_in) {
  const Real a = at_working_precision(a_in), energy = at_working_precision(energy_in);
  const Real s = sqrt(2 * at_working_precision(b));
  OdeCoeffs c;
  c.p3 = {Real(0), Real(0), Real(1), Real(0)};
  c.p2 = {Real(-2 * s), Real(0), Real(2 * (l + 1))};
  c.tau = {Real(-(2 * energy - (2 * l + 3) * s)), Real(-2 * a)};
  return c;
}

TridiagEntries<Real> polynomial_solution_entries(const OdeCoeffs& c, int n) {
  if (n < 0) throw std::invalid_argument("polynomial degree must be non-negative");
  if (c.p3[3] != 0) throw std::invalid_argument("a33 != 0 gives a pentadiagonal band");
  const Real t10 = Real(n) * (n - 1) * c.p3[0] + Real(n) * c.p2[0];
  TridiagEntries<Real> e;
  for (int j = 0; j <= n; ++j) e.beta.push_back(c.tau[1] - Real(j) * ((j - 1) * c.p3[1] + c.p2[1]));
  for (int j = 1; j <= n; ++j) {
    e.alpha.push_back(-Real(j) * ((j - 1) * c.p3[2] + c.p2[2]));
    e.gamma.push_back(t10 - Real(j - 1) * ((j - 2) * c.p3[0] + c.p2[0]));
  }
  return e;
}

TridiagEntries<Real> free_entries(const Real& a_in, const Real& b, int l, int n) {
  const Real a = at_working_precision(a_in);
  const Real s = sqrt(2 * at_working_precision(b));
  TridiagEntries<Real> e;
  e.beta.assign(static_cast<std::size_t>(n + 1), Real(-2 * a));
  for (int j = 1; j <= n; ++j) {
    e.alpha.push_back(Real(-j * (j + 2 * l + 1)));
    e.gamma.push_back(Real(2 * (j - n - 1) * s));
  }
  return e;
}

Real free_qes_energy(int n, int l, const Real& b) {
  if (!(b > 0)) throw std::invalid_argument("b must be positive");
  return (Real(n + l) + Real(3) / 2) * sqrt(2 * at_working_precision(b));
}

Real confined_qes_energy(int n, int l, const Real& b) {
  if (!(b > 0)) throw std::invalid_argument("b must be positive");
  return (Real(n + l) + Real(5) / 2) * sqrt(2 * at_working_precision(b));
}

// ---------------------------------------------------------------------------
// Roots

std::vector<Real> real_roots(const Poly& p) {
  std::vector<Real> roots;
  if (p.degree() < 1) return roots;
  int zeros = 0;
  while (p[zeros] == 0) ++zeros;
  if (zeros > 0) roots.emplace_back(0);
  const Poly q = shift_down(p, zeros);
  const int deg = q.degree();
  if (deg < 1) return roots;
  if (deg == 1) {
    roots.push_back(-q[0] / q[1]);
    std::sort(roots.begin(), roots.end());
    return roots;
  }

  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(deg, deg);
  const Real lead = q.leading();
  for (int i = 0; i < deg; ++i) companion(0, i) = -to_double(q[deg - 1 - i] / lead);
  for (int i = 1; i < deg; ++i) companion(i, i - 1) = 1.0;
  Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);

  const Poly dq = derivative(q);
  const Real eps = pow(Real(2), -static_cast<int>(Real::default_precision() * 3.32) + 16);
  for (const auto& z : solver.eigenvalues()) {
    if (std::abs(z.imag()) > 1e-6 * std::max(1.0, std::abs(z))) continue;
    Real x = z.real();
    bool converged = false;
    for (int it = 0; it < 200; ++it) {
      const Real d = dq(x);
      if (d == 0) break;
      const Real step = q(x) / d;
      x -= step;
      if (abs(step) <= eps * std::max(Real(1), Real(abs(x)))) {
        converged = true;
        break;
      }
    }
    if (!converged) {
      // Multiple roots polish only linearly; accept a small residual instead.
      Real scale(0), ax = abs(x), pw(1);
      for (int k = 0; k <= deg; ++k, pw *= ax) scale += abs(q[k]) * pw;
      if (abs(q(x)) > sqrt(eps) * scale) continue;
    }
    roots.push_back(x);
  }
  std::sort(roots.begin(), roots.end());
  const Real merge = sqrt(eps);
  std::vector<Real> unique;
  for (auto& r : roots) {
    if (unique.empty() || abs(r - unique.back()) > merge * std::max(Real(1), Real(abs(r)))) {
      unique.push_back(std::move(r));
    }
  }
  return unique;
}

std::vector<Real> isolate_roots(const Poly& p, const Real& lo, const std::optional<Real>& hi) {
  if (p.is_zero()) throw std::invalid_argument("cannot isolate roots of the zero polynomial");
  std::vector<Real> out;
  if (p.degree() < 1) return out;
  Real upper;
  if (hi) {
    upper = *hi;
  } else {
    Real bound(0);
    for (int k = 0; k < p.degree(); ++k) bound = std::max(bound, Real(abs(p[k] / p.leading())));
    upper = 1 + bound;
  }
  constexpr int kGrid = 1024;
  const Real width = (upper - lo) / kGrid;
  const Real eps = pow(Real(2), -static_cast<int>(Real::default_precision() * 3.32) + 8);
  auto sign_of = [](const Real& v) { return v > 0 ? 1 : (v < 0 ? -1 : 0); };

  Real x_prev = lo;
  int s_prev = sign_of(p(lo));
  for (int i = 1; i <= kGrid; ++i) {
    const Real x = lo + width * i;
    const int sg = sign_of(p(x));
    if (sg == 0) {
      if (i < kGrid) out.push_back(x);
    } else if (s_prev != 0 && sg != s_prev) {
      Real a = x_prev, b = x;
      while (b - a > eps * std::max(Real(1), Real(abs(b)))) {
        const Real mid = (a + b) / 2;
        const int sm = sign_of(p(mid));
        if (sm == 0) {
          a = b = mid;
          break;
        }
        (sm == s_prev ? a : b) = mid;
      }
      out.push_back((a + b) / 2);
    }
    x_prev = x;
    s_prev = sg;
  }
  return out;
}

int count_nodes(const Poly& p, const Real& lo, const std::optional<Real>& hi) {
  return static_cast<int>(isolate_roots(p, lo, hi).size());
}

// ---------------------------------------------------------------------------
// Free problem

Poly free_factor(const Real& a_in, const Real& b, int l, int n) {
  const Real a = at_working_precision(a_in);
  const Real s = sqrt(2 * at_working_precision(b));
  Poly::Coeffs c = Poly::Coeffs::Zero(n + 1);
  c[0] = 1;
  for (int k = 0; k < n; ++k) {
    Real rhs = 2 * a * c[k];
    if (k >= 1) rhs += 2 * s * (n - k + 1) * c[k - 1];
    c[k + 1] = -rhs / (Real(k + 1) * (k + 2 * l + 2));
  }
  return Poly(std::move(c));
}

namespace {

QESCondition make_free_condition(int n, int l, const Real& a_in, const Real& b_in) {
  const Real a = at_working_precision(a_in), b = at_working_precision(b_in);
  QESCondition q;
  q.n = n;
  q.a = a;
  q.b = b;
  q.energy = free_qes_energy(n, l, b);
  q.poly = free_factor(a, b, l, n);
  const Real s = sqrt(2 * b);
  // Last row of the power-matching system: 2a c_n + 2 sqrt(2b) c_{n-1}.
  const Real row = 2 * a * q.poly[n] + (n >= 1 ? Real(2 * s * q.poly[n - 1]) : Real(0));
  q.constraint_residuals = {tridiag_det(free_entries(a, b, l, n)), row};
  q.node_count = count_nodes(q.poly, Real(0), std::nullopt);
  q.label = {q.node_count, l};
  return q;
}

}  // namespace

std::vector<QESCondition> free_qes_solve(int n, int l, const Fixed& fixed, const PrecisionCtx& ctx) {
  ctx.validate();
  if (n < 0 || n > 8) throw std::invalid_argument("free QES degree must lie in [0, 8]");
  if (l < 0) throw std::invalid_argument("l must be non-negative");
  ScopedPrecision guard(ctx);
  const Real value = at_working_precision(fixed.value);

  std::vector<QESCondition> out;
  TridiagEntries<Poly> band;
  if (fixed.which == Param::B) {
    if (!(value > 0)) throw DegenerateInput("fixed b must be positive");
    const Real s = sqrt(2 * value);
    // Determinant as a polynomial in a.
    band.beta.assign(static_cast<std::size_t>(n + 1), Poly{Real(0), Real(-2)});
    for (int j = 1; j <= n; ++j) {
      band.alpha.push_back(Poly::constant(Real(-j * (j + 2 * l + 1))));
      band.gamma.push_back(Poly::constant(Real(2 * (j - n - 1) * s)));
    }
    const Poly det = tridiag_det(band);
    for (const Real& a : real_roots(det)) out.push_back(make_free_condition(n, l, a, value));
  } else if (fixed.which == Param::A) {
    // Determinant as a polynomial in s = sqrt(2b).
    band.beta.assign(static_cast<std::size_t>(n + 1), Poly::constant(Real(-2 * value)));
    for (int j = 1; j <= n; ++j) {
      band.alpha.push_back(Poly::constant(Real(-j * (j + 2 * l + 1))));
      band.gamma.push_back(Poly{Real(0), Real(2 * (j - n - 1))});
    }
    const Poly det = tridiag_det(band);
    if (det.is_zero()) {
      throw std::invalid_argument("the condition holds for every b at this a; it does not fix b");
    }
    bool saw_zero = false;
    for (const Real& s : real_roots(det)) {
      if (s > 0) {
        out.push_back(make_free_condition(n, l, value, Real(s * s / 2)));
      } else if (s == 0) {
        saw_zero = true;
      }
    }
    if (out.empty() && saw_zero) throw DegenerateInput("the only solution has b = 0");
  } else {
    throw std::invalid_argument("the free problem has no wall radius to fix");
  }
  if (out.empty()) throw NoSolution("the determinant has no real root with b > 0");
  return out;
}

// ---------------------------------------------------------------------------
// Confined problem

namespace {

// Row m of the power-matching system for f = sum c_k r^k:
//   R(m+1)(m+2l+2) c_{m+1} + [2Ra - 2(l+1) - m(m+2l+3)] c_m
//     + [2Rs(n-m+2) - 2a] c_{m-1} + 2s(m-2-n) c_{m-2} = 0.
template <typename Scalar>
std::array<Scalar, 2> constraint_rows(const Scalar& a, const Scalar& s, const Scalar& R, int l, int n,
                                      Polynomial<Scalar>* coeffs, std::array<Scalar, 2>* scales) {
  using std::abs;
  std::vector<Scalar> c(static_cast<std::size_t>(n + 1), Scalar(0));
  c[0] = Scalar(1);
  auto at = [&](int k) { return (k >= 0 && k <= n) ? c[static_cast<std::size_t>(k)] : Scalar(0); };
  auto diag = [&](int m) { return Scalar(2 * R * a - 2 * (l + 1) - m * (m + 2 * l + 3)); };
  auto sub1 = [&](int m) { return Scalar(2 * R * s * (n - m + 2) - 2 * a); };
  auto sub2 = [&](int m) { return Scalar(2 * s * (m - 2 - n)); };
  for (int m = 0; m < n; ++m) {
    const Scalar rest = diag(m) * at(m) + sub1(m) * at(m - 1) + sub2(m) * at(m - 2);
    c[static_cast<std::size_t>(m + 1)] = -rest / (R * (m + 1) * (m + 2 * l + 2));
  }
  std::array<Scalar, 2> g;
  for (int i = 0; i < 2; ++i) {
    const int m = n + i;
    const Scalar t0 = diag(m) * at(m), t1 = sub1(m) * at(m - 1), t2 = sub2(m) * at(m - 2);
    g[static_cast<std::size_t>(i)] = t0 + t1 + t2;
    // Scale from the separate pieces of each coefficient, so that a row with a
    // single term (degree 0) still measures how far its pieces cancel.
    if (scales) {
      const Scalar d0 = abs(Scalar(2 * R * a)) + Scalar(2 * (l + 1) + m * (m + 2 * l + 3));
      const Scalar d1 = abs(Scalar(2 * R * s * (n - m + 2))) + abs(Scalar(2 * a));
      (*scales)[static_cast<std::size_t>(i)] = d0 * abs(at(m)) + d1 * abs(at(m - 1)) + abs(t2);
    }
  }
  if (coeffs) {
    typename Polynomial<Scalar>::Coeffs v(n + 1);
    for (int k = 0; k <= n; ++k) v[k] = c[static_cast<std::size_t>(k)];
    *coeffs = Polynomial<Scalar>(std::move(v));
  }
  return g;
}

struct Unknowns {
  Param fixed;
  Real value;

  // x -> (a, s, R); positive unknowns travel as logarithms.
  template <typename Scalar>
  std::array<Scalar, 3> expand(const Scalar& x0, const Scalar& x1, const Scalar& fixed_value) const {
    using std::exp;
    switch (fixed) {
      case Param::A: return {fixed_value, exp(x0), exp(x1)};
      case Param::B: return {x0, fixed_value, exp(x1)};
      case Param::R: return {x0, exp(x1), fixed_value};
    }
    return {};
  }
};

template <typename Scalar>
Scalar relative_norm(const std::array<Scalar, 2>& g, const std::array<Scalar, 2>& sc) {
  using std::abs;
  Scalar out(0);
  for (int i = 0; i < 2; ++i) {
    if (sc[static_cast<std::size_t>(i)] > 0) out += abs(g[static_cast<std::size_t>(i)]) / sc[static_cast<std::size_t>(i)];
  }
  return out;
}

struct Seed {
  double x0, x1, score;
};

std::vector<Seed> grid_seeds(const Unknowns& u, double fixed_value, int l, int n) {
  double lo0 = 0, hi0 = 1, lo1 = 0, hi1 = 1;
  switch (u.fixed) {
    case Param::A: {
      const double a = std::abs(fixed_value) > 0 ? std::abs(fixed_value) : 1.0;
      lo0 = std::log(a * a * 1e-3); hi0 = std::log(a * a * 1e3);  // log s
      lo1 = std::log(1e-2 / a);     hi1 = std::log(1e2 / a);      // log R
      break;
    }
    case Param::B: {
      const double rs = std::sqrt(fixed_value);
      lo0 = -40 * rs;                hi0 = 40 * rs;                 // a
      lo1 = std::log(1e-2 / rs);     hi1 = std::log(1e2 / rs);      // log R
      break;
    }
    case Param::R: {
      lo0 = -50 / fixed_value;       hi0 = 50 / fixed_value;        // a
      lo1 = std::log(1e-3 / (fixed_value * fixed_value));
      hi1 = std::log(1e3 / (fixed_value * fixed_value));            // log s
      break;
    }
  }
  constexpr int G = 64;
  std::vector<double> score(G * G);
  auto at = [&](int i, int j) -> double& { return score[static_cast<std::size_t>(i * G + j)]; };
  for (int i = 0; i < G; ++i) {
    for (int j = 0; j < G; ++j) {
      const double x0 = lo0 + (hi0 - lo0) * i / (G - 1);
      const double x1 = lo1 + (hi1 - lo1) * j / (G - 1);
      const auto p = u.expand<double>(x0, x1, fixed_value);
      std::array<double, 2> sc{};
      const auto g = constraint_rows<double>(p[0], p[1], p[2], l, n, nullptr, &sc);
      const double v = relative_norm(g, sc);
      at(i, j) = std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
    }
  }
  std::vector<Seed> seeds;
  for (int i = 0; i < G; ++i) {
    for (int j = 0; j < G; ++j) {
      bool minimum = std::isfinite(at(i, j));
      for (int di = -1; di <= 1 && minimum; ++di) {
        for (int dj = -1; dj <= 1 && minimum; ++dj) {
          const int ii = i + di, jj = j + dj;
          if ((di == 0 && dj == 0) || ii < 0 || jj < 0 || ii >= G || jj >= G) continue;
          if (at(ii, jj) < at(i, j)) minimum = false;
        }
      }
      if (minimum) {
        seeds.push_back({lo0 + (hi0 - lo0) * i / (G - 1), lo1 + (hi1 - lo1) * j / (G - 1), at(i, j)});
      }
    }
  }
  std::sort(seeds.begin(), seeds.end(), [](const Seed& x, const Seed& y) { return x.score < y.score; });
  if (seeds.size() > 48) seeds.resize(48);
  return seeds;
}

struct NewtonOutcome {
  bool converged = false;
  bool drifted_to_zero_b = false;
  Eigen::Matrix<Real, 2, 1> x;
};

NewtonOutcome damped_newton(const Unknowns& u, Eigen::Matrix<Real, 2, 1> x, int l, int n, unsigned digits) {
  using Vec = Eigen::Matrix<Real, 2, 1>;
  const int bits = static_cast<int>(digits * 3.32);
  const Real h = pow(Real(2), -bits / 3);
  const Real step_tol = pow(Real(2), -bits + 24);
  auto residual = [&](const Vec& v) {
    const auto p = u.expand<Real>(v[0], v[1], u.value);
    const auto g = constraint_rows<Real>(p[0], p[1], p[2], l, n, nullptr, nullptr);
    return Vec(g[0], g[1]);
  };
  // Only s can collapse to zero, and only when it travels as a logarithm.
  const int log_s_index = u.fixed == Param::A ? 0 : (u.fixed == Param::R ? 1 : -1);

  NewtonOutcome out;
  Vec g = residual(x);
  for (int it = 0; it < 120; ++it) {
    Eigen::Matrix<Real, 2, 2> J;
    for (int k = 0; k < 2; ++k) {
      Vec xp = x, xm = x;
      const Real hk = h * std::max(Real(1), Real(abs(x[k])));
      xp[k] += hk;
      xm[k] -= hk;
      J.col(k) = (residual(xp) - residual(xm)) / (2 * hk);
    }
    const Real det = J(0, 0) * J(1, 1) - J(0, 1) * J(1, 0);
    if (det == 0) break;
    Vec dx;
    dx[0] = -(J(1, 1) * g[0] - J(0, 1) * g[1]) / det;
    dx[1] = -(-J(1, 0) * g[0] + J(0, 0) * g[1]) / det;
    Real t = 1;
    Vec trial = x + dx;
    Vec g_trial = residual(trial);
    while (g_trial.norm() > g.norm() && t > Real(1) / 1024) {
      t /= 2;
      trial = x + t * dx;
      g_trial = residual(trial);
    }
    x = trial;
    g = g_trial;
    if (abs(x[0]) > 300 || abs(x[1]) > 300) {
      if (log_s_index >= 0 && x[log_s_index] < -100) out.drifted_to_zero_b = true;
      break;
    }
    if (log_s_index >= 0 && x[log_s_index] < -100) {
      out.drifted_to_zero_b = true;
      break;
    }
    if ((t * dx).norm() <= step_tol * std::max(Real(1), Real(x.norm()))) {
      out.converged = true;
      break;
    }
  }
  out.x = x;
  return out;
}

}  // namespace

template <typename Scalar>
std::array<Scalar, 2> confined_constraints(const Scalar& a, const Scalar& s, const Scalar& radius, int l,
                                           int n, Polynomial<Scalar>* coeffs) {
  return constraint_rows<Scalar>(a, s, radius, l, n, coeffs, nullptr);
}

template std::array<double, 2> confined_constraints<double>(const double&, const double&, const double&, int,
                                                            int, Polynomial<double>*);
template std::array<Real, 2> confined_constraints<Real>(const Real&, const Real&, const Real&, int, int,
                                                        Polynomial<Real>*);

std::vector<QESCondition> confined_qes_solve(int n, int l, const Fixed& fixed, const PrecisionCtx& ctx) {
  ctx.validate();
  if (n < 0) throw std::invalid_argument("polynomial degree must be non-negative");
  if (l < 0) throw std::invalid_argument("l must be non-negative");
  ScopedPrecision guard(ctx);

  Unknowns u{fixed.which, at_working_precision(fixed.value)};
  if (fixed.which == Param::B) {
    if (!(u.value > 0)) throw DegenerateInput("fixed b must be positive");
    u.value = sqrt(2 * u.value);  // the solver works with s = sqrt(2b)
  } else if (fixed.which == Param::R && !(fixed.value > 0)) {
    throw std::invalid_argument("wall radius must be positive");
  }

  const unsigned digits = ctx.digits10();
  const Real accept = pow(Real(10), -static_cast<int>(digits * 6 / 10));
  const Real same = pow(Real(10), -static_cast<int>(digits / 3));
  bool degenerate = false;
  std::vector<std::array<Real, 3>> found;

  for (const Seed& seed : grid_seeds(u, to_double(u.value), l, n)) {
    Eigen::Matrix<Real, 2, 1> x(Real(seed.x0), Real(seed.x1));
    const NewtonOutcome res = damped_newton(u, x, l, n, digits);
    degenerate = degenerate || res.drifted_to_zero_b;
    if (!res.converged) continue;
    const auto p = u.expand<Real>(res.x[0], res.x[1], u.value);
    if (!(p[1] > 0) || !(p[2] > 0)) continue;
    std::array<Real, 2> sc;
    const auto g = constraint_rows<Real>(p[0], p[1], p[2], l, n, nullptr, &sc);
    if (relative_norm(g, sc) > accept) continue;
    const bool duplicate = std::any_of(found.begin(), found.end(), [&](const auto& q) {
      for (int i = 0; i < 3; ++i) {
        if (abs(q[i] - p[i]) > same * std::max(Real(1), Real(abs(p[i])))) return false;
      }
      return true;
    });
    if (!duplicate) found.push_back(p);
  }
  if (found.empty()) {
    if (degenerate) throw DegenerateInput("the constraints drive b to zero for this fixed value");
    throw NoSolution("no admissible (a, b, R) satisfies the degree-" + std::to_string(n) + " constraints");
  }
  std::sort(found.begin(), found.end(), [](const auto& x, const auto& y) {
    return x[2] != y[2] ? x[2] < y[2] : x[0] < y[0];
  });

  std::vector<QESCondition> out;
  for (const auto& p : found) {
    QESCondition q;
    q.n = n;
    q.a = p[0];
    q.b = p[1] * p[1] / 2;
    q.radius = p[2];
    q.energy = (Real(n + l) + Real(5) / 2) * p[1];
    const auto g = constraint_rows<Real>(p[0], p[1], p[2], l, n, &q.poly, nullptr);
    q.constraint_residuals = {g[0], g[1]};
    q.node_count = count_nodes(q.poly, Real(0), p[2]);
    q.label = {q.node_count, l};
    out.push_back(std::move(q));
  }
  return out;
}

// ---------------------------------------------------------------------------

Real eigenfunction_residual(const QESCondition& c, const Real& r_in) {
  const int l = c.label.l;
  const Real r = at_working_precision(r_in);
  const Real a = at_working_precision(c.a), b = at_working_precision(c.b);
  const Real energy = at_working_precision(c.energy);
  // psi = u(r) exp(-alpha r^2) with u = r^{l+1} [(R - r)] f(r).
  Poly u = shift_up(c.poly, l + 1);
  if (c.radius) u = times_wall_factor(std::move(u), *c.radius, 1);
  const Poly du = derivative(u);
  const Poly d2u = derivative(du);
  const Real alpha = sqrt(2 * b) / 2;
  const Real u0 = u(r), u1 = du(r), u2 = d2u(r);
  const Real psi2 = u2 - 4 * alpha * r * u1 - 2 * alpha * u0 + 4 * alpha * alpha * r * r * u0;
  const Real veff = Real(l * (l + 1)) / (2 * r * r) - a / r + b * r * r;
  const Real residual = -psi2 / 2 + (veff - energy) * u0;
  const Real scale = abs(psi2) / 2 + abs(veff * u0) + abs(energy * u0);
  return scale > 0 ? Real(abs(residual) / scale) : Real(abs(residual));
}

}  // namespace coulosc::exact
