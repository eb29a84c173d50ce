#include "coulosc/aim.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace coulosc::aim {

namespace {

int sign_of(const Real& x) { return x > 0 ? 1 : (x < 0 ? -1 : 0); }

struct Bracket {
  Real lo, hi;
  int sign_lo = 0;
};

}  // namespace

AimProblem AimProblem::make(PotentialSpec<Real> spec, int l, PrecisionCtx precision,
                            std::optional<Real> r0, int max_iter) {
  ScopedPrecision guard(precision);
  AimProblem p;
  p.spec.a = at_working_precision(spec.a);
  p.spec.b = at_working_precision(spec.b);
  if (spec.confined()) p.spec.wall = at_working_precision(spec.radius());
  p.l = l;
  p.precision = precision;
  p.max_iter = max_iter;
  if (r0) {
    p.r0 = at_working_precision(*r0);
  } else {
    p.r0 = p.spec.confined() ? Real(p.spec.radius() / 2) : Real(4);
  }
  p.validate();
  return p;
}

void AimProblem::validate() const {
  precision.validate();
  if (!(spec.b > 0)) throw std::invalid_argument("AIM requires b > 0");
  if (l < 0) throw std::invalid_argument("l must be non-negative");
  if (max_iter < 1) throw std::invalid_argument("max_iter must be positive");
  if (spec.confined() && !(spec.radius() > 0)) throw std::invalid_argument("wall radius must be positive");
  if (!(r0 > 0) || (spec.confined() && !(r0 < spec.radius()))) {
    throw DomainError("r0 must lie inside the open radial domain");
  }
}

Iterates initial_iterates(const AimProblem& problem, const Real& energy_in) {
  const Real energy = at_working_precision(energy_in);
  using Poly = Polynomial<Real>;
  const Real a = at_working_precision(problem.spec.a);
  const Real s = sqrt(2 * at_working_precision(problem.spec.b));
  const Real l = problem.l;
  if (!problem.spec.confined()) {
    // lambda0 = (2 s r^2 - 2(l+1)) / r,  s0 = (-(2E - (2l+3) s) r - 2a) / r
    RationalFn<Real> lambda0(Poly{Real(-2 * (l + 1)), Real(0), Real(2 * s)}, 1);
    RationalFn<Real> s0(Poly{Real(-2 * a), Real(-(2 * energy - (2 * l + 3) * s))}, 1);
    return {std::move(lambda0), std::move(s0)};
  }
  const Real R = at_working_precision(problem.spec.radius());
  // lambda0 = -2[(l+1)(R-r) - r - s r^2 (R-r)] / (r (R-r))
  RationalFn<Real> lambda0(
      Poly{Real(-2 * (l + 1) * R), Real(2 * (l + 2)), Real(2 * s * R), Real(-2 * s)}, 1, 1, R);
  // s0 = -[A r^2 + B r + C] / (r (R-r))
  const Real A = -2 * energy + (2 * l + 5) * s;
  const Real B = -3 * R * s + 2 * R * energy - 2 * R * l * s - 2 * a;
  const Real C = 2 * R * a - 2 * (l + 1);
  RationalFn<Real> s0(Poly{Real(-C), Real(-B), Real(-A)}, 1, 1, R);
  return {std::move(lambda0), std::move(s0)};
}

namespace {

Iterates step(const Iterates& prev, const Iterates& base) {
  return {derivative(prev.lambda) + prev.s + base.lambda * prev.lambda,
          derivative(prev.s) + base.s * prev.lambda};
}

}  // namespace

Iterates aim_iterate(const AimProblem& problem, const Real& energy, int n_target) {
  if (n_target < 0 || n_target > problem.max_iter) {
    throw std::invalid_argument("n_target must lie in [0, max_iter]");
  }
  ScopedPrecision guard(problem.precision);
  const Iterates base = initial_iterates(problem, energy);
  Iterates cur = base;
  for (int n = 1; n <= n_target; ++n) cur = step(cur, base);
  return cur;
}

std::vector<DeltaTrace> aim_delta_sequence(const AimProblem& problem, const Real& energy, int n_max) {
  if (n_max < 1 || n_max > problem.max_iter) throw std::invalid_argument("n_max must lie in [1, max_iter]");
  ScopedPrecision guard(problem.precision);
  const Iterates base = initial_iterates(problem, energy);
  std::vector<DeltaTrace> out;
  out.reserve(static_cast<std::size_t>(n_max));
  Iterates prev = base;
  Real lambda_prev = prev.lambda(problem.r0);
  Real s_prev = prev.s(problem.r0);
  for (int n = 1; n <= n_max; ++n) {
    Iterates cur = step(prev, base);
    const Real lambda_cur = cur.lambda(problem.r0);
    const Real s_cur = cur.s(problem.r0);
    Real delta = lambda_cur * s_prev - lambda_prev * s_cur;
    const int sg = sign_of(delta);
    out.push_back({n, std::move(delta), sg});
    prev = std::move(cur);
    lambda_prev = lambda_cur;
    s_prev = s_cur;
  }
  return out;
}

Real aim_delta(const AimProblem& problem, const Real& energy, int n) {
  if (n < 1) throw std::invalid_argument("delta_n needs n >= 1");
  ScopedPrecision guard(problem.precision);
  const Iterates base = initial_iterates(problem, energy);
  Iterates prev = base;
  for (int k = 1; k < n; ++k) prev = step(prev, base);
  const Iterates cur = step(prev, base);
  const Real& r0 = problem.r0;
  return cur.lambda(r0) * prev.s(r0) - prev.lambda(r0) * cur.s(r0);
}

namespace {

// k-th sign change of delta_n on a uniform grid over the window.
std::optional<Bracket> scan_bracket(const AimProblem& problem, const Real& lo, const Real& hi, int k,
                                    int n, int subdivisions) {
  int found = 0;
  Real x_prev = lo;
  int s_prev = sign_of(aim_delta(problem, lo, n));
  if (s_prev == 0 && ++found == k) return Bracket{lo, lo, 0};
  for (int i = 1; i <= subdivisions; ++i) {
    const Real x = lo + (hi - lo) * i / subdivisions;
    const int sg = sign_of(aim_delta(problem, x, n));
    if (sg == 0) {
      if (++found == k) return Bracket{x, x, 0};
    } else if (s_prev != 0 && sg != s_prev) {
      if (++found == k) return Bracket{x_prev, x, s_prev};
    }
    x_prev = x;
    s_prev = sg;
  }
  return std::nullopt;
}

// Sign change around a previous root, widening until found or too wide.
std::optional<Bracket> track_bracket(const AimProblem& problem, const Real& center, Real half_width,
                                     const Real& lo, const Real& hi, const Real& max_half_width, int n) {
  while (half_width <= max_half_width) {
    const Real a = center - half_width < lo ? lo : Real(center - half_width);
    const Real b = center + half_width > hi ? hi : Real(center + half_width);
    const int sa = sign_of(aim_delta(problem, a, n));
    const int sb = sign_of(aim_delta(problem, b, n));
    if (sa == 0) return Bracket{a, a, 0};
    if (sb == 0) return Bracket{b, b, 0};
    if (sa != sb) return Bracket{a, b, sa};
    half_width *= 4;
  }
  return std::nullopt;
}

Bracket bisect(const AimProblem& problem, Bracket br, const Real& width, int n) {
  while (br.hi - br.lo > width) {
    const Real mid = (br.lo + br.hi) / 2;
    const int sg = sign_of(aim_delta(problem, mid, n));
    if (sg == 0) return Bracket{mid, mid, 0};
    if (sg == br.sign_lo) {
      br.lo = mid;
    } else {
      br.hi = mid;
    }
  }
  return br;
}

// Rounding in the iteration can freeze the root of delta_N away from the true
// eigenvalue, so a converged root is re-bracketed with extra guard bits.
bool survives_more_precision(const AimProblem& problem, const Bracket& fine, const Real& tol, int n) {
  AimProblem wider = problem;
  wider.precision.mantissa_bits += kVerifyGuardBits;
  ScopedPrecision guard(wider.precision);
  const Real lo = at_working_precision(fine.lo) - tol;
  const Real hi = at_working_precision(fine.hi) + tol;
  const int sa = sign_of(aim_delta(wider, lo, n));
  const int sb = sign_of(aim_delta(wider, hi, n));
  return sa == 0 || sb == 0 || sa != sb;
}

}  // namespace

EigenResult<Real> aim_solve(const AimProblem& problem, std::pair<Real, Real> window, int k,
                            const SolveOptions& options) {
  problem.validate();
  if (k < 1) throw std::invalid_argument("root ordinal k must be >= 1");
  ScopedPrecision guard(problem.precision);
  const Real lo = at_working_precision(window.first);
  const Real hi = at_working_precision(window.second);
  if (!(lo < hi)) throw std::invalid_argument("search window must satisfy low < high");

  const Real tol = problem.precision.tol;
  const Real span = hi - lo;
  std::optional<Real> prev_root;
  Real prev_diff = span;
  bool any_root = false;

  for (int n = std::max(1, options.min_iter); n <= problem.max_iter; ++n) {
    std::optional<Bracket> br;
    if (prev_root) {
      const Real half = std::max(Real(8 * prev_diff), Real(8 * tol));
      br = track_bracket(problem, *prev_root, half, lo, hi, Real(span / 4), n);
    }
    if (!br) br = scan_bracket(problem, lo, hi, k, n, options.scan_subdivisions);
    if (!br) {
      prev_root.reset();
      prev_diff = span;
      continue;
    }
    any_root = true;
    // Resolve only as finely as the current movement of the root requires.
    const Real width = std::max(Real(tol / 4), Real(prev_diff / 1000));
    const Bracket fine = bisect(problem, *br, width, n);
    const Real root = (fine.lo + fine.hi) / 2;
    if (prev_root) {
      const Real diff = abs(root - *prev_root);
      if (diff < tol && width <= tol / 4) {
        if (options.verify_precision && !survives_more_precision(problem, fine, tol, n)) {
          throw PrecisionExhausted("the AIM root at N = " + std::to_string(n) + " moves when " +
                                   std::to_string(kVerifyGuardBits) +
                                   " more mantissa bits are used; the iteration lost its accuracy");
        }
        EigenResult<Real> result;
        result.energy = root;
        result.label = LevelLabel{k - 1, problem.l};
        result.solver = SolverKind::AIM;
        result.iterations = n - 1;
        result.precision_used = problem.precision;
        result.bracket = {fine.lo, fine.hi};
        return result;
      }
      prev_diff = diff;
    }
    prev_root = root;
  }
  if (!any_root) {
    throw NoRootFound("no sign change of the termination function in the window up to N = " +
                      std::to_string(problem.max_iter));
  }
  throw PrecisionExhausted("AIM roots did not stabilize to tol within N = " +
                           std::to_string(problem.max_iter));
}

}  // namespace coulosc::aim
