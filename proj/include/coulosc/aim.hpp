#pragma once

#include "coulosc/core/precision.hpp"
#include "coulosc/core/rational_fn.hpp"
#include "coulosc/core/types.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace coulosc::aim {

/// One eigenproblem as seen by the asymptotic iteration method: the potential,
/// the angular momentum, and the point r0 where the termination function is
/// evaluated.
///
/// After factoring out r^{l+1} exp(-sqrt(b/2) r^2) (and (R - r) with a wall)
/// the remaining factor f obeys f'' = lambda0 f' + s0 f; lambda0 and s0 are
/// rebuilt for every trial energy.
struct AimProblem {
  PotentialSpec<Real> spec;
  int l = 0;
  Real r0{4};
  int max_iter = 300;
  PrecisionCtx precision;

  /// Defaults: r0 = 4 in free space, r0 = R/2 with a wall.
  static AimProblem make(PotentialSpec<Real> spec, int l, PrecisionCtx precision = {},
                         std::optional<Real> r0 = std::nullopt, int max_iter = 300);

  void validate() const;
};

struct Iterates {
  RationalFn<Real> lambda;
  RationalFn<Real> s;
};

struct DeltaTrace {
  int iteration = 0;
  Real delta_value{0};
  int sign = 0;
};

/// lambda0, s0 for the trial energy.
Iterates initial_iterates(const AimProblem& problem, const Real& energy);

/// lambda_n, s_n with lambda_n = lambda'_{n-1} + s_{n-1} + lambda0 lambda_{n-1}
/// and s_n = s'_{n-1} + s0 lambda_{n-1}.
Iterates aim_iterate(const AimProblem& problem, const Real& energy, int n_target);

/// delta_n(r0; E) = lambda_n s_{n-1} - lambda_{n-1} s_n.
Real aim_delta(const AimProblem& problem, const Real& energy, int n);

/// delta_1 .. delta_{n_max} from a single pass of the recurrence.
std::vector<DeltaTrace> aim_delta_sequence(const AimProblem& problem, const Real& energy, int n_max);

/// Extra mantissa bits used to confirm a converged root.
inline constexpr unsigned kVerifyGuardBits = 64;

struct SolveOptions {
  int scan_subdivisions = 64;
  int min_iter = 1;
  /// Confirm the converged root with kVerifyGuardBits more bits and throw
  /// PrecisionExhausted if its bracket no longer holds a sign change.
  bool verify_precision = true;
};

/// k-th root (ascending, k >= 1) of the termination condition inside the window.
///
/// The iteration count grows from min_iter; at each N the root is bracketed
/// (coarse sign scan, then tracking of the previous root) and bisected. The
/// solve stops at the first N whose root agrees with the root at N - 1 to
/// within tol; `iterations` reports that earlier N. The final bracket is then
/// checked at a higher precision (see SolveOptions::verify_precision).
EigenResult<Real> aim_solve(const AimProblem& problem, std::pair<Real, Real> window, int k,
                            const SolveOptions& options = {});

}  // namespace coulosc::aim
