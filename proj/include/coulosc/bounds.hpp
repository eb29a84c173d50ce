#pragma once

#include "coulosc/core/precision.hpp"
#include "coulosc/core/types.hpp"

#include <optional>
#include <utility>

namespace coulosc::bounds {

enum class EnvelopeVariant { LowerEnvelope, UpperEnvelope, SumApprox };
enum class CriticalChoice { UpperBound, LowerBound, SumLower };

/// P1 = nu and P2 = 2 nu - (l + 1/2) for a level.
struct EnvelopeParams {
  Real p1{0};
  Real p2{0};
  EnvelopeVariant variant = EnvelopeVariant::LowerEnvelope;

  static EnvelopeParams for_level(const LevelLabel& label, EnvelopeVariant variant);
  /// (P_a, P_b): the factors scaling the Coulomb and the oscillator terms.
  [[nodiscard]] std::pair<Real, Real> coulomb_oscillator_factors() const;
};

struct BoundValue {
  Real value{0};
  /// Minimising radius; empty when the infimum is approached only as r -> infinity.
  std::optional<Real> argmin;
  /// Set when a <= 0: the envelope construction assumes an attractive Coulomb term.
  bool outside_stated_derivation = false;
};

/// min over 0 < r <= R of k/r^2 - c/r + d r^2 (k > 0, d >= 0), R = infinity when empty.
BoundValue minimize_three_term(const Real& k, const Real& c, const Real& d, const std::optional<Real>& radius,
                               const PrecisionCtx& ctx = {});

/// E > min_{0<r<=R} [1/(8 r^2) - a/r + b r^2].
BoundValue heisenberg_lower(const PotentialSpec<Real>& spec, const PrecisionCtx& ctx = {});

/// min_{r>0} [1/(2 r^2) - a/(P_a r) + b (P_b r)^2] for the free problem.
BoundValue envelope_bound(const PotentialSpec<Real>& spec, const LevelLabel& label, EnvelopeVariant variant,
                          const PrecisionCtx& ctx = {});

/// b-hat = (27/32) a^4 / (P_a^4 P_b^2).
Real critical_b_estimate(const Real& a, const LevelLabel& label, CriticalChoice choice);

}  // namespace coulosc::bounds
