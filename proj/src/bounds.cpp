#include "coulosc/bounds.hpp"

namespace coulosc::bounds {

EnvelopeParams EnvelopeParams::for_level(const LevelLabel& label, EnvelopeVariant variant) {
  if (label.n < 0 || label.l < 0) throw std::invalid_argument("level label must be non-negative");
  EnvelopeParams p;
  p.p1 = Real(label.nu());
  p.p2 = Real(2 * label.nu()) - (Real(label.l) + Real(1) / 2);
  p.variant = variant;
  return p;
}

std::pair<Real, Real> EnvelopeParams::coulomb_oscillator_factors() const {
  switch (variant) {
    case EnvelopeVariant::LowerEnvelope: return {p1, p1};
    case EnvelopeVariant::UpperEnvelope: return {p2, p2};
    case EnvelopeVariant::SumApprox: return {p1, p2};
  }
  return {p1, p1};
}

BoundValue minimize_three_term(const Real& k_in, const Real& c_in, const Real& d_in,
                               const std::optional<Real>& radius_in, const PrecisionCtx& ctx) {
  ctx.validate();
  ScopedPrecision guard(ctx);
  const Real k = at_working_precision(k_in), c = at_working_precision(c_in), d = at_working_precision(d_in);
  std::optional<Real> radius;
  if (radius_in) radius = at_working_precision(*radius_in);
  if (!(k > 0)) throw std::invalid_argument("kinetic coefficient must be positive");
  if (d < 0) throw std::invalid_argument("oscillator coefficient must be non-negative");
  if (radius && !(*radius > 0)) throw std::invalid_argument("radius must be positive");
  auto f = [&](const Real& r) { return k / (r * r) - c / r + d * r * r; };

  // r^3 f'(r) = g(r) with g(r) = 2 d r^4 + c r - 2 k: g(0) < 0 and g is convex
  // on r > 0, so f has a single stationary point, its minimum.
  std::optional<Real> stationary;
  if (d == 0) {
    if (c > 0) stationary = 2 * k / c;
  } else {
    auto g = [&](const Real& r) { return 2 * d * r * r * r * r + c * r - 2 * k; };
    auto dg = [&](const Real& r) { return 8 * d * r * r * r + c; };
    Real r = 1;
    while (!(g(r) > 0)) r *= 2;
    // Newton from the right of the root decreases monotonically onto it.
    const Real eps = pow(Real(2), -static_cast<int>(ctx.mantissa_bits) + 8);
    for (int it = 0; it < 400; ++it) {
      const Real step = g(r) / dg(r);
      r -= step;
      if (abs(step) <= eps * r) break;
    }
    stationary = r;
  }

  BoundValue out;
  if (stationary && (!radius || *stationary <= *radius)) {
    out.value = f(*stationary);
    out.argmin = *stationary;
  } else if (radius) {
    // f decreases on (0, r*), so the constrained minimum sits on the wall.
    out.value = f(*radius);
    out.argmin = *radius;
  } else {
    // No stationary point: f decreases to its infimum 0 as r -> infinity.
    out.value = 0;
  }
  return out;
}

BoundValue heisenberg_lower(const PotentialSpec<Real>& spec, const PrecisionCtx& ctx) {
  ScopedPrecision guard(ctx);
  if (spec.b < 0) throw std::invalid_argument("heisenberg bound requires b >= 0");
  return minimize_three_term(Real(1) / 8, spec.a, spec.b, spec.wall, ctx);
}

BoundValue envelope_bound(const PotentialSpec<Real>& spec, const LevelLabel& label, EnvelopeVariant variant,
                          const PrecisionCtx& ctx) {
  ScopedPrecision guard(ctx);
  if (spec.confined()) throw std::invalid_argument("envelope bounds are derived for the free problem only");
  if (spec.b < 0) throw std::invalid_argument("envelope bounds require b >= 0");
  if (spec.b == 0 && spec.a == 0) throw std::invalid_argument("envelope bounds need b > 0 or a != 0");
  const auto [pa, pb] = EnvelopeParams::for_level(label, variant).coulomb_oscillator_factors();
  BoundValue out = minimize_three_term(Real(1) / 2, Real(spec.a / pa), Real(spec.b * pb * pb), std::nullopt, ctx);
  out.outside_stated_derivation = !(spec.a > 0);
  return out;
}

Real critical_b_estimate(const Real& a, const LevelLabel& label, CriticalChoice choice) {
  if (!(a > 0)) throw std::invalid_argument("critical coupling estimates require a > 0");
  Real pa, pb;
  switch (choice) {
    case CriticalChoice::UpperBound:
      pa = pb = Real(label.nu());
      break;
    case CriticalChoice::LowerBound:
      pa = pb = Real(2 * label.nu()) - (Real(label.l) + Real(1) / 2);
      break;
    case CriticalChoice::SumLower:
      if (label.nu() != label.l + 1) {
        throw std::invalid_argument("the summed estimate applies to node-less levels (nu = l + 1) only");
      }
      pa = Real(label.nu());
      pb = pa + Real(1) / 2;
      break;
  }
  const Real a2 = a * a;
  return Real(27) / 32 * a2 * a2 / (pa * pa * pa * pa * pb * pb);
}

}  // namespace coulosc::bounds
