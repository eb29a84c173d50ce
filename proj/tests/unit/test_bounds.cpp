#include "coulosc/bounds.hpp"

#include <doctest.h>

using namespace coulosc;
using namespace coulosc::bounds;

namespace {

double gap(const Real& x, const Real& y) { return to_double(abs(x - y)); }

PotentialSpec<Real> free_spec(double a, double b) { return PotentialSpec<Real>::free(Real(a), Real(b)); }

}  // namespace

TEST_SUITE("bounds") {
  TEST_CASE("envelope parameters") {
    ScopedPrecision guard(PrecisionCtx{});
    const auto p = EnvelopeParams::for_level({1, 2}, EnvelopeVariant::LowerEnvelope);  // 4d
    CHECK(p.p1 == 4);
    CHECK(p.p2 == Real(5.5));
    CHECK(p.coulomb_oscillator_factors() == std::pair<Real, Real>{Real(4), Real(4)});
    CHECK(EnvelopeParams::for_level({1, 2}, EnvelopeVariant::UpperEnvelope).coulomb_oscillator_factors() ==
          std::pair<Real, Real>{Real(5.5), Real(5.5)});
    // Node-less levels: P2 = nu + 1/2.
    const auto s = EnvelopeParams::for_level({0, 2}, EnvelopeVariant::SumApprox);
    CHECK(s.coulomb_oscillator_factors() == std::pair<Real, Real>{Real(3), Real(3.5)});
  }

  TEST_CASE("three-term minimiser") {
    ScopedPrecision guard(PrecisionCtx{});
    // k/r^2 + d r^2 has minimum 2 sqrt(k d) at r = (k/d)^(1/4).
    const auto v = minimize_three_term(Real(2), Real(0), Real(8), std::nullopt);
    CHECK(gap(v.value, Real(8)) <= 1e-60);
    REQUIRE(v.argmin);
    CHECK(gap(*v.argmin, Real(0.5) * sqrt(Real(2))) <= 1e-60);
    // Pure Coulomb: k/r^2 - c/r has minimum -c^2/(4k).
    const auto c = minimize_three_term(Real(0.5), Real(1), Real(0), std::nullopt);
    CHECK(gap(c.value, Real(-0.5)) <= 1e-60);
    // No attraction and no confinement: the infimum 0 is approached only at infinity.
    const auto none = minimize_three_term(Real(0.5), Real(-1), Real(0), std::nullopt);
    CHECK(none.value == 0);
    CHECK(!none.argmin);
    CHECK_THROWS_AS(minimize_three_term(Real(0), Real(1), Real(1), std::nullopt), std::invalid_argument);
  }

  TEST_CASE("Heisenberg lower bound") {
    ScopedPrecision guard(PrecisionCtx{});
    // AM-GM: min 1/(8 r^2) + r^2/2 = 0.5.
    CHECK(gap(heisenberg_lower(free_spec(0, 0.5)).value, Real(0.5)) <= 1e-60);
    const auto h = heisenberg_lower(free_spec(1, 0.5));
    CHECK(h.value < Real(0.179668484653553873));
    // With a wall inside the unconstrained minimiser, the minimum sits at r = R.
    const auto walled = heisenberg_lower(PotentialSpec<Real>::walled(Real(1), Real(0.5), Real(0.1)));
    REQUIRE(walled.argmin);
    CHECK(*walled.argmin == Real(0.1));
    const Real r(0.1);
    CHECK(gap(walled.value, 1 / (8 * r * r) - 1 / r + r * r / 2) <= 1e-60);
    CHECK(walled.value < Real(468.994438340395273843));
  }

  TEST_CASE("sum approximation is exact at the edges") {
    ScopedPrecision guard(PrecisionCtx{});
    // a = 0: (2n + l + 3/2) sqrt(2b) for node-less levels.
    for (int l = 0; l <= 4; ++l) {
      for (const double b : {0.1, 0.5, 2.0}) {
        const auto v = envelope_bound(free_spec(0, b), {0, l}, EnvelopeVariant::SumApprox);
        CHECK(gap(v.value, (Real(l) + Real(1.5)) * sqrt(2 * Real(b))) <= 1e-12);
      }
    }
    CHECK(gap(envelope_bound(free_spec(0, 0.5), {0, 0}, EnvelopeVariant::SumApprox).value, Real(1.5)) <= 1e-60);
    // b = 0: hydrogen -a^2 / (2 nu^2).
    for (int n = 0; n <= 3; ++n) {
      for (int l = 0; l <= 3; ++l) {
        const LevelLabel lab{n, l};
        const auto v = envelope_bound(free_spec(1, 0), lab, EnvelopeVariant::SumApprox);
        CHECK(gap(v.value, Real(-1) / (2 * lab.nu() * lab.nu())) <= 1e-12);
      }
    }
    CHECK(gap(envelope_bound(free_spec(1, 0), {0, 0}, EnvelopeVariant::SumApprox).value, Real(-0.5)) <= 1e-60);
  }

  TEST_CASE("envelope sandwich around the free ground state") {
    ScopedPrecision guard(PrecisionCtx{});
    const Real e(0.179668484653553873);
    const auto lower = envelope_bound(free_spec(1, 0.5), {0, 0}, EnvelopeVariant::LowerEnvelope);
    const auto upper = envelope_bound(free_spec(1, 0.5), {0, 0}, EnvelopeVariant::UpperEnvelope);
    CHECK(lower.value <= e);
    CHECK(e <= upper.value);
    CHECK(!lower.outside_stated_derivation);
    const auto repulsive = envelope_bound(free_spec(-1, 0.5), {0, 0}, EnvelopeVariant::LowerEnvelope);
    CHECK(repulsive.outside_stated_derivation);
    CHECK_THROWS_AS(envelope_bound(PotentialSpec<Real>::walled(Real(1), Real(1), Real(1)), {0, 0},
                                   EnvelopeVariant::LowerEnvelope),
                    std::invalid_argument);
  }

  TEST_CASE("critical coupling estimates") {
    ScopedPrecision guard(PrecisionCtx{});
    CHECK(gap(critical_b_estimate(Real(1), {0, 0}, CriticalChoice::SumLower), Real(0.375)) <= 1e-60);
    CHECK(gap(critical_b_estimate(Real(1), {0, 0}, CriticalChoice::UpperBound), Real(27) / 32) <= 1e-60);
    CHECK(gap(critical_b_estimate(Real(1), {0, 0}, CriticalChoice::LowerBound), (Real(27) / 32) / pow(Real(1.5), 6)) <=
          1e-60);
    CHECK(std::abs(to_double(critical_b_estimate(Real(1), {0, 0}, CriticalChoice::LowerBound)) - 0.0741) < 1e-4);
    CHECK(gap(critical_b_estimate(Real(2), {0, 0}, CriticalChoice::SumLower), Real(6)) <= 1e-60);
    CHECK_THROWS_AS(critical_b_estimate(Real(1), {1, 0}, CriticalChoice::SumLower), std::invalid_argument);
    CHECK_THROWS_AS(critical_b_estimate(Real(0), {0, 0}, CriticalChoice::UpperBound), std::invalid_argument);
  }

  TEST_CASE("estimates vanish at the critical coupling") {
    ScopedPrecision guard(PrecisionCtx{});
    // Each b-hat is the zero of the corresponding energy formula.
    const std::pair<CriticalChoice, EnvelopeVariant> pairs[] = {
        {CriticalChoice::UpperBound, EnvelopeVariant::LowerEnvelope},
        {CriticalChoice::LowerBound, EnvelopeVariant::UpperEnvelope},
        {CriticalChoice::SumLower, EnvelopeVariant::SumApprox}};
    for (const LevelLabel lab : {LevelLabel{0, 0}, LevelLabel{0, 2}}) {
      for (const auto& [choice, variant] : pairs) {
        const Real bhat = critical_b_estimate(Real(1), lab, choice);
        const auto v = envelope_bound(PotentialSpec<Real>::free(Real(1), bhat), lab, variant);
        CHECK(to_double(abs(v.value)) <= 1e-60);
      }
    }
  }

  TEST_CASE("bounds obey the scaling law") {
    ScopedPrecision guard(PrecisionCtx{});
    for (const double a : {-1.0, 0.5, 1.0, 3.0}) {
      for (const double b : {0.1, 0.5, 2.0}) {
        const Real s = sqrt(Real(b));
        const Real scaled_a = Real(a) / pow(Real(b), Real(0.25));
        for (const auto variant :
             {EnvelopeVariant::LowerEnvelope, EnvelopeVariant::UpperEnvelope, EnvelopeVariant::SumApprox}) {
          const auto lhs = envelope_bound(free_spec(a, b), {1, 1}, variant).value;
          const auto rhs = envelope_bound(PotentialSpec<Real>::free(scaled_a, Real(1)), {1, 1}, variant).value;
          CHECK(gap(lhs, s * rhs) <= 1e-50);
        }
        const auto h = heisenberg_lower(free_spec(a, b)).value;
        const auto hs = heisenberg_lower(PotentialSpec<Real>::free(scaled_a, Real(1))).value;
        CHECK(gap(h, s * hs) <= 1e-50);
      }
    }
  }

  TEST_CASE("bounds are monotone in the couplings") {
    ScopedPrecision guard(PrecisionCtx{});
    for (const auto variant :
         {EnvelopeVariant::LowerEnvelope, EnvelopeVariant::UpperEnvelope, EnvelopeVariant::SumApprox}) {
      Real prev = envelope_bound(free_spec(1, 0.1), {0, 1}, variant).value;
      for (const double b : {0.2, 0.5, 1.0, 2.0}) {
        const Real v = envelope_bound(free_spec(1, b), {0, 1}, variant).value;
        CHECK(v > prev);
        prev = v;
      }
      prev = envelope_bound(free_spec(-2, 0.5), {0, 1}, variant).value;
      for (const double a : {-1.0, 0.0, 1.0, 2.0}) {
        const Real v = envelope_bound(free_spec(a, 0.5), {0, 1}, variant).value;
        CHECK(v < prev);
        prev = v;
      }
    }
  }
}
