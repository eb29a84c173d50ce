#include "coulosc/aim.hpp"

#include <doctest.h>

using namespace coulosc;
using namespace coulosc::aim;

namespace {

double gap(const Real& x, const Real& y) { return to_double(abs(x - y)); }

const PrecisionCtx kFast{128, 1e-12};

AimProblem free_problem(double a, double b, int l, const PrecisionCtx& ctx = {}, int max_iter = 300) {
  ScopedPrecision guard(ctx);
  return AimProblem::make(PotentialSpec<Real>::free(Real(a), Real(b)), l, ctx, std::nullopt, max_iter);
}

AimProblem walled_problem(double a, double b, double radius, int l, const PrecisionCtx& ctx = {}) {
  ScopedPrecision guard(ctx);
  return AimProblem::make(PotentialSpec<Real>::walled(Real(a), Real(b), Real(radius)), l, ctx);
}

}  // namespace

TEST_SUITE("aim") {
  TEST_CASE("default evaluation points") {
    CHECK(free_problem(1, 0.5, 0).r0 == 4);
    CHECK(walled_problem(1, 0.5, 3, 0).r0 == Real(1.5));
    ScopedPrecision guard(PrecisionCtx{});
    CHECK_THROWS_AS(AimProblem::make(PotentialSpec<Real>::walled(Real(1), Real(0.5), Real(1)), 0, {}, Real(1)).validate(),
                    DomainError);
    CHECK_THROWS_AS(AimProblem::make(PotentialSpec<Real>::free(Real(1), Real(0)), 0).validate(),
                    std::invalid_argument);
  }

  TEST_CASE("iteration zero returns the seed functions") {
    ScopedPrecision guard(PrecisionCtx{});
    const auto p = free_problem(1, 0.5, 2);
    const Real E(3.25);
    const auto it = aim_iterate(p, E, 0);
    const Real r(1.7);
    const Real s2b = sqrt(Real(1));
    // lambda0 = 2 sqrt(2b) r - 2(l+1)/r, s0 = -[(2E - (2l+3) sqrt(2b)) r + 2a] / r.
    CHECK(gap(it.lambda(r), 2 * s2b * r - Real(6) / r) <= 1e-70);
    CHECK(gap(it.s(r), -((2 * E - 7 * s2b) * r + 2) / r) <= 1e-70);
    const auto seed = initial_iterates(p, E);
    CHECK(gap(seed.lambda(r), it.lambda(r)) == 0);
    CHECK(gap(seed.s(r), it.s(r)) == 0);
  }

  TEST_CASE("pure oscillator ground state terminates at the first step") {
    ScopedPrecision guard(PrecisionCtx{});
    const auto p = free_problem(0, 0.5, 0);
    CHECK(to_double(abs(aim_delta(p, Real(1.5), 1))) <= 1e-70);
    CHECK(to_double(abs(aim_delta(p, Real(1.4), 1))) > 1e-3);
  }

  TEST_CASE("quasi-exact level terminates within three steps") {
    ScopedPrecision guard(PrecisionCtx{});
    const auto p = free_problem(1, 0.5, 0);
    const auto trace = aim_delta_sequence(p, Real(2.5), 5);
    REQUIRE(trace.size() == 5);
    for (int n = 3; n <= 5; ++n) CHECK(to_double(abs(trace[n - 1].delta_value)) <= 1e-60);
    // The sequence agrees with direct evaluation.
    const auto off = aim_delta_sequence(p, Real(2.4), 4);
    CHECK(gap(off[3].delta_value, aim_delta(p, Real(2.4), 4)) <= 1e-60 * (1 + to_double(abs(off[3].delta_value))));
    CHECK(off[3].sign != 0);
  }

  TEST_CASE("sign change of the termination function brackets a level") {
    ScopedPrecision guard(PrecisionCtx{});
    const auto p = free_problem(1, 0.5, 1);
    const int n = 80;
    const int below = aim_delta(p, Real(3.80), n) > 0 ? 1 : -1;
    const int above = aim_delta(p, Real(3.81), n) > 0 ? 1 : -1;
    CHECK(below != above);
  }

  TEST_CASE("free ground state at reduced precision") {
    const auto p = free_problem(1, 0.5, 0, kFast);
    const auto res = aim_solve(p, {Real(0), Real(1)}, 1);
    CHECK(std::abs(to_double(res.energy) - 0.179668484653553873) <= 1e-11);
    CHECK(res.label == LevelLabel{0, 0});
    CHECK(res.solver == SolverKind::AIM);
    CHECK(res.iterations > 10);
    CHECK(res.bracket.first <= res.energy);
    CHECK(res.energy <= res.bracket.second);
  }

  TEST_CASE("repulsive Coulomb quasi-exact ground state") {
    const auto p = free_problem(-1, 0.5, 0);
    const auto res = aim_solve(p, {Real(2), Real(3)}, 1);
    ScopedPrecision guard(PrecisionCtx{});
    CHECK(gap(res.energy, Real(2.5)) <= 1e-20);
  }

  TEST_CASE("confined levels") {
    {
      const auto p = walled_problem(-1, 0.5, 1, 0, kFast);
      const auto res = aim_solve(p, {Real(5), Real(10)}, 1);
      CHECK(std::abs(to_double(res.energy) - 7.427602986235605737) <= 1e-11);
    }
    {
      const auto p = walled_problem(1, 0.5, 1, 1, kFast);
      const auto res = aim_solve(p, {Real(7), Real(10)}, 1);
      CHECK(std::abs(to_double(res.energy) - 8.404448391842929575) <= 1e-11);
    }
  }

  TEST_CASE("the k-th root of the window") {
    // Confined a = 1, b = 0.5, R = 1, l = 0: 2.5 and 16.733... are the first two levels.
    const auto p = walled_problem(1, 0.5, 1, 0, kFast);
    const auto first = aim_solve(p, {Real(1), Real(30)}, 1);
    const auto second = aim_solve(p, {Real(1), Real(30)}, 2);
    CHECK(std::abs(to_double(first.energy) - 2.5) <= 1e-11);
    CHECK(std::abs(to_double(second.energy) - 16.733064961893308967) <= 1e-11);
    CHECK(second.label == LevelLabel{1, 0});
  }

  TEST_CASE("root stability under more iterations") {
    const auto p = free_problem(1, 0.5, 0, kFast);
    const auto base = aim_solve(p, {Real(0), Real(1)}, 1);
    SolveOptions later;
    later.min_iter = base.iterations + 5;
    const auto again = aim_solve(p, {Real(0), Real(1)}, 1, later);
    CHECK(std::abs(to_double(again.energy - base.energy)) < 10 * kFast.tol);
  }

  TEST_CASE("scaling of a free quasi-exact level") {
    // E(a, b) = sigma^-2 E(sigma a, sigma^4 b): (1, 0.5) -> (2, 8) scales 2.5 to 10.
    const auto p = free_problem(2, 8, 0);
    const auto res = aim_solve(p, {Real(9), Real(11)}, 1);
    ScopedPrecision guard(PrecisionCtx{});
    CHECK(gap(res.energy / 4, Real(2.5)) <= 1e-20);
  }

  TEST_CASE("failures") {
    {
      const auto p = free_problem(1, 0.5, 0, kFast, 8);
      CHECK_THROWS_AS(aim_solve(p, {Real(-5), Real(-4)}, 1), NoRootFound);
    }
    {
      const auto p = free_problem(1, 0.5, 0, kFast, 5);
      CHECK_THROWS_AS(aim_solve(p, {Real(0), Real(1)}, 1), PrecisionExhausted);
    }
    const auto p = free_problem(1, 0.5, 0, kFast);
    CHECK_THROWS_AS(aim_solve(p, {Real(1), Real(0)}, 1), std::invalid_argument);
    CHECK_THROWS_AS(aim_solve(p, {Real(0), Real(1)}, 0), std::invalid_argument);
  }

  TEST_CASE("a root frozen by rounding is reported, not returned") {
    // a = -1, b = 2, 3p from r0 = 4: at 80 bits the roots of delta_N stop
    // moving away from the eigenvalue 9.9375057350873...
    const auto p = free_problem(-1, 2, 1, PrecisionCtx{80, 1e-8});
    const std::pair<Real, Real> window{Real(9.5), Real(10.5)};
    SolveOptions unchecked;
    unchecked.verify_precision = false;
    const auto wrong = aim_solve(p, window, 1, unchecked);
    CHECK(std::abs(to_double(wrong.energy) - 9.9375057350873) > 1e-6);
    CHECK_THROWS_AS(aim_solve(p, window, 1), PrecisionExhausted);
    const auto q = free_problem(-1, 2, 1, PrecisionCtx{256, 1e-12});
    CHECK(std::abs(to_double(aim_solve(q, window, 1).energy) - 9.9375057350873) <= 1e-11);
  }
}
