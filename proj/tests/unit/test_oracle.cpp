#include "coulosc/oracle.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace coulosc;
using namespace coulosc::oracle;

TEST_SUITE("oracle") {
  TEST_CASE("Sturm bisection on a 2x2 matrix") {
    SymTridiag m;
    m.diag = Eigen::Vector2d(2, 2);
    m.off = Eigen::VectorXd::Constant(1, -1);
    CHECK(count_below(m, 0.5) == 0);
    CHECK(count_below(m, 2.0) == 1);
    CHECK(count_below(m, 4.0) == 2);
    CHECK(eig_k(m, 1) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(eig_k(m, 2) == doctest::Approx(3.0).epsilon(1e-15));
    CHECK_THROWS_AS(eig_k(m, 3), std::invalid_argument);
  }

  TEST_CASE("particle in a box") {
    GridProblem p{PotentialSpec<double>::walled(0, 0, std::numbers::pi), 0, std::numbers::pi, 2000};
    const auto m = discretize(p);
    CHECK(m.diag.size() == 2000);
    CHECK(eig_k(m, 1) == doctest::Approx(0.5).epsilon(1e-5));
    CHECK(eig_k(m, 2) == doctest::Approx(2.0).epsilon(1e-5));
    // Three-point stencil: eigenvalues approach k^2/2 from below.
    CHECK(eig_k(m, 3) < 4.5);
  }

  TEST_CASE("node count of the k-th eigenvector") {
    GridProblem p{PotentialSpec<double>::walled(1, 0.5, 5), 1, 5, 800};
    const auto m = discretize(p);
    for (int k = 1; k <= 5; ++k) {
      const auto v = eigenvector(m, eig_k(m, k));
      CHECK(sign_changes(v) == k - 1);
    }
  }

  TEST_CASE("grid problem validation") {
    GridProblem tiny{PotentialSpec<double>::free(1, 1), 0, 10, 8};
    CHECK_THROWS_AS(tiny.validate(), std::invalid_argument);
    GridProblem mismatch{PotentialSpec<double>::walled(1, 1, 2), 0, 3, 100};
    CHECK_THROWS_AS(mismatch.validate(), std::invalid_argument);
  }

  TEST_CASE("Richardson extrapolation removes even powers") {
    // f(h) = 1 + 3 h^2 - 2 h^4 + h^6 on h = 1, 1/2, 1/4, 1/8.
    std::vector<double> values;
    for (int i = 0; i < 4; ++i) {
      const double h = std::ldexp(1.0, -i);
      values.push_back(1 + 3 * h * h - 2 * std::pow(h, 4) + std::pow(h, 6));
    }
    const auto [value, correction] = richardson(values);
    CHECK(value == doctest::Approx(1.0).epsilon(1e-13));
    // The previous diagonal entry (h = 1, 1/2, 1/4) keeps 1/64 of the h^6 term.
    CHECK(correction == doctest::Approx(1.0 / 64).epsilon(1e-12));
    CHECK_THROWS_AS(richardson({1.0}), std::invalid_argument);
  }

  TEST_CASE("second-order convergence") {
    // Successive differences shrink by about 4 per halving of h.
    std::vector<double> e;
    for (int m : {200, 401, 803}) {
      GridProblem p{PotentialSpec<double>::walled(1, 0.5, 1), 0, 1, m};
      e.push_back(eig_k(discretize(p), 1));
    }
    const double ratio = (e[0] - e[1]) / (e[1] - e[2]);
    CHECK(ratio == doctest::Approx(4.0).epsilon(0.05));
  }

  TEST_CASE("confined levels") {
    CHECK(solve_level(PotentialSpec<double>::walled(1, 0.5, 1), {0, 0}).energy == doctest::Approx(2.5).epsilon(1e-9));
    CHECK(std::abs(solve_level(PotentialSpec<double>::walled(-1, 0.5, 1), {0, 4}).energy - 35.179533437869611594) <=
          1e-6);
    const double ladder[] = {2.5, 16.733064961893308967, 41.029002263262675364, 75.297038665283580892,
                             119.493804921354632859};
    for (int n = 0; n < 5; ++n) {
      const auto r = solve_level(PotentialSpec<double>::walled(1, 0.5, 1), {n, 0});
      CHECK(std::abs(r.energy - ladder[n]) <= 1e-6);
      CHECK(r.solver == SolverKind::GridOracle);
      CHECK(r.label == LevelLabel{n, 0});
    }
  }

  TEST_CASE("free levels") {
    CHECK(std::abs(solve_level(PotentialSpec<double>::free(1, 0.5), {1, 0}).energy - 2.5) <= 1e-8);
    CHECK(std::abs(solve_level(PotentialSpec<double>::free(1, 0.5), {0, 0}).energy - 0.179668484653553873) <= 1e-8);
    CHECK_THROWS_AS(solve_level(PotentialSpec<double>::free(-1, 0), {0, 0}), NotConverged);
  }

  TEST_CASE("energies fall as the wall recedes") {
    double prev = solve_level(PotentialSpec<double>::walled(1, 0.5, 0.5), {0, 1}).energy;
    for (const double radius : {1.0, 2.0, 4.0, 8.0}) {
      const double e = solve_level(PotentialSpec<double>::walled(1, 0.5, radius), {0, 1}).energy;
      CHECK(e <= prev);
      prev = e;
    }
  }
}
