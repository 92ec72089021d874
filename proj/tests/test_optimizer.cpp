#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "evac/naive.hpp"
#include "evac/optimizer.hpp"

using namespace evac;
using namespace evac::nlp;

TEST_CASE("numeric solver recovers the known optima") {
  SECTION("tight corner at cb = 9") {
    NlpSolution sol = solve_nlp({9.0, 1.0});
    CHECK(sol.speeds.s == Catch::Approx(1.0 / 3.0).margin(1e-4));
    CHECK(sol.speeds.r == Catch::Approx(1.0).margin(1e-4));
    CHECK(sol.speeds.k == Catch::Approx(1.0).margin(1e-4));
    CHECK(sol.energy == Catch::Approx(14.0 / 3.0).margin(1e-4));
  }
  SECTION("unbounded cap at c = 1") {
    NlpSolution sol = solve_nlp({1.0, kUnboundedSpeed});
    CHECK(sol.speeds.s == Catch::Approx(2.65976).margin(5e-3));
    CHECK(sol.speeds.r == Catch::Approx(11.3414).margin(5e-3));
    CHECK(sol.speeds.k == Catch::Approx(6.63709).margin(5e-3));
    CHECK(sol.energy == Catch::Approx(292.369).margin(0.05));
  }
  SECTION("heuristic band at cb = 10 is nearly optimal") {
    NlpSolution sol = solve_nlp({10.0, 1.0});
    auto [v, tag] = two_turn::optimal_speeds(10.0, 1.0);
    double heuristic = two_turn::naive_energy(v);
    CHECK(sol.energy <= heuristic + 1e-6);
    CHECK(100.0 * (heuristic - sol.energy) <= 0.03 + 1e-3);  // CR scale gap
  }
  SECTION("no feasible point below the 9-bound") {
    CHECK_THROWS_AS(solve_nlp({8.999, 1.0}, 40), infeasible_error);
  }
}

TEST_CASE("stationarity residuals") {
  SpeedTriple six{2.65976, 11.3414, 6.63709};
  SECTION("six-digit constants sit close to the root") {
    KktResidual res = kkt_residual(six);
    CHECK(std::abs(res.res1) <= 1e-3);
    CHECK(std::abs(res.res2) <= 1e-3);
    CHECK(std::abs(res.res3) <= 1e-3);
    CHECK(res.lambda == Catch::Approx(2.0 * std::pow(6.63709, 3)));
  }
  SECTION("an arbitrary point is not stationary") {
    KktResidual res = kkt_residual({1.0, 2.0, 1.0});
    CHECK(res.max_abs() > 1e-2);
  }
  SECTION("Newton polish reaches the full-precision root") {
    SpeedTriple polished = newton_refine({2.66, 11.34, 6.64});
    CHECK(polished.s == Catch::Approx(2.659764883844293).margin(1e-11));
    CHECK(polished.r == Catch::Approx(11.341425445393606).margin(1e-11));
    CHECK(polished.k == Catch::Approx(6.637089776204052).margin(1e-11));
    CHECK(kkt_residual(polished).max_abs() <= 1e-9);
  }
}

TEST_CASE("root-finding utilities") {
  double g1 = find_gamma1();
  CHECK(g1 == Catch::Approx(9.06609).margin(5e-6));
  CHECK(std::abs(two_turn::gamma1_polynomial(g1)) <= 1e-9);
  CHECK(lambda2_threshold() == Catch::Approx(9.72307).margin(5e-6));
}

TEST_CASE("perturbation-based local optimality") {
  CHECK(local_optimality_check({1.0 / 3.0, 1.0, 1.0}, {9.0, 1.0}, 1e-3));
  CHECK(local_optimality_check(two_turn::RegimeConstants::get().unbounded_optimum(),
                               {1.0, kUnboundedSpeed}, 1e-3));
  CHECK_THROWS_AS(local_optimality_check({0.3, 1.0, 1.0}, {9.0, 1.0}, 1e-3),
                  std::invalid_argument);
  // a clearly suboptimal interior point is flagged
  CHECK_FALSE(local_optimality_check({2.8, 12.0, 7.0}, {1.0, kUnboundedSpeed}, 1e-2));
}

TEST_CASE("solver agrees with the closed forms across the spectrum") {
  const auto& rc = two_turn::RegimeConstants::get();
  std::mt19937_64 rng(20260823);
  std::uniform_real_distribution<double> ux(9.0, 14.0), ub(0.5, 2.0);
  for (int i = 0; i < 50; ++i) {
    double x = ux(rng), b = ub(rng), c = x / b;
    NlpSolution sol = solve_nlp({c, b}, 40);
    auto [v, tag] = two_turn::optimal_speeds(c, b);
    double closed_cr = c * c * two_turn::naive_energy(v);
    double numeric_cr = c * c * sol.energy;
    if (x <= rc.gamma1 || x >= rc.gamma2) {
      REQUIRE(std::abs(closed_cr - numeric_cr) <= 1e-3);
    } else {
      REQUIRE(closed_cr - numeric_cr >= -1e-4);
      REQUIRE(closed_cr - numeric_cr <= 0.03 + 1e-3);
    }
  }
}

TEST_CASE("regime-A duals stay non-negative up to gamma1") {
  const auto& rc = two_turn::RegimeConstants::get();
  for (double x = 9.0 + 1e-6; x <= rc.gamma1; x += (rc.gamma1 - 9.0) / 25.0) {
    for (double b : {0.5, 1.0, 3.0}) {
      auto [v, tag] = two_turn::optimal_speeds(x / b, b);
      REQUIRE(tag == two_turn::Regime::A);
      DualMultipliers m = regime_a_multipliers(v.s, b);
      REQUIRE(m.lambda1 >= -1e-9);
      REQUIRE(m.lambda2 >= -1e-9);
      REQUIRE(m.lambda3 >= -1e-9);
    }
  }
}
