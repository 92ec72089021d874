#include <catch2/catch_amalgamated.hpp>

#include "evac/naive.hpp"

using namespace evac;
using namespace evac::two_turn;

namespace {
const RegimeConstants& rc = RegimeConstants::get();
}

TEST_CASE("normalized time formula") {
  CHECK(naive_time({1.0 / 3.0, 1.0, 1.0}) == 9.0);
  CHECK(naive_time({rc.sigma, rc.rho, rc.kappa}) == Catch::Approx(1.0).margin(1e-4));
  CHECK(naive_time({0.25, 1.0, 0.5}) == Catch::Approx(12.0).epsilon(1e-12));
  CHECK_THROWS_AS(naive_time({0.5, 0.5, 1.0}), std::domain_error);
}

TEST_CASE("normalized energy formula") {
  CHECK(naive_energy({1.0 / 3.0, 1.0, 1.0}) == Catch::Approx(14.0 / 3.0).epsilon(1e-12));
  CHECK(naive_energy({rc.sigma, rc.rho, rc.kappa}) == Catch::Approx(292.369).margin(1e-2));
  CHECK(naive_energy({0.25, 1.0, 0.5}) ==
        Catch::Approx((0.0625 + 1.0 + 0.5) / 0.75).epsilon(1e-12));
  CHECK_THROWS_AS(naive_energy({0.5, 0.4, 1.0}), std::domain_error);
}

TEST_CASE("regime constants") {
  CHECK(rc.gamma1 == Catch::Approx(9.06609).margin(5e-6));
  CHECK(std::abs(gamma1_polynomial(rc.gamma1)) < 1e-9);
  CHECK(rc.gamma2 == Catch::Approx(11.3414).margin(1e-4));
  // the full-precision root is feasible to float precision
  SpeedTriple exact = rc.unbounded_optimum();
  CHECK(naive_time(exact) == Catch::Approx(1.0).margin(1e-12));
  // the six-digit values only within their print precision
  CHECK(naive_time({rc.sigma, rc.rho, rc.kappa}) == Catch::Approx(1.0).margin(1e-4));
}

TEST_CASE("optimal speeds per regime") {
  SECTION("regime A at the 9-boundary") {
    auto [v, tag] = optimal_speeds(9.0, 1.0);
    CHECK(tag == Regime::A);
    CHECK(v.s == Catch::Approx(1.0 / 3.0).margin(1e-12));
    CHECK(v.r == 1.0);
    CHECK(v.k == 1.0);
  }
  SECTION("regime C at cb slightly above gamma2") {
    auto [v, tag] = optimal_speeds(11.3415, 1.0);
    CHECK(tag == Regime::C);
    CHECK(v.s == Catch::Approx(2.659764883844293 / 11.3415).margin(1e-9));
    CHECK(v.r == Catch::Approx(11.341425445393606 / 11.3415).margin(1e-9));
    CHECK(v.k == Catch::Approx(6.637089776204052 / 11.3415).margin(1e-9));
  }
  SECTION("regime B heuristic with tight time") {
    auto [v, tag] = optimal_speeds(10.0, 1.0);
    CHECK(tag == Regime::B);
    CHECK(v.s == Catch::Approx(0.269751).margin(1e-9));
    CHECK(v.r == 1.0);
    CHECK(naive_time(v) == Catch::Approx(10.0).margin(1e-6));
  }
  SECTION("infeasible below the 9-bound") {
    CHECK_THROWS_AS(optimal_speeds(8.999, 1.0), infeasible_error);
    CHECK_THROWS_AS(optimal_speeds(4.0, 2.0 / 4.0), infeasible_error);
  }
  SECTION("regime boundaries pick the lower-energy candidate") {
    for (double x : {rc.gamma1, rc.gamma2}) {
      auto [v, tag] = optimal_speeds(x, 1.0);
      CHECK(naive_time(v) <= x + kFeasTol);
      CHECK(v.max() <= 1.0 + kExactTol);
    }
  }
}

TEST_CASE("time constraint tightness across the spectrum") {
  for (double x = 9.0; x <= 14.0; x += 0.25) {
    auto [v, tag] = optimal_speeds(x, 1.0);
    CHECK(naive_time(v) == Catch::Approx(x).margin(1e-6));
  }
}

TEST_CASE("competitive ratio curve") {
  CHECK(cr_function(9.0) == Catch::Approx(378.0).epsilon(1e-12));
  CHECK(cr_function(11.3414) == Catch::Approx(292.369).margin(1e-2));
  CHECK(cr_function(12.0) == 292.369);
  CHECK_THROWS_AS(cr_function(8.5), std::domain_error);

  SECTION("middle branch agrees with the regime-B energy within 1e-3") {
    for (double x : {9.2, 9.8, 10.0, 10.7, 11.2}) {
      auto [v, tag] = optimal_speeds(x, 1.0);
      CHECK(cr_function(x) == Catch::Approx(x * x * naive_energy(v)).margin(1e-3));
    }
  }
  SECTION("continuity at the regime cuts within the printed precision") {
    double eps = 1e-9;
    CHECK(std::abs(cr_function(rc.gamma1 - eps) - cr_function(rc.gamma1 + eps)) <= 1e-2);
    CHECK(std::abs(cr_function(rc.gamma2 - eps) - cr_function(rc.gamma2 + eps)) <= 1e-2);
  }
  SECTION("non-increasing over the spectrum") {
    double prev = cr_function(9.0);
    for (double x = 9.01; x <= 12.0 + 1e-9; x += 0.01) {
      double f = cr_function(x);
      CHECK(f <= prev + 1e-9);
      prev = f;
    }
  }
}

TEST_CASE("regime-B return-speed denominator stays positive over the band") {
  // quadratic guard polynomial: positive between its roots 5.0074 and 20.2699
  auto g = [](double x) {
    return x * (x * (0.00170268 - 0.000689908 * x) + 0.327748) - 1.59724;
  };
  CHECK(g(rc.gamma1) > 0.0);
  CHECK(g(rc.gamma2) > 0.0);
  for (double x = rc.gamma1 + 1e-6; x < rc.gamma2; x += 0.01) {
    auto [v, tag] = optimal_speeds(x, 1.0);
    if (tag != Regime::B) continue;
    CHECK(v.k > 0.0);
    CHECK(v.k <= 1.0 + kExactTol);
  }
}

TEST_CASE("full evaluation reports") {
  SECTION("two-turn baseline") {
    EvacReport rep = evaluate({9.0, 1.0, 10.0, Side::Left}, {1.0 / 3.0, 1.0, 1.0});
    CHECK(rep.evac_time == 90.0);
    CHECK(rep.energy_total == Catch::Approx(280.0 / 3.0).epsilon(1e-12));
    CHECK(rep.cr == Catch::Approx(378.0).epsilon(1e-12));
    CHECK(rep.energy_left + rep.energy_right == Catch::Approx(rep.energy_total).epsilon(1e-12));
  }
  SECTION("unbounded-cap optimum") {
    EvacReport rep = evaluate({1.0, kUnboundedSpeed, 5.0, Side::Left}, rc.unbounded_optimum());
    CHECK(rep.energy_total == Catch::Approx(10.0 * 292.369).margin(0.1));
  }
  SECTION("violated time budget is rejected with a message") {
    CHECK_THROWS_WITH(evaluate({9.0, 1.0, 2.0, Side::Left}, {0.5, 1.0, 1.0}),
                      Catch::Matchers::ContainsSubstring("time constraint"));
  }
  SECTION("violated cap is rejected") {
    CHECK_THROWS_WITH(evaluate({20.0, 0.5, 2.0, Side::Left}, {0.25, 1.0, 0.5}),
                      Catch::Matchers::ContainsSubstring("speed cap"));
  }
}

TEST_CASE("unbounded-cap optimizers scale as 1/c with constant ratio") {
  auto [v1, t1] = optimal_speeds(1.0, kUnboundedSpeed);
  for (double c : {2.0, 5.0, 9.0}) {
    auto [v, tag] = optimal_speeds(c, kUnboundedSpeed);
    CHECK(tag == Regime::C);
    CHECK(v.s * c == Catch::Approx(v1.s).epsilon(1e-12));
    CHECK(v.r * c == Catch::Approx(v1.r).epsilon(1e-12));
    CHECK(v.k * c == Catch::Approx(v1.k).epsilon(1e-12));
    CHECK(c * c * naive_energy(v) == Catch::Approx(naive_energy(v1)).epsilon(1e-12));
  }
}
