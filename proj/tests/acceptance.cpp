// End-to-end acceptance checks. Each criterion prints one [PASS]/[FAIL]
// line; the process exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>

#include "evac/algo_s.hpp"
#include "evac/core.hpp"
#include "evac/naive.hpp"
#include "evac/optimizer.hpp"
#include "evac/simulator.hpp"

using namespace evac;

namespace {

int failures = 0;

void report(int id, bool ok, const std::string& what) {
  std::printf("[%s] %d: %s\n", ok ? "PASS" : "FAIL", id, what.c_str());
  if (!ok) ++failures;
}

bool close_rel(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void criterion1() {
  auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  for (double d : {2.0, 10.0, 100.0}) {
    EvacReport rep = two_turn::evaluate({9.0, 1.0, d, Side::Left}, {1.0 / 3.0, 1.0, 1.0});
    ok = ok && rep.evac_time == 9.0 * d;
    ok = ok && close_rel(rep.energy_total, 28.0 * d / 3.0, 1e-12);
    ok = ok && close_rel(rep.cr, 378.0, 1e-12);
  }
  double secs = seconds_since(t0);
  ok = ok && secs < 1e-3;
  report(1, ok, "baseline two-turn instance: time 9d, energy 28d/3, ratio 378 (" +
                    std::to_string(secs * 1e3) + " ms)");
}

void criterion2() {
  auto t0 = std::chrono::steady_clock::now();
  nlp::NlpSolution sol = nlp::solve_nlp({1.0, kUnboundedSpeed});
  bool ok = std::abs(sol.speeds.s - 2.65976) <= 5e-3 &&
            std::abs(sol.speeds.r - 11.3414) <= 5e-3 &&
            std::abs(sol.speeds.k - 6.63709) <= 5e-3 &&
            std::abs(sol.energy - 292.369) <= 0.05;
  SpeedTriple polished = nlp::newton_refine(sol.speeds);
  ok = ok && nlp::kkt_residual(polished).max_abs() <= 1e-9;
  double secs = seconds_since(t0);
  ok = ok && secs < 10.0;
  report(2, ok, "numeric solver and Newton polish hit the unbounded-cap optimum (" +
                    std::to_string(secs) + " s)");
}

void criterion3() {
  double g1 = nlp::find_gamma1();
  const auto& rc = two_turn::RegimeConstants::get();
  bool ok = std::abs(g1 - 9.06609) <= 5e-6 && std::abs(rc.gamma2 - 11.3414) <= 1e-4;
  report(3, ok, "regime cut points: gamma1 = 9.06609 +/- 5e-6, gamma2 = 11.3414 +/- 1e-4");
}

void criterion4() {
  auto t0 = std::chrono::steady_clock::now();
  const auto& rc = two_turn::RegimeConstants::get();
  bool ok = true;
  double lo = rc.gamma1 + 1e-3, hi = rc.gamma2 - 1e-3;
  for (int i = 0; i < 20; ++i) {
    double x = lo + (hi - lo) * i / 19.0;
    double gap = two_turn::cr_function(x) - x * x * nlp::solve_nlp({x, 1.0}, 40).energy;
    ok = ok && gap >= -1e-3 && gap <= 0.031;
  }
  double secs = seconds_since(t0);
  ok = ok && secs < 240.0;
  report(4, ok, "middle-band curve within [-1e-3, 0.031] of the numeric optimum at 20 points (" +
                    std::to_string(secs) + " s)");
}

void criterion5() {
  auto [v1, t1] = two_turn::optimal_speeds(1.0, kUnboundedSpeed);
  bool ok = true;
  for (double c : {1.0, 2.0, 5.0, 9.0}) {
    auto [v, tag] = two_turn::optimal_speeds(c, kUnboundedSpeed);
    ok = ok && close_rel(v.s * c, v1.s, 1e-12) && close_rel(v.r * c, v1.r, 1e-12) &&
         close_rel(v.k * c, v1.k, 1e-12);
    ok = ok && std::abs(c * c * two_turn::naive_energy(v) - 292.369) <= 0.01;
  }
  report(5, ok, "unbounded-cap optimum scales as 1/c with constant ratio 292.369 +/- 0.01");
}

void criterion6() {
  auto t0 = std::chrono::steady_clock::now();
  three_phase::SweepResult res = three_phase::worst_case_sweep(0.39403, 10, 2000);
  bool ok = res.sup <= 8.42588 && res.sup >= 8.4257 && res.cr <= 341.24814 + 1e-3;
  double secs = seconds_since(t0);
  ok = ok && secs < 120.0;
  report(6, ok, "worst-case sweep: sup energy/d in [8.4257, 8.42588], ratio <= 341.24814 (" +
                    std::to_string(secs) + " s)");
}

void run_criteria_7_and_8() {
  auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(20260823);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  bool ok7 = true, ok8 = true;
  for (int i = 0; i < 500; ++i) {
    double s = 1.0 / 3.0 + u(rng) / 6.0;
    RobotId who = (i % 2) ? RobotId::R : RobotId::L;
    int k = 1 + static_cast<int>(u(rng) * 7.999);
    double K = three_phase::round_base(who, k);
    double d = K * (1.001 + 2.998 * u(rng));
    ProblemParams p{9.0, 1.0, d, who == RobotId::L ? Side::Left : Side::Right};
    auto res = sim::simulate_algo_s(p, s);
    double analytic = three_phase::analytic_energy(K, d, s);
    three_phase::Meeting m = three_phase::meeting(K, d, s);
    ok7 = ok7 && close_rel(res.report.energy_total, analytic, 1e-9);
    ok7 = ok7 && close_rel(res.meeting.t, m.t, 1e-9);
    ok7 = ok7 && close_rel(std::abs(res.meeting.p), m.p, 1e-9);
    ok7 = ok7 && res.report.evac_time <= 9.0 * d + 1e-9 * d;
    ok7 = ok7 && res.left.max_speed() <= 1.0 + 1e-12 && res.right.max_speed() <= 1.0 + 1e-12;
    for (const Trajectory* tr : {&res.left, &res.right})
      for (const Segment& seg : tr->segments())
        for (int j = 0; j <= 11; ++j) {
          double t = seg.t0 + (seg.t1 - seg.t0) * j / 11.0;
          ok8 = ok8 && std::abs(seg.position_at(t)) <= t / 3.0 + 1e-9 * std::max(1.0, t);
        }
  }
  double secs = seconds_since(t0);
  ok7 = ok7 && secs < 30.0;
  report(7, ok7, "500 random replays match the rendezvous and energy formulas (" +
                     std::to_string(secs) + " s)");
  report(8, ok8, "searched region stays inside the |x| <= t/3 cone on every segment");
}

void criterion9() {
  bool ok = true;
  for (double x : {8.0, 8.9, 8.999}) {
    bool closed = false, numeric = false;
    try {
      two_turn::optimal_speeds(x, 1.0);
    } catch (const infeasible_error&) {
      closed = true;
    }
    try {
      nlp::solve_nlp({x, 1.0}, 40);
    } catch (const infeasible_error&) {
      numeric = true;
    }
    ok = ok && closed && numeric;
  }
  report(9, ok, "both the closed forms and the numeric path reject budgets below the 9-bound");
}

void criterion10() {
  const double s = 0.39403;
  bool ok = true;
  for (double K : {4.0, 16.0, 64.0}) {
    auto ratio = [&](double d) { return three_phase::analytic_energy(K, d, s) / d; };
    auto monotone = [&](double lo, double hi, int sign) {
      double eps = 1e-9 * (hi - lo);
      lo += eps;
      hi -= eps;
      for (int i = 0; i < 200; ++i) {
        double a = lo + (hi - lo) * i / 200.0;
        double b = lo + (hi - lo) * (i + 1) / 200.0;
        if (sign * (ratio(b) - ratio(a)) < -1e-12) return false;
      }
      return true;
    };
    ok = ok && monotone(K, three_phase::d1_upper(K, s), -1);
    ok = ok && monotone(three_phase::d1_upper(K, s), three_phase::d2_upper(K, s), +1);
    ok = ok && monotone(three_phase::d2_upper(K, s), 4.0 * K, -1);
  }
  report(10, ok, "energy/d is monotone per interval: down, up, down");
}

}  // namespace

int main() {
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  run_criteria_7_and_8();
  criterion9();
  criterion10();
  if (failures) {
    std::printf("%d criterion(s) failed\n", failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}
