#pragma once

// Analytic layer for the unbounded-memory algorithm with exploration speed
// s on instances with c*b = 9: phase plans and their expansion factor, the
// D-interval classification of the exit distance within a round, the
// meeting-point formulas, the energy formulas E(K,d,s), and the worst-case
// sweep behind the 8.42588d bound.

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "evac/core.hpp"
#include "evac/simulator.hpp"

namespace evac::three_phase {

// Configuration outside the analyzed family (the analysis needs c*b = 9).
class unsupported_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Default exploration speed: the heuristic minimizer of the worst-case
// energy-per-distance ratio.
inline constexpr double kDefaultSpeed = 0.39403;

struct Phase {
  double speed = 0.0;
  double ratio = 0.0;  // distance traveled per unit of the round's start distance
};

// One robot's exploration schedule: repeated phases expanding the searched
// region by the expansion factor each round.
struct PhasePlan {
  double start_pos = 0.0;
  std::vector<Phase> phases;

  double expansion_factor() const {
    double f = 1.0;
    for (const Phase& ph : phases) f += std::abs(ph.ratio) / (3.0 * ph.speed);
    return f;
  }
};

// The deployed 3-phase plan: back to the origin at full speed, outward at s
// for 4|x|s/(1-s), then outward at full speed to 4|x|. Factor is exactly 4
// for every s.
inline PhasePlan algo_plan(RobotId who, double s) {
  PhasePlan plan;
  plan.start_pos = (who == RobotId::L) ? -1.0 : 2.0;
  plan.phases = {{1.0, -1.0}, {s, 4.0 * s / (1.0 - s)}, {1.0, 4.0 - 4.0 * s / (1.0 - s)}};
  return plan;
}

// Start distance of round k: 4^k for L, 2*4^k for R.
inline double round_base(RobotId who, int k) {
  return ((who == RobotId::L) ? 1.0 : 2.0) * std::pow(4.0, k);
}

enum class Case { D1 = 1, D2 = 2, D3 = 3 };

inline const char* to_string(Case c) {
  switch (c) {
    case Case::D1: return "D1";
    case Case::D2: return "D2";
    default: return "D3";
  }
}

// Interval endpoints within round distance budget [K, 4K]:
// D1 = [K, 4Ks/(s+1)], D2 = [.., 4Ks/(1-s)], D3 = [.., 4K].
inline double d1_upper(double K, double s) { return 4.0 * K * s / (s + 1.0); }
inline double d2_upper(double K, double s) { return 4.0 * K * s / (1.0 - s); }

namespace detail {
inline void check_round(double K, double d, double s) {
  if (!(s > 0.0 && s < 1.0)) throw std::domain_error("exploration speed must be in (0,1)");
  if (d < K - kFeasTol || d > 4.0 * K + kFeasTol)
    throw std::out_of_range("distance outside this round's interval [K, 4K]");
}
}  // namespace detail

// Which meeting/energy case applies; shared endpoints go to the lower index.
inline Case classify(double K, double d, double s) {
  detail::check_round(K, d, s);
  if (d <= d1_upper(K, s)) return Case::D1;
  if (d <= d2_upper(K, s)) return Case::D2;
  return Case::D3;
}

struct Meeting {
  double p = 0.0;  // distance of the rendezvous from the origin
  double t = 0.0;
};

// Rendezvous point and time after the finder (round distance K) discovers
// the exit at distance d.
inline Meeting meeting(double K, double d, double s) {
  switch (classify(K, d, s)) {
    case Case::D1:
      return {0.0, 8.0 * K};
    case Case::D2:
      return {(d + d * s - 4.0 * K * s) / (1.0 - s),
              8.0 * K + (d + d / s - 4.0 * K) / (1.0 - s)};
    default:
      return {2.0 * d * s / (1.0 - s), 8.0 * K + 2.0 * d + 2.0 * d * s / (1.0 - s)};
  }
}

struct CaseSpeeds {
  double s_b1 = 0.0;  // shared return speed, case 1
  double s_c1 = 0.0;  // finder's catch-up speed, case 1
  double s_b2 = 0.0;  // shared return speed, case 2
  double s_b3 = 0.0;  // shared return speed, case 3
};

inline CaseSpeeds case_speeds(double K, double d, double s) {
  detail::check_round(K, d, s);
  CaseSpeeds cs;
  cs.s_b1 = d / (9.0 * d - 8.0 * K);
  double cden = 4.0 * K - d / s;
  cs.s_c1 = (cden > 0.0) ? d / cden : 1.0;
  cs.s_b2 = (2.0 * d - 4.0 * K * s) / (d * (8.0 - 9.0 * s - 1.0 / s) + 4.0 * K * (2.0 * s - 1.0));
  cs.s_b3 = d * (1.0 + s) / (d * (7.0 - 9.0 * s) + 8.0 * K * (s - 1.0));
  return cs;
}

// Energy spent after the two initial walks, per robot: the (K-1)-scaled
// geometric sum over completed rounds. base distinguishes L (whole rounds of
// 4^j) from R (doubled).
inline double pre_round_energy(RobotId who, double K, double s) {
  double G = 5.0 - 4.0 * s * (s + 1.0);
  if (who == RobotId::L) return (K - 1.0) * G / 3.0;
  return 2.0 * (K / 2.0 - 1.0) * G / 3.0;
}

struct EnergyBreakdown {
  double total = 0.0;   // 1/3 initialization + both robots
  double finder = 0.0;  // includes the finder's share of the initialization
  double other = 0.0;
  Case which = Case::D1;
};

// Total and per-robot energy when robot `finder` discovers the exit at
// distance d in the round with start distance K. The three case expressions
// follow the bracket decomposition: finder-to-catch, other-before-caught,
// and the joint walk to the exit (split evenly).
inline EnergyBreakdown analytic_energy_breakdown(RobotId finder, double K, double d, double s) {
  detail::check_round(K, d, s);
  RobotId other = (finder == RobotId::L) ? RobotId::R : RobotId::L;
  double G = 5.0 - 4.0 * s * (s + 1.0);
  double B_X = pre_round_energy(finder, K, s);
  // The non-finder has completed the round reaching 2K on its own schedule.
  double B_Y = (other == RobotId::R) ? 2.0 * (K - 1.0) * G / 3.0 : (2.0 * K - 1.0) * G / 3.0;
  double init_f = (finder == RobotId::L) ? 1.0 / 9.0 : 2.0 / 9.0;
  double init_o = 1.0 / 3.0 - init_f;

  CaseSpeeds cs = case_speeds(K, d, s);
  Case which = classify(K, d, s);
  EnergyBreakdown out;
  out.which = which;
  double reach2 = d2_upper(K, s);  // full second-phase reach 4Ks/(1-s)
  switch (which) {
    case Case::D1: {
      out.finder = init_f + B_X + K + s * s * d + cs.s_c1 * cs.s_c1 * d + cs.s_b1 * cs.s_b1 * d;
      out.other = init_o + B_Y + 2.0 * K + cs.s_b1 * cs.s_b1 * d;
      break;
    }
    case Case::D2: {
      double p = (d + d * s - 4.0 * K * s) / (1.0 - s);
      out.finder = init_f + B_X + K + s * s * d + (d + p) + cs.s_b2 * cs.s_b2 * (d + p);
      out.other = init_o + B_Y + 2.0 * K + s * s * p + cs.s_b2 * cs.s_b2 * (d + p);
      break;
    }
    default: {
      double p = 2.0 * d * s / (1.0 - s);
      out.finder = init_f + B_X + K + s * s * reach2 + (d - reach2) + (d + p) +
                   cs.s_b3 * cs.s_b3 * (d + p);
      out.other = init_o + B_Y + 2.0 * K + s * s * p + cs.s_b3 * cs.s_b3 * (d + p);
      break;
    }
  }
  out.total = out.finder + out.other;
  return out;
}

// Total energy via the printed case expressions (equals the breakdown's
// total; kept separate so the two can be cross-checked).
inline double analytic_energy(double K, double d, double s) {
  double F = (K - 1.0) * (5.0 - 4.0 * s * (s + 1.0));
  CaseSpeeds cs = case_speeds(K, d, s);
  double base = 1.0 / 3.0 + F;
  switch (classify(K, d, s)) {
    case Case::D1:
      return base + 3.0 * K + d * (s * s + cs.s_c1 * cs.s_c1 + 2.0 * cs.s_b1 * cs.s_b1);
    case Case::D2:
      return base + 3.0 * K +
             ((2.0 * d - 4.0 * K * s) / (1.0 - s)) * (1.0 + s * s + 2.0 * cs.s_b2 * cs.s_b2);
    default:
      return base + 3.0 * K - 4.0 * K * s * (s + 1.0) +
             (2.0 * d / (1.0 - s)) * (s * s * s + cs.s_b3 * cs.s_b3 * (s + 1.0) + 1.0);
  }
}

struct SweepRow {
  double s = 0.0;
  int k = 0;
  RobotId robot = RobotId::L;
  Case which = Case::D1;
  double d = 0.0;
  double energy_over_d = 0.0;
  double time_over_d = 9.0;  // the exit speed is chosen to finish at 9d exactly
};

struct SweepResult {
  double finite_sup = 0.0;      // max over k <= k_max
  double limit_sup = 0.0;       // K -> infinity envelope
  double sup = 0.0;             // max of the two
  double argmax_K = 0.0;
  double argmax_d = 0.0;
  double cr = 0.0;              // (81/2) * sup
  std::vector<SweepRow> rows;   // only filled when keep_rows is set
};

namespace detail {

template <typename Fn>
void sample_cases(double K, double s, int samples, Fn&& fn) {
  double cuts[4] = {K, d1_upper(K, s), d2_upper(K, s), 4.0 * K};
  for (int c = 0; c < 3; ++c) {
    for (int i = 0; i <= samples; ++i) {
      double d = cuts[c] + (cuts[c + 1] - cuts[c]) * (static_cast<double>(i) / samples);
      fn(d, static_cast<Case>(c + 1));
    }
  }
}

}  // namespace detail

// Worst-case energy-per-distance ratio of the algorithm: dense sampling of
// every round's three intervals (endpoints included) for k = 1..k_max and
// both robot identities, plus the same sampling at an astronomically large
// round distance standing in for the K -> infinity envelope.
inline SweepResult worst_case_sweep(double s, int k_max = 10, int samples_per_interval = 2000,
                                    bool keep_rows = false) {
  if (!(s > 0.0 && s < 1.0)) throw std::domain_error("worst_case_sweep: s must be in (0,1)");
  SweepResult res;
  auto consider = [&](double K, double d, double& bucket) {
    double ratio = analytic_energy(K, d, s) / d;
    if (ratio > bucket) bucket = ratio;
    if (ratio > res.sup) {
      res.sup = ratio;
      res.argmax_K = K;
      res.argmax_d = d;
    }
  };
  for (RobotId who : {RobotId::L, RobotId::R}) {
    for (int k = 1; k <= k_max; ++k) {
      double K = round_base(who, k);
      detail::sample_cases(K, s, samples_per_interval, [&](double d, Case which) {
        consider(K, d, res.finite_sup);
        if (keep_rows)
          res.rows.push_back({s, k, who, which, d, analytic_energy(K, d, s) / d, 9.0});
      });
    }
    double K_inf = round_base(who, 30);  // ~1.15e18: 1/K terms below double noise
    detail::sample_cases(K_inf, s, samples_per_interval,
                         [&](double d, Case) { consider(K_inf, d, res.limit_sup); });
  }
  res.cr = 81.0 / 2.0 * res.sup;
  return res;
}

// 1-D scan for the exploration speed minimizing the worst-case ratio:
// coarse pass at the given step over [1/3, 1/2], then golden-section
// refinement around the incumbent.
inline std::pair<double, double> scan_best_s(double step = 1e-4, int samples_per_interval = 200) {
  auto objective = [&](double s) {
    return worst_case_sweep(s, /*k_max=*/1, samples_per_interval).limit_sup;
  };
  double lo = 1.0 / 3.0, hi = 0.5;
  double best_s = lo, best_v = objective(lo);
  for (double s = lo + step; s <= hi + 1e-15; s += step) {
    double v = objective(s);
    if (v < best_v) {
      best_v = v;
      best_s = s;
    }
  }
  double a = std::max(lo, best_s - 2.0 * step), b = std::min(hi, best_s + 2.0 * step);
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
  double f1 = objective(x1), f2 = objective(x2);
  for (int i = 0; i < 60 && b - a > 1e-10; ++i) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = objective(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = objective(x2);
    }
  }
  double s_opt = 0.5 * (a + b);
  return {s_opt, objective(s_opt)};
}

// Full report for one instance with c*b = 9. The analysis is carried out in
// the normalized frame (b = 1) and rescaled by b; distances below the first
// full round are delegated to the simulator, whose replay is the authority
// for the pre-round regime.
inline EvacReport evaluate(const ProblemParams& p, double s = kDefaultSpeed, int k_max = 12) {
  p.validate();
  if (std::abs(p.c * p.b - 9.0) > kFeasTol)
    throw unsupported_error("evaluate: the analysis covers only configurations with c*b = 9");
  if (p.d < 2.0) throw std::invalid_argument("evaluate: requires d >= 2");

  RobotId finder = (p.side == Side::Left) ? RobotId::L : RobotId::R;
  double base = (finder == RobotId::L) ? 1.0 : 2.0;
  // round index with d in (K, 4K]
  int k = 0;
  while (p.d > 4.0 * base * std::pow(4.0, k)) ++k;
  if (k < 1) {
    // found during the initial walk or round 0: simulation-only territory
    return sim::simulate_algo_s(p, s, k_max).report;
  }
  double K = base * std::pow(4.0, k);
  EnergyBreakdown e = analytic_energy_breakdown(finder, K, p.d, s);
  double b2 = p.b * p.b;
  double el = b2 * ((finder == RobotId::L) ? e.finder : e.other);
  double er = b2 * ((finder == RobotId::L) ? e.other : e.finder);
  return make_report(p, 9.0 * p.d / p.b, el, er);
}

}  // namespace evac::three_phase
