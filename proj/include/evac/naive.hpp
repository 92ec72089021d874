#pragma once

// Closed-form layer for the two-turn strategy with speeds (s, r, k): search
// outward at s, the finder chases at r, both return at k. Provides the
// normalized time/energy formulas, the regime-wise optimal speed selection
// over the product cb, and the piecewise competitive-ratio curve f.

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>

#include "evac/core.hpp"

namespace evac::two_turn {

// Normalized evacuation time per unit d: 2(k+r)/(k(r-s)) + 1/s.
inline double naive_time(const SpeedTriple& v) {
  if (!(v.s > 0.0) || !(v.k > 0.0)) throw std::domain_error("naive_time: speeds must be positive");
  if (!(v.r > v.s)) throw std::domain_error("naive_time: chase speed must exceed search speed");
  return 2.0 * (v.k + v.r) / (v.k * (v.r - v.s)) + 1.0 / v.s;
}

// Normalized energy per 2d: r(s^2 + r^2 + 2k^2)/(r - s).
inline double naive_energy(const SpeedTriple& v) {
  if (!(v.s > 0.0) || !(v.k > 0.0)) throw std::domain_error("naive_energy: speeds must be positive");
  if (!(v.r > v.s)) throw std::domain_error("naive_energy: chase speed must exceed search speed");
  return v.r * (v.s * v.s + v.r * v.r + 2.0 * v.k * v.k) / (v.r - v.s);
}

// Cubic whose unique root in (9,10) is gamma1, the upper edge of regime A.
inline double gamma1_polynomial(double x) { return 3.0 * x * (2.0 * (x - 9.0) * x - 3.0) + 49.0; }

namespace detail {
inline double bisect_gamma1() {
  double lo = 9.0, hi = 10.0;
  // gamma1_polynomial(9) = -32 < 0 < 559 = gamma1_polynomial(10)
  for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
    double mid = 0.5 * (lo + hi);
    (gamma1_polynomial(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}
}  // namespace detail

// Constants of the unbounded-cap optimum and the regime cuts. The
// six-significant-digit values are kept as printed for reference; the
// *_exact fields hold the full-precision root of the first-order system,
// which is what the speed formulas use (the rounded values miss the time
// constraint by ~1e-6, far outside the 1e-9 feasibility tolerance).
struct RegimeConstants {
  double sigma = 2.65976;
  double rho = 11.3414;
  double kappa = 6.63709;

  double sigma_exact = 2.659764883844293;
  double rho_exact = 11.341425445393606;
  double kappa_exact = 6.637089776204052;

  double gamma1 = 0.0;           // root of gamma1_polynomial in (9,10)
  double gamma2 = 0.0;           // equals rho_exact
  double optimal_cr = 292.369;   // printed value of the third branch of f

  SpeedTriple unbounded_optimum() const { return {sigma_exact, rho_exact, kappa_exact}; }

  static const RegimeConstants& get() {
    static const RegimeConstants instance = [] {
      RegimeConstants rc;
      rc.gamma1 = detail::bisect_gamma1();
      rc.gamma2 = rc.rho_exact;
      return rc;
    }();
    return instance;
  }
};

enum class Regime { A, B, C };

inline const char* to_string(Regime r) {
  switch (r) {
    case Regime::A: return "A";
    case Regime::B: return "B";
    default: return "C";
  }
}

namespace detail {

inline SpeedTriple regime_a_speeds(double c, double b) {
  double x = c * b;
  double s = (x - 3.0 - std::sqrt(x * x - 10.0 * x + 9.0)) / (2.0 * c);
  return {s, b, b};
}

inline SpeedTriple regime_b_speeds(double c, double b) {
  double s = 0.532412 * b - 0.0262661 * b * b * c;
  double den = b * c * s - b - c * s * s - s;
  if (!(den > 0.0)) {
    std::ostringstream msg;
    msg << "regime-B return-speed denominator non-positive (" << den
        << ") at c=" << c << ", b=" << b << "; outside the valid band";
    throw std::runtime_error(msg.str());
  }
  double k = 2.0 * b * s / den;
  return {s, b, k};
}

inline SpeedTriple regime_c_speeds(double c) {
  const RegimeConstants& rc = RegimeConstants::get();
  return {rc.sigma_exact / c, rc.rho_exact / c, rc.kappa_exact / c};
}

}  // namespace detail

// Optimal (regimes A and C) or heuristic (regime B) speeds for given time
// budget c and speed cap b; b may be kUnboundedSpeed. On a regime boundary
// both adjacent candidates are evaluated and the lower-energy one returned.
inline std::pair<SpeedTriple, Regime> optimal_speeds(double c, double b) {
  if (!(c > 0.0) || !(b > 0.0)) throw std::invalid_argument("optimal_speeds: c and b must be positive");
  const RegimeConstants& rc = RegimeConstants::get();
  double x = c * b;  // infinity when b unbounded -> regime C
  if (x < 9.0 - kFeasTol) throw infeasible_error("optimal_speeds: infeasible, cb < 9");

  SpeedTriple best;
  Regime best_regime = Regime::A;
  double best_energy = std::numeric_limits<double>::infinity();
  auto consider = [&](const SpeedTriple& v, Regime tag) {
    double e = naive_energy(v);
    if (e < best_energy) {
      best_energy = e;
      best = v;
      best_regime = tag;
    }
  };

  if (x <= rc.gamma1) consider(detail::regime_a_speeds(c, b), Regime::A);
  if (x >= rc.gamma1 && x <= rc.gamma2) consider(detail::regime_b_speeds(c, b), Regime::B);
  if (x >= rc.gamma2) consider(detail::regime_c_speeds(c), Regime::C);
  return {best, best_regime};
}

// Piecewise competitive-ratio curve f over the product x = cb, with the
// middle-branch coefficients exactly as printed (six significant digits).
inline double cr_function(double x) {
  const RegimeConstants& rc = RegimeConstants::get();
  if (x < 9.0 - kFeasTol) throw std::domain_error("cr_function: requires x >= 9");
  if (x <= rc.gamma1) {
    double t = std::sqrt((x - 9.0) * (x - 1.0));
    return 0.5 * x * (x * (x - t) + t + 3.0);
  }
  if (x < rc.gamma2) {
    double a = 0.532412 - 0.0262661 * x;
    double q = x * (x * (x - 2.46798) - 398.916) + 2221.18;
    double num = x * x * (a * a + 11595.8 * (20.2699 - x) * (20.2699 - x) / (q * q) + 1.0);
    return num / (0.0262661 * x + 0.467588);
  }
  return rc.optimal_cr;
}

// Check (s,r,k) against the instance constraints; returns a message naming
// the first violated constraint, or empty if feasible.
inline std::string feasibility_violation(const ProblemParams& p, const SpeedTriple& v) {
  std::ostringstream msg;
  if (!(v.s > 0.0) || !(v.k > 0.0) || !(v.r > 0.0)) return "speeds must be positive";
  if (!(v.r > v.s)) return "chase speed must exceed search speed";
  if (std::isfinite(p.b) && v.max() > p.b + kExactTol) {
    msg << "speed cap violated: max speed " << v.max() << " > b = " << p.b;
    return msg.str();
  }
  double t = naive_time(v);
  if (t > p.c + kFeasTol) {
    msg << "time constraint violated: normalized time " << t << " > c = " << p.c;
    return msg.str();
  }
  return {};
}

// Full report for running the two-turn strategy with speeds v on instance p.
// The finder is the robot sent toward the exit side; the energy split follows
// the three legs (search d, chase 2dr/(r-s), both return 2dr/(r-s)).
inline EvacReport evaluate(const ProblemParams& p, const SpeedTriple& v) {
  p.validate();
  if (std::string why = feasibility_violation(p, v); !why.empty())
    throw infeasible_error("evaluate: " + why);
  const double d = p.d, s = v.s, r = v.r, k = v.k;
  double chase_reach = 2.0 * d * r / (r - s);  // meeting-to-exit distance, also chase length
  double finder = s * s * d + (r * r + k * k) * chase_reach;
  double other = s * s * (d + 2.0 * d * s / (r - s)) + k * k * chase_reach;
  double evac_time = d * naive_time(v);
  double el = (p.side == Side::Left) ? finder : other;
  double er = (p.side == Side::Left) ? other : finder;
  EvacReport rep = make_report(p, evac_time, el, er);
  // Closed forms are the authority for the aggregate fields.
  rep.energy_total = 2.0 * d * naive_energy(v);
  rep.cr = p.c * p.c * naive_energy(v);
  return rep;
}

}  // namespace evac::two_turn
