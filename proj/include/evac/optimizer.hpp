#pragma once

// Independent numeric verification of the two-turn closed forms: a
// derivative-free constrained minimizer (feasible grid scan + Nelder-Mead
// with penalty), residuals and Newton polish for the first-order system of
// the unbounded-cap optimum, dual multipliers of the low-budget regime, and
// the polynomial roots that cut the regimes.

#include <array>
#include <cmath>
#include <functional>
#include <random>
#include <stdexcept>

#include "evac/core.hpp"
#include "evac/naive.hpp"

namespace evac::nlp {

struct NlpProblem {
  double c = 1.0;
  double b = kUnboundedSpeed;  // speed cap, may be unbounded
};

struct KktResidual {
  double res1 = 0.0;  // s-gradient alignment with lambda = 2k^3 substituted
  double res2 = 0.0;  // r-gradient alignment, cleared of denominators
  double res3 = 0.0;  // tight time constraint at c = 1
  double lambda = 0.0;

  double max_abs() const {
    return std::max({std::abs(res1), std::abs(res2), std::abs(res3)});
  }
};

// Residuals of the stationarity system for the normalized problem (c = 1,
// no speed cap):
//   r - 2r(k^2+r^2)/(r-s)^2 = 2k^3 (2(k+r)/(k(r-s)^2) - 1/s^2)
//   -2k^2 s + 2r^3 - 3r^2 s - s^3 = 4k^2 (k+s)
//   2(k+r)/(k(r-s)) + 1/s = 1
inline KktResidual kkt_residual(const SpeedTriple& v) {
  const double s = v.s, r = v.r, k = v.k;
  if (!(r > s) || !(s > 0.0) || !(k > 0.0))
    throw std::domain_error("kkt_residual: requires r > s > 0 and k > 0");
  KktResidual out;
  double rs = r - s;
  out.lambda = 2.0 * k * k * k;
  out.res1 = (r - 2.0 * r * (k * k + r * r) / (rs * rs)) -
             out.lambda * (2.0 * (k + r) / (k * rs * rs) - 1.0 / (s * s));
  // second equation kept at gradient scale (divided by (r-s)^2) so the
  // residual is commensurate with the others
  out.res2 = ((-2.0 * k * k * s + 2.0 * r * r * r - 3.0 * r * r * s - s * s * s) -
              4.0 * k * k * (k + s)) /
             (rs * rs);
  out.res3 = 2.0 * (k + r) / (k * rs) + 1.0 / s - 1.0;
  return out;
}

// Newton iteration on the stationarity system with a central-difference
// Jacobian; converges from the six-digit rounded start to the full root.
inline SpeedTriple newton_refine(SpeedTriple v, int max_iter = 50, double tol = 1e-13) {
  auto F = [](const SpeedTriple& u) {
    KktResidual r = kkt_residual(u);
    return std::array<double, 3>{r.res1, r.res2, r.res3};
  };
  for (int iter = 0; iter < max_iter; ++iter) {
    std::array<double, 3> f = F(v);
    if (std::max({std::abs(f[0]), std::abs(f[1]), std::abs(f[2])}) < tol) break;
    double J[3][3];
    std::array<double*, 3> comp{&v.s, &v.r, &v.k};
    for (int j = 0; j < 3; ++j) {
      double h = 1e-7 * std::max(1.0, std::abs(*comp[j]));
      double saved = *comp[j];
      *comp[j] = saved + h;
      std::array<double, 3> fp = F(v);
      *comp[j] = saved - h;
      std::array<double, 3> fm = F(v);
      *comp[j] = saved;
      for (int i = 0; i < 3; ++i) J[i][j] = (fp[i] - fm[i]) / (2.0 * h);
    }
    // Solve J * dx = -f by Gaussian elimination with partial pivoting.
    double aug[3][4];
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) aug[i][j] = J[i][j];
      aug[i][3] = -f[i];
    }
    for (int col = 0; col < 3; ++col) {
      int piv = col;
      for (int row = col + 1; row < 3; ++row)
        if (std::abs(aug[row][col]) > std::abs(aug[piv][col])) piv = row;
      if (std::abs(aug[piv][col]) < 1e-300)
        throw std::runtime_error("newton_refine: singular Jacobian");
      std::swap(aug[col], aug[piv]);
      for (int row = 0; row < 3; ++row) {
        if (row == col) continue;
        double m = aug[row][col] / aug[col][col];
        for (int j = col; j < 4; ++j) aug[row][j] -= m * aug[col][j];
      }
    }
    v.s += aug[0][3] / aug[0][0];
    v.r += aug[1][3] / aug[1][1];
    v.k += aug[2][3] / aug[2][2];
  }
  return v;
}

// Root in (9, 10) of 3x(2(x-9)x - 3) + 49, the upper edge of regime A.
inline double find_gamma1() { return two_turn::RegimeConstants::get().gamma1; }

// Root near 9.72 of 3x(x(2x - 25) + 60) - 175: up to this product cb the
// second dual multiplier of the regime-A candidate stays positive.
inline double lambda2_threshold() {
  auto poly = [](double x) { return 3.0 * x * (x * (2.0 * x - 25.0) + 60.0) - 175.0; };
  double lo = 9.0, hi = 10.0;  // poly(9) < 0 < poly(10)
  for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
    double mid = 0.5 * (lo + hi);
    (poly(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

struct DualMultipliers {
  double lambda1 = 0.0, lambda2 = 0.0, lambda3 = 0.0;
};

// Closed-form duals of the regime-A candidate (time, r <= b and k <= b all
// tight), as functions of the search speed s and the cap b.
inline DualMultipliers regime_a_multipliers(double s, double b) {
  DualMultipliers m;
  double den = (b - 3.0 * s) * (b - s);
  m.lambda1 = b * s * s * (3.0 * b - s) / (b - 3.0 * s);
  m.lambda2 = -(2.0 * b * b * b - 9.0 * b * b * s - 5.0 * s * s * s) / den;
  m.lambda3 = -2.0 * (2.0 * b * b * b - 6.0 * b * b * s - 3.0 * b * s * s + s * s * s) / den;
  return m;
}

struct NlpSolution {
  SpeedTriple speeds;
  double energy = 0.0;     // normalized energy per 2d
  bool converged = true;   // false when iteration budget ran out
};

namespace detail {

inline double time_slack(const NlpProblem& p, const SpeedTriple& v) {
  if (!(v.r > v.s) || !(v.s > 0.0) || !(v.k > 0.0)) return -1.0;
  return p.c - two_turn::naive_time(v);
}

inline bool feasible(const NlpProblem& p, const SpeedTriple& v, double slack_tol = 0.0) {
  if (!(v.r > v.s) || !(v.s > 0.0) || !(v.k > 0.0)) return false;
  if (std::isfinite(p.b) && v.max() > p.b + slack_tol) return false;
  return time_slack(p, v) >= -slack_tol;
}

inline double penalized_energy(const NlpProblem& p, const SpeedTriple& v) {
  constexpr double kPenalty = 1e6;
  double bad = 0.0;
  if (!(v.s > 1e-12)) bad += 1e-12 - v.s + 1.0;
  if (!(v.k > 1e-12)) bad += 1e-12 - v.k + 1.0;
  if (!(v.r > v.s + 1e-12)) bad += v.s - v.r + 1.0;
  if (std::isfinite(p.b)) {
    if (v.s > p.b) bad += v.s - p.b;
    if (v.r > p.b) bad += v.r - p.b;
    if (v.k > p.b) bad += v.k - p.b;
  }
  if (bad > 0.0) return kPenalty * (1.0 + bad);
  double slack = time_slack(p, v);
  double e = two_turn::naive_energy(v);
  if (slack < 0.0) return e + kPenalty * (-slack);
  return e;
}

// Smallest k with time exactly c (energy grows with k, time shrinks).
inline double tight_time_k(const NlpProblem& p, const SpeedTriple& v) {
  double den = (v.r - v.s) * (p.c - 1.0 / v.s) - 2.0;
  if (!(den > 0.0)) return -1.0;
  return 2.0 * v.r / den;
}

inline SpeedTriple nelder_mead(const NlpProblem& p, SpeedTriple start, double scale,
                               int max_iter, bool& converged) {
  using Point = std::array<double, 3>;
  auto eval = [&](const Point& x) {
    return penalized_energy(p, SpeedTriple{x[0], x[1], x[2]});
  };
  std::array<Point, 4> simplex;
  simplex[0] = {start.s, start.r, start.k};
  for (int i = 1; i < 4; ++i) {
    simplex[i] = simplex[0];
    simplex[i][i - 1] += scale;
  }
  std::array<double, 4> f;
  for (int i = 0; i < 4; ++i) f[i] = eval(simplex[i]);

  converged = false;
  for (int iter = 0; iter < max_iter; ++iter) {
    // order simplex by value
    std::array<int, 4> idx{0, 1, 2, 3};
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return f[a] < f[b]; });
    std::array<Point, 4> sp;
    std::array<double, 4> sf;
    for (int i = 0; i < 4; ++i) {
      sp[i] = simplex[idx[i]];
      sf[i] = f[idx[i]];
    }
    simplex = sp;
    f = sf;
    if (std::abs(f[3] - f[0]) < 1e-14 * (1.0 + std::abs(f[0]))) {
      converged = true;
      break;
    }
    Point centroid{};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) centroid[j] += simplex[i][j] / 3.0;
    auto blend = [&](double coef) {
      Point x;
      for (int j = 0; j < 3; ++j) x[j] = centroid[j] + coef * (simplex[3][j] - centroid[j]);
      return x;
    };
    Point refl = blend(-1.0);
    double fr = eval(refl);
    if (fr < f[0]) {
      Point exp = blend(-2.0);
      double fe = eval(exp);
      if (fe < fr) {
        simplex[3] = exp;
        f[3] = fe;
      } else {
        simplex[3] = refl;
        f[3] = fr;
      }
    } else if (fr < f[2]) {
      simplex[3] = refl;
      f[3] = fr;
    } else {
      Point con = blend(fr < f[3] ? -0.5 : 0.5);
      double fc = eval(con);
      if (fc < std::min(fr, f[3])) {
        simplex[3] = con;
        f[3] = fc;
      } else {
        for (int i = 1; i < 4; ++i) {
          for (int j = 0; j < 3; ++j)
            simplex[i][j] = simplex[0][j] + 0.5 * (simplex[i][j] - simplex[0][j]);
          f[i] = eval(simplex[i]);
        }
      }
    }
  }
  return {simplex[0][0], simplex[0][1], simplex[0][2]};
}

// Objective with k eliminated through the tight time constraint (clamped to
// the cap): smooth where the penalty formulation has a kink, which lets the
// final polish land on the constrained optimum to full precision.
inline double reduced_energy(const NlpProblem& p, double s, double r) {
  if (!(s > 1e-12) || !(r > s + 1e-12)) return 1e12;
  if (std::isfinite(p.b) && (s > p.b || r > p.b)) return 1e12;
  SpeedTriple v{s, r, 0.0};
  double kt = tight_time_k(p, v);
  if (!(kt > 0.0)) return 1e12;
  v.k = std::isfinite(p.b) ? std::min(kt, p.b) : kt;
  double slack = time_slack(p, v);
  double e = two_turn::naive_energy(v);
  if (slack < 0.0) e += 1e6 * (-slack);
  return e;
}

template <typename F>
std::array<double, 2> nelder_mead_2d(F&& f, std::array<double, 2> start, double scale,
                                     int max_iter) {
  std::array<std::array<double, 2>, 3> sp{{start,
                                           {start[0] + scale, start[1]},
                                           {start[0], start[1] + scale}}};
  std::array<double, 3> fv{f(sp[0]), f(sp[1]), f(sp[2])};
  for (int iter = 0; iter < max_iter; ++iter) {
    std::array<int, 3> idx{0, 1, 2};
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return fv[a] < fv[b]; });
    std::array<std::array<double, 2>, 3> osp{sp[idx[0]], sp[idx[1]], sp[idx[2]]};
    std::array<double, 3> ofv{fv[idx[0]], fv[idx[1]], fv[idx[2]]};
    sp = osp;
    fv = ofv;
    if (std::abs(fv[2] - fv[0]) < 1e-15 * (1.0 + std::abs(fv[0]))) break;
    std::array<double, 2> cen{0.5 * (sp[0][0] + sp[1][0]), 0.5 * (sp[0][1] + sp[1][1])};
    auto blend = [&](double coef) {
      return std::array<double, 2>{cen[0] + coef * (sp[2][0] - cen[0]),
                                   cen[1] + coef * (sp[2][1] - cen[1])};
    };
    auto refl = blend(-1.0);
    double fr = f(refl);
    if (fr < fv[0]) {
      auto exp = blend(-2.0);
      double fe = f(exp);
      if (fe < fr) { sp[2] = exp; fv[2] = fe; } else { sp[2] = refl; fv[2] = fr; }
    } else if (fr < fv[1]) {
      sp[2] = refl;
      fv[2] = fr;
    } else {
      auto con = blend(fr < fv[2] ? -0.5 : 0.5);
      double fc = f(con);
      if (fc < std::min(fr, fv[2])) {
        sp[2] = con;
        fv[2] = fc;
      } else {
        for (int i = 1; i < 3; ++i) {
          sp[i] = {sp[0][0] + 0.5 * (sp[i][0] - sp[0][0]), sp[0][1] + 0.5 * (sp[i][1] - sp[0][1])};
          fv[i] = f(sp[i]);
        }
      }
    }
  }
  return fv[0] <= fv[1] && fv[0] <= fv[2] ? sp[0] : (fv[1] <= fv[2] ? sp[1] : sp[2]);
}

}  // namespace detail

// Two-stage minimizer for the normalized-energy program: feasible grid scan
// over (0, min(b, sqrt(686)/c)]^3 with three zoom rounds, then Nelder-Mead
// on the penalized objective, then projection of k onto the tight time
// constraint. Infeasibility (cb < 9) is detected by the scan coming up
// empty rather than by a closed-form gate.
inline NlpSolution solve_nlp(const NlpProblem& p, int grid_n = 60) {
  if (!(p.c > 0.0) || !(p.b > 0.0)) throw std::invalid_argument("solve_nlp: c, b must be positive");
  const double hi = std::min(p.b, std::sqrt(686.0) / p.c);

  SpeedTriple best;
  double best_e = std::numeric_limits<double>::infinity();
  auto scan_box = [&](SpeedTriple lo_corner, SpeedTriple hi_corner) {
    auto axis = [&](double lo, double hic, int i) {
      return lo + (hic - lo) * (static_cast<double>(i) / grid_n);
    };
    for (int i = 1; i <= grid_n; ++i) {
      double s = axis(lo_corner.s, hi_corner.s, i);
      for (int j = 1; j <= grid_n; ++j) {
        double r = axis(lo_corner.r, hi_corner.r, j);
        if (!(r > s)) continue;
        for (int l = 1; l <= grid_n; ++l) {
          SpeedTriple v{s, r, axis(lo_corner.k, hi_corner.k, l)};
          if (!detail::feasible(p, v, kFeasTol)) continue;
          double e = two_turn::naive_energy(v);
          if (e < best_e) {
            best_e = e;
            best = v;
          }
        }
      }
    }
  };

  scan_box({0.0, 0.0, 0.0}, {hi, hi, hi});
  if (!std::isfinite(best_e)) {
    // The coarse grid can miss the thin feasible sliver when cb is barely
    // above 9.  The time is decreasing in r and k, so the box is feasible
    // iff min_s T(s, hi, hi) <= c; that restriction is convex in s, so a
    // ternary search settles the question.
    double lo_s = 1e-12 * hi, hi_s = hi * (1.0 - 1e-12);
    for (int it = 0; it < 200; ++it) {
      double m1 = lo_s + (hi_s - lo_s) / 3.0, m2 = hi_s - (hi_s - lo_s) / 3.0;
      if (two_turn::naive_time({m1, hi, hi}) < two_turn::naive_time({m2, hi, hi}))
        hi_s = m2;
      else
        lo_s = m1;
    }
    double s_star = 0.5 * (lo_s + hi_s);
    SpeedTriple corner{s_star, hi, hi};
    if (detail::feasible(p, corner, kFeasTol)) {
      best = corner;
      best_e = two_turn::naive_energy(corner);
    } else {
      throw infeasible_error("solve_nlp: no feasible point found (cb < 9)");
    }
  }

  double width = hi;
  for (int round = 0; round < 3; ++round) {
    width /= 10.0;
    auto clampc = [&](double x) { return std::clamp(x, 0.0, hi); };
    SpeedTriple lo{clampc(best.s - width / 2.0), clampc(best.r - width / 2.0),
                   clampc(best.k - width / 2.0)};
    SpeedTriple hb{clampc(best.s + width / 2.0), clampc(best.r + width / 2.0),
                   clampc(best.k + width / 2.0)};
    scan_box(lo, hb);
  }

  NlpSolution sol;
  bool nm_ok = false;
  SpeedTriple refined = detail::nelder_mead(p, best, width, 4000, nm_ok);
  if (detail::feasible(p, refined, 1e-8) && two_turn::naive_energy(refined) < best_e) {
    best = refined;
    best_e = two_turn::naive_energy(refined);
  }
  // The optimum always has a tight time constraint; polish in (s, r) with k
  // eliminated through it, then adopt the result when it wins.
  {
    auto f2 = [&](const std::array<double, 2>& x) { return detail::reduced_energy(p, x[0], x[1]); };
    std::array<double, 2> x = detail::nelder_mead_2d(f2, {best.s, best.r}, width, 4000);
    x = detail::nelder_mead_2d(f2, x, 1e-6 * std::max(1.0, std::abs(x[1])), 2000);
    SpeedTriple proj{x[0], x[1], 0.0};
    double kt = detail::tight_time_k(p, proj);
    if (kt > 0.0) {
      proj.k = std::isfinite(p.b) ? std::min(kt, p.b) : kt;
      if (detail::feasible(p, proj, 1e-8) && two_turn::naive_energy(proj) < best_e) {
        best = proj;
        best_e = two_turn::naive_energy(proj);
      }
    }
  }
  sol.speeds = best;
  sol.energy = best_e;
  sol.converged = nm_ok;
  return sol;
}

// Monte-Carlo substitute for a second-order certificate: sample feasible
// perturbations of v within the given radius and report whether any of them
// improves the energy by more than 1e-9.
inline bool local_optimality_check(const SpeedTriple& v, const NlpProblem& p, double radius,
                                   int min_samples = 10000, std::uint64_t seed = 20260823) {
  if (!detail::feasible(p, v, kFeasTol))
    throw std::invalid_argument("local_optimality_check: starting point infeasible");
  double base = two_turn::naive_energy(v);
  std::mt19937_64 rng(seed);
  int accepted = 0;
  // At optima in a tight corner of the constraint box the feasible volume
  // within the requested radius can be vanishingly small; halve the radius
  // until rejection sampling becomes productive.
  double rad = radius;
  const long per_level = 50L * min_samples;
  for (int level = 0; level < 45 && accepted < min_samples; ++level, rad *= 0.5) {
    std::uniform_real_distribution<double> delta(-rad, rad);
    for (long i = 0; i < per_level && accepted < min_samples; ++i) {
      SpeedTriple u{v.s + delta(rng), v.r + delta(rng), v.k + delta(rng)};
      if (!detail::feasible(p, u, kFeasTol)) continue;
      ++accepted;
      // only a strictly feasible point counts as an improvement
      if (detail::feasible(p, u) && two_turn::naive_energy(u) < base - 1e-9) return false;
    }
  }
  if (accepted < min_samples)
    throw std::runtime_error("local_optimality_check: could not draw enough feasible samples");
  return true;
}

}  // namespace evac::nlp
