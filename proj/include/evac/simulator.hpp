#pragma once

// Event-exact replay of the two strategies. Trajectories are built from the
// strategies' own waypoints (no time stepping); the catch-up rendezvous is
// found by solving the linear gap per segment pair, so results can be
// compared against the closed forms at float precision.

#include <cmath>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "evac/core.hpp"

namespace evac::sim {

struct MeetingEvent {
  double t = 0.0;
  double p = 0.0;
  RobotId catcher = RobotId::L;
};

namespace detail {

// Gap tolerance for rendezvous detection: the tangential meetings (chaser
// arriving exactly when the target turns around) close the gap to a float
// residue of a few ulps of t, so the threshold scales with elapsed time.
inline double meeting_tol(double t) { return 1e-10 * std::max(1.0, std::abs(t)); }

inline void collect_breakpoints(const Trajectory& tr, double lo, double hi,
                                std::vector<double>& out) {
  for (const Segment& s : tr.segments()) {
    if (s.t0 >= lo && s.t0 <= hi) out.push_back(s.t0);
    if (s.t1 >= lo && s.t1 <= hi) out.push_back(s.t1);
  }
}

}  // namespace detail

// Earliest time >= t_from at which the two robots are at the same position.
// Both positions are linear between the merged segment boundaries, so each
// window needs only an endpoint check and one linear solve.
inline MeetingEvent find_meeting(const Trajectory& chaser, const Trajectory& target,
                                 double t_from = -std::numeric_limits<double>::infinity()) {
  double lo = std::max({chaser.start_time(), target.start_time(), t_from});
  double hi = std::min(chaser.end_time(), target.end_time());
  if (hi < lo) throw no_catch_error("find_meeting: trajectories do not overlap in time");

  std::vector<double> ts{lo, hi};
  detail::collect_breakpoints(chaser, lo, hi, ts);
  detail::collect_breakpoints(target, lo, hi, ts);
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());

  auto gap = [&](double t) { return chaser.position_at(t) - target.position_at(t); };
  double g_prev = gap(ts.front());
  for (std::size_t i = 0; i < ts.size(); ++i) {
    double t = ts[i];
    double g = (i == 0) ? g_prev : gap(t);
    if (std::abs(g) <= detail::meeting_tol(t)) {
      MeetingEvent ev;
      ev.t = t;
      ev.p = 0.5 * (chaser.position_at(t) + target.position_at(t));
      ev.catcher = chaser.robot();
      return ev;
    }
    if (i > 0 && g_prev * g < 0.0) {
      double a = ts[i - 1], b = t;
      double t_star = a + (b - a) * (g_prev / (g_prev - g));
      MeetingEvent ev;
      ev.t = t_star;
      ev.p = 0.5 * (chaser.position_at(t_star) + target.position_at(t_star));
      ev.catcher = chaser.robot();
      return ev;
    }
    g_prev = g;
  }
  throw no_catch_error("find_meeting: no rendezvous within the simulated span");
}

// Mirror a trajectory across the origin, relabeling the robot.
inline Trajectory reflected(const Trajectory& tr, RobotId new_id) {
  Trajectory out(new_id);
  if (tr.segments().empty()) return out;
  out.start(tr.segments().front().t0, -tr.segments().front().x0);
  for (const Segment& s : tr.segments()) out.move_to(-s.x1, s.speed);
  return out;
}

// Rescale by a speed factor: speeds multiply by alpha, times divide by
// alpha, positions are unchanged, energies multiply by alpha^2.
inline Trajectory speed_scaled(const Trajectory& tr, double alpha) {
  Trajectory out(tr.robot());
  if (tr.segments().empty()) return out;
  out.start(tr.segments().front().t0 / alpha, tr.segments().front().x0);
  for (const Segment& s : tr.segments()) out.move_to(s.x1, s.speed * alpha);
  return out;
}

struct NaiveSimResult {
  Trajectory left{RobotId::L};
  Trajectory right{RobotId::R};
  EvacReport report;
  MeetingEvent meeting;
};

// Replay of the two-turn strategy: both robots search outward at s; the one
// on the exit side finds it, turns and chases at r; after the rendezvous
// both return to the exit at k.
inline NaiveSimResult simulate_naive(const ProblemParams& p, const SpeedTriple& v) {
  p.validate();
  if (!(v.s > 0.0) || !(v.k > 0.0)) throw std::invalid_argument("simulate_naive: speeds must be positive");
  if (!(v.r > v.s)) throw no_catch_error("simulate_naive: chase speed must exceed search speed");

  // Canonical instance: exit at -d, found by the left-going robot.
  const double d = p.d;
  double t_find = d / v.s;
  double chase_span = 2.0 * d / (v.r - v.s);  // closing a 2d gap at rate r-s

  Trajectory finder(RobotId::L);
  finder.start(0.0, 0.0);
  finder.move_to(-d, v.s);
  finder.move_to(-d + v.r * (chase_span * 2.0 + 1.0), v.r);

  Trajectory other(RobotId::R);
  other.start(0.0, 0.0);
  other.move_to(d + v.s * (chase_span * 2.0 + 1.0), v.s);

  MeetingEvent meet = find_meeting(finder, other, t_find);
  finder.truncate_at(meet.t);
  other.truncate_at(meet.t);
  finder.move_to(-d, v.k);
  other.move_to(-d, v.k);

  NaiveSimResult res;
  double evac_time = std::max(finder.end_time(), other.end_time());
  if (p.side == Side::Left) {
    res.left = finder;
    res.right = other;
    res.meeting = meet;
  } else {
    res.left = reflected(other, RobotId::L);
    res.right = reflected(finder, RobotId::R);
    res.meeting = {meet.t, -meet.p, RobotId::R};
  }
  res.report = make_report(p, evac_time, res.left.energy(), res.right.energy());
  return res;
}

struct AlgoSimResult {
  Trajectory left{RobotId::L};
  Trajectory right{RobotId::R};
  EvacReport report;
  MeetingEvent meeting;
  RobotId finder = RobotId::L;
  int finder_round = 0;   // counter value k remembered at discovery
  double round_base = 0;  // K = 4^k (L) or 2*4^k (R)
  std::string warning;    // set when the speed parameter is outside [1/3, 1/2]
};

namespace detail {

// Builds one robot's exploration per the published state machine:
//   L: travel(1/3,-1); repeat travel(1,0), travel(s,-4^{k+1} s/(1-s)),
//      travel(1,-4^{k+1})
//   R: same from +2 with doubled targets.
// Stops when the robot first reaches exit_x (recording the counter value) or
// when end_time exceeds horizon or the round counter exceeds k_max.
struct ExplorationBuild {
  Trajectory traj{RobotId::L};
  bool found = false;
  int counter = 0;
  double find_time = 0.0;
};

inline ExplorationBuild build_exploration(RobotId who, double s, double exit_x,
                                          bool can_find, double horizon, int k_max) {
  const double sign = (who == RobotId::L) ? -1.0 : 1.0;
  const double base = (who == RobotId::L) ? 1.0 : 2.0;
  ExplorationBuild b;
  b.traj = Trajectory(who);
  b.traj.start(0.0, 0.0);

  auto travel = [&](double speed, double target) -> bool {
    double from = b.traj.end_position();
    bool crosses = can_find && !b.found &&
                   ((from <= exit_x && exit_x <= target) || (target <= exit_x && exit_x <= from));
    if (crosses && exit_x != from) {
      b.traj.move_to(exit_x, speed);
      b.found = true;
      b.find_time = b.traj.end_time();
      return true;
    }
    if (crosses && exit_x == from) {  // standing on the exit as the leg starts
      b.found = true;
      b.find_time = b.traj.end_time();
      return true;
    }
    b.traj.move_to(target, speed);
    return false;
  };

  if (travel(1.0 / 3.0, sign * base)) return b;
  for (int k = 0; k <= k_max; ++k) {
    b.counter = k;
    double reach = base * std::pow(4.0, k + 1);
    if (travel(1.0, 0.0)) return b;
    if (travel(s, sign * reach * s / (1.0 - s))) return b;
    if (travel(1.0, sign * reach)) return b;
    if (b.traj.end_time() > horizon) return b;
  }
  return b;
}

}  // namespace detail

// Replay of the unbounded-memory algorithm with exploration speed s on an
// instance with c*b = 9. The run is simulated in the normalized frame
// (b = 1) and rescaled by b afterward.
inline AlgoSimResult simulate_algo_s(const ProblemParams& p, double s, int k_max = 12) {
  p.validate();
  if (p.d < 2.0) throw std::invalid_argument("simulate_algo_s: requires d >= 2");
  if (std::abs(p.c * p.b - 9.0) > kFeasTol)
    throw std::invalid_argument("simulate_algo_s: analysis requires c*b = 9");
  if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("simulate_algo_s: s must be in (0,1)");

  AlgoSimResult res;
  if (s < 1.0 / 3.0 - kFeasTol || s > 0.5 + kFeasTol)
    res.warning = "exploration speed outside the feasible band [1/3, 1/2]";

  const double d = p.d;
  if (d > 2.0 * std::pow(4.0, k_max))
    throw std::invalid_argument("simulate_algo_s: d beyond reach of k_max rounds");

  const RobotId finder_id = (p.side == Side::Left) ? RobotId::L : RobotId::R;
  const RobotId other_id = (p.side == Side::Left) ? RobotId::R : RobotId::L;
  const double exit_x = (p.side == Side::Left) ? -d : d;
  const double horizon = 9.0 * d + 1.0;

  detail::ExplorationBuild fb =
      detail::build_exploration(finder_id, s, exit_x, /*can_find=*/true, horizon, k_max);
  if (!fb.found) throw std::runtime_error("simulate_algo_s: exit not reached within k_max rounds");
  detail::ExplorationBuild ob =
      detail::build_exploration(other_id, s, exit_x, /*can_find=*/false, horizon, k_max);

  res.finder = finder_id;
  res.finder_round = fb.counter;
  double K = ((finder_id == RobotId::L) ? 1.0 : 2.0) * std::pow(4.0, fb.counter);
  res.round_base = K;

  // Chasing: speed s' = min{d/(4K - d/s), 1}, the printed expression being
  // meaningful only when its denominator is positive.
  double denom = 4.0 * K - d / s;
  double s_chase = 1.0;
  if (denom > 0.0) s_chase = std::min(d / denom, 1.0);

  Trajectory chaser = fb.traj;
  double dir = (finder_id == RobotId::L) ? 1.0 : -1.0;  // toward the other robot
  chaser.move_to(exit_x + dir * s_chase * (2.0 * horizon), s_chase);

  MeetingEvent meet = find_meeting(chaser, ob.traj, fb.find_time);
  chaser.truncate_at(meet.t);
  Trajectory other = ob.traj;
  other.truncate_at(meet.t);

  // Exit: remaining distance at the slowest speed that still makes 9d.
  double s_exit = std::abs(meet.p - exit_x) / (9.0 * d - meet.t);
  chaser.move_to(exit_x, s_exit);
  other.move_to(exit_x, s_exit);

  res.meeting = meet;
  Trajectory& left = (finder_id == RobotId::L) ? chaser : other;
  Trajectory& right = (finder_id == RobotId::L) ? other : chaser;
  if (p.b != 1.0) {
    left = speed_scaled(left, p.b);
    right = speed_scaled(right, p.b);
    res.meeting.t /= p.b;
  }
  res.left = left;
  res.right = right;
  double evac_time = std::max(res.left.end_time(), res.right.end_time());
  res.report = make_report(p, evac_time, res.left.energy(), res.right.energy());
  return res;
}

// Trajectory dump: one CSV row per segment.
inline void write_trajectories_csv(std::ostream& os, const std::vector<const Trajectory*>& trajs) {
  os << "robot,t0,t1,x0,x1,speed,energy\n";
  os.precision(17);
  for (const Trajectory* tr : trajs)
    for (const Segment& s : tr->segments())
      os << to_string(tr->robot()) << ',' << s.t0 << ',' << s.t1 << ',' << s.x0 << ','
         << s.x1 << ',' << s.speed << ',' << s.energy() << '\n';
}

}  // namespace evac::sim
