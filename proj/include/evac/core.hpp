#pragma once

// Core domain types for two-robot group search on the line: problem
// parameters, piecewise-constant-speed trajectories and the s^2*x energy
// accounting shared by every strategy.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace evac {

// Tolerance for feasibility comparisons (time <= c*d, speed <= b).
inline constexpr double kFeasTol = 1e-9;
// Tolerance for internal consistency checks.
inline constexpr double kExactTol = 1e-12;

inline constexpr double kUnboundedSpeed = std::numeric_limits<double>::infinity();

enum class Side { Left, Right };
enum class RobotId { L, R };

inline const char* to_string(RobotId r) { return r == RobotId::L ? "L" : "R"; }
inline const char* to_string(Side s) { return s == Side::Left ? "left" : "right"; }

// Instance not solvable (online or offline) under the given c, b.
class infeasible_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Chase can never terminate (chaser not faster than target).
class no_catch_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Time-bound multiplier c, speed cap b (may be kUnboundedSpeed), exit
// distance d and exit side. Instances are online-solvable iff c*b >= 9.
struct ProblemParams {
  double c = 9.0;
  double b = 1.0;
  double d = 2.0;
  Side side = Side::Left;

  bool online_solvable() const { return c * b >= 9.0 - kFeasTol; }

  void validate() const {
    if (!(c > 0.0)) throw std::invalid_argument("ProblemParams: c must be positive");
    if (!(b > 0.0)) throw std::invalid_argument("ProblemParams: b must be positive");
    if (!(d > 0.0)) throw std::invalid_argument("ProblemParams: d must be positive");
  }
};

// The three hard-wired speeds of the two-turn strategy: search s, chase r,
// return k.
struct SpeedTriple {
  double s = 0.0;
  double r = 0.0;
  double k = 0.0;

  double max() const { return std::max(s, std::max(r, k)); }
  double min() const { return std::min(s, std::min(r, k)); }
};

// One constant-speed leg of a trajectory. speed is unsigned; direction is
// implied by x0 -> x1.
struct Segment {
  double t0 = 0.0;
  double t1 = 0.0;
  double x0 = 0.0;
  double x1 = 0.0;
  double speed = 0.0;

  double length() const { return std::abs(x1 - x0); }
  double duration() const { return t1 - t0; }
  double energy() const { return speed * speed * length(); }

  double position_at(double t) const {
    if (t1 == t0) return x0;
    return x0 + (x1 - x0) * ((t - t0) / (t1 - t0));
  }

  // Segment starting at (t0, x0), ending at x1, traversed at |speed| > 0.
  static Segment motion(double t0, double x0, double x1, double speed) {
    Segment seg;
    seg.t0 = t0;
    seg.x0 = x0;
    seg.x1 = x1;
    seg.speed = speed;
    seg.t1 = t0 + std::abs(x1 - x0) / speed;
    return seg;
  }
};

// Time-contiguous sequence of segments for one robot.
class Trajectory {
 public:
  explicit Trajectory(RobotId robot) : robot_(robot) {}

  RobotId robot() const { return robot_; }
  const std::vector<Segment>& segments() const { return segments_; }
  bool empty() const { return segments_.empty(); }

  void start(double t, double x) {
    cursor_t_ = t;
    cursor_x_ = x;
    started_ = true;
  }

  // Append a constant-speed leg from the current endpoint to position x.
  void move_to(double x, double speed) {
    if (!started_) throw std::logic_error("Trajectory: move_to before start");
    if (!(speed > 0.0)) throw std::invalid_argument("Trajectory: speed must be positive");
    if (x == cursor_x_) return;  // zero-length leg, nothing to record
    Segment seg = Segment::motion(cursor_t_, cursor_x_, x, speed);
    segments_.push_back(seg);
    cursor_t_ = seg.t1;
    cursor_x_ = seg.x1;
  }

  double start_time() const { return segments_.empty() ? cursor_t_ : segments_.front().t0; }
  double end_time() const { return segments_.empty() ? cursor_t_ : segments_.back().t1; }
  double end_position() const { return cursor_x_; }

  double position_at(double t) const {
    if (segments_.empty()) {
      if (started_ && t == cursor_t_) return cursor_x_;
      throw std::out_of_range("Trajectory: time outside span");
    }
    if (t < segments_.front().t0 - kExactTol || t > segments_.back().t1 + kExactTol)
      throw std::out_of_range("Trajectory: time outside span");
    // First segment whose end time covers t.
    auto it = std::lower_bound(segments_.begin(), segments_.end(), t,
                               [](const Segment& s, double tt) { return s.t1 < tt; });
    if (it == segments_.end()) --it;
    return it->position_at(std::clamp(t, it->t0, it->t1));
  }

  double energy() const {
    double e = 0.0;
    for (const Segment& s : segments_) e += s.energy();
    return e;
  }

  double max_speed() const {
    double m = 0.0;
    for (const Segment& s : segments_) m = std::max(m, s.speed);
    return m;
  }

  // Drop everything after time t; the segment containing t is shortened.
  void truncate_at(double t) {
    while (!segments_.empty() && segments_.back().t0 >= t) segments_.pop_back();
    if (!segments_.empty() && segments_.back().t1 > t) {
      Segment& s = segments_.back();
      s.x1 = s.position_at(t);
      s.t1 = t;
    }
    if (!segments_.empty()) {
      cursor_t_ = segments_.back().t1;
      cursor_x_ = segments_.back().x1;
    } else {
      cursor_t_ = t;
    }
  }

 private:
  RobotId robot_;
  std::vector<Segment> segments_;
  double cursor_t_ = 0.0;
  double cursor_x_ = 0.0;
  bool started_ = false;
};

// Outcome of one evacuation: time the second robot reaches the exit, the
// per-robot and total energies, and the competitive ratio c^2/(2d) * E.
struct EvacReport {
  double evac_time = 0.0;
  double energy_left = 0.0;
  double energy_right = 0.0;
  double energy_total = 0.0;
  double cr = 0.0;
};

inline EvacReport make_report(const ProblemParams& p, double evac_time,
                              double energy_left, double energy_right) {
  EvacReport rep;
  rep.evac_time = evac_time;
  rep.energy_left = energy_left;
  rep.energy_right = energy_right;
  rep.energy_total = energy_left + energy_right;
  rep.cr = p.c * p.c / (2.0 * p.d) * rep.energy_total;
  return rep;
}

// Energy of the offline optimum (exit location known): both robots walk at
// speed 1/c, spending 2d/c^2 in total. Well defined only for c*b >= 1.
inline double offline_optimum(const ProblemParams& p) {
  p.validate();
  if (p.c * p.b < 1.0 - kFeasTol)
    throw infeasible_error("offline optimum undefined: c*b < 1");
  return 2.0 * p.d / (p.c * p.c);
}

}  // namespace evac
