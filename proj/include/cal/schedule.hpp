#pragma once

#include <string>
#include <vector>

namespace cal {

enum class Phase { InA, InB, Breakpoint };

const char* to_string(Phase p);

/// Open interval of one phase between consecutive breakpoints (or 0 / T).
struct PhaseInterval {
  double start = 0.0;
  double end = 0.0;
  Phase phase = Phase::InA;
};

/// Alternating A/B partition of [0, T] by breakpoints t_0 < t_1 < ... in (0, T).
/// The first interval (0, t_0) is A; phases alternate at every breakpoint, so
/// the tail (t_last, T) is B for an odd breakpoint count and A for an even one.
/// An empty breakpoint list gives an all-A schedule.
class Schedule {
 public:
  /// Throws InvalidArgument unless breakpoints are strictly increasing in (0, T).
  Schedule(std::vector<double> breakpoints, double horizon);

  /// `count` cycles of (A of length period_a, B of length period_b). A final
  /// breakpoint that lands on the horizon is dropped so the last B closes at T.
  static Schedule periodic(double period_a, double period_b, int count, double horizon);

  /// Throws OutOfRange for t outside [0, T]. Exactly at a breakpoint returns
  /// Breakpoint; t = 0 and t = T report the adjoining interval's phase.
  Phase phase_of(double t) const;

  Phase tail_phase() const;
  std::vector<PhaseInterval> intervals() const;

  const std::vector<double>& breakpoints() const { return breakpoints_; }
  double horizon() const { return horizon_; }
  bool all_a() const { return breakpoints_.empty(); }
  std::string id() const;

  bool operator==(const Schedule&) const = default;

 private:
  std::vector<double> breakpoints_;
  double horizon_;
};

}  // namespace cal
