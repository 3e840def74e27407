#include "cal/overload.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "cal/errors.hpp"

namespace cal {

// ---------------------------------------------------------------------------
// Schedule

const char* to_string(Phase p) {
  switch (p) {
    case Phase::InA: return "A";
    case Phase::InB: return "B";
    case Phase::Breakpoint: return "breakpoint";
  }
  return "?";
}

Schedule::Schedule(std::vector<double> breakpoints, double horizon)
    : breakpoints_(std::move(breakpoints)), horizon_(horizon) {
  if (!(horizon_ > 0.0)) throw InvalidArgument("schedule horizon must be > 0");
  for (std::size_t i = 0; i < breakpoints_.size(); ++i) {
    const double t = breakpoints_[i];
    if (!(t > 0.0 && t < horizon_))
      throw InvalidArgument("schedule breakpoints must lie in (0, T)");
    if (i > 0 && !(t > breakpoints_[i - 1]))
      throw InvalidArgument("schedule breakpoints must be strictly increasing");
  }
}

Schedule Schedule::periodic(double period_a, double period_b, int count, double horizon) {
  if (!(period_a > 0.0) || !(period_b > 0.0) || count < 1)
    throw InvalidArgument("periodic schedule needs positive periods and count >= 1");
  std::vector<double> bps;
  const double cycle = period_a + period_b;
  for (int c = 0; c < count; ++c) {
    bps.push_back(c * cycle + period_a);
    bps.push_back((c + 1) * cycle);
  }
  if (std::abs(bps.back() - horizon) <= 1e-12 * horizon) bps.pop_back();
  if (!bps.empty() && !(bps.back() < horizon))
    throw InvalidArgument("periodic schedule does not fit in the horizon");
  return Schedule(std::move(bps), horizon);
}

Phase Schedule::phase_of(double t) const {
  if (!(t >= 0.0 && t <= horizon_))
    throw OutOfRange("t = " + std::to_string(t) + " outside [0, " + std::to_string(horizon_) + "]");
  if (std::binary_search(breakpoints_.begin(), breakpoints_.end(), t)) return Phase::Breakpoint;
  const auto before = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t) -
                      breakpoints_.begin();
  return before % 2 == 0 ? Phase::InA : Phase::InB;
}

Phase Schedule::tail_phase() const {
  return breakpoints_.size() % 2 == 0 ? Phase::InA : Phase::InB;
}

std::vector<PhaseInterval> Schedule::intervals() const {
  std::vector<PhaseInterval> out;
  double start = 0.0;
  Phase phase = Phase::InA;
  for (double b : breakpoints_) {
    out.push_back({start, b, phase});
    start = b;
    phase = phase == Phase::InA ? Phase::InB : Phase::InA;
  }
  out.push_back({start, horizon_, phase});
  return out;
}

std::string Schedule::id() const {
  std::ostringstream os;
  os << "schedule(T=" << horizon_ << ",breakpoints=" << breakpoints_.size() << ")";
  return os.str();
}

// ---------------------------------------------------------------------------
// Reset design

Eigen::Matrix3d vandermonde_inverse(const std::array<double, 3>& x) {
  Eigen::Matrix3d V;
  for (int k = 0; k < 3; ++k)
    for (int j = 0; j < 3; ++j) V(k, j) = std::pow(x[static_cast<std::size_t>(j)], k + 1);
  return V.inverse();
}

ResetDesign design_reset_coefficients(double rho, double gamma_bar) {
  if (!(rho > 0.0)) throw InvalidRho(rho);
  ResetDesign d;
  d.rho = rho;
  d.roots = {0.0, -rho, -2.0 * rho, -3.0 * rho};
  d.b_phase.theta = 3.0 * rho;
  d.b_phase.mu = 1.0;
  d.b_phase.k = 0.0;
  d.b_phase.gamma = gamma_bar;
  d.b_phase.nu = 3.0 * rho * gamma_bar - 2.0 * rho * rho;
  d.lambda_inv = vandermonde_inverse({-1.0, -2.0, -3.0});
  d.vandermonde_bound = d.lambda_inv.cwiseAbs().maxCoeff();
  return d;
}

ResetDesign design_reset_coefficients(double rho) { return design_reset_coefficients(rho, rho); }

double rho_for_epsilon(double epsilon, const State& entry, double C) {
  if (!(epsilon > 0.0)) throw InvalidEpsilon(epsilon);
  const double M = entry.max_abs_derivative();
  return std::max(1.0 + kRhoMargin, std::sqrt(9.0 * C * M / epsilon) * (1.0 + kRhoMargin));
}

double rho_for_epsilon_linear(double epsilon, const State& entry, double C) {
  if (!(epsilon > 0.0)) throw InvalidEpsilon(epsilon);
  const double M = entry.max_abs_derivative();
  return std::max(1.0 + kRhoMargin, (9.0 * C * M / epsilon) * (1.0 + kRhoMargin));
}

State hard_reset(const State& s) {
  const Eigen::VectorXd z = Eigen::VectorXd::Zero(s.q.size());
  return State{s.t, s.q, z, z, z};
}

const char* to_string(ResetMode m) {
  return m == ResetMode::SimulateB ? "simulate_b" : "hard_reset";
}

// ---------------------------------------------------------------------------
// Scheduled simulation

std::vector<State> simulate_b_phase(const CALParameters& b_phase, const State& entry,
                                    std::size_t first_index, std::size_t steps, double h) {
  std::vector<State> out;
  out.reserve(steps);
  try {
    const FreeSolution free(b_phase, entry);
    for (std::size_t j = 1; j <= steps; ++j) {
      const double t = static_cast<double>(first_index + j) * h;
      State s = free.at(t);
      if (!s.finite()) throw NonFinite(t);
      out.push_back(std::move(s));
    }
  } catch (const ConfluentRoots&) {
    out.clear();
    integrate_steps(b_phase, Potential::zero(), InputSignal::zero(1), entry, first_index, steps, h,
                    out);
  }
  return out;
}

State b_phase_exit(const CALParameters& b_phase, const State& entry, double duration) {
  try {
    return FreeSolution(b_phase, entry).at(entry.t + duration);
  } catch (const ConfluentRoots&) {
    std::vector<State> out;
    State start = entry;
    start.t = 0.0;
    const double h = duration * 1e-3;
    integrate_steps(b_phase, Potential::zero(), InputSignal::zero(1), start, 0, 1000, h, out);
    State last = out.back();
    last.t = entry.t + duration;
    return last;
  }
}

namespace {

std::size_t grid_index(double t, double h) {
  const double ratio = t / h;
  const double idx = std::round(ratio);
  if (std::abs(idx - ratio) > 1e-9 * std::max(1.0, ratio))
    throw InvalidArgument("schedule breakpoint " + std::to_string(t) +
                          " is not a multiple of the step " + std::to_string(h));
  return static_cast<std::size_t>(idx);
}

struct BChoice {
  CALParameters params;
  double rho = 0.0;
  double bound = 0.0;
};

BChoice choose_b_phase(const BPhasePolicy& policy, const State& entry) {
  const double M = entry.max_abs_derivative();
  if (const auto* fixed = std::get_if<CALParameters>(&policy)) {
    if (fixed->mu == 0.0) throw DegenerateMass();
    return {*fixed, 0.0, 0.0};
  }
  if (const auto* fr = std::get_if<FixedRho>(&policy)) {
    const ResetDesign d = design_reset_coefficients(fr->rho, fr->gamma_bar.value_or(fr->rho));
    return {d.b_phase, d.rho, 9.0 * d.vandermonde_bound * M / (d.rho * d.rho)};
  }
  const auto& ad = std::get<AdaptiveRho>(policy);
  const double C = design_reset_coefficients(1.0).vandermonde_bound;
  const double rho = ad.linear_bound ? rho_for_epsilon_linear(ad.epsilon, entry, C)
                                     : rho_for_epsilon(ad.epsilon, entry, C);
  const ResetDesign d = design_reset_coefficients(rho, ad.gamma_bar.value_or(rho));
  return {d.b_phase, d.rho, ad.epsilon};
}

}  // namespace

ScheduledRun simulate_with_schedule(const ScheduleControl& control, const Schedule& schedule,
                                    const Potential& potential, const InputSignal& input,
                                    const CauchyData& cauchy, double h) {
  if (control.a_phase.mu == 0.0) throw DegenerateMass();
  const std::size_t total = step_count(schedule.horizon(), h);
  const InputSignal gated = gate_input(input, schedule);

  ScheduledRun run;
  Trajectory& traj = run.trajectory;
  traj.meta.params = control.a_phase;
  traj.meta.schedule_id = schedule.id();
  traj.meta.potential_id = potential.id();
  traj.meta.input_id = gated.id();
  traj.meta.h = h;
  traj.samples.reserve(total + 1);
  traj.samples.push_back(cauchy.state());
  if (!traj.samples.front().finite()) throw NonFinite(0.0);

  for (const PhaseInterval& iv : schedule.intervals()) {
    const std::size_t first = grid_index(iv.start, h);
    const std::size_t last = iv.end == schedule.horizon() ? total : grid_index(iv.end, h);
    if (last <= first) throw InvalidArgument("schedule interval shorter than one step");
    const std::size_t steps = last - first;
    const State entry = traj.samples.back();

    if (iv.phase == Phase::InA) {
      integrate_steps(control.a_phase, potential, gated, entry, first, steps, h, traj.samples);
      continue;
    }

    ResetEvent ev;
    ev.index = run.resets.size();
    ev.t_entry = entry.t;
    ev.entry = entry;
    ev.entry_derivative_max = entry.max_abs_derivative();
    if (control.mode == ResetMode::SimulateB) {
      const BChoice choice = choose_b_phase(control.b_phase, entry);
      ev.rho = choice.rho;
      ev.bound = choice.bound;
      auto states = simulate_b_phase(choice.params, entry, first, steps, h);
      std::move(states.begin(), states.end(), std::back_inserter(traj.samples));
    } else {
      const State reset = hard_reset(entry);
      for (std::size_t j = 1; j <= steps; ++j) {
        State s = reset;
        s.t = static_cast<double>(first + j) * h;
        traj.samples.push_back(std::move(s));
      }
    }
    ev.exit = traj.samples.back();
    ev.t_exit = ev.exit.t;
    ev.drift = (ev.exit.q - entry.q).cwiseAbs().maxCoeff();
    ev.exit_derivative_max = ev.exit.max_abs_derivative();
    run.resets.push_back(std::move(ev));
  }
  return run;
}

ScheduledRun simulate_with_schedule(const PhaseCoefficients& coeffs, const Schedule& schedule,
                                    const Potential& potential, const InputSignal& input,
                                    const CauchyData& cauchy, double h, ResetMode mode) {
  return simulate_with_schedule(ScheduleControl{coeffs.a_phase, coeffs.b_phase, mode}, schedule,
                                potential, input, cauchy, h);
}

}  // namespace cal
