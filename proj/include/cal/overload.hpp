#pragma once

// Information-overloading control: A/B scheduling with the input switched off
// on B, reset-coefficient design for the B phase, and the derivative-reset
// policies that let a causal run end on the natural boundary conditions.

#include <Eigen/Core>
#include <array>
#include <optional>
#include <variant>
#include <vector>

#include "cal/dynamics.hpp"
#include "cal/schedule.hpp"

namespace cal {

/// Strictness margin used by the rho bounds.
inline constexpr double kRhoMargin = 1e-6;

/// Coefficients used on A and on B.
struct PhaseCoefficients {
  CALParameters a_phase;
  CALParameters b_phase;
};

/// B-phase coefficients with characteristic roots {0, -ρ, -2ρ, -3ρ}.
struct ResetDesign {
  double rho = 1.0;
  std::array<double, 4> roots{};
  CALParameters b_phase;
  /// Inverse of V with V(k, j) = (λ_j/ρ)^k, k = 1..3, over the three nonzero roots.
  Eigen::Matrix3d lambda_inv;
  /// max |lambda_inv(k, j)|.
  double vandermonde_bound = 0.0;
};

/// Inverse of the 3x3 Vandermonde-type matrix V(k, j) = x_j^k, k = 1..3.
Eigen::Matrix3d vandermonde_inverse(const std::array<double, 3>& x);

/// θ̄ = 3ρ, μ̄ = 1, k̄ = 0, ν̄ = 3ργ̄ − 2ρ². Throws InvalidRho if ρ <= 0.
ResetDesign design_reset_coefficients(double rho, double gamma_bar);
/// Same with γ̄ = ρ (so ν̄ = ρ²).
ResetDesign design_reset_coefficients(double rho);

/// max(1+δ, sqrt(9 C M / ε) (1+δ)) with M the largest |q^(k)|, k = 1..3, at entry.
/// Throws InvalidEpsilon if ε <= 0.
double rho_for_epsilon(double epsilon, const State& entry, double C);

/// max(1+δ, (9 C M / ε) (1+δ)): the linear-in-M variant. Since each mode
/// amplitude is bounded by 3 C M / ρ, this choice guarantees a drift below ε.
double rho_for_epsilon_linear(double epsilon, const State& entry, double C);

/// Keeps q, zeroes every derivative.
State hard_reset(const State& state);

enum class ResetMode { SimulateB, HardReset };

const char* to_string(ResetMode m);

/// How B-phase coefficients are chosen.
struct FixedRho {
  double rho = 1.0;
  std::optional<double> gamma_bar;
  bool operator==(const FixedRho&) const = default;
};
/// ρ chosen per B interval from the entry state so that drift < ε is targeted.
struct AdaptiveRho {
  double epsilon = 0.05;
  std::optional<double> gamma_bar;
  bool linear_bound = false;  // use rho_for_epsilon_linear instead of rho_for_epsilon
  bool operator==(const AdaptiveRho&) const = default;
};
using BPhasePolicy = std::variant<CALParameters, FixedRho, AdaptiveRho>;

struct ScheduleControl {
  CALParameters a_phase;
  BPhasePolicy b_phase = FixedRho{};
  ResetMode mode = ResetMode::SimulateB;
};

/// What happened on one B interval.
struct ResetEvent {
  std::size_t index = 0;
  double t_entry = 0.0;
  double t_exit = 0.0;
  State entry;
  State exit;
  /// ρ used (0 when the B coefficients were given explicitly).
  double rho = 0.0;
  /// max |q^(k)(entry)|, k = 1..3.
  double entry_derivative_max = 0.0;
  /// Drift the ρ choice targets: ε for AdaptiveRho, 9 C M / ρ² otherwise (0 if unknown).
  double bound = 0.0;
  /// max_j |q_j(exit) - q_j(entry)|.
  double drift = 0.0;
  double exit_derivative_max = 0.0;
};

struct ScheduledRun {
  Trajectory trajectory;
  std::vector<ResetEvent> resets;
};

/// Free B-phase motion from `entry` sampled at (first_index + j) h, j = 1..steps.
/// Uses the closed form when the roots are distinct, RK4 otherwise.
std::vector<State> simulate_b_phase(const CALParameters& b_phase, const State& entry,
                                    std::size_t first_index, std::size_t steps, double h);

/// State at the end of a B interval of length `duration` (closed form when the
/// roots are distinct; RK4 with 1e-3 duration steps otherwise).
State b_phase_exit(const CALParameters& b_phase, const State& entry, double duration);

/// Integrates the A-phase law with gated input on A and handles every B interval
/// per `control`. Breakpoints must lie on the h grid. The sample at a B entry is
/// the state reached by the A phase (before any reset).
ScheduledRun simulate_with_schedule(const ScheduleControl& control, const Schedule& schedule,
                                    const Potential& potential, const InputSignal& input,
                                    const CauchyData& cauchy, double h);

ScheduledRun simulate_with_schedule(const PhaseCoefficients& coeffs, const Schedule& schedule,
                                    const Potential& potential, const InputSignal& input,
                                    const CauchyData& cauchy, double h, ResetMode mode);

}  // namespace cal
