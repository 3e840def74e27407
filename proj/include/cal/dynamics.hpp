#pragma once

// Causal integration of the fourth-order learning law and its second-order
// gradient-flow reduction, closed-form free motion, boundary residuals and the
// action functional.

#include <Eigen/Core>
#include <array>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "cal/input.hpp"
#include "cal/params.hpp"
#include "cal/potential.hpp"

namespace cal {

/// Weights q and their first three time derivatives at time t.
struct State {
  double t = 0.0;
  Eigen::VectorXd q, dq, d2q, d3q;

  static State zero(int n, double t = 0.0);

  int dim() const { return static_cast<int>(q.size()); }
  bool finite() const;
  /// Largest absolute entry across q and its three derivatives.
  double max_abs() const;
  /// Largest absolute entry across the three derivatives only.
  double max_abs_derivative() const;
};

/// Initial data. q0, q1 are the variational (Cauchy) constraints; q2, q3 are
/// the extra conditions a causal run needs and default to zero.
struct CauchyData {
  Eigen::VectorXd q0, q1, q2, q3;

  /// Fills missing (empty) q1..q3 with zeros of the size of q0.
  static CauchyData from(Eigen::VectorXd q0, Eigen::VectorXd q1 = {}, Eigen::VectorXd q2 = {},
                         Eigen::VectorXd q3 = {});
  State state() const;
};

struct TrajectoryMeta {
  CALParameters params;
  std::string schedule_id = "none";
  std::string potential_id;
  std::string input_id;
  double h = 0.0;
};

/// Samples at t_i = i h on [0, T].
struct Trajectory {
  std::vector<State> samples;
  TrajectoryMeta meta;

  std::size_t size() const { return samples.size(); }
  const State& front() const { return samples.front(); }
  const State& back() const { return samples.back(); }
  int dim() const { return samples.empty() ? 0 : samples.front().dim(); }
  /// max_i |q_i - other.q_i|_inf over common samples.
  double sup_distance(const Trajectory& other) const;
};

/// Residuals of the natural right-boundary conditions, divided by e^{θT}:
///   r1 = μ q''(T) + γ q'(T)
///   r2 = μ q'''(T) + θ μ q''(T) + (θγ − ν) q'(T)
struct BoundaryResidual {
  Eigen::VectorXd r1, r2;
  double r1_norm = 0.0;
  double r2_norm = 0.0;
  double scale = 1.0;  // 1 + max |state entry| at T
  double r1_normalized = 0.0;
  double r2_normalized = 0.0;

  bool within(double tol) const { return r1_normalized <= tol && r2_normalized <= tol; }
};

/// Number of steps of size h covering [0, T]. Throws InvalidArgument unless
/// T > 0, 0 < h <= T and T/h is an integer to within 1e-9 relative.
std::size_t step_count(double T, double h);

/// Top derivative q'''' solved from the fourth-order law. Throws DegenerateMass if μ == 0.
Eigen::VectorXd rhs(const CALParameters& params, const Potential& potential,
                    const Eigen::VectorXd& u, const State& state);

/// Appends `steps` RK4 samples after `start` at times (first_index + j) h.
/// Throws NonFinite at the first non-finite state.
void integrate_steps(const CALParameters& params, const Potential& potential,
                     const InputSignal& input, const State& start, std::size_t first_index,
                     std::size_t steps, double h, std::vector<State>& out);

/// Classic fixed-step RK4 on the 4n-dimensional first-order system.
Trajectory integrate(const CALParameters& params, const Potential& potential,
                     const InputSignal& input, const CauchyData& cauchy, double T, double h);

/// RK4 on  q''/θ + q' = −k q − ∇U  (d2q holds the acceleration, d3q is zero).
Trajectory integrate_gradient_flow(const GradientFlowMode& mode, const Potential& potential,
                                   const InputSignal& input, const Eigen::VectorXd& q0,
                                   const Eigen::VectorXd& q1, double T, double h);

/// RK4 on the first-order flow  q' = −k q − ∇U  (the θ → ∞ limit).
Trajectory integrate_pure_gradient_flow(double k, const Potential& potential,
                                        const InputSignal& input, const Eigen::VectorXd& q0,
                                        double T, double h);

/// Explicit update q_{j+1} = q_j − η (k q_j + ∇U(q_j, u(j dt))); returns q_0..q_steps.
std::vector<Eigen::VectorXd> euler_gradient_descent(double k, const Potential& potential,
                                                    const InputSignal& input,
                                                    const Eigen::VectorXd& q0, std::size_t steps,
                                                    double eta = 1.0, double dt = 1.0);

/// Exponential-sum solution of the free (U = 0) law from an initial state.
class FreeSolution {
 public:
  /// Throws DegenerateMass if μ == 0 and ConfluentRoots when two characteristic
  /// roots are within 1e-6 max|λ| of each other, or when three or more
  /// coincide to within the rounding floor of a multiple root.
  FreeSolution(const CALParameters& params, const State& initial);

  /// State at absolute time t (t >= initial.t not required).
  State at(double t) const;
  const std::array<std::complex<double>, 4>& roots() const { return roots_; }
  /// Mode amplitudes, one row per root.
  const Eigen::MatrixXcd& amplitudes() const { return amplitudes_; }

 private:
  double t0_;
  std::array<std::complex<double>, 4> roots_;
  Eigen::MatrixXcd amplitudes_;  // 4 x n
};

State closed_form_free(const CALParameters& params, const CauchyData& cauchy, double t);

BoundaryResidual boundary_residual(const Trajectory& traj, const CALParameters& params);
BoundaryResidual boundary_residual(const State& final_state, const CALParameters& params);

/// Composite Simpson quadrature (trapezoid on a trailing odd panel) of
///   e^{θ(t−T)} (μ/2|q''|² + ν/2|q'|² + γ q'·q'' + k/2|q|² + U(q, u)).
double action_value_rescaled(const Trajectory& traj, const CALParameters& params,
                             const Potential& potential, const InputSignal& input);

/// The action itself: e^{θT} times the rescaled value (may overflow for large θT).
double action_value(const Trajectory& traj, const CALParameters& params,
                    const Potential& potential, const InputSignal& input);

}  // namespace cal
