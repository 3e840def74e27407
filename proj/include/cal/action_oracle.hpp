#pragma once

// Direct minimization of a finite-difference discretization of the action for
// potentials that are quadratic in q. Used as an independent reference for
// the solution of the variational problem with free right end.
//
// Grid: nodes t_i = i h, i = -1 .. N+1 (two ghost nodes). At every physical
// node i = 0..N the derivatives are central differences
//   D1 q_i = (q_{i+1} - q_{i-1}) / (2h),  D2 q_i = (q_{i+1} - 2 q_i + q_{i-1}) / h^2,
// and the action is approximated with trapezoid weights. The left conditions
// fix q_0 = q^0 and (q_1 - q_{-1}) / (2h) = q^1; q_N and q_{N+1} are free, so
// the natural boundary conditions come out of the minimization.

#include <Eigen/Core>

#include "cal/dynamics.hpp"

namespace cal {

struct DiscreteActionResult {
  /// Physical nodes 0..N with derivatives reconstructed from 5-point stencils.
  Trajectory trajectory;
  /// n x (N+3); column j holds node j-1 (ghosts in the first and last column).
  Eigen::MatrixXd nodes;
  /// Discretized action with weights e^{θ(t−T)}.
  double action_rescaled = 0.0;
};

/// Throws InvalidArgument for non-quadratic potentials or fewer than 4 steps,
/// SingularSystem when the discrete quadratic form is not positive definite.
DiscreteActionResult minimize_discrete_action(const CALParameters& params,
                                              const Potential& potential,
                                              const InputSignal& input, const Eigen::VectorXd& q0,
                                              const Eigen::VectorXd& q1, double T, double h);

/// Evaluates the discretized (rescaled) action for an arbitrary node matrix laid
/// out as in DiscreteActionResult::nodes. Works for any potential.
double discrete_action(const CALParameters& params, const Potential& potential,
                       const InputSignal& input, const Eigen::MatrixXd& nodes, double h);

/// Rebuilds a trajectory from node values; derivatives of order 1..3 use
/// 5-point stencils over physical nodes only (one-sided near the ends).
Trajectory trajectory_from_nodes(const Eigen::MatrixXd& nodes, double h, TrajectoryMeta meta);

/// Finite-difference weights for the `order`-th derivative at z from values at
/// `points` (Fornberg's recursion).
Eigen::VectorXd finite_difference_weights(double z, const Eigen::VectorXd& points, int order);

}  // namespace cal
