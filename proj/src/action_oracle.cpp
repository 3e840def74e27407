#include "cal/action_oracle.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <array>
#include <cmath>

#include "cal/errors.hpp"

namespace cal {

namespace {

double trapezoid_weight(Eigen::Index i, Eigen::Index N, double h) {
  return (i == 0 || i == N) ? 0.5 * h : h;
}

}  // namespace

Eigen::VectorXd finite_difference_weights(double z, const Eigen::VectorXd& x, int order) {
  const Eigen::Index n = x.size();
  if (order < 0 || n <= order) throw InvalidArgument("need more points than the derivative order");
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n, order + 1);
  double c1 = 1.0;
  double c4 = x(0) - z;
  c(0, 0) = 1.0;
  for (Eigen::Index i = 1; i < n; ++i) {
    const Eigen::Index mn = std::min<Eigen::Index>(i, order);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = x(i) - z;
    for (Eigen::Index j = 0; j < i; ++j) {
      const double c3 = x(i) - x(j);
      c2 *= c3;
      if (j == i - 1) {
        for (Eigen::Index k = mn; k > 0; --k)
          c(i, k) = c1 * (static_cast<double>(k) * c(i - 1, k - 1) - c5 * c(i - 1, k)) / c2;
        c(i, 0) = -c1 * c5 * c(i - 1, 0) / c2;
      }
      for (Eigen::Index k = mn; k > 0; --k)
        c(j, k) = (c4 * c(j, k) - static_cast<double>(k) * c(j, k - 1)) / c3;
      c(j, 0) = c4 * c(j, 0) / c3;
    }
    c1 = c2;
  }
  return c.col(order);
}

Trajectory trajectory_from_nodes(const Eigen::MatrixXd& nodes, double h, TrajectoryMeta meta) {
  const Eigen::Index N = nodes.cols() - 3;
  if (N < 4) throw InvalidArgument("trajectory_from_nodes needs at least 4 steps");

  // weights[offset][order-1]: stencil over window positions 0..4, evaluated at `offset`.
  std::array<std::array<Eigen::VectorXd, 3>, 5> weights;
  const Eigen::VectorXd window = Eigen::VectorXd::LinSpaced(5, 0.0, 4.0);
  for (int offset = 0; offset < 5; ++offset)
    for (int order = 1; order <= 3; ++order)
      weights[static_cast<std::size_t>(offset)][static_cast<std::size_t>(order - 1)] =
          finite_difference_weights(offset, window, order);

  Trajectory traj;
  traj.meta = std::move(meta);
  traj.meta.h = h;
  traj.samples.reserve(static_cast<std::size_t>(N + 1));
  for (Eigen::Index i = 0; i <= N; ++i) {
    const Eigen::Index lo = std::clamp<Eigen::Index>(i - 2, 0, N - 4);
    const auto block = nodes.middleCols(lo + 1, 5);  // physical nodes lo..lo+4
    const auto& w = weights[static_cast<std::size_t>(i - lo)];
    State s;
    s.t = static_cast<double>(i) * h;
    s.q = nodes.col(i + 1);
    s.dq = block * w[0] / h;
    s.d2q = block * w[1] / (h * h);
    s.d3q = block * w[2] / (h * h * h);
    traj.samples.push_back(std::move(s));
  }
  return traj;
}

double discrete_action(const CALParameters& p, const Potential& potential,
                       const InputSignal& input, const Eigen::MatrixXd& nodes, double h) {
  const Eigen::Index N = nodes.cols() - 3;
  if (N < 1) throw InvalidArgument("discrete_action needs at least one step");
  const double T = static_cast<double>(N) * h;
  double total = 0.0;
  for (Eigen::Index i = 0; i <= N; ++i) {
    const auto prev = nodes.col(i);
    const auto here = nodes.col(i + 1);
    const auto next = nodes.col(i + 2);
    const Eigen::VectorXd d1 = (next - prev) / (2.0 * h);
    const Eigen::VectorXd d2 = (next - 2.0 * here + prev) / (h * h);
    const double t = static_cast<double>(i) * h;
    const double lagrangian = 0.5 * p.mu * d2.squaredNorm() + 0.5 * p.nu * d1.squaredNorm() +
                              p.gamma * d1.dot(d2) + 0.5 * p.k * here.squaredNorm() +
                              potential.eval(here, input(t));
    total += trapezoid_weight(i, N, h) * std::exp(p.theta * (t - T)) * lagrangian;
  }
  return total;
}

DiscreteActionResult minimize_discrete_action(const CALParameters& p, const Potential& potential,
                                              const InputSignal& input, const Eigen::VectorXd& q0,
                                              const Eigen::VectorXd& q1, double T, double h) {
  if (!potential.is_quadratic())
    throw InvalidArgument("discrete action oracle requires a potential quadratic in q, got " +
                          potential.id());
  if (q1.size() != q0.size()) throw DimensionMismatch("q0 and q1 sizes differ");
  const Eigen::Index n = q0.size();
  if (potential.state_dim() >= 0 && potential.state_dim() != n)
    throw DimensionMismatch(potential.id() + " state size differs from q0");
  if (potential.input_dim() >= 0 && potential.input_dim() != input.dimension())
    throw DimensionMismatch(potential.id() + " input size differs from " + input.id());

  const auto N = static_cast<Eigen::Index>(step_count(T, h));
  if (N < 4) throw InvalidArgument("discrete action oracle needs at least 4 steps");

  const Eigen::Index columns = N + 3;
  const Eigen::Index full = columns * n;
  const double d1c = 1.0 / (2.0 * h);
  const double d2c = 1.0 / (h * h);
  const std::array<double, 3> D1{-d1c, 0.0, d1c};
  const std::array<double, 3> D2{d2c, -2.0 * d2c, d2c};

  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(static_cast<std::size_t>((N + 1) * n * (9 + n)));
  Eigen::VectorXd linear = Eigen::VectorXd::Zero(full);

  const Eigen::VectorXd zero_q = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i <= N; ++i) {
    const double t = static_cast<double>(i) * h;
    const double w = trapezoid_weight(i, N, h) * std::exp(p.theta * (t - T));
    const Eigen::Index j = i + 1;  // column of node i
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        const double kinetic = p.mu * D2[a] * D2[b] + p.nu * D1[a] * D1[b] +
                               p.gamma * (D1[a] * D2[b] + D2[a] * D1[b]);
        if (kinetic == 0.0) continue;
        for (Eigen::Index c = 0; c < n; ++c)
          entries.emplace_back((j - 1 + a) * n + c, (j - 1 + b) * n + c, w * kinetic);
      }
    }
    const Eigen::VectorXd u = input(t);
    Eigen::MatrixXd local = potential.hessian(static_cast<int>(n), u);
    local.diagonal().array() += p.k;
    for (Eigen::Index r = 0; r < n; ++r)
      for (Eigen::Index c = 0; c < n; ++c)
        if (local(r, c) != 0.0) entries.emplace_back(j * n + r, j * n + c, w * local(r, c));
    linear.segment(j * n, n) += w * potential.grad(zero_q, u);
  }
  Eigen::SparseMatrix<double> H(full, full);
  H.setFromTriplets(entries.begin(), entries.end());

  // Free unknowns are nodes 1..N+1; node 0 is fixed and the left ghost follows
  // node 1 through the central slope constraint.
  const Eigen::Index free = (N + 1) * n;
  std::vector<Eigen::Triplet<double>> map_entries;
  map_entries.reserve(static_cast<std::size_t>(free + n));
  for (Eigen::Index r = 0; r < free; ++r) map_entries.emplace_back(2 * n + r, r, 1.0);
  for (Eigen::Index c = 0; c < n; ++c) map_entries.emplace_back(c, c, 1.0);
  Eigen::SparseMatrix<double> E(full, free);
  E.setFromTriplets(map_entries.begin(), map_entries.end());

  Eigen::VectorXd offset = Eigen::VectorXd::Zero(full);
  offset.segment(0, n) = -2.0 * h * q1;
  offset.segment(n, n) = q0;

  const Eigen::SparseMatrix<double> reduced = E.transpose() * H * E;
  const Eigen::VectorXd rhs_vec = -(E.transpose() * (linear + H * offset));

  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver;
  solver.compute(reduced);
  if (solver.info() != Eigen::Success)
    throw SingularSystem("discrete action system could not be factorized");
  if (!(solver.vectorD().minCoeff() > 0.0))
    throw SingularSystem("discrete action is not positive definite; no minimizer exists");
  const Eigen::VectorXd y = solver.solve(rhs_vec);
  if (solver.info() != Eigen::Success || !y.allFinite())
    throw SingularSystem("discrete action solve failed");

  const Eigen::VectorXd x = E * y + offset;
  DiscreteActionResult out;
  out.nodes = Eigen::Map<const Eigen::MatrixXd>(x.data(), n, columns);

  TrajectoryMeta meta;
  meta.params = p;
  meta.potential_id = potential.id();
  meta.input_id = input.id();
  meta.schedule_id = "discrete-action-oracle";
  out.trajectory = trajectory_from_nodes(out.nodes, h, std::move(meta));
  out.action_rescaled = discrete_action(p, potential, input, out.nodes, h);
  return out;
}

}  // namespace cal
