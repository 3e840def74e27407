#include "cal/dynamics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "cal/charpoly.hpp"
#include "cal/errors.hpp"

namespace cal {

namespace {

constexpr double kConfluentRelGap = 1e-6;

// An m-fold root comes back from the eigen solve as a cluster of diameter
// ~eps^(1/m), which for m >= 3 exceeds the plain gap threshold.
bool confluent(const std::array<std::complex<double>, 4>& r, double scale, double& gap) {
  gap = INFINITY;
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = i + 1; j < 4; ++j) gap = std::min(gap, std::abs(r[i] - r[j]));
  if (!(gap > kConfluentRelGap * scale)) return true;
  const double eps = std::numeric_limits<double>::epsilon();
  for (int m = 3; m <= 4; ++m) {
    const double radius = 10.0 * std::pow(eps, 1.0 / m) * scale;
    for (const auto& a : r) {
      int near = 0;
      for (const auto& b : r) near += std::abs(a - b) <= radius ? 1 : 0;
      if (near >= m) return true;
    }
  }
  return false;
}

void check_problem(const Potential& potential, const InputSignal& input, Eigen::Index n) {
  if (potential.state_dim() >= 0 && potential.state_dim() != n)
    throw DimensionMismatch(potential.id() + " expects q of size " +
                            std::to_string(potential.state_dim()) + ", got " + std::to_string(n));
  if (potential.input_dim() >= 0 && potential.input_dim() != input.dimension())
    throw DimensionMismatch(potential.id() + " expects u of size " +
                            std::to_string(potential.input_dim()) + ", input " + input.id() +
                            " has " + std::to_string(input.dimension()));
}

// One classic RK4 step of y' = f(t, y).
template <class F>
Eigen::VectorXd rk4_step(const F& f, double t, const Eigen::VectorXd& y, double h) {
  const Eigen::VectorXd k1 = f(t, y);
  const Eigen::VectorXd k2 = f(t + 0.5 * h, y + 0.5 * h * k1);
  const Eigen::VectorXd k3 = f(t + 0.5 * h, y + 0.5 * h * k2);
  const Eigen::VectorXd k4 = f(t + h, y + h * k3);
  return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

Eigen::VectorXd pack(const State& s) {
  const Eigen::Index n = s.q.size();
  Eigen::VectorXd y(4 * n);
  y << s.q, s.dq, s.d2q, s.d3q;
  return y;
}

State unpack(double t, const Eigen::VectorXd& y) {
  const Eigen::Index n = y.size() / 4;
  return State{t, y.segment(0, n), y.segment(n, n), y.segment(2 * n, n), y.segment(3 * n, n)};
}

Trajectory make_trajectory(const CALParameters& params, const Potential& potential,
                           const InputSignal& input, double h) {
  Trajectory traj;
  traj.meta.params = params;
  traj.meta.potential_id = potential.id();
  traj.meta.input_id = input.id();
  traj.meta.h = h;
  return traj;
}

}  // namespace

State State::zero(int n, double t) {
  const Eigen::VectorXd z = Eigen::VectorXd::Zero(n);
  return State{t, z, z, z, z};
}

bool State::finite() const {
  return std::isfinite(t) && q.allFinite() && dq.allFinite() && d2q.allFinite() &&
         d3q.allFinite();
}

double State::max_abs() const {
  return std::max(q.size() ? q.cwiseAbs().maxCoeff() : 0.0, max_abs_derivative());
}

double State::max_abs_derivative() const {
  if (q.size() == 0) return 0.0;
  return std::max({dq.cwiseAbs().maxCoeff(), d2q.cwiseAbs().maxCoeff(),
                   d3q.cwiseAbs().maxCoeff()});
}

CauchyData CauchyData::from(Eigen::VectorXd q0, Eigen::VectorXd q1, Eigen::VectorXd q2,
                            Eigen::VectorXd q3) {
  const Eigen::Index n = q0.size();
  auto fill = [n](Eigen::VectorXd v) {
    if (v.size() == 0) return Eigen::VectorXd(Eigen::VectorXd::Zero(n));
    if (v.size() != n) throw DimensionMismatch("Cauchy data vectors must share one size");
    return v;
  };
  return CauchyData{std::move(q0), fill(std::move(q1)), fill(std::move(q2)), fill(std::move(q3))};
}

State CauchyData::state() const { return State{0.0, q0, q1, q2, q3}; }

double Trajectory::sup_distance(const Trajectory& other) const {
  const std::size_t count = std::min(size(), other.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < count; ++i)
    worst = std::max(worst, (samples[i].q - other.samples[i].q).cwiseAbs().maxCoeff());
  return worst;
}

std::size_t step_count(double T, double h) {
  if (!(T > 0.0)) throw InvalidArgument("horizon T must be > 0");
  if (!(h > 0.0) || h > T) throw InvalidArgument("step h must satisfy 0 < h <= T");
  const double ratio = T / h;
  const double steps = std::round(ratio);
  if (std::abs(steps - ratio) > 1e-9 * ratio)
    throw InvalidArgument("T/h must be an integer (T=" + std::to_string(T) +
                          ", h=" + std::to_string(h) + ")");
  return static_cast<std::size_t>(steps);
}

Eigen::VectorXd rhs(const CALParameters& p, const Potential& potential, const Eigen::VectorXd& u,
                    const State& s) {
  if (p.mu == 0.0) throw DegenerateMass();
  const double th = p.theta;
  return -(2.0 * th * p.mu * s.d3q + (th * th * p.mu + th * p.gamma - p.nu) * s.d2q +
           (th * th * p.gamma - th * p.nu) * s.dq + p.k * s.q + potential.grad(s.q, u)) /
         p.mu;
}

void integrate_steps(const CALParameters& params, const Potential& potential,
                     const InputSignal& input, const State& start, std::size_t first_index,
                     std::size_t steps, double h, std::vector<State>& out) {
  if (params.mu == 0.0) throw DegenerateMass();
  const Eigen::Index n = start.q.size();
  check_problem(potential, input, n);

  auto f = [&](double t, const Eigen::VectorXd& y) {
    Eigen::VectorXd dy(4 * n);
    const State s = unpack(t, y);
    dy << s.dq, s.d2q, s.d3q, rhs(params, potential, input(t), s);
    return dy;
  };

  Eigen::VectorXd y = pack(start);
  out.reserve(out.size() + steps);
  for (std::size_t j = 0; j < steps; ++j) {
    const double t = static_cast<double>(first_index + j) * h;
    y = rk4_step(f, t, y, h);
    const double t_next = static_cast<double>(first_index + j + 1) * h;
    if (!y.allFinite()) throw NonFinite(t_next);
    out.push_back(unpack(t_next, y));
  }
}

Trajectory integrate(const CALParameters& params, const Potential& potential,
                     const InputSignal& input, const CauchyData& cauchy, double T, double h) {
  if (params.mu == 0.0) throw DegenerateMass();
  const std::size_t steps = step_count(T, h);
  Trajectory traj = make_trajectory(params, potential, input, h);
  traj.samples.push_back(cauchy.state());
  if (!traj.samples.front().finite()) throw NonFinite(0.0);
  integrate_steps(params, potential, input, traj.samples.front(), 0, steps, h, traj.samples);
  return traj;
}

Trajectory integrate_gradient_flow(const GradientFlowMode& mode, const Potential& potential,
                                   const InputSignal& input, const Eigen::VectorXd& q0,
                                   const Eigen::VectorXd& q1, double T, double h) {
  if (!(mode.theta > 0.0)) throw InvalidTheta(mode.theta);
  if (q1.size() != q0.size()) throw DimensionMismatch("q0 and q1 sizes differ");
  const std::size_t steps = step_count(T, h);
  const Eigen::Index n = q0.size();
  check_problem(potential, input, n);

  // mode.xi only flips the sign of the whole equation.
  auto accel = [&](double t, const Eigen::VectorXd& q, const Eigen::VectorXd& dq) {
    return Eigen::VectorXd(
        (-mode.damping * dq - mode.stiffness * q - potential.grad(q, input(t))) / mode.inertia);
  };
  auto f = [&](double t, const Eigen::VectorXd& y) {
    Eigen::VectorXd dy(2 * n);
    dy << y.segment(n, n), accel(t, y.head(n), y.segment(n, n));
    return dy;
  };
  auto sample = [&](double t, const Eigen::VectorXd& y) {
    return State{t, y.head(n), y.segment(n, n), accel(t, y.head(n), y.segment(n, n)),
                 Eigen::VectorXd::Zero(n)};
  };

  Trajectory traj =
      make_trajectory(gradient_flow_cal_coefficients(mode.theta, mode.stiffness), potential, input, h);
  Eigen::VectorXd y(2 * n);
  y << q0, q1;
  traj.samples.reserve(steps + 1);
  traj.samples.push_back(sample(0.0, y));
  for (std::size_t j = 0; j < steps; ++j) {
    y = rk4_step(f, static_cast<double>(j) * h, y, h);
    const double t_next = static_cast<double>(j + 1) * h;
    if (!y.allFinite()) throw NonFinite(t_next);
    traj.samples.push_back(sample(t_next, y));
  }
  return traj;
}

Trajectory integrate_pure_gradient_flow(double k, const Potential& potential,
                                        const InputSignal& input, const Eigen::VectorXd& q0,
                                        double T, double h) {
  const std::size_t steps = step_count(T, h);
  const Eigen::Index n = q0.size();
  check_problem(potential, input, n);
  auto f = [&](double t, const Eigen::VectorXd& q) {
    return Eigen::VectorXd(-k * q - potential.grad(q, input(t)));
  };
  auto sample = [&](double t, const Eigen::VectorXd& q) {
    const Eigen::VectorXd z = Eigen::VectorXd::Zero(n);
    return State{t, q, f(t, q), z, z};
  };

  Trajectory traj = make_trajectory(CALParameters{1.0, 0.0, 0.0, 0.0, k}, potential, input, h);
  Eigen::VectorXd q = q0;
  traj.samples.reserve(steps + 1);
  traj.samples.push_back(sample(0.0, q));
  for (std::size_t j = 0; j < steps; ++j) {
    q = rk4_step(f, static_cast<double>(j) * h, q, h);
    const double t_next = static_cast<double>(j + 1) * h;
    if (!q.allFinite()) throw NonFinite(t_next);
    traj.samples.push_back(sample(t_next, q));
  }
  return traj;
}

std::vector<Eigen::VectorXd> euler_gradient_descent(double k, const Potential& potential,
                                                    const InputSignal& input,
                                                    const Eigen::VectorXd& q0, std::size_t steps,
                                                    double eta, double dt) {
  if (!(eta > 0.0)) throw InvalidArgument("Euler step eta must be > 0");
  check_problem(potential, input, q0.size());
  std::vector<Eigen::VectorXd> qs{q0};
  qs.reserve(steps + 1);
  for (std::size_t j = 0; j < steps; ++j) {
    const Eigen::VectorXd& q = qs.back();
    const Eigen::VectorXd u = input(static_cast<double>(j) * dt);
    Eigen::VectorXd next = q - eta * (k * q + potential.grad(q, u));
    if (!next.allFinite()) throw NonFinite(static_cast<double>(j + 1) * dt);
    qs.push_back(std::move(next));
  }
  return qs;
}

FreeSolution::FreeSolution(const CALParameters& params, const State& initial)
    : t0_(initial.t) {
  roots_ = cal::roots(cal_to_charpoly(params)).roots;

  double scale = 0.0;
  for (const auto& r : roots_) scale = std::max(scale, std::abs(r));
  double gap = 0.0;
  if (confluent(roots_, scale, gap))
    throw ConfluentRoots("characteristic roots are not pairwise distinct (min gap " +
                         std::to_string(gap) + ")");

  // Row k of the Vandermonde system holds λ_i^k; column i is one exponential mode.
  Eigen::Matrix4cd vandermonde;
  for (int i = 0; i < 4; ++i) {
    std::complex<double> power = 1.0;
    for (int k = 0; k < 4; ++k) {
      vandermonde(k, i) = power;
      power *= roots_[static_cast<std::size_t>(i)];
    }
  }
  const Eigen::Index n = initial.q.size();
  Eigen::MatrixXcd derivatives(4, n);
  derivatives.row(0) = initial.q.transpose().cast<std::complex<double>>();
  derivatives.row(1) = initial.dq.transpose().cast<std::complex<double>>();
  derivatives.row(2) = initial.d2q.transpose().cast<std::complex<double>>();
  derivatives.row(3) = initial.d3q.transpose().cast<std::complex<double>>();
  amplitudes_ = vandermonde.partialPivLu().solve(derivatives);
}

State FreeSolution::at(double t) const {
  const double tau = t - t0_;
  const Eigen::Index n = amplitudes_.cols();
  State s = State::zero(static_cast<int>(n), t);
  Eigen::VectorXd* slots[4] = {&s.q, &s.dq, &s.d2q, &s.d3q};
  for (int i = 0; i < 4; ++i) {
    const auto lambda = roots_[static_cast<std::size_t>(i)];
    std::complex<double> factor = std::exp(lambda * tau);
    for (int k = 0; k < 4; ++k) {
      *slots[k] += (factor * amplitudes_.row(i)).real().transpose();
      factor *= lambda;
    }
  }
  return s;
}

State closed_form_free(const CALParameters& params, const CauchyData& cauchy, double t) {
  return FreeSolution(params, cauchy.state()).at(t);
}

BoundaryResidual boundary_residual(const State& s, const CALParameters& p) {
  BoundaryResidual r;
  r.r1 = p.mu * s.d2q + p.gamma * s.dq;
  r.r2 = p.mu * s.d3q + p.theta * p.mu * s.d2q + (p.theta * p.gamma - p.nu) * s.dq;
  r.r1_norm = r.r1.norm();
  r.r2_norm = r.r2.norm();
  r.scale = 1.0 + s.max_abs();
  r.r1_normalized = r.r1_norm / r.scale;
  r.r2_normalized = r.r2_norm / r.scale;
  return r;
}

BoundaryResidual boundary_residual(const Trajectory& traj, const CALParameters& params) {
  if (traj.samples.empty()) throw InvalidArgument("boundary_residual: empty trajectory");
  return boundary_residual(traj.back(), params);
}

double action_value_rescaled(const Trajectory& traj, const CALParameters& p,
                             const Potential& potential, const InputSignal& input) {
  const std::size_t count = traj.size();
  if (count < 2) return 0.0;
  const double T = traj.back().t;
  const double h = traj.samples[1].t - traj.samples[0].t;

  std::vector<double> f(count);
  for (std::size_t i = 0; i < count; ++i) {
    const State& s = traj.samples[i];
    const double kinetic = 0.5 * p.mu * s.d2q.squaredNorm() + 0.5 * p.nu * s.dq.squaredNorm() +
                           p.gamma * s.dq.dot(s.d2q) + 0.5 * p.k * s.q.squaredNorm();
    f[i] = std::exp(p.theta * (s.t - T)) * (kinetic + potential.eval(s.q, input(s.t)));
  }

  const std::size_t panels = count - 1;
  const std::size_t simpson_panels = panels - panels % 2;
  double sum = 0.0;
  for (std::size_t i = 0; i + 2 <= simpson_panels; i += 2)
    sum += (h / 3.0) * (f[i] + 4.0 * f[i + 1] + f[i + 2]);
  if (panels % 2 == 1) sum += 0.5 * h * (f[count - 2] + f[count - 1]);
  return sum;
}

double action_value(const Trajectory& traj, const CALParameters& p, const Potential& potential,
                    const InputSignal& input) {
  if (traj.size() < 2) return 0.0;
  return std::exp(p.theta * traj.back().t) * action_value_rescaled(traj, p, potential, input);
}

}  // namespace cal
