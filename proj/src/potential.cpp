#include "cal/potential.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "cal/errors.hpp"

namespace cal {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

using ConstMap = Eigen::Map<const Eigen::MatrixXd>;
using Map = Eigen::Map<Eigen::MatrixXd>;

Eigen::ArrayXd activate(Nonlinearity n, const Eigen::ArrayXd& a) {
  if (n == Nonlinearity::Tanh) return a.tanh();
  return 1.0 / (1.0 + (-a).exp());
}

Eigen::ArrayXd activate_slope(Nonlinearity n, const Eigen::ArrayXd& a) {
  if (n == Nonlinearity::Tanh) return 1.0 - a.tanh().square();
  const Eigen::ArrayXd s = 1.0 / (1.0 + (-a).exp());
  return s * (1.0 - s);
}

// Offsets of (W1, b1, W2, b2) inside the packed weight vector.
struct DemoLayout {
  Eigen::Index m, h, w1, b1, w2, b2, size;
  explicit DemoLayout(const Potential::FeatureDemo& f)
      : m(f.input_dim),
        h(f.hidden),
        w1(0),
        b1(h * m),
        w2(h * m + h),
        b2(2 * h * m + h),
        size(2 * h * m + h + m) {}
};

struct DemoForward {
  Eigen::VectorXd pre, hidden, residual;
};

DemoForward demo_forward(const Potential::FeatureDemo& f, const Eigen::VectorXd& q,
                         const Eigen::VectorXd& u) {
  const DemoLayout L(f);
  const ConstMap W1(q.data() + L.w1, L.h, L.m);
  const ConstMap W2(q.data() + L.w2, L.m, L.h);
  DemoForward out;
  out.pre = W1 * u + q.segment(L.b1, L.h);
  out.hidden = activate(f.nonlinearity, out.pre.array()).matrix();
  out.residual = W2 * out.hidden + q.segment(L.b2, L.m) - u;
  return out;
}

}  // namespace

const char* to_string(Nonlinearity n) { return n == Nonlinearity::Tanh ? "tanh" : "logistic"; }

double input_gate(const Eigen::VectorXd& u) {
  return (u.size() > 0 && (u.array() != 0.0).any()) ? 1.0 : 0.0;
}

Potential Potential::zero(int state_dim) { return Potential(Zero{state_dim}); }

Potential Potential::quadratic_tracking(int n, double scale) {
  if (n < 1) throw InvalidArgument("quadratic_tracking dimension must be >= 1");
  if (!(scale >= 0.0)) throw InvalidArgument("quadratic_tracking scale must be >= 0");
  return Potential(QuadraticTracking{scale * Eigen::MatrixXd::Identity(n, n)});
}

Potential Potential::quadratic_tracking(Eigen::MatrixXd weight) {
  if (weight.rows() < 1 || weight.rows() != weight.cols())
    throw InvalidArgument("quadratic_tracking weight must be square");
  if (!weight.isApprox(weight.transpose(), 1e-12))
    throw InvalidArgument("quadratic_tracking weight must be symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(weight, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -1e-12 * (1.0 + weight.cwiseAbs().maxCoeff()))
    throw InvalidArgument("quadratic_tracking weight must be positive semidefinite");
  return Potential(QuadraticTracking{std::move(weight)});
}

Potential Potential::linear_regression(int features) {
  if (features < 1) throw InvalidArgument("linear_regression needs at least one feature");
  return Potential(LinearRegression{features});
}

Potential Potential::feature_demo(int input_dim, int hidden, Nonlinearity nonlinearity) {
  if (input_dim < 1 || hidden < 1)
    throw InvalidArgument("feature_demo needs positive input and hidden widths");
  return Potential(FeatureDemo{input_dim, hidden, nonlinearity});
}

int Potential::state_dim() const {
  return std::visit(overloaded{
                        [](const Zero& z) { return z.state_dim; },
                        [](const QuadraticTracking& p) { return static_cast<int>(p.weight.rows()); },
                        [](const LinearRegression& p) { return p.features; },
                        [](const FeatureDemo& p) { return static_cast<int>(DemoLayout(p).size); },
                    },
                    v_);
}

int Potential::input_dim() const {
  return std::visit(overloaded{
                        [](const Zero&) { return -1; },
                        [](const QuadraticTracking& p) { return static_cast<int>(p.weight.rows()); },
                        [](const LinearRegression& p) { return p.features + 1; },
                        [](const FeatureDemo& p) { return p.input_dim; },
                    },
                    v_);
}

bool Potential::is_quadratic() const { return !std::holds_alternative<FeatureDemo>(v_); }

void Potential::check_dims(const Eigen::VectorXd& q, const Eigen::VectorXd& u) const {
  const int n = state_dim();
  const int m = input_dim();
  if (n >= 0 && q.size() != n)
    throw DimensionMismatch(id() + ": q has size " + std::to_string(q.size()) + ", expected " +
                            std::to_string(n));
  if (m >= 0 && u.size() != m)
    throw DimensionMismatch(id() + ": u has size " + std::to_string(u.size()) + ", expected " +
                            std::to_string(m));
}

double Potential::eval(const Eigen::VectorXd& q, const Eigen::VectorXd& u) const {
  check_dims(q, u);
  const double gate = input_gate(u);
  if (gate == 0.0) return 0.0;
  return std::visit(
      overloaded{
          [](const Zero&) { return 0.0; },
          [&](const QuadraticTracking& p) {
            const Eigen::VectorXd e = q - u;
            return 0.5 * e.dot(p.weight * e);
          },
          [&](const LinearRegression& p) {
            const double r = q.dot(u.head(p.features)) - u(p.features);
            return 0.5 * r * r;
          },
          [&](const FeatureDemo& p) { return 0.5 * demo_forward(p, q, u).residual.squaredNorm(); },
      },
      v_);
}

Eigen::VectorXd Potential::grad(const Eigen::VectorXd& q, const Eigen::VectorXd& u) const {
  check_dims(q, u);
  if (input_gate(u) == 0.0) return Eigen::VectorXd::Zero(q.size());
  return std::visit(
      overloaded{
          [&](const Zero&) -> Eigen::VectorXd { return Eigen::VectorXd::Zero(q.size()); },
          [&](const QuadraticTracking& p) -> Eigen::VectorXd { return p.weight * (q - u); },
          [&](const LinearRegression& p) -> Eigen::VectorXd {
            const auto x = u.head(p.features);
            return (q.dot(x) - u(p.features)) * x;
          },
          [&](const FeatureDemo& p) -> Eigen::VectorXd {
            const DemoLayout L(p);
            const DemoForward f = demo_forward(p, q, u);
            const ConstMap W2(q.data() + L.w2, L.m, L.h);
            Eigen::VectorXd g(L.size);
            const Eigen::VectorXd dpre =
                ((W2.transpose() * f.residual).array() * activate_slope(p.nonlinearity, f.pre.array()))
                    .matrix();
            Map(g.data() + L.w1, L.h, L.m) = dpre * u.transpose();
            g.segment(L.b1, L.h) = dpre;
            Map(g.data() + L.w2, L.m, L.h) = f.residual * f.hidden.transpose();
            g.segment(L.b2, L.m) = f.residual;
            return g;
          },
      },
      v_);
}

Eigen::MatrixXd Potential::hessian(int n, const Eigen::VectorXd& u) const {
  if (!is_quadratic()) throw InvalidArgument(id() + " is not quadratic in q");
  check_dims(Eigen::VectorXd::Zero(n), u);
  if (input_gate(u) == 0.0) return Eigen::MatrixXd::Zero(n, n);
  return std::visit(
      overloaded{
          [&](const Zero&) -> Eigen::MatrixXd { return Eigen::MatrixXd::Zero(n, n); },
          [&](const QuadraticTracking& p) -> Eigen::MatrixXd { return p.weight; },
          [&](const LinearRegression& p) -> Eigen::MatrixXd {
            const auto x = u.head(p.features);
            return x * x.transpose();
          },
          [&](const FeatureDemo&) -> Eigen::MatrixXd { return {}; },
      },
      v_);
}

std::string Potential::id() const {
  return std::visit(
      overloaded{
          [](const Zero&) { return std::string("zero"); },
          [](const QuadraticTracking& p) {
            return "quadratic_tracking(n=" + std::to_string(p.weight.rows()) + ")";
          },
          [](const LinearRegression& p) {
            return "linear_regression(d=" + std::to_string(p.features) + ")";
          },
          [](const FeatureDemo& p) {
            return "feature_demo(m=" + std::to_string(p.input_dim) +
                   ",h=" + std::to_string(p.hidden) + "," + to_string(p.nonlinearity) + ")";
          },
      },
      v_);
}

double fd_check(const Potential& p, const Eigen::VectorXd& q, const Eigen::VectorXd& u,
                double step) {
  if (!(step > 0.0)) throw InvalidArgument("fd_check step must be > 0");
  const Eigen::VectorXd analytic = p.grad(q, u);
  double worst = 0.0;
  Eigen::VectorXd probe = q;
  for (Eigen::Index i = 0; i < q.size(); ++i) {
    const double h = step * (1.0 + std::abs(q(i)));
    probe(i) = q(i) + h;
    const double up = p.eval(probe, u);
    probe(i) = q(i) - h;
    const double down = p.eval(probe, u);
    probe(i) = q(i);
    const double central = (up - down) / (2.0 * h);
    worst = std::max(worst, std::abs(analytic(i) - central) / (1.0 + std::abs(analytic(i))));
  }
  return worst;
}

}  // namespace cal
