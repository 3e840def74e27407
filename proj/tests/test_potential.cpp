#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "cal/errors.hpp"
#include "cal/input.hpp"
#include "cal/potential.hpp"
#include "oracles.hpp"

using namespace cal;

namespace {

Eigen::VectorXd random_vec(std::mt19937_64& rng, Eigen::Index n, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = u(rng);
  return v;
}

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

// Hand-written forward pass of the demo autoencoder: q = (W1 col-major h x m, b1, W2 col-major m x h, b2).
double demo_reference(const std::vector<double>& q, const std::vector<double>& u, int h, bool tanh_act) {
  const int m = static_cast<int>(u.size());
  std::vector<double> hidden(static_cast<std::size_t>(h));
  for (int i = 0; i < h; ++i) {
    double a = q[static_cast<std::size_t>(h * m + i)];
    for (int j = 0; j < m; ++j) a += q[static_cast<std::size_t>(j * h + i)] * u[static_cast<std::size_t>(j)];
    hidden[static_cast<std::size_t>(i)] = tanh_act ? std::tanh(a) : 1.0 / (1.0 + std::exp(-a));
  }
  double loss = 0;
  for (int r = 0; r < m; ++r) {
    double y = q[static_cast<std::size_t>(2 * h * m + h + r)];
    for (int i = 0; i < h; ++i)
      y += q[static_cast<std::size_t>(h * m + h + i * m + r)] * hidden[static_cast<std::size_t>(i)];
    loss += 0.5 * (u[static_cast<std::size_t>(r)] - y) * (u[static_cast<std::size_t>(r)] - y);
  }
  return loss;
}

std::vector<Potential> builtins() {
  Eigen::MatrixXd w(3, 3);
  w << 2, 0.5, 0, 0.5, 1, 0.2, 0, 0.2, 0.7;
  return {Potential::zero(3), Potential::quadratic_tracking(w), Potential::linear_regression(3),
          Potential::feature_demo(3, 2, Nonlinearity::Tanh),
          Potential::feature_demo(2, 3, Nonlinearity::Logistic)};
}

int state_dim_of(const Potential& p) { return p.state_dim() < 0 ? 3 : p.state_dim(); }
int input_dim_of(const Potential& p) { return p.input_dim() < 0 ? 3 : p.input_dim(); }

}  // namespace

TEST_CASE("potential examples") {
  const auto zero = Potential::zero();
  CHECK(zero.eval(Eigen::VectorXd::Constant(2, 4.0), Eigen::VectorXd::Ones(3)) == 0);
  CHECK(zero.grad(Eigen::VectorXd::Constant(2, 4.0), Eigen::VectorXd::Ones(3)).isZero());

  const auto lr = Potential::linear_regression(1);
  const Eigen::VectorXd w = Eigen::VectorXd::Constant(1, 3.0);
  const Eigen::Vector2d xy(1.0, 2.0);
  CHECK(lr.eval(w, xy) == doctest::Approx(0.5));
  CHECK(lr.grad(w, xy)(0) == doctest::Approx(1.0));
  CHECK(lr.eval(w, Eigen::Vector2d::Zero()) == 0);

  const auto qt = Potential::quadratic_tracking(2, 1.0);
  const Eigen::Vector2d target(0.3, -0.2);
  CHECK(qt.eval(target, target) == doctest::Approx(0).scale(1));
  CHECK(qt.grad(target, target).norm() < 1e-15);
  CHECK(fd_check(zero, Eigen::VectorXd::Ones(2), Eigen::VectorXd::Ones(2)) == 0);
}

TEST_CASE("potential dimension and construction errors") {
  CHECK_THROWS_AS(Potential::linear_regression(2).eval(Eigen::VectorXd::Ones(3), Eigen::VectorXd::Ones(3)),
                  DimensionMismatch);
  CHECK_THROWS_AS(Potential::quadratic_tracking(2).grad(Eigen::VectorXd::Ones(2), Eigen::VectorXd::Ones(3)),
                  DimensionMismatch);
  Eigen::MatrixXd asym(2, 2);
  asym << 1, 2, 0, 1;
  CHECK_THROWS_AS(Potential::quadratic_tracking(asym), InvalidArgument);
  Eigen::MatrixXd indefinite(2, 2);
  indefinite << 1, 0, 0, -1;
  CHECK_THROWS_AS(Potential::quadratic_tracking(indefinite), InvalidArgument);
  CHECK_THROWS_AS(fd_check(Potential::zero(), Eigen::VectorXd::Ones(1), Eigen::VectorXd::Ones(1), 0.0),
                  InvalidArgument);
  CHECK(Potential::feature_demo(3, 2).state_dim() == 2 * 2 * 3 + 2 + 3);
  CHECK(Potential::quadratic_tracking(2).is_quadratic());
  CHECK_FALSE(Potential::feature_demo(1, 1).is_quadratic());
}

TEST_CASE("potentials are nonnegative and vanish on zero input") {
  std::mt19937_64 rng(20);
  for (const auto& p : builtins()) {
    for (int i = 0; i < 1000; ++i) {
      const auto q = random_vec(rng, state_dim_of(p), 2.0);
      const auto u = random_vec(rng, input_dim_of(p), 2.0);
      CHECK(p.eval(q, u) >= 0);
      CHECK(p.eval(q, Eigen::VectorXd::Zero(input_dim_of(p))) == 0);
      CHECK(p.grad(q, Eigen::VectorXd::Zero(input_dim_of(p))).isZero());
    }
  }
}

TEST_CASE("analytic gradients match central differences") {
  std::mt19937_64 rng(21);
  for (const auto& p : builtins()) {
    CAPTURE(p.id());
    double worst = 0;
    for (int i = 0; i < 100; ++i) {
      const auto q = random_vec(rng, state_dim_of(p));
      const auto u = random_vec(rng, input_dim_of(p));
      const auto fd = oracle::central_gradient(
          [&](const std::vector<double>& x) {
            return p.eval(Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size())), u);
          },
          to_std(q));
      const Eigen::VectorXd g = p.grad(q, u);
      for (Eigen::Index j = 0; j < g.size(); ++j)
        worst = std::max(worst, std::abs(g(j) - fd[static_cast<std::size_t>(j)]) / (1 + std::abs(g(j))));
      CHECK(fd_check(p, q, u) < 1e-6);
    }
    CHECK(worst < 1e-6);
  }
}

TEST_CASE("feature demo loss matches a hand-written forward pass") {
  std::mt19937_64 rng(22);
  for (bool tanh_act : {true, false}) {
    const auto p = Potential::feature_demo(3, 4, tanh_act ? Nonlinearity::Tanh : Nonlinearity::Logistic);
    for (int i = 0; i < 50; ++i) {
      const auto q = random_vec(rng, p.state_dim());
      const auto u = random_vec(rng, 3);
      CHECK(p.eval(q, u) == doctest::Approx(demo_reference(to_std(q), to_std(u), 4, tanh_act)).epsilon(1e-13));
    }
  }
}

TEST_CASE("quadratic potentials report a constant Hessian") {
  std::mt19937_64 rng(23);
  Eigen::MatrixXd w(2, 2);
  w << 2, 0.5, 0.5, 1;
  const auto p = Potential::quadratic_tracking(w);
  const Eigen::VectorXd u = random_vec(rng, 2);
  CHECK(p.hessian(2, u).isApprox(w));
  CHECK(p.hessian(2, Eigen::VectorXd::Zero(2)).isZero());
  const auto lr = Potential::linear_regression(2);
  const Eigen::Vector3d xy(1.0, -2.0, 0.5);
  Eigen::MatrixXd expect(2, 2);
  expect << 1, -2, -2, 4;
  CHECK(lr.hessian(2, xy).isApprox(expect));
  CHECK_THROWS_AS(Potential::feature_demo(1, 1).hessian(3, Eigen::VectorXd::Ones(1)), InvalidArgument);
}

TEST_CASE("potential evaluation is deterministic") {
  std::mt19937_64 rng(24);
  for (const auto& p : builtins()) {
    const auto q = random_vec(rng, state_dim_of(p));
    const auto u = random_vec(rng, input_dim_of(p));
    CHECK(p.eval(q, u) == p.eval(q, u));
    CHECK(p.grad(q, u) == p.grad(q, u));
  }
}

TEST_CASE("input signals") {
  const auto zero = InputSignal::zero(2);
  CHECK(zero(3.0).isZero());
  CHECK(zero.dimension() == 2);

  const auto sine = InputSignal::sinusoid(Eigen::Vector2d(2, 1), Eigen::Vector2d(0.25, 1), Eigen::Vector2d(0, 0.5));
  CHECK(sine(1.0)(0) == doctest::Approx(2 * std::sin(2 * M_PI * 0.25)));
  CHECK(sine(1.0)(1) == doctest::Approx(std::sin(2 * M_PI + 0.5)));

  Eigen::MatrixXd values(3, 1);
  values << 1, 2, 3;
  const auto pc = InputSignal::piecewise_constant({1.0, 2.0}, values);
  CHECK(pc(0.5)(0) == 1);
  CHECK(pc(1.5)(0) == 2);
  CHECK(pc(7.0)(0) == 3);

  const auto noise_a = InputSignal::smooth_noise(2, 9, 0.5);
  const auto noise_b = InputSignal::smooth_noise(2, 9, 0.5);
  const auto noise_c = InputSignal::smooth_noise(2, 10, 0.5);
  CHECK(noise_a(0.37) == noise_b(0.37));
  CHECK(noise_a(0.37) != noise_c(0.37));

  Eigen::MatrixXd samples(2, 1);
  samples << 0, 4;
  const auto table = InputSignal::sampled({0.0, 2.0}, samples);
  CHECK(table(0.5)(0) == doctest::Approx(1.0));
  CHECK(table(-1.0)(0) == 0);
  CHECK(table(5.0)(0) == 4);
}

TEST_CASE("input tables from file") {
  const auto dir = std::filesystem::temp_directory_path() / "cal_input_test";
  std::filesystem::create_directories(dir);
  const auto good = dir / "good.txt";
  std::ofstream(good) << "# t u1 u2\n0, 0, 1\n1; 2; 3\n2\t4\t5\n";
  const auto in = InputSignal::from_file(good);
  CHECK(in.dimension() == 2);
  CHECK(in(0.5)(0) == doctest::Approx(1.0));
  CHECK(in(1.5)(1) == doctest::Approx(4.0));
  CHECK(in(9.0)(1) == 5);

  const auto bad = dir / "bad.txt";
  std::ofstream(bad) << "0 1\n1 x\n";
  CHECK_THROWS_AS(InputSignal::from_file(bad), InvalidArgument);
  const auto unsorted = dir / "unsorted.txt";
  std::ofstream(unsorted) << "0 1\n0 2\n";
  CHECK_THROWS_AS(InputSignal::from_file(unsorted), InvalidArgument);
  CHECK_THROWS(InputSignal::from_file(dir / "missing.txt"));
}
