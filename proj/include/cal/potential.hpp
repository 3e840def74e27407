#pragma once

// Loss potentials U(q, u) >= 0 with U(q, 0) = 0 and analytic gradients.
//
// Every non-trivial potential is multiplied by an input-activity gate that is
// 0 exactly at u = 0 and 1 elsewhere, so a gated (zeroed) input switches the
// loss off.

#include <Eigen/Core>
#include <optional>
#include <string>
#include <variant>

namespace cal {

enum class Nonlinearity { Tanh, Logistic };

const char* to_string(Nonlinearity n);

class Potential {
 public:
  struct Zero {
    int state_dim = -1;  // -1: any
  };
  /// U = 1/2 (q - u)^T W (q - u), W symmetric positive semidefinite.
  struct QuadraticTracking {
    Eigen::MatrixXd weight;
  };
  /// u = (x_1..x_d, y), q = w in R^d: U = 1/2 (w.x - y)^2.
  struct LinearRegression {
    int features = 1;
  };
  /// One-hidden-layer autoencoder on u in R^m with q = (W1, b1, W2, b2):
  /// U = 1/2 |u - (W2 s(W1 u + b1) + b2)|^2.
  struct FeatureDemo {
    int input_dim = 1;
    int hidden = 1;
    Nonlinearity nonlinearity = Nonlinearity::Tanh;
  };

  using Variant = std::variant<Zero, QuadraticTracking, LinearRegression, FeatureDemo>;

  static Potential zero(int state_dim = -1);
  /// W = scale * I_n. Throws InvalidArgument for scale < 0.
  static Potential quadratic_tracking(int n, double scale = 1.0);
  /// Throws InvalidArgument unless W is square, symmetric and PSD.
  static Potential quadratic_tracking(Eigen::MatrixXd weight);
  static Potential linear_regression(int features);
  static Potential feature_demo(int input_dim, int hidden,
                                Nonlinearity nonlinearity = Nonlinearity::Tanh);

  /// Dimension of q, or -1 when unconstrained (Zero without a set size).
  int state_dim() const;
  /// Dimension of u, or -1 when unconstrained.
  int input_dim() const;
  /// True when U is quadratic in q (Hessian independent of q).
  bool is_quadratic() const;

  /// Throw DimensionMismatch on inconsistent sizes.
  double eval(const Eigen::VectorXd& q, const Eigen::VectorXd& u) const;
  Eigen::VectorXd grad(const Eigen::VectorXd& q, const Eigen::VectorXd& u) const;
  /// Hessian in q; only for quadratic potentials (throws InvalidArgument otherwise).
  Eigen::MatrixXd hessian(int n, const Eigen::VectorXd& u) const;

  std::string id() const;
  const Variant& variant() const { return v_; }

 private:
  explicit Potential(Variant v) : v_(std::move(v)) {}
  void check_dims(const Eigen::VectorXd& q, const Eigen::VectorXd& u) const;

  Variant v_;
};

/// 1 unless u is exactly the zero vector.
double input_gate(const Eigen::VectorXd& u);

/// max_i |analytic_i - central_i| / (1 + |analytic_i|), with per-coordinate step
/// step * (1 + |q_i|). Throws InvalidArgument for step <= 0.
double fd_check(const Potential& p, const Eigen::VectorXd& q, const Eigen::VectorXd& u,
                double step = 1e-5);

}  // namespace cal
