#pragma once

// Time-dependent input u(t) in R^m.

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "cal/schedule.hpp"

namespace cal {

class InputSignal {
 public:
  struct Zero {
    int dimension = 1;
  };
  /// u_j(t) = amplitude_j sin(2π frequency_j t + phase_j)
  struct Sinusoid {
    Eigen::VectorXd amplitude;
    Eigen::VectorXd frequency;
    Eigen::VectorXd phase;
  };
  /// values.row(i) holds on [breakpoints[i-1], breakpoints[i]); row 0 before the
  /// first breakpoint, the last row after the last one.
  struct PiecewiseConstant {
    std::vector<double> breakpoints;
    Eigen::MatrixXd values;
  };
  /// Sum of seeded random sinusoids with frequencies in (0, bandwidth].
  struct SmoothNoise {
    int dimension = 1;
    std::uint64_t seed = 0;
    double bandwidth = 1.0;
    Eigen::MatrixXd amplitude;  // dimension x components
    Eigen::MatrixXd frequency;
    Eigen::MatrixXd phase;
  };
  /// Linear interpolation of tabulated samples, held constant outside the table.
  struct Sampled {
    std::string source;
    std::vector<double> times;
    Eigen::MatrixXd values;  // samples x dimension
  };
  /// Input passed through only inside the A phase of a schedule.
  struct Gated {
    std::shared_ptr<const InputSignal> inner;
    Schedule schedule;
  };

  using Variant = std::variant<Zero, Sinusoid, PiecewiseConstant, SmoothNoise, Sampled, Gated>;

  static InputSignal zero(int dimension);
  static InputSignal sinusoid(Eigen::VectorXd amplitude, Eigen::VectorXd frequency,
                              Eigen::VectorXd phase);
  static InputSignal piecewise_constant(std::vector<double> breakpoints, Eigen::MatrixXd values);
  static InputSignal smooth_noise(int dimension, std::uint64_t seed, double bandwidth,
                                  int components = 16);
  static InputSignal sampled(std::vector<double> times, Eigen::MatrixXd values,
                             std::string source = "inline");
  /// Reads a delimited numeric table: time column, then one column per channel.
  /// Lines starting with '#' are ignored. Throws InvalidArgument on bad data.
  static InputSignal from_file(const std::filesystem::path& path);

  int dimension() const;
  Eigen::VectorXd operator()(double t) const;
  std::string id() const;
  const Variant& variant() const { return v_; }

 private:
  explicit InputSignal(Variant v) : v_(std::move(v)) {}
  friend InputSignal gate_input(const InputSignal& input, const Schedule& schedule);

  Variant v_;
};

/// Zero outside A (including breakpoints); the original value inside A.
InputSignal gate_input(const InputSignal& input, const Schedule& schedule);

}  // namespace cal
