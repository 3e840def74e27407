#pragma once

// Experiment configuration: a JSON document with sections parameters,
// potential, input, schedule (optional) and run. Unknown keys are rejected.
//
// Example:
//   {
//     "parameters": {"derived": {"theta": 2, "mu": 1, "nu": 1, "gamma": 1, "k": 0.2}},
//     "potential": {"kind": "quadratic_tracking", "dimension": 2, "scale": 1},
//     "input": {"kind": "sinusoid", "amplitude": [1, 0.5], "frequency": [0.5, 1]},
//     "schedule": {"period_A": 4, "period_B": 1, "count": 2,
//                  "b_phase": {"kind": "adaptive", "epsilon": 0.05}},
//     "run": {"kind": "simulate", "T": 10, "h": 0.001, "cauchy": {"q0": [0.5, -0.5]}}
//   }

#include <cstdint>
#include <filesystem>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "cal/input.hpp"
#include "cal/overload.hpp"
#include "cal/params.hpp"
#include "cal/potential.hpp"

namespace cal {

enum class ExperimentKind { Analyze, Simulate, CompareGradientFlow, ActionOracle, ResetExperiment };

/// CLI spelling: analyze, simulate, compare-gradient-flow, action-oracle, reset-experiment.
const char* to_string(ExperimentKind kind);
/// Throws ConfigError for an unknown name.
ExperimentKind parse_experiment_kind(const std::string& name);

using Matrix = std::vector<std::vector<double>>;

struct ParametersSpec {
  std::optional<RawParameters> raw;
  std::optional<CALParameters> derived;
  bool operator==(const ParametersSpec&) const = default;
};

/// kind: zero | quadratic_tracking | linear_regression | feature_demo
struct PotentialSpec {
  std::string kind = "zero";
  std::optional<int> dimension;
  std::optional<Matrix> weight;
  std::optional<double> scale;
  std::optional<int> features;
  std::optional<int> input_dim;
  std::optional<int> hidden;
  std::optional<std::string> nonlinearity;
  bool operator==(const PotentialSpec&) const = default;
};

/// kind: zero | sinusoid | piecewise_constant | smooth_noise | file
struct InputSpec {
  std::string kind = "zero";
  std::optional<int> dimension;
  std::optional<std::vector<double>> amplitude;
  std::optional<std::vector<double>> frequency;
  std::optional<std::vector<double>> phase;
  std::optional<std::vector<double>> breakpoints;
  std::optional<Matrix> values;
  std::optional<std::uint64_t> seed;
  std::optional<double> bandwidth;
  std::optional<int> components;
  std::optional<std::string> path;
  bool operator==(const InputSpec&) const = default;
};

/// kind: fixed_rho | adaptive | explicit
struct BPhaseSpec {
  std::string kind = "fixed_rho";
  std::optional<double> rho;
  std::optional<double> gamma_bar;
  std::optional<double> epsilon;
  std::optional<bool> linear_bound;
  std::optional<CALParameters> parameters;
  bool operator==(const BPhaseSpec&) const = default;
};

/// Either an explicit breakpoint list or the (period_A, period_B, count) generator.
struct ScheduleSpec {
  std::optional<std::vector<double>> breakpoints;
  std::optional<double> period_a;
  std::optional<double> period_b;
  std::optional<int> count;
  BPhaseSpec b_phase;
  std::string reset_mode = "simulate_b";  // simulate_b | hard_reset
  std::optional<std::string> tail;        // "A" | "B"; checked against the breakpoints
  bool operator==(const ScheduleSpec&) const = default;
};

struct CauchySpec {
  std::optional<std::vector<double>> q0, q1, q2, q3;
  /// q0 drawn uniformly from [-scale, scale] with the run seed when q0 is absent.
  std::optional<double> q0_random_scale;
  std::optional<int> dimension;
  bool operator==(const CauchySpec&) const = default;
};

struct RunSpec {
  ExperimentKind kind = ExperimentKind::Simulate;
  double T = 1.0;
  double h = 1e-3;
  CauchySpec cauchy;
  std::uint64_t seed = 0;
  std::string output_dir = "out";
  std::optional<std::vector<double>> thetas;  // compare-gradient-flow
  std::optional<int> xi;                      // compare-gradient-flow: +1 or -1
  std::optional<double> eta;                  // compare-gradient-flow: Euler step
  std::optional<int> trials;                  // reset-experiment harness
  std::optional<std::vector<double>> rhos;    // reset-experiment harness
  std::optional<double> b_duration;           // reset-experiment harness
  bool operator==(const RunSpec&) const = default;
};

struct ExperimentConfig {
  ParametersSpec parameters;
  PotentialSpec potential;
  InputSpec input;
  std::optional<ScheduleSpec> schedule;
  RunSpec run;
  /// Directory relative input paths are resolved against; not part of equality.
  std::filesystem::path base_dir = ".";

  bool operator==(const ExperimentConfig& o) const {
    return parameters == o.parameters && potential == o.potential && input == o.input &&
           schedule == o.schedule && run == o.run;
  }
};

/// Throws ConfigError ("<source>:<line>: <field>: <message>").
ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = ".",
                              const std::string& source = "config");
ExperimentConfig load_config(const std::filesystem::path& path);

/// Canonical echo; parse_config(to_json(c).dump()) == c.
nlohmann::ordered_json to_json(const ExperimentConfig& config);

/// Derived parameters (from the raw block when present).
CALParameters resolve_parameters(const ExperimentConfig& config);
Potential build_potential(const PotentialSpec& spec);
InputSignal build_input(const InputSpec& spec, const std::filesystem::path& base_dir);
/// All-A schedule over [0, T] when the spec is absent.
Schedule build_schedule(const std::optional<ScheduleSpec>& spec, double T);
ScheduleControl build_control(const ScheduleSpec& spec, const CALParameters& a_phase);
/// Dimension from q0, then cauchy.dimension, then the potential, then 1.
CauchyData build_cauchy(const ExperimentConfig& config, const Potential& potential);

}  // namespace cal
