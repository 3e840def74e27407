#include "cal/experiments.hpp"

#include <spdlog/spdlog.h>

#include <chrono>
#include <cmath>
#include <random>

#include "cal/action_oracle.hpp"
#include "cal/charpoly.hpp"
#include "cal/errors.hpp"
#include "cal/trajectory_io.hpp"

namespace cal {

using ojson = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

ojson params_json(const CALParameters& p) {
  return {{"theta", p.theta}, {"mu", p.mu}, {"nu", p.nu}, {"gamma", p.gamma}, {"k", p.k}};
}

ojson vec_json(const Eigen::VectorXd& v) {
  ojson a = ojson::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

ojson state_json(const State& s) {
  return {{"t", s.t}, {"q", vec_json(s.q)}, {"dq", vec_json(s.dq)}, {"d2q", vec_json(s.d2q)},
          {"d3q", vec_json(s.d3q)}};
}

ojson residual_json(const BoundaryResidual& r) {
  return {{"r1_norm", r.r1_norm},
          {"r2_norm", r.r2_norm},
          {"scale", r.scale},
          {"r1_normalized", r.r1_normalized},
          {"r2_normalized", r.r2_normalized}};
}

ojson base_report(const ExperimentConfig& c) {
  ojson r;
  r["schema_version"] = kReportSchemaVersion;
  r["kind"] = to_string(c.run.kind);
  r["config"] = to_json(c);
  return r;
}

ojson polynomial_json(const CALParameters& p) {
  const QuarticCoefficients qc = cal_to_charpoly(p);
  const DepressedQuartic dq = depress(qc);
  const RootSet rs = roots(qc);
  ojson r;
  r["charpoly"] = {{"b", qc.b}, {"c", qc.c}, {"d", qc.d}, {"e", qc.e}};
  r["hurwitz_stable"] = routh_hurwitz_stable(qc);
  r["depressed"] = {{"q", dq.q}, {"r", dq.r}, {"s", dq.s}, {"discriminant", dq.delta}};
  r["reality_class"] = std::string(to_string(classify_reality(dq)));
  ojson list = ojson::array();
  for (const auto& z : rs.roots) list.push_back({z.real(), z.imag()});
  r["roots"] = list;
  r["max_real_part"] = rs.max_real();
  return r;
}

// Report entry for a trajectory: files plus boundary residual and action.
ojson trajectory_report(const fs::path& dir, const std::string& stem, const Trajectory& traj,
                        const CALParameters& p, const Potential& pot, const InputSignal& input) {
  ojson r;
  r["csv"] = stem + ".csv";
  r["sha256"] = write_trajectory(dir, stem, traj);
  write_plot_data(dir / "plots", stem, traj);
  r["samples"] = traj.size();
  r["final_state"] = state_json(traj.back());
  r["boundary_residual"] = residual_json(boundary_residual(traj, p));
  const double rescaled = action_value_rescaled(traj, p, pot, input);
  r["action_rescaled"] = rescaled;
  const double full = action_value(traj, p, pot, input);
  if (std::isfinite(full)) r["action"] = full;
  return r;
}

ojson reset_events_json(const std::vector<ResetEvent>& events) {
  ojson a = ojson::array();
  for (const auto& e : events)
    a.push_back({{"index", e.index},
                 {"t_entry", e.t_entry},
                 {"t_exit", e.t_exit},
                 {"rho", e.rho},
                 {"entry_derivative_max", e.entry_derivative_max},
                 {"bound", e.bound},
                 {"drift", e.drift},
                 {"exit_derivative_max", e.exit_derivative_max},
                 {"entry", state_json(e.entry)},
                 {"exit", state_json(e.exit)}});
  return a;
}

struct Problem {
  CALParameters params;
  Potential potential;
  InputSignal input;
  CauchyData cauchy;
};

Problem load_problem(const ExperimentConfig& c) {
  Problem p{resolve_parameters(c), build_potential(c.potential), build_input(c.input, c.base_dir),
            {}};
  p.cauchy = build_cauchy(c, p.potential);
  return p;
}

fs::path output_dir(const ExperimentConfig& c) {
  fs::path dir(c.run.output_dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const NonFinite*>(&e) || dynamic_cast<const SingularSystem*>(&e) ||
      dynamic_cast<const ConfluentRoots*>(&e))
    return kExitNumerical;
  return kExitConfig;
}

RunOutcome cmd_analyze(const ExperimentConfig& c) {
  RunOutcome out{base_report(c)};
  const CALParameters p = resolve_parameters(c);
  out.report["parameters"] = params_json(p);
  out.report.update(polynomial_json(p));
  if (c.parameters.raw) {
    const RawParameters& raw = *c.parameters.raw;
    out.report["coercive"] = coercivity_ok(p, raw);
    out.report["proposition_conditions"] =
        proposition_ok(raw.theta, p.mu, p.nu, raw.gamma1, raw.gamma2, raw.k);
  }
  return out;
}

RunOutcome cmd_simulate(const ExperimentConfig& c) {
  RunOutcome out{base_report(c)};
  const Problem pb = load_problem(c);
  const fs::path dir = output_dir(c);
  out.report["parameters"] = params_json(pb.params);
  out.report["hurwitz_stable"] = routh_hurwitz_stable(cal_to_charpoly(pb.params));
  try {
    if (c.schedule) {
      const Schedule sched = build_schedule(c.schedule, c.run.T);
      const ScheduledRun run = simulate_with_schedule(build_control(*c.schedule, pb.params), sched,
                                                      pb.potential, pb.input, pb.cauchy, c.run.h);
      const InputSignal gated = gate_input(pb.input, sched);
      out.report["trajectory"] =
          trajectory_report(dir, "trajectory", run.trajectory, pb.params, pb.potential, gated);
      out.report["resets"] = reset_events_json(run.resets);
    } else {
      const Trajectory traj =
          integrate(pb.params, pb.potential, pb.input, pb.cauchy, c.run.T, c.run.h);
      out.report["trajectory"] =
          trajectory_report(dir, "trajectory", traj, pb.params, pb.potential, pb.input);
    }
    out.report["status"] = "ok";
  } catch (const NonFinite& e) {
    spdlog::error("{}", e.what());
    out.report["status"] = "non_finite";
    out.report["blow_up_time"] = e.time();
    out.report["max_root_real_part"] = roots(cal_to_charpoly(pb.params)).max_real();
    out.exit_code = kExitNumerical;
  }
  return out;
}

RunOutcome cmd_compare_gradient_flow(const ExperimentConfig& c) {
  RunOutcome out{base_report(c)};
  const Problem pb = load_problem(c);
  const fs::path dir = output_dir(c);
  const double k = pb.params.k;
  const int xi = c.run.xi.value_or(1);
  const Eigen::VectorXd& q0 = pb.cauchy.q0;
  const Eigen::VectorXd& q1 = pb.cauchy.q1;

  const Trajectory flow = integrate_pure_gradient_flow(k, pb.potential, pb.input, q0, c.run.T, c.run.h);
  write_trajectory(dir, "gradient_flow", flow);
  write_plot_data(dir / "plots", "gradient_flow", flow);

  // With U = 0 the limit flow is q0 e^{-k t}.
  const bool exact_available = pb.potential.variant().index() == 0;
  ojson rows = ojson::array();
  std::vector<double> distances;
  for (double theta : *c.run.thetas) {
    const GradientFlowMode mode = gradient_flow_params(theta, k, xi);
    const Trajectory reduced =
        integrate_gradient_flow(mode, pb.potential, pb.input, q0, q1, c.run.T, c.run.h);
    const double dist = reduced.sup_distance(flow);
    distances.push_back(dist);
    ojson row{{"theta", theta}, {"xi", xi}, {"sup_distance_to_flow", dist}};
    if (exact_available) {
      double exact = 0.0;
      for (const State& s : reduced.samples)
        exact = std::max(exact, (s.q - q0 * std::exp(-k * s.t)).cwiseAbs().maxCoeff());
      row["sup_distance_to_exact"] = exact;
    }
    const std::string stem = "reduced_theta_" + format_double(theta);
    write_trajectory(dir, stem, reduced);
    write_plot_data(dir / "plots", stem, reduced);
    rows.push_back(row);
  }
  out.report["k"] = k;
  out.report["runs"] = rows;
  if (distances.size() > 1) {
    bool monotone = true;
    for (std::size_t i = 1; i < distances.size(); ++i)
      monotone = monotone && distances[i] < distances[i - 1];
    out.report["monotone_decrease"] = monotone;
    if (!monotone) {
      spdlog::error("distances to the gradient flow do not decrease along the theta list");
      out.exit_code = kExitNumerical;
    }
  }
  return out;
}

RunOutcome cmd_action_oracle(const ExperimentConfig& c) {
  RunOutcome out{base_report(c)};
  const Problem pb = load_problem(c);
  if (!pb.potential.is_quadratic())
    throw ConfigError("potential.kind: the action oracle needs a potential quadratic in q, got " +
                      pb.potential.id());
  const fs::path dir = output_dir(c);
  const DiscreteActionResult oracle = minimize_discrete_action(
      pb.params, pb.potential, pb.input, pb.cauchy.q0, pb.cauchy.q1, c.run.T, c.run.h);
  const State& seed = oracle.trajectory.front();
  const CauchyData cauchy = CauchyData::from(pb.cauchy.q0, pb.cauchy.q1, seed.d2q, seed.d3q);
  const Trajectory ode = integrate(pb.params, pb.potential, pb.input, cauchy, c.run.T, c.run.h);

  out.report["parameters"] = params_json(pb.params);
  out.report["oracle"] =
      trajectory_report(dir, "oracle", oracle.trajectory, pb.params, pb.potential, pb.input);
  out.report["oracle"]["discrete_action_rescaled"] = oracle.action_rescaled;
  out.report["ode"] = trajectory_report(dir, "ode", ode, pb.params, pb.potential, pb.input);
  out.report["sup_distance"] = ode.sup_distance(oracle.trajectory);
  return out;
}

RunOutcome cmd_reset_experiment(const ExperimentConfig& c) {
  if (!c.schedule) throw ConfigError("schedule: reset-experiment needs a schedule section");
  RunOutcome out{base_report(c)};
  const Problem pb = load_problem(c);
  const fs::path dir = output_dir(c);
  const Schedule sched = build_schedule(c.schedule, c.run.T);
  const InputSignal gated = gate_input(pb.input, sched);

  ScheduleControl simulate = build_control(*c.schedule, pb.params);
  simulate.mode = ResetMode::SimulateB;
  ScheduleControl hard = simulate;
  hard.mode = ResetMode::HardReset;

  out.report["parameters"] = params_json(pb.params);
  try {
    const ScheduledRun sim =
        simulate_with_schedule(simulate, sched, pb.potential, pb.input, pb.cauchy, c.run.h);
    const ScheduledRun rst =
        simulate_with_schedule(hard, sched, pb.potential, pb.input, pb.cauchy, c.run.h);
    out.report["simulate_b"] =
        trajectory_report(dir, "simulate_b", sim.trajectory, pb.params, pb.potential, gated);
    out.report["simulate_b"]["resets"] = reset_events_json(sim.resets);
    out.report["hard_reset"] =
        trajectory_report(dir, "hard_reset", rst.trajectory, pb.params, pb.potential, gated);
    out.report["hard_reset"]["resets"] = reset_events_json(rst.resets);

    ojson gaps = ojson::array();
    double worst = 0.0;
    for (std::size_t i = 0; i < sim.resets.size(); ++i) {
      const double gap = (sim.resets[i].exit.q - rst.resets[i].exit.q).cwiseAbs().maxCoeff();
      worst = std::max(worst, gap);
      gaps.push_back(gap);
    }
    out.report["exit_gaps"] = gaps;
    out.report["max_exit_gap"] = worst;
    out.report["status"] = "ok";
  } catch (const NonFinite& e) {
    spdlog::error("{}", e.what());
    out.report["status"] = "non_finite";
    out.report["blow_up_time"] = e.time();
    out.exit_code = kExitNumerical;
    return out;
  }

  // Random-entry harness on a single B interval.
  const int trials = c.run.trials.value_or(0);
  if (trials > 0) {
    const double duration = c.run.b_duration.value_or(1.0);
    const double eps = c.schedule->b_phase.epsilon.value_or(0.05);
    const std::vector<double> rhos = c.run.rhos.value_or(std::vector<double>{5, 10, 20, 40});
    const int n = pb.cauchy.q0.size();
    const double C = design_reset_coefficients(1.0).vandermonde_bound;
    std::mt19937_64 rng(c.run.seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    const auto draw = [&] {
      Eigen::VectorXd v(n);
      for (int i = 0; i < n; ++i) v(i) = unit(rng);
      return v;
    };
    int monotone = 0;
    int sqrt_ok = 0;
    int linear_ok = 0;
    double worst_ratio = 0.0;
    for (int t = 0; t < trials; ++t) {
      State entry{0.0, draw(), draw(), draw(), draw()};
      const double M = entry.max_abs_derivative();
      double prev = INFINITY;
      bool decreasing = true;
      for (double rho : rhos) {
        const State exit = b_phase_exit(design_reset_coefficients(rho).b_phase, entry, duration);
        const double norm = exit.max_abs_derivative();
        decreasing = decreasing && norm < prev;
        prev = norm;
      }
      monotone += decreasing ? 1 : 0;
      if (M > 0.0) worst_ratio = std::max(worst_ratio, prev / M);
      const auto drift = [&](double rho) {
        const State exit = b_phase_exit(design_reset_coefficients(rho).b_phase, entry, duration);
        return (exit.q - entry.q).cwiseAbs().maxCoeff();
      };
      sqrt_ok += drift(rho_for_epsilon(eps, entry, C)) < eps ? 1 : 0;
      linear_ok += drift(rho_for_epsilon_linear(eps, entry, C)) < eps ? 1 : 0;
    }
    out.report["harness"] = {{"trials", trials},
                             {"b_duration", duration},
                             {"rhos", rhos},
                             {"epsilon", eps},
                             {"C", C},
                             {"decay_monotone_trials", monotone},
                             {"decay_worst_ratio_at_last_rho", worst_ratio},
                             {"latching_trials_sqrt_bound", sqrt_ok},
                             {"latching_trials_linear_bound", linear_ok}};
  }
  return out;
}

RunOutcome run_experiment(const ExperimentConfig& c) {
  const auto start = std::chrono::steady_clock::now();
  RunOutcome out;
  switch (c.run.kind) {
    case ExperimentKind::Analyze: out = cmd_analyze(c); break;
    case ExperimentKind::Simulate: out = cmd_simulate(c); break;
    case ExperimentKind::CompareGradientFlow: out = cmd_compare_gradient_flow(c); break;
    case ExperimentKind::ActionOracle: out = cmd_action_oracle(c); break;
    case ExperimentKind::ResetExperiment: out = cmd_reset_experiment(c); break;
  }
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const fs::path dir = output_dir(c);
  write_text(dir / "report.json", out.report.dump(2) + "\n");
  write_text(dir / "timing.json", ojson{{"wall_seconds", wall}}.dump(2) + "\n");
  spdlog::info("{}: wrote {}", to_string(c.run.kind), (dir / "report.json").string());
  return out;
}

}  // namespace cal
