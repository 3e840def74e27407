// cal: config-driven experiment runner.
//
//   cal analyze --config run.json
//   cal simulate --config run.json --out results/ --step 1e-3
//   cal sweep --jobs 4 a.json b.json c.json
//
// Exit codes: 0 success, 1 configuration error, 2 numerical failure.
// CAL_LOG=trace|debug|info|warn|error|off sets log verbosity (default warn).

#include <spdlog/spdlog.h>

#include <CLI11.hpp>
#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <thread>

#include "cal/errors.hpp"
#include "cal/experiments.hpp"

namespace {

struct Overrides {
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<double> step;
};

int run_one(const std::string& path, std::optional<cal::ExperimentKind> kind,
            const Overrides& o) {
  try {
    cal::ExperimentConfig cfg = cal::load_config(path);
    if (kind) cfg.run.kind = *kind;
    if (o.out) cfg.run.output_dir = *o.out;
    if (o.seed) cfg.run.seed = *o.seed;
    if (o.step) {
      if (!(*o.step > 0.0)) throw cal::ConfigError("--step: h must be > 0");
      cfg.run.h = *o.step;
    }
    if (cfg.run.kind == cal::ExperimentKind::CompareGradientFlow && !cfg.run.thetas)
      throw cal::ConfigError(path + ": run.thetas: compare-gradient-flow needs a theta list");
    const cal::RunOutcome r = cal::run_experiment(cfg);
    return r.exit_code;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    std::cerr << "error: " << e.what() << "\n";
    return cal::exit_code_for(e);
  }
}

void configure_logging() {
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("CAL_LOG")) {
    const auto level = spdlog::level::from_str(env);
    // from_str maps unknown names to off; only accept the names it knows.
    if (level != spdlog::level::off || std::string(env) == "off") spdlog::set_level(level);
  }
}

}  // namespace

int main(int argc, char** argv) {
  configure_logging();
  CLI::App app{"Config-driven experiments for the fourth-order learning dynamics"};
  app.require_subcommand(1);

  Overrides overrides;
  std::string config_path;
  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "Experiment config (JSON)")->required();
    sub->add_option("--out", overrides.out, "Output directory (overrides run.output_dir)");
    sub->add_option("--seed", overrides.seed, "Seed (overrides run.seed)");
    sub->add_option("--step", overrides.step, "Step h (overrides run.h)");
  };

  const std::pair<const char*, cal::ExperimentKind> commands[] = {
      {"analyze", cal::ExperimentKind::Analyze},
      {"simulate", cal::ExperimentKind::Simulate},
      {"compare-gradient-flow", cal::ExperimentKind::CompareGradientFlow},
      {"action-oracle", cal::ExperimentKind::ActionOracle},
      {"reset-experiment", cal::ExperimentKind::ResetExperiment},
  };
  std::vector<std::pair<CLI::App*, cal::ExperimentKind>> subs;
  for (const auto& [name, kind] : commands) {
    CLI::App* sub = app.add_subcommand(name, std::string("Run the ") + name + " experiment");
    add_common(sub);
    subs.emplace_back(sub, kind);
  }

  std::vector<std::string> sweep_configs;
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
  CLI::App* sweep = app.add_subcommand("sweep", "Run several configs, each by its run.kind");
  sweep->add_option("configs", sweep_configs, "Config files")->required();
  sweep->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : cal::kExitConfig;
  }

  for (const auto& [sub, kind] : subs)
    if (sub->parsed()) return run_one(config_path, kind, overrides);

  // Sweep: each config writes only into its own output directory.
  std::vector<int> codes(sweep_configs.size(), 0);
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < std::min<std::size_t>(jobs, sweep_configs.size()); ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < sweep_configs.size(); i = next++)
        codes[i] = run_one(sweep_configs[i], std::nullopt, {});
    });
  for (auto& t : pool) t.join();
  int worst = 0;
  for (std::size_t i = 0; i < codes.size(); ++i) {
    std::cout << sweep_configs[i] << ": exit " << codes[i] << "\n";
    worst = std::max(worst, codes[i]);
  }
  return worst;
}
