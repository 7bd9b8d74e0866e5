//! biotsplit: batch driver for the two-grid staggered Biot solver.

#include <cstdlib>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "biot/config.hpp"
#include "biot/error.hpp"
#include "biot/output.hpp"
#include "biot/scenarios.hpp"

namespace fs = std::filesystem;

namespace {

std::string output_dir_or(const std::string& fallback) {
  const char* env = std::getenv("BIOTSPLIT_OUTPUT_DIR");
  return env && *env ? std::string(env) : fallback;
}

int print_outcome(const biot::ScenarioOutcome& outcome) {
  for (const auto& line : outcome.lines) std::cout << "  " << line << '\n';
  std::cout << (outcome.passed ? "PASS " : "FAIL ") << outcome.name << '\n';
  return outcome.passed ? 0 : 1;
}

int cmd_run(const std::string& path) {
  biot::RunConfig cfg = biot::parse_config(path);
  biot::apply_environment(cfg);
  if (cfg.scenario != "user") {
    return print_outcome(biot::run_verification(cfg.scenario, cfg.output_dir));
  }
  const biot::SimulationResult res = biot::run_simulation(cfg);
  std::cout << fmt::format("{} steps, {} coupling iterations, gamma {:.6g}, worst ratio {:.6g}\n",
                           res.summary.steps, res.summary.total_iterations, res.summary.gamma,
                           res.summary.worst_ratio);
  std::cout << "outputs in " << cfg.output_dir << '\n';
  return 0;
}

int cmd_sweep(const std::string& path, double from, double to, int points) {
  biot::RunConfig cfg = biot::parse_config(path);
  biot::apply_environment(cfg);
  const auto rows = biot::sweep_eta(cfg, from, to, points);
  fs::create_directories(cfg.output_dir);
  biot::write_sweep_csv(fs::path(cfg.output_dir) / "sweep.csv", rows);
  std::cout << "factor gamma total_iters max_iters worst_ratio\n";
  for (const auto& r : rows)
    std::cout << fmt::format("{:.6g} {:.6g} {} {} {:.6g}\n", r.factor, r.gamma, r.total_iters, r.max_iters,
                             r.worst_ratio);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-grid staggered solver for coupled flow and geomechanics"};
  app.require_subcommand(1);

  std::string run_config;
  auto* run = app.add_subcommand("run", "Run the simulation described by a YAML config");
  run->add_option("config", run_config, "Config file")->required()->check(CLI::ExistingFile);

  std::string scenario;
  std::string verify_dir;
  auto* verify = app.add_subcommand("verify", "Run a built-in verification scenario");
  verify->add_option("scenario", scenario, "single_cell | uniaxial | eta_sweep | contraction")
      ->required()
      ->check(CLI::IsMember(biot::scenario_names()));
  verify->add_option("-o,--output", verify_dir, "Output directory (default verify_<scenario>)");

  std::string sweep_config;
  double from = 1.0;
  double to = 2.0;
  int points = 5;
  auto* sweep = app.add_subcommand("sweep-eta", "Repeat a run for eta = f K_b over a range of f");
  sweep->add_option("config", sweep_config, "Config file")->required()->check(CLI::ExistingFile);
  sweep->add_option("--from", from, "Smallest factor")->capture_default_str();
  sweep->add_option("--to", to, "Largest factor (at most 2)")->capture_default_str();
  sweep->add_option("--points", points, "Number of factors")->capture_default_str()->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(run_config);
    if (verify->parsed()) {
      const std::string dir = verify_dir.empty() ? output_dir_or("verify_" + scenario) : verify_dir;
      return print_outcome(biot::run_verification(scenario, dir));
    }
    if (sweep->parsed()) return cmd_sweep(sweep_config, from, to, points);
  } catch (const biot::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << '\n';
    return 3;
  }
  return 1;
}
