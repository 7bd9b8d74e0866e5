#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "biot/config.hpp"

namespace biot {

//! single_cell, uniaxial, eta_sweep, contraction.
const std::vector<std::string>& scenario_names();

/// Configuration of a built-in scenario. Files it needs (per-cell tables)
/// are written under `dir`, which also becomes the output directory.
RunConfig scenario_config(const std::string& name, const std::filesystem::path& dir);

/// Heterogeneous 8x8x8 block on a 2x2x2 coarse grid: log-uniform K_b in
/// [0.5, 5] GPa, G = 0.6 K_b, log-uniform isotropic permeability in
/// [1e-15, 1e-13] m^2, eta = factor * K_b. Writes materials.csv into `dir`.
RunConfig heterogeneous_config(const std::filesystem::path& dir, double eta_factor, std::uint64_t seed = 20240917);

struct ScenarioOutcome {
  std::string name;
  bool passed = true;
  std::vector<std::string> lines;
};

/// Runs a built-in scenario and checks it against its closed-form or
/// analytical reference.
ScenarioOutcome run_verification(const std::string& name, const std::filesystem::path& dir);

/// Closed-form recursion for a single cell with a Dirichlet face on x_min,
/// rollers on every face but z_max, and a normal traction on z_max.
class ScalarOracle {
 public:
  struct Iterate {
    double p = 0.0;
    double eps = 0.0;
    double sigma_bar = 0.0;
    double weighted_norm = 0.0;
  };

  explicit ScalarOracle(const RunConfig& config);
  Iterate iterate();
  void accept();

 private:
  double alpha_, eta_, varphi_, stiff_, volume_, trans_, dt_;
  double q_, g_, t_z_, sigma0_zz_, p0_;
  double p_time_, sigma_time_, sigma_last_, p_last_;
};

struct SweepRow {
  double factor = 0.0;
  double gamma = 0.0;
  int total_iters = 0;
  int max_iters = 0;
  double worst_ratio = 0.0;
};

/// Reruns `base` with eta = f K_b for `points` factors evenly spaced in
/// [from, to]; each run writes into <output_dir>/eta_<index>.
std::vector<SweepRow> sweep_eta(const RunConfig& base, double from, double to, int points);
void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepRow>& rows);

}  // namespace biot
