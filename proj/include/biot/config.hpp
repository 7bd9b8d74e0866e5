#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "biot/coupling.hpp"
#include "biot/grid.hpp"
#include "biot/materials.hpp"
#include "biot/mech.hpp"

namespace biot {

/// Everything a batch run needs. See README for the YAML schema.
struct RunConfig {
  Index3 cells{1, 1, 1};
  Vec3 lengths{1.0, 1.0, 1.0};
  Vec3 origin{0.0, 0.0, 0.0};
  Index3 ratio{1, 1, 1};

  PoroInput material;        // constant coefficients; eta unused
  std::string material_csv;  // optional per-cell overrides, resolved path
  std::vector<std::string> csv_columns;  // columns found in material_csv

  EtaRule eta_rule = EtaRule::fixed_stress();
  ShearRule shear_rule = ShearRule::Harmonic;

  BoundaryTags boundary;
  Vec3 gravity{0.0, 0.0, 0.0};
  double source = 0.0;      // uniform q (1/s)
  double p_initial = 0.0;   // uniform p0 (Pa)
  SymTensor sigma0;         // in-situ stress (Pa)

  double dt = 1.0;
  double end_time = 0.0;
  double tol_c = 1e-8;
  int max_iters = 200;
  double solver_tol = 1e-10;
  int solver_max_iter = 0;

  std::string output_dir = "output";
  bool snapshots = true;
  std::string scenario = "user";

  bool operator==(const RunConfig&) const = default;
};

RunConfig default_config();

/// Parses and validates a YAML run file; unknown keys are rejected.
/// Errors are ConfigError naming the key and its line.
RunConfig parse_config(const std::filesystem::path& path);
RunConfig parse_config_text(const std::string& text, const std::filesystem::path& base_dir = ".");

//! YAML text that parses back to an equivalent RunConfig.
std::string config_to_yaml(const RunConfig& config);
void write_config(const RunConfig& config, const std::filesystem::path& path);

//! Honors BIOTSPLIT_OUTPUT_DIR when set.
void apply_environment(RunConfig& config);

/// Per-cell material table: header "cell,<column>...", one row per fine cell.
/// Recognized columns: K_b K_s G phi0 c mu kx ky kz rho0 rho_r eta q p0.
struct CellTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;  // indexed by cell

  bool has(const std::string& column) const;
  double get(std::size_t cell, const std::string& column) const;
};

CellTable read_cell_table(const std::filesystem::path& path, std::size_t expected_cells);
void write_cell_table(const std::filesystem::path& path, const std::vector<std::string>& columns,
                      const std::vector<std::vector<double>>& rows);

ProblemSpec to_problem_spec(const RunConfig& config);

CouplingOptions coupling_options(const RunConfig& config);

}  // namespace biot
