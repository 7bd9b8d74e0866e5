#pragma once

#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "biot/config.hpp"
#include "biot/coupling.hpp"

namespace biot {

//! Column order of convergence.csv.
inline constexpr const char* kConvergenceHeader = "step,iter,weighted_norm,ratio,c1_gap,c2_gap";
//! Column order of conditions.csv.
inline constexpr const char* kConditionsHeader = "step,iter,c1_gap,c1_scale,c2_gap,c2_scale,c3_ok";

/// Formats with 17 significant digits; NaN prints as "nan".
std::string format_double(double value);

void write_convergence_csv(const std::filesystem::path& path, std::span<const IterationRecord> records);
void write_conditions_csv(const std::filesystem::path& path, std::span<const IterationRecord> records);

/// Legacy ASCII structured-points snapshot on the fine lattice. Cell data:
/// pressure, coarse volumetric strain injected to its children, prolonged
/// strain. Point data: coarse displacement interpolated to fine nodes and
/// its magnitude.
void write_vtk_snapshot(const std::filesystem::path& path, const Problem& problem, const RunState& run);

//! Per-coarse-cell moduli: cell, K_b_harmonic, K_b_effective, K_b_arithmetic, G, alpha, eta.
void write_coarse_materials(const std::filesystem::path& path, const Problem& problem);

struct SummaryInfo {
  double gamma = 0.0;
  double worst_ratio = 0.0;
  int steps = 0;
  int total_iterations = 0;
  std::string status = "ok";
};

void write_summary(const std::filesystem::path& path, const Problem& problem, const SummaryInfo& info);

/// convergence.csv, conditions.csv, summary.txt and coarse_materials.csv.
void write_outputs(const CoupledSimulator& sim, const RunState& run, const std::filesystem::path& dir,
                   const SummaryInfo& info);

//! Interpolates coarse nodal displacement to the nodes of the fine grid.
std::vector<Vec3> displacement_at_fine_nodes(const NestedGridPair& pair, std::span<const Vec3> u_coarse);

struct SimulationResult {
  RunState run;
  std::vector<StepReport> steps;
  SummaryInfo summary;
};

/// Runs round(end/dt) coupled steps and writes every artifact into
/// config.output_dir. On a failed step the partial artifacts are written and
/// the error is rethrown.
SimulationResult run_simulation(const RunConfig& config,
                                const std::function<void(const RunState&)>& observer = {});

}  // namespace biot
