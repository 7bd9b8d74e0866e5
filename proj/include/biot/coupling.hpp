#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "biot/flow.hpp"
#include "biot/grid.hpp"
#include "biot/linalg.hpp"
#include "biot/materials.hpp"
#include "biot/mech.hpp"
#include "biot/transfer.hpp"

namespace biot {

/// Inputs for one coupled problem before any upscaling.
struct ProblemSpec {
  HexGrid fine_grid{{1, 1, 1}, {1.0, 1.0, 1.0}};
  Index3 ratio{1, 1, 1};
  std::vector<PoroInput> materials;
  EtaRule eta_rule;
  bool eta_from_materials = false;  // use the eta column as given
  ShearRule shear_rule = ShearRule::Harmonic;
  std::vector<double> q;            // per fine cell; empty means zero
  Vec3 gravity{0.0, 0.0, 0.0};
  SymTensor sigma0;                 // uniform in-situ stress
  std::vector<double> p_initial;    // per fine cell
};

struct Problem {
  NestedGridPair pair;
  FineMaterialField fine;
  CoarseMaterialField coarse;
  FlowLoads flow_loads;
  MechLoads mech_loads;
  std::vector<double> p_initial;
};

Problem build_problem(const ProblemSpec& spec);

struct CouplingOptions {
  double tol = 1e-8;    // on the weighted norm relative to its first-iteration value
  int max_iters = 200;
  CgOptions flow_solver;
  CgOptions mech_solver;
};

struct IterationRecord {
  int step = 0;
  int iter = 0;
  double weighted_norm = 0.0;
  double ratio = 0.0;  // NaN on the first iteration of a step
  double c1_gap = 0.0;
  double c2_gap = 0.0;
  double c1_scale = 0.0;
  double c2_scale = 0.0;
  bool c3_ok = true;
};

struct RunState {
  double t = 0.0;
  int step = 0;  // accepted steps
  int iter = 0;  // coupling iterations within the current step
  FlowState flow;
  MechState mech;
  CouplingState coupling;
  std::vector<double> sigma_bar_time;       // fine sigma_bar at the last accepted time level
  std::vector<double> sigma_bar_last_iter;  // fine sigma_bar after the previous iteration
  std::vector<IterationRecord> records;
};

struct StepReport {
  int iterations = 0;
  double first_norm = 0.0;
  double final_norm = 0.0;
  double worst_ratio = 0.0;
};

/// Staggered two-grid driver: flow on the fine grid with sigma_bar frozen,
/// then mechanics on the coarse grid with pressure frozen.
class CoupledSimulator {
 public:
  explicit CoupledSimulator(Problem problem);
  CoupledSimulator(const CoupledSimulator&) = delete;
  CoupledSimulator& operator=(const CoupledSimulator&) = delete;

  const Problem& problem() const { return *problem_; }
  double gamma() const { return gamma_; }

  RunState initial_state() const;

  /// One sweep flow -> restrict -> mech -> prolong -> sigma_bar update.
  /// Appends a record and the weighted increment norm.
  void run_coupling_iteration(RunState& run, double dt, const CouplingOptions& options);

  /// Iterates until weighted_norm_m <= tol * weighted_norm_1 (m >= 2), then
  /// accepts the new time level. Throws NonConvergenceError past max_iters.
  //! `observer`, when set, sees the state after every iteration.
  StepReport advance_time_step(RunState& run, double dt, const CouplingOptions& options,
                               const std::function<void(const RunState&)>& observer = {});

 private:
  const SparseSymMatrix& flow_matrix_for(double dt);

  std::unique_ptr<Problem> problem_;
  FlowStencil stencil_;
  MechAssembler mech_;
  double gamma_;
  std::optional<std::pair<double, SparseSymMatrix>> flow_cache_;
};

}  // namespace biot
