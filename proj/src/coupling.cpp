#include "biot/coupling.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "biot/error.hpp"

namespace biot {

Problem build_problem(const ProblemSpec& spec) {
  NestedGridPair pair = nest(spec.fine_grid, spec.ratio);
  const std::size_t n = pair.fine.num_cells();
  if (spec.materials.size() != n)
    throw InvalidMaterialError("expected " + std::to_string(n) + " material cells, got " +
                               std::to_string(spec.materials.size()));
  std::vector<PoroInput> raw = spec.materials;
  if (!spec.eta_from_materials) assign_eta(raw, spec.eta_rule);
  FineMaterialField fine = derive_fine_coefficients(raw);
  const EtaRule rule = spec.eta_from_materials ? EtaRule::custom(std::numeric_limits<double>::quiet_NaN())
                                               : spec.eta_rule;
  CoarseMaterialField coarse = upscale_coarse_props(pair, fine, rule, spec.shear_rule);

  std::vector<double> p_initial = spec.p_initial;
  if (p_initial.empty()) p_initial.assign(n, 0.0);
  if (p_initial.size() != n) throw Error("initial pressure must be given per fine cell");

  FlowLoads flow_loads{spec.q, spec.gravity};
  if (!flow_loads.q.empty() && flow_loads.q.size() != n) throw Error("source must be given per fine cell");

  MechLoads mech_loads;
  if (spec.gravity != Vec3{0.0, 0.0, 0.0}) {
    mech_loads.body_force.resize(n);
    for (std::size_t f = 0; f < n; ++f) mech_loads.body_force[f] = fine[f].body_force(spec.gravity);
  }
  if (!(spec.sigma0 == SymTensor{}))
    mech_loads.in_situ.assign(pair.coarse.num_cells(), InSituStress::from_tensor(spec.sigma0));
  mech_loads.p0_restricted = restrict_pressure(pair, fine, coarse, p_initial);

  return Problem{std::move(pair), std::move(fine), std::move(coarse), std::move(flow_loads),
                 std::move(mech_loads), std::move(p_initial)};
}

CoupledSimulator::CoupledSimulator(Problem problem)
    : problem_(std::make_unique<Problem>(std::move(problem))),
      stencil_(build_flow_stencil(problem_->pair.fine, problem_->fine, problem_->flow_loads.gravity)),
      mech_(problem_->pair, problem_->coarse, problem_->mech_loads),
      gamma_(contraction_constant(problem_->fine)) {}

RunState CoupledSimulator::initial_state() const {
  const Problem& pb = *problem_;
  RunState run;
  run.flow = FlowState::uniform(pb.pair.fine, pb.p_initial);
  run.mech = MechState::zero(pb.pair.coarse);
  update_sigma_bar(pb.pair, pb.fine, pb.coarse, run.flow, run.mech, run.coupling);
  run.sigma_bar_time = run.coupling.sigma_bar_fine;
  run.sigma_bar_last_iter = run.coupling.sigma_bar_fine;
  return run;
}

const SparseSymMatrix& CoupledSimulator::flow_matrix_for(double dt) {
  if (!flow_cache_ || flow_cache_->first != dt)
    flow_cache_.emplace(dt, flow_matrix(stencil_, problem_->pair.fine, problem_->fine, dt));
  return flow_cache_->second;
}

namespace {

[[noreturn]] void abort_non_finite(const RunState& run, const char* what, std::span<const double> field) {
  std::ostringstream os;
  os << "non-finite " << what << " at step " << run.step + 1 << ", iteration " << run.iter;
  for (std::size_t i = 0; i < field.size(); ++i)
    if (!std::isfinite(field[i])) {
      os << " (first bad entry " << i << " = " << field[i] << ")";
      break;
    }
  throw StepError(os.str());
}

}  // namespace

void CoupledSimulator::run_coupling_iteration(RunState& run, double dt, const CouplingOptions& options) {
  const Problem& pb = *problem_;
  const NestedGridPair& pair = pb.pair;
  const std::size_t nf = pair.fine.num_cells();
  ++run.iter;

  std::vector<double> sigma_change(nf);
  for (std::size_t f = 0; f < nf; ++f) sigma_change[f] = run.sigma_bar_last_iter[f] - run.sigma_bar_time[f];
  const std::vector<double> residual = flow_residual(stencil_, pair.fine, pb.fine, run.flow.p_prev_time, run.flow.p,
                                                    sigma_change, dt, pb.flow_loads);
  const std::vector<double> dp =
      apply_flow_correction(flow_matrix_for(dt), residual, stencil_, pair.fine, run.flow, options.flow_solver);

  const std::vector<double> p_restricted = restrict_pressure(pair, pb.fine, pb.coarse, run.flow.p);
  const MechIncrement inc = solve_mech_step(mech_, p_restricted, pair.coarse, run.mech, options.mech_solver);

  update_sigma_bar(pair, pb.fine, pb.coarse, run.flow, run.mech, run.coupling);

  // The increment is formed from the solve corrections rather than by
  // differencing absolute sigma_bar, which carries the large p0 offset.
  const std::vector<double> prolonged = prolong_strain(pair, pb.fine, pb.coarse, inc.d_eps);
  const double vf = pair.fine.cell_volume();
  double norm = 0.0;
  for (std::size_t f = 0; f < nf; ++f) {
    const double d = pb.fine[f].eta * prolonged[f] - pb.fine[f].alpha * dp[f];
    norm += d * d * vf / pb.fine[f].eta;
  }
  if (!std::isfinite(norm)) abort_non_finite(run, "sigma_bar increment", run.coupling.sigma_bar_fine);

  const ConditionReport cond = verify_conditions(pair, pb.fine, pb.coarse, dp, inc.d_eps, inc.d_eps_sq);

  IterationRecord rec;
  rec.step = run.step + 1;
  rec.iter = run.iter;
  rec.weighted_norm = norm;
  rec.ratio = std::numeric_limits<double>::quiet_NaN();
  if (run.iter >= 2) {
    const double prev = run.coupling.increment_history.back();
    rec.ratio = prev > 0.0 ? norm / prev : 0.0;
  }
  rec.c1_gap = cond.c1_gap;
  rec.c2_gap = cond.c2_gap;
  rec.c1_scale = cond.c1_scale;
  rec.c2_scale = cond.c2_scale;
  rec.c3_ok = cond.c3_ok;
  run.records.push_back(rec);
  run.coupling.increment_history.push_back(norm);
  run.sigma_bar_last_iter = run.coupling.sigma_bar_fine;
}

StepReport CoupledSimulator::advance_time_step(RunState& run, double dt, const CouplingOptions& options,
                                               const std::function<void(const RunState&)>& observer) {
  if (!(dt > 0.0)) throw StepError("time step must be positive");
  if (!(options.tol > 0.0 && options.tol < 1.0)) throw StepError("coupling tolerance must lie in (0,1)");
  run.iter = 0;
  run.coupling.increment_history.clear();
  StepReport report;
  while (true) {
    run_coupling_iteration(run, dt, options);
    if (observer) observer(run);
    const IterationRecord& rec = run.records.back();
    if (rec.iter == 1) report.first_norm = rec.weighted_norm;
    else report.worst_ratio = std::max(report.worst_ratio, rec.ratio);
    if (rec.iter >= 2 && rec.weighted_norm <= options.tol * report.first_norm) break;
    if (rec.iter >= options.max_iters) {
      std::ostringstream os;
      os << "coupling did not converge in " << options.max_iters << " iterations at step " << run.step + 1
         << " (last weighted norm " << rec.weighted_norm << ", first " << report.first_norm << ")";
      throw NonConvergenceError(os.str(), run.coupling.increment_history);
    }
  }
  report.iterations = run.iter;
  report.final_norm = run.records.back().weighted_norm;
  run.t += dt;
  run.step += 1;
  run.flow.p_prev_time = run.flow.p;
  run.sigma_bar_time = run.coupling.sigma_bar_fine;
  run.sigma_bar_last_iter = run.sigma_bar_time;
  return report;
}

}  // namespace biot
