#include "biot/output.hpp"

#include <cmath>
#include <fstream>

#include <fmt/format.h>

#include "biot/error.hpp"

namespace biot {

namespace fs = std::filesystem;

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  return fmt::format("{:.17g}", value);
}

namespace {

std::ofstream open_for_write(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

void finish(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace

void write_convergence_csv(const fs::path& path, std::span<const IterationRecord> records) {
  std::ofstream out = open_for_write(path);
  out << kConvergenceHeader << '\n';
  for (const auto& r : records)
    out << r.step << ',' << r.iter << ',' << format_double(r.weighted_norm) << ',' << format_double(r.ratio) << ','
        << format_double(r.c1_gap) << ',' << format_double(r.c2_gap) << '\n';
  finish(out, path);
}

void write_conditions_csv(const fs::path& path, std::span<const IterationRecord> records) {
  std::ofstream out = open_for_write(path);
  out << kConditionsHeader << '\n';
  for (const auto& r : records)
    out << r.step << ',' << r.iter << ',' << format_double(r.c1_gap) << ',' << format_double(r.c1_scale) << ','
        << format_double(r.c2_gap) << ',' << format_double(r.c2_scale) << ',' << (r.c3_ok ? 1 : 0) << '\n';
  finish(out, path);
}

std::vector<Vec3> displacement_at_fine_nodes(const NestedGridPair& pair, std::span<const Vec3> u_coarse) {
  const HexGrid& fine = pair.fine;
  const HexGrid& coarse = pair.coarse;
  std::vector<Vec3> out(fine.num_nodes());
  for (std::size_t node = 0; node < fine.num_nodes(); ++node) {
    const Index3 ijk = fine.node_ijk(node);
    Index3 cell{};
    Vec3 xi{};
    for (int a = 0; a < 3; ++a) {
      cell[a] = std::min(ijk[a] / pair.ratio[a], coarse.n(a) - 1);
      xi[a] = static_cast<double>(ijk[a] - cell[a] * pair.ratio[a]) / pair.ratio[a];
    }
    const auto corners = coarse.cell_nodes(coarse.cell_index(cell[0], cell[1], cell[2]));
    Vec3 u{0.0, 0.0, 0.0};
    for (int k = 0; k < 8; ++k) {
      double w = 1.0;
      for (int a = 0; a < 3; ++a) w *= ((k >> a) & 1) ? xi[a] : 1.0 - xi[a];
      for (int c = 0; c < 3; ++c) u[c] += w * u_coarse[corners[k]][c];
    }
    out[node] = u;
  }
  return out;
}

void write_vtk_snapshot(const fs::path& path, const Problem& problem, const RunState& run) {
  const NestedGridPair& pair = problem.pair;
  const HexGrid& fine = pair.fine;
  std::ofstream out = open_for_write(path);
  out << "# vtk DataFile Version 3.0\n";
  out << "biotsplit step " << run.step << " t=" << format_double(run.t) << '\n';
  out << "ASCII\nDATASET STRUCTURED_POINTS\n";
  out << "DIMENSIONS " << fine.n(0) + 1 << ' ' << fine.n(1) + 1 << ' ' << fine.n(2) + 1 << '\n';
  out << "ORIGIN " << format_double(fine.origin()[0]) << ' ' << format_double(fine.origin()[1]) << ' '
      << format_double(fine.origin()[2]) << '\n';
  out << "SPACING " << format_double(fine.h(0)) << ' ' << format_double(fine.h(1)) << ' '
      << format_double(fine.h(2)) << '\n';

  const std::vector<Vec3> u = displacement_at_fine_nodes(pair, run.mech.u);
  out << "POINT_DATA " << fine.num_nodes() << '\n';
  out << "VECTORS displacement double\n";
  for (const Vec3& v : u)
    out << format_double(v[0]) << ' ' << format_double(v[1]) << ' ' << format_double(v[2]) << '\n';
  out << "SCALARS displacement_magnitude double 1\nLOOKUP_TABLE default\n";
  for (const Vec3& v : u) out << format_double(std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2])) << '\n';

  out << "CELL_DATA " << fine.num_cells() << '\n';
  out << "SCALARS pressure double 1\nLOOKUP_TABLE default\n";
  for (double p : run.flow.p) out << format_double(p) << '\n';
  out << "SCALARS eps_v_coarse double 1\nLOOKUP_TABLE default\n";
  for (std::size_t f = 0; f < fine.num_cells(); ++f) out << format_double(run.mech.eps_v[pair.parent[f]]) << '\n';
  out << "SCALARS eps_v_prolonged double 1\nLOOKUP_TABLE default\n";
  for (double e : run.coupling.eps_prolonged) out << format_double(e) << '\n';
  finish(out, path);
}

void write_coarse_materials(const fs::path& path, const Problem& problem) {
  std::ofstream out = open_for_write(path);
  out << "cell,K_b_harmonic,K_b_effective,K_b_arithmetic,G,alpha,eta\n";
  for (std::size_t p = 0; p < problem.coarse.size(); ++p) {
    const CoarseCell& c = problem.coarse[p];
    out << p << ',' << format_double(c.K_b_harmonic) << ',' << format_double(c.K_b) << ','
        << format_double(c.K_b_arithmetic) << ',' << format_double(c.G) << ',' << format_double(c.alpha) << ','
        << format_double(c.eta) << '\n';
  }
  finish(out, path);
}

void write_summary(const fs::path& path, const Problem& problem, const SummaryInfo& info) {
  const CoarseMaterialField& coarse = problem.coarse;
  std::ofstream out = open_for_write(path);
  out << "status " << info.status << '\n';
  out << "gamma " << format_double(info.gamma) << '\n';
  out << "worst_ratio " << format_double(info.worst_ratio) << '\n';
  out << "steps " << info.steps << '\n';
  out << "total_iterations " << info.total_iterations << '\n';
  out << "eta_rule " << to_string(coarse.rule.kind) << '\n';
  out << "eta_units " << (coarse.eta_units_inverse_pa ? "1/Pa" : "Pa") << '\n';
  bool bound_ok = true;
  for (const auto& c : coarse.cells) bound_ok = bound_ok && c.eta <= 2.0 * c.K_b * (1.0 + 1e-14);
  out << "decoupling_bound " << (bound_ok ? "satisfied" : "violated") << '\n';
  out << "fine_cells " << problem.pair.fine.num_cells() << '\n';
  out << "coarse_cells " << coarse.size() << '\n';
  out << "# coarse_cell K_b_harmonic K_b_effective K_b_arithmetic\n";
  for (std::size_t p = 0; p < coarse.size(); ++p) {
    const CoarseCell& c = coarse[p];
    out << p << ' ' << format_double(c.K_b_harmonic) << ' ' << format_double(c.K_b) << ' '
        << format_double(c.K_b_arithmetic) << '\n';
  }
  finish(out, path);
}

void write_outputs(const CoupledSimulator& sim, const RunState& run, const fs::path& dir, const SummaryInfo& info) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
  write_convergence_csv(dir / "convergence.csv", run.records);
  write_conditions_csv(dir / "conditions.csv", run.records);
  write_coarse_materials(dir / "coarse_materials.csv", sim.problem());
  write_summary(dir / "summary.txt", sim.problem(), info);
}

SimulationResult run_simulation(const RunConfig& config, const std::function<void(const RunState&)>& observer) {
  const fs::path dir = config.output_dir;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());

  CoupledSimulator sim(build_problem(to_problem_spec(config)));
  const CouplingOptions options = coupling_options(config);
  const int num_steps = static_cast<int>(std::llround(config.end_time / config.dt));

  SimulationResult result;
  result.run = sim.initial_state();
  result.summary.gamma = sim.gamma();

  auto snapshot = [&] {
    if (config.snapshots && num_steps > 0)
      write_vtk_snapshot(dir / fmt::format("fields_{:03d}.vtk", result.run.step), sim.problem(), result.run);
  };
  try {
    snapshot();
    for (int n = 0; n < num_steps; ++n) {
      const StepReport report = sim.advance_time_step(result.run, config.dt, options, observer);
      result.steps.push_back(report);
      result.summary.steps += 1;
      result.summary.total_iterations += report.iterations;
      result.summary.worst_ratio = std::max(result.summary.worst_ratio, report.worst_ratio);
      snapshot();
    }
  } catch (const Error& e) {
    result.summary.status = std::string("failed: ") + e.what();
    for (const auto& r : result.run.records)
      if (r.iter >= 2 && r.step > result.summary.steps && std::isfinite(r.ratio))
        result.summary.worst_ratio = std::max(result.summary.worst_ratio, r.ratio);
    write_outputs(sim, result.run, dir, result.summary);
    throw;
  }
  write_outputs(sim, result.run, dir, result.summary);
  return result;
}

}  // namespace biot
