//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "biot/config.hpp"
#include "biot/coupling.hpp"
#include "biot/error.hpp"
#include "biot/output.hpp"
#include "biot/scenarios.hpp"
#include "oracles.hpp"

using namespace biot;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool ok = true;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& title, const std::function<Verdict()>& body) {
  Verdict v;
  try {
    v = body();
  } catch (const std::exception& e) {
    v = {false, std::string("exception: ") + e.what()};
  }
  if (!v.ok) ++failures;
  std::cout << (v.ok ? "PASS" : "FAIL") << "  C" << id << " " << title << ": " << v.detail << std::endl;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

struct CsvRow {
  int step, iter;
  double weighted_norm, ratio;
};

std::vector<CsvRow> read_convergence(const fs::path& path) {
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  if (line != kConvergenceHeader) throw Error("unexpected header in " + path.string());
  std::vector<CsvRow> rows;
  while (std::getline(in, line)) {
    std::stringstream s(line);
    std::string f[6];
    for (auto& x : f) std::getline(s, x, ',');
    rows.push_back({std::stoi(f[0]), std::stoi(f[1]), std::stod(f[2]), f[3] == "nan" ? NAN : std::stod(f[3])});
  }
  return rows;
}

//! Global mass balance of the final iteration of every step in a run.
struct MassAudit {
  const Problem* problem = nullptr;
  std::vector<double> sigma_prev;
  std::vector<double> step_residual;  // |sum r| / sum |terms|, last iteration of the current step
  std::vector<double> accepted;

  void observe(const RunState& run) {
    const NestedGridPair& pair = problem->pair;
    const FineMaterialField& fine = problem->fine;
    if (run.iter == 1) {
      if (!step_residual.empty()) accepted.push_back(step_residual.back());
      step_residual.clear();
      sigma_prev = run.sigma_bar_time;
    }
    const std::size_t n = fine.size();
    std::vector<double> dsigma(n);
    for (std::size_t f = 0; f < n; ++f) dsigma[f] = sigma_prev[f] - run.sigma_bar_time[f];
    FlowState old_state;
    old_state.p = run.flow.p_prev_time;
    old_state.p_prev_time = run.flow.p_prev_time;
    old_state.z.assign(run.flow.z.size(), 0.0);
    const double dt = dt_;
    const auto r = mass_balance_residual(pair, fine, old_state, run.flow, dsigma, dt, problem->flow_loads);
    const HexGrid& g = pair.fine;
    const double V = g.cell_volume();
    double total = 0.0, scale = 0.0;
    for (std::size_t c = 0; c < n; ++c) {
      total += r[c];
      scale += std::abs(fine[c].varphi * (run.flow.p[c] - old_state.p[c]) * V) +
               std::abs(fine[c].alpha / fine[c].eta * dsigma[c] * V) +
               std::abs(dt * (problem->flow_loads.q.empty() ? 0.0 : problem->flow_loads.q[c]) * V);
    }
    for (std::size_t face = 0; face < run.flow.z.size(); ++face) scale += dt * std::abs(run.flow.z[face]) * face_area_[face];
    step_residual.push_back(std::abs(total) / scale);
    sigma_prev = run.coupling.sigma_bar_fine;
  }

  void finish() {
    if (!step_residual.empty()) accepted.push_back(step_residual.back());
    step_residual.clear();
  }

  double dt_ = 0.0;
  std::vector<double> face_area_;
};

}  // namespace

int main(int argc, char** argv) {
  const fs::path root = argc > 1 ? fs::path(argv[1]) : fs::path("acceptance_out");
  fs::remove_all(root);
  fs::create_directories(root);

  // Shared heterogeneous run (criteria 1, 6, 7, 8).
  RunConfig c1 = heterogeneous_config(root / "c1_a", 2.0);
  c1.snapshots = false;
  const Problem c1_problem = build_problem(to_problem_spec(c1));
  MassAudit audit;
  audit.problem = &c1_problem;
  audit.dt_ = c1.dt;
  audit.face_area_ = [&] {
    const HexGrid& g = c1_problem.pair.fine;
    std::vector<double> area;
    for (int a = 0; a < 3; ++a)
      for (std::size_t k = 0; k < g.num_faces(a); ++k) area.push_back(g.face_area(a));
    return area;
  }();
  SimulationResult c1_result;
  std::string c1_error;
  try {
    c1_result = run_simulation(c1, [&](const RunState& run) { audit.observe(run); });
    audit.finish();
  } catch (const std::exception& e) {
    c1_error = e.what();
  }

  report(1, "contraction bound", [&] {
    if (!c1_error.empty()) return Verdict{false, c1_error};
    const double gamma = c1_result.summary.gamma;
    const auto rows = read_convergence(root / "c1_a" / "convergence.csv");
    bool bounded = true, decreasing = true, converged = true;
    double worst = 0.0;
    int steps = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      steps = std::max(steps, rows[i].step);
      if (rows[i].iter >= 2) {
        worst = std::max(worst, rows[i].ratio);
        bounded = bounded && rows[i].ratio <= gamma + 1e-10;
        decreasing = decreasing && rows[i].weighted_norm < rows[i - 1].weighted_norm;
      }
      const bool last = i + 1 == rows.size() || rows[i + 1].iter == 1;
      if (last) {
        const std::size_t first = i + 1 - rows[i].iter;
        converged = converged && rows[i].weighted_norm <= 1e-8 * rows[first].weighted_norm;
      }
    }
    return Verdict{bounded && decreasing && converged && steps == 5,
                   fmt::format("gamma {:.6f}, worst ratio {:.6f}, {} iterations over {} steps, strictly decreasing {}",
                               gamma, worst, rows.size(), steps, decreasing ? "yes" : "no")};
  });

  report(2, "condition identities", [&] {
    const Problem& pb = c1_problem;
    const NestedGridPair& pair = pb.pair;
    std::mt19937_64 rng(4242);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double worst_c1 = 0.0, worst_c2 = 0.0;
    bool ok = true;
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<double> dp(pair.fine.num_cells());
      for (auto& x : dp) x = 1e6 * u(rng);
      std::vector<Vec3> du(pair.coarse.num_nodes());
      for (auto& v : du) v = {1e-3 * u(rng), 1e-3 * u(rng), 1e-3 * u(rng)};
      const auto de = cell_volumetric_strain(du, pair.coarse);
      const auto de_sq = cell_volumetric_strain_sq(du, pair.coarse);
      for (const ConditionReport& rep : {verify_conditions(pair, pb.fine, pb.coarse, dp, de),
                                         verify_conditions(pair, pb.fine, pb.coarse, dp, de, de_sq)}) {
        worst_c1 = std::max(worst_c1, std::abs(rep.c1_gap) / rep.c1_scale);
        worst_c2 = std::min(worst_c2, rep.c2_gap / rep.c2_scale);
        ok = ok && std::abs(rep.c1_gap) <= 1e-12 * rep.c1_scale && rep.c2_gap >= -1e-13 * rep.c2_scale && rep.c3_ok;
      }
    }
    return Verdict{ok, fmt::format("max |c1_gap|/scale {:.3e}, min c2_gap/scale {:.3e} over 100 pairs", worst_c1,
                                   worst_c2)};
  });

  report(3, "homogenization endpoints", [&] {
    const NestedGridPair pair = nest(HexGrid({2, 1, 1}, {2.0, 1.0, 1.0}), {2, 1, 1});
    auto children = [](double K_b) {
      PoroInput m;
      m.K_b = K_b;
      m.K_s = 10e9;
      m.G = 0.6 * K_b;
      m.phi0 = 0.2;
      m.c = 4.4e-10;
      m.mu = 1e-3;
      m.permeability = {1e-13, 1e-13, 1e-13};
      return m;
    };
    auto coarse_K = [&](const EtaRule& rule) {
      std::vector<PoroInput> raw = {children(1e9), children(3e9)};
      assign_eta(raw, rule);
      return upscale_coarse_props(pair, derive_fine_coefficients(raw), rule)[0].K_b;
    };
    const double reuss = coarse_K(EtaRule::reuss());
    const double voigt = coarse_K(EtaRule::voigt());
    const double e_reuss = std::abs(reuss - 1.5e9) / 1.5e9;
    const double e_voigt = std::abs(voigt - 2.0e9) / 2.0e9;
    bool sandwich = true;
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const NestedGridPair big = nest(HexGrid({8, 8, 8}, {100.0, 100.0, 100.0}), {4, 4, 4});
    for (int trial = 0; trial < 20; ++trial)
      for (const EtaRule& rule :
           {EtaRule::fixed_stress(), EtaRule::reuss(), EtaRule::voigt(), EtaRule::scaled(1.5)}) {
        std::vector<PoroInput> raw(big.fine.num_cells());
        for (auto& m : raw) m = children(0.5e9 * std::pow(10.0, u(rng)));
        assign_eta(raw, rule);
        const CoarseMaterialField cf = upscale_coarse_props(big, derive_fine_coefficients(raw), rule);
        for (const CoarseCell& c : cf.cells)
          sandwich = sandwich && c.K_b >= c.K_b_harmonic * (1 - 1e-14) && c.K_b <= c.K_b_arithmetic * (1 + 1e-14);
      }
    return Verdict{e_reuss <= 1e-14 && e_voigt <= 1e-14 && sandwich,
                   fmt::format("reuss {:.17g} (rel {:.1e}), voigt {:.17g} (rel {:.1e}), sandwich on 80 random fields {}",
                               reuss, e_reuss, voigt, e_voigt, sandwich ? "holds" : "broken")};
  });

  report(4, "scalar oracle equivalence", [&] {
    double worst = 0.0;
    int total = 0;
    for (double factor : {1.0, 2.0}) {
      RunConfig cfg = scenario_config("single_cell", root / fmt::format("c4_{}", factor));
      cfg.eta_rule = EtaRule::scaled(factor);
      cfg.snapshots = false;
      std::vector<std::vector<biot::testing::ScalarRecursion::Iterate>> seen;
      const SimulationResult res = run_simulation(cfg, [&](const RunState& run) {
        if (run.iter == 1) seen.emplace_back();
        seen.back().push_back({run.flow.p[0], run.mech.eps_v[0], run.coupling.sigma_bar_fine[0]});
      });
      const PoroInput& m = cfg.material;
      const biot::testing::ScalarRecursion oracle{
          m.K_b, m.K_s, m.G, m.phi0, m.c, m.mu, m.permeability[0], factor * m.K_b,
          cfg.lengths[0], cfg.lengths[1], cfg.lengths[2], true, cfg.boundary[BoxFace::XMin].pressure, cfg.source,
          cfg.boundary[BoxFace::ZMax].traction[2], cfg.sigma0.zz, cfg.p_initial, cfg.dt};
      std::vector<int> counts;
      for (const auto& s : seen) counts.push_back(static_cast<int>(s.size()));
      const auto ref = oracle.run(counts);
      auto rel = [](double a, double b) { return std::abs(a - b) / std::abs(b); };
      for (std::size_t n = 0; n < seen.size(); ++n)
        for (std::size_t k = 0; k < seen[n].size(); ++k) {
          worst = std::max({worst, rel(seen[n][k].p, ref[n][k].p), rel(seen[n][k].eps, ref[n][k].eps),
                            rel(seen[n][k].s, ref[n][k].s)});
          ++total;
        }
      if (res.steps.size() != 3) return Verdict{false, "single-cell run did not take 3 steps"};
    }
    return Verdict{worst <= 1e-12, fmt::format("max relative deviation {:.3e} over {} iterations", worst, total)};
  });

  report(5, "gamma-driven iteration count", [&] {
    RunConfig cfg = scenario_config("eta_sweep", root / "c5");
    const std::vector<SweepRow> rows = sweep_eta(cfg, 1.0, 2.0, 5);
    write_sweep_csv(root / "c5" / "sweep.csv", rows);
    bool monotone = true;
    std::string totals;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i > 0) monotone = monotone && rows[i].total_iters <= rows[i - 1].total_iters;
      totals += fmt::format("{}{}", i ? "," : "", rows[i].total_iters);
    }
    const bool gamma_ok = std::abs(rows[0].gamma - 0.5) <= 1e-14;
    return Verdict{gamma_ok && rows[0].max_iters <= 27 && monotone,
                   fmt::format("gamma {:.17g}, at most {} iterations per step (bound 27), sweep totals [{}]",
                               rows[0].gamma, rows[0].max_iters, totals)};
  });

  report(6, "conservation and mechanics sanity", [&] {
    if (!c1_error.empty()) return Verdict{false, c1_error};
    const double mass = *std::max_element(audit.accepted.begin(), audit.accepted.end());
    const bool mass_ok = audit.accepted.size() == 5 && mass <= 1e-10;

    const HexGrid box({3, 3, 3}, {3.0, 2.0, 4.0});
    const NestedGridPair pair = nest(box, {1, 1, 1});
    PoroInput m = c1.material;
    m.K_b = 2e9;
    m.G = 1.2e9;
    m.permeability = {1e-13, 1e-13, 1e-13};
    std::vector<PoroInput> raw(box.num_cells(), m);
    assign_eta(raw, EtaRule::fixed_stress());
    const CoarseMaterialField props =
        upscale_coarse_props(pair, derive_fine_coefficients(raw), EtaRule::fixed_stress());
    auto field = [](const Vec3& x) {
      return Vec3{1e-3 + 2e-4 * x[0] - 1e-4 * x[1] + 3e-4 * x[2], -2e-3 + 1e-4 * x[0] + 5e-4 * x[1],
                  4e-4 * x[2] - 2e-4 * x[0] + 1e-4 * x[1]};
    };
    const auto u = solve_with_prescribed_boundary(pair.coarse, props, field, CgOptions{1e-14, 0});
    double patch = 0.0, umax = 0.0;
    for (std::size_t v = 0; v < u.size(); ++v) {
      const Vec3 ref = field(pair.coarse.node_position(v));
      for (int a = 0; a < 3; ++a) {
        patch = std::max(patch, std::abs(u[v][a] - ref[a]));
        umax = std::max(umax, std::abs(ref[a]));
      }
    }
    patch /= umax;

    RunConfig ux = scenario_config("uniaxial", root / "c6_uniaxial");
    ux.snapshots = false;
    const SimulationResult res = run_simulation(ux);
    const double expected = ux.boundary[BoxFace::ZMax].traction[2] / (ux.material.K_b + 4.0 * ux.material.G / 3.0);
    const double strain = std::abs(res.run.mech.eps_v[0] - expected) / std::abs(expected);
    return Verdict{mass_ok && patch <= 1e-12 && strain <= 1e-12,
                   fmt::format("worst step mass residual {:.3e}, patch {:.3e}, uniaxial strain {:.3e}", mass, patch,
                               strain)};
  });

  report(7, "split independence of the fixed point", [&] {
    if (!c1_error.empty()) return Verdict{false, c1_error};
    // The coupling tolerance bounds a squared norm, so fields are compared
    // through squared relative L2 differences against 10 tol_c.
    struct Gap {
      double p_sq, u_sq, p_max, u_max;
    };
    auto gap = [&](const RunState& a, const RunState& b, double p0) {
      double dp2 = 0.0, ch2 = 0.0, du2 = 0.0, u2 = 0.0, dp_max = 0.0, ch_max = 0.0, du_max = 0.0, u_max = 0.0;
      for (std::size_t i = 0; i < a.flow.p.size(); ++i) {
        const double d = a.flow.p[i] - b.flow.p[i], c = b.flow.p[i] - p0;
        dp2 += d * d;
        ch2 += c * c;
        dp_max = std::max(dp_max, std::abs(d));
        ch_max = std::max(ch_max, std::abs(c));
      }
      for (std::size_t v = 0; v < a.mech.u.size(); ++v)
        for (int k = 0; k < 3; ++k) {
          const double d = a.mech.u[v][k] - b.mech.u[v][k], w = b.mech.u[v][k];
          du2 += d * d;
          u2 += w * w;
          du_max = std::max(du_max, std::abs(d));
          u_max = std::max(u_max, std::abs(w));
        }
      return Gap{dp2 / ch2, du2 / u2, dp_max / ch_max, du_max / u_max};
    };
    auto run_pair = [&](double tol, const std::string& tag) {
      std::vector<RunState> finals;
      for (double factor : {1.0, 2.0}) {
        RunConfig cfg = heterogeneous_config(root / fmt::format("c7_{}_eta{}", tag, factor), factor);
        cfg.snapshots = false;
        cfg.tol_c = tol;
        finals.push_back(run_simulation(cfg).run);
      }
      return gap(finals[1], finals[0], c1.p_initial);
    };
    const Gap nominal = run_pair(c1.tol_c, "nominal");
    const Gap tight = run_pair(1e-12, "tight");
    const bool ok = nominal.p_sq <= 10.0 * c1.tol_c && nominal.u_sq <= 10.0 * c1.tol_c &&
                    tight.p_sq <= 10.0 * 1e-12 && tight.u_sq <= 10.0 * 1e-12;
    return Verdict{
        ok, fmt::format("tol {:.0e}: squared rel L2 gap p {:.2e}, u {:.2e} (bound {:.0e}; max-norm rel gap p {:.2e}, "
                        "u {:.2e}); tol 1e-12: p {:.2e}, u {:.2e} (bound 1e-11)",
                        c1.tol_c, nominal.p_sq, nominal.u_sq, 10.0 * c1.tol_c, nominal.p_max, nominal.u_max,
                        tight.p_sq, tight.u_sq)};
  });

  report(8, "determinism", [&] {
    if (!c1_error.empty()) return Verdict{false, c1_error};
    RunConfig again = heterogeneous_config(root / "c1_b", 2.0);
    again.snapshots = false;
    run_simulation(again);
    const std::string a = slurp(root / "c1_a" / "convergence.csv");
    const std::string b = slurp(root / "c1_b" / "convergence.csv");
    return Verdict{!a.empty() && a == b, fmt::format("convergence.csv {} bytes, identical {}", a.size(),
                                                     a == b ? "yes" : "no")};
  });

  std::cout << (failures == 0 ? "ALL PASS" : fmt::format("{} FAILED", failures)) << std::endl;
  return failures == 0 ? 0 : 1;
}
