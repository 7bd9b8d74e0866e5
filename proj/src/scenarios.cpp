#include "biot/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>

#include <fmt/format.h>

#include "biot/error.hpp"
#include "biot/output.hpp"

namespace biot {

namespace fs = std::filesystem;

const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names = {"single_cell", "uniaxial", "eta_sweep", "contraction"};
  return names;
}

namespace {

PoroInput reference_rock() {
  PoroInput m;
  m.K_b = 1e9;
  m.K_s = 1e10;
  m.G = 6e8;
  m.phi0 = 0.2;
  m.c = 4.4e-10;
  m.mu = 1e-3;
  m.permeability = {1e-13, 1e-13, 1e-13};
  m.rho0 = 1000.0;
  m.rho_r = 2650.0;
  return m;
}

//! Rollers everywhere, x_min drained to `p_face`, z_max loaded by `load` (compressive positive).
BoundaryTags drawdown_boundary(double p_face, double load) {
  BoundaryTags tags;
  for (auto& fc : tags.faces) fc.mech = MechBc::NormalZero;
  tags[BoxFace::XMin].flow = FlowBc::Pressure;
  tags[BoxFace::XMin].pressure = p_face;
  tags[BoxFace::ZMax].mech = MechBc::Traction;
  tags[BoxFace::ZMax].traction = {0.0, 0.0, -load};
  return tags;
}

}  // namespace

RunConfig heterogeneous_config(const fs::path& dir, double eta_factor, std::uint64_t seed) {
  fs::create_directories(dir);
  RunConfig cfg;
  cfg.cells = {8, 8, 8};
  cfg.lengths = {100.0, 100.0, 100.0};
  cfg.ratio = {4, 4, 4};
  cfg.material = reference_rock();
  cfg.material.K_b = 0.0;
  cfg.material.G = 0.0;
  cfg.material.permeability = {0.0, 0.0, 0.0};
  cfg.eta_rule = EtaRule::scaled(eta_factor);
  const double load = 2e7;
  cfg.boundary = drawdown_boundary(9e6, load);
  cfg.p_initial = 1e7;
  cfg.sigma0 = {-load, -load, -load, 0.0, 0.0, 0.0};
  cfg.dt = 3600.0;
  cfg.end_time = 5 * 3600.0;
  cfg.output_dir = dir.string();

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto log_uniform = [&](double lo, double hi) { return lo * std::pow(hi / lo, unit(rng)); };
  const std::size_t n = 8 * 8 * 8;
  std::vector<std::vector<double>> rows(n);
  for (std::size_t f = 0; f < n; ++f) {
    const double K_b = log_uniform(0.5e9, 5e9);
    const double k = log_uniform(1e-15, 1e-13);
    rows[f] = {K_b, 0.6 * K_b, k, k, k};
  }
  const fs::path csv = dir / "materials.csv";
  write_cell_table(csv, {"K_b", "G", "kx", "ky", "kz"}, rows);
  cfg.material_csv = csv.string();
  cfg.csv_columns = {"K_b", "G", "kx", "ky", "kz"};
  return cfg;
}

RunConfig scenario_config(const std::string& name, const fs::path& dir) {
  RunConfig cfg;
  cfg.output_dir = dir.string();
  cfg.scenario = name;
  if (name == "single_cell") {
    cfg.lengths = {10.0, 10.0, 10.0};
    cfg.material = reference_rock();
    const double load = 2e7;
    cfg.boundary = drawdown_boundary(5e6, load);
    cfg.sigma0 = {-load, -load, -load, 0.0, 0.0, 0.0};
    cfg.p_initial = 1e7;
    cfg.source = 1e-7;
    cfg.dt = 3600.0;
    cfg.end_time = 3 * 3600.0;
  } else if (name == "uniaxial") {
    cfg.material = reference_rock();
    cfg.material.K_s = cfg.material.K_b;  // alpha = 0
    cfg.material.c = 5e-9;
    cfg.boundary = drawdown_boundary(0.0, 1e6);
    cfg.boundary[BoxFace::XMin].flow = FlowBc::NoFlux;
    cfg.boundary[BoxFace::XMin].pressure = 0.0;
    cfg.p_initial = 1e6;
    cfg.dt = 1.0;
    cfg.end_time = 1.0;
  } else if (name == "eta_sweep") {
    // alpha = 1 and eta/M = 1 at eta = K_b, so gamma = 1/2 there.
    cfg.cells = {4, 4, 4};
    cfg.lengths = {100.0, 100.0, 100.0};
    cfg.ratio = {2, 2, 2};
    cfg.material = reference_rock();
    cfg.material.K_s = std::numeric_limits<double>::infinity();
    cfg.material.G = 1e9;
    cfg.material.c = 5e-9;
    const double load = 2e7;
    cfg.boundary = drawdown_boundary(9e6, load);
    cfg.sigma0 = {-load, -load, -load, 0.0, 0.0, 0.0};
    cfg.p_initial = 1e7;
    cfg.dt = 3600.0;
    cfg.end_time = 2 * 3600.0;
  } else if (name == "contraction") {
    cfg = heterogeneous_config(dir, 2.0);
    cfg.scenario = name;
  } else {
    throw ConfigError("unknown scenario '" + name + "'");
  }
  return cfg;
}

ScalarOracle::ScalarOracle(const RunConfig& cfg) {
  if (cfg.cells != Index3{1, 1, 1} || !cfg.material_csv.empty())
    throw Error("scalar oracle needs a single homogeneous cell");
  if (cfg.gravity != Vec3{0.0, 0.0, 0.0}) throw Error("scalar oracle assumes zero gravity");
  for (BoxFace f : {BoxFace::XMin, BoxFace::XMax, BoxFace::YMin, BoxFace::YMax, BoxFace::ZMin})
    if (cfg.boundary[f].mech != MechBc::NormalZero) throw Error("scalar oracle needs rollers below and around");
  for (BoxFace f : {BoxFace::XMax, BoxFace::YMin, BoxFace::YMax, BoxFace::ZMin, BoxFace::ZMax})
    if (cfg.boundary[f].flow != FlowBc::NoFlux) throw Error("scalar oracle allows a pressure face only on x_min");
  PoroInput in = cfg.material;
  in.eta = cfg.eta_rule.eta_for(in.K_b);
  const PoroCell cell = derive_cell(in);
  alpha_ = cell.alpha;
  eta_ = cell.eta;
  varphi_ = cell.varphi;
  stiff_ = cell.K_b + 4.0 * cell.G / 3.0;
  volume_ = cfg.lengths[0] * cfg.lengths[1] * cfg.lengths[2];
  const bool drained = cfg.boundary[BoxFace::XMin].flow == FlowBc::Pressure;
  trans_ = drained ? cell.kappa[0] * cfg.lengths[1] * cfg.lengths[2] / (cfg.lengths[0] / 2.0) : 0.0;
  g_ = drained ? cfg.boundary[BoxFace::XMin].pressure : 0.0;
  dt_ = cfg.dt;
  q_ = cfg.source;
  t_z_ = cfg.boundary[BoxFace::ZMax].mech == MechBc::Traction ? cfg.boundary[BoxFace::ZMax].traction[2] : 0.0;
  sigma0_zz_ = cfg.sigma0.zz;
  p0_ = cfg.p_initial;
  p_time_ = p0_;
  sigma_time_ = -alpha_ * p0_;
  sigma_last_ = sigma_time_;
}

ScalarOracle::Iterate ScalarOracle::iterate() {
  Iterate it;
  it.p = (varphi_ * volume_ * p_time_ + dt_ * q_ * volume_ + dt_ * trans_ * g_ -
          alpha_ / eta_ * (sigma_last_ - sigma_time_) * volume_) /
         (varphi_ * volume_ + dt_ * trans_);
  it.eps = (t_z_ - sigma0_zz_ + alpha_ * (it.p - p0_)) / stiff_;
  it.sigma_bar = eta_ * it.eps - alpha_ * it.p;
  const double d = it.sigma_bar - sigma_last_;
  it.weighted_norm = d * d * volume_ / eta_;
  sigma_last_ = it.sigma_bar;
  p_last_ = it.p;
  return it;
}

void ScalarOracle::accept() {
  p_time_ = p_last_;
  sigma_time_ = sigma_last_;
}

namespace {

double rel_diff(double a, double b, double scale) { return std::abs(a - b) / std::max(std::abs(b), scale); }

void check(ScenarioOutcome& out, bool ok, const std::string& line) {
  out.passed = out.passed && ok;
  out.lines.push_back((ok ? "ok    " : "FAIL  ") + line);
}

ScenarioOutcome verify_single_cell(const fs::path& dir) {
  ScenarioOutcome out{"single_cell", true, {}};
  const RunConfig cfg = scenario_config("single_cell", dir);
  ScalarOracle oracle(cfg);
  double worst_field = 0.0;
  int last_step = 1;
  auto observer = [&](const RunState& run) {
    if (run.step + 1 != last_step) {
      oracle.accept();
      last_step = run.step + 1;
    }
    const ScalarOracle::Iterate ref = oracle.iterate();
    worst_field = std::max({worst_field, rel_diff(run.flow.p[0], ref.p, 1.0),
                            rel_diff(run.mech.eps_v[0], ref.eps, 1e-30),
                            rel_diff(run.coupling.sigma_bar_fine[0], ref.sigma_bar, 1.0)});
  };
  const SimulationResult res = run_simulation(cfg, observer);
  check(out, worst_field <= 1e-12, fmt::format("scalar recursion agreement {:.3e} <= 1e-12", worst_field));
  check(out, res.steps.size() == 3, fmt::format("{} steps recorded", res.steps.size()));
  check(out, res.summary.worst_ratio <= res.summary.gamma + 1e-10,
        fmt::format("worst ratio {:.6g} <= gamma {:.6g}", res.summary.worst_ratio, res.summary.gamma));
  return out;
}

ScenarioOutcome verify_uniaxial(const fs::path& dir) {
  ScenarioOutcome out{"uniaxial", true, {}};
  const RunConfig cfg = scenario_config("uniaxial", dir);
  const SimulationResult res = run_simulation(cfg);
  const double t_z = cfg.boundary[BoxFace::ZMax].traction[2];
  const double expected = t_z / (cfg.material.K_b + 4.0 * cfg.material.G / 3.0);
  const double err = rel_diff(res.run.mech.eps_v[0], expected, 0.0);
  check(out, err <= 1e-12,
        fmt::format("strain {:.17g} vs t_z/(K_b+4G/3) = {:.17g} (rel {:.3e})", res.run.mech.eps_v[0], expected, err));
  const auto& recs = res.run.records;
  check(out, res.steps.size() == 1 && res.steps[0].iterations == 2,
        fmt::format("alpha = 0 converges in {} iterations", res.steps.empty() ? 0 : res.steps[0].iterations));
  if (recs.size() >= 2)
    check(out, recs[1].weighted_norm <= 1e-20 * recs[0].weighted_norm,
          fmt::format("second increment norm {:.3e}", recs[1].weighted_norm));
  return out;
}

ScenarioOutcome verify_eta_sweep(const fs::path& dir) {
  ScenarioOutcome out{"eta_sweep", true, {}};
  const RunConfig cfg = scenario_config("eta_sweep", dir);
  const std::vector<SweepRow> rows = sweep_eta(cfg, 1.0, 2.0, 5);
  write_sweep_csv(dir / "sweep.csv", rows);
  check(out, std::abs(rows.front().gamma - 0.5) <= 1e-14, fmt::format("gamma at eta = K_b is {:.17g}", rows.front().gamma));
  const int bound = static_cast<int>(std::ceil(std::log(1e-8) / std::log(0.5)));
  check(out, rows.front().max_iters <= bound,
        fmt::format("max iterations per step {} <= {}", rows.front().max_iters, bound));
  for (std::size_t i = 1; i < rows.size(); ++i) {
    check(out, rows[i].gamma < rows[i - 1].gamma,
          fmt::format("gamma decreases: f={:.3g} gamma={:.6g}", rows[i].factor, rows[i].gamma));
    check(out, rows[i].total_iters <= rows[i - 1].total_iters,
          fmt::format("iterations non-increasing: f={:.3g} total={}", rows[i].factor, rows[i].total_iters));
  }
  return out;
}

ScenarioOutcome verify_contraction(const fs::path& dir) {
  ScenarioOutcome out{"contraction", true, {}};
  const RunConfig cfg = scenario_config("contraction", dir);
  const SimulationResult res = run_simulation(cfg);
  const double gamma = res.summary.gamma;
  bool bounded = true;
  bool decreasing = true;
  double worst = 0.0;
  const auto& recs = res.run.records;
  for (std::size_t i = 0; i < recs.size(); ++i) {
    if (recs[i].iter < 2) continue;
    worst = std::max(worst, recs[i].ratio);
    bounded = bounded && recs[i].ratio <= gamma + 1e-10;
    decreasing = decreasing && recs[i].weighted_norm < recs[i - 1].weighted_norm;
  }
  check(out, bounded, fmt::format("every ratio <= gamma + 1e-10 (worst {:.6g}, gamma {:.6g})", worst, gamma));
  check(out, decreasing, "weighted norm strictly decreasing within each step");
  check(out, res.steps.size() == 5, fmt::format("{} steps converged", res.steps.size()));
  return out;
}

}  // namespace

ScenarioOutcome run_verification(const std::string& name, const fs::path& dir) {
  fs::create_directories(dir);
  if (name == "single_cell") return verify_single_cell(dir);
  if (name == "uniaxial") return verify_uniaxial(dir);
  if (name == "eta_sweep") return verify_eta_sweep(dir);
  if (name == "contraction") return verify_contraction(dir);
  throw ConfigError("unknown scenario '" + name + "'");
}

std::vector<SweepRow> sweep_eta(const RunConfig& base, double from, double to, int points) {
  if (points < 1) throw ConfigError("sweep needs at least one point");
  if (!(from > 0.0) || !(to <= 2.0) || from > to)
    throw ConfigError("sweep factors must satisfy 0 < from <= to <= 2 (decoupling bound eta <= 2 K_b)");
  std::vector<SweepRow> rows;
  for (int i = 0; i < points; ++i) {
    const double f = points == 1 ? from : from + (to - from) * i / (points - 1);
    RunConfig cfg = base;
    cfg.eta_rule = EtaRule::scaled(f);
    cfg.snapshots = false;
    cfg.output_dir = (fs::path(base.output_dir) / fmt::format("eta_{:02d}", i)).string();
    const SimulationResult res = run_simulation(cfg);
    SweepRow row;
    row.factor = f;
    row.gamma = res.summary.gamma;
    row.total_iters = res.summary.total_iterations;
    for (const auto& s : res.steps) row.max_iters = std::max(row.max_iters, s.iterations);
    row.worst_ratio = res.summary.worst_ratio;
    rows.push_back(row);
  }
  return rows;
}

void write_sweep_csv(const fs::path& path, const std::vector<SweepRow>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << "factor,gamma,total_iters,max_iters,worst_ratio\n";
  for (const auto& r : rows)
    out << format_double(r.factor) << ',' << format_double(r.gamma) << ',' << r.total_iters << ',' << r.max_iters
        << ',' << format_double(r.worst_ratio) << '\n';
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace biot
