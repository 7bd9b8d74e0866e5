#include "biot/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include "biot/error.hpp"

namespace biot {

namespace fs = std::filesystem;

RunConfig default_config() { return RunConfig{}; }

namespace {

const std::vector<std::string> kTableColumns = {"K_b", "K_s", "G",    "phi0",  "c",   "mu", "kx",
                                                "ky",  "kz",  "rho0", "rho_r", "eta", "q",  "p0"};
const std::array<const char*, 6> kFaceKeys = {"x_min", "x_max", "y_min", "y_max", "z_min", "z_max"};

std::string line_of(const YAML::Node& node) {
  const YAML::Mark mark = node.Mark();
  if (mark.line < 0) return "?";
  return std::to_string(mark.line + 1);
}

[[noreturn]] void fail(const YAML::Node& node, const std::string& key, const std::string& message) {
  throw ConfigError(fmt::format("config key '{}' (line {}): {}", key, line_of(node), message));
}

std::string join(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

/// Walks one YAML mapping, rejecting keys outside the allowed set.
class Section {
 public:
  Section(YAML::Node node, std::string path, std::set<std::string> allowed)
      : node_(std::move(node)), path_(std::move(path)) {
    if (!node_.IsMap()) fail(node_, path_.empty() ? "<root>" : path_, "expected a mapping");
    for (const auto& kv : node_) {
      const std::string key = kv.first.as<std::string>();
      if (!allowed.count(key)) fail(kv.first, join(path_, key), "unknown key");
    }
  }

  bool has(const std::string& key) const { return static_cast<bool>(node_[key]); }
  YAML::Node node(const std::string& key) const { return node_[key]; }
  std::string path(const std::string& key) const { return join(path_, key); }
  const YAML::Node& self() const { return node_; }

  YAML::Node require(const std::string& key) const {
    if (!has(key)) fail(node_, path(key), "missing required key");
    return node_[key];
  }

  template <class T>
  T scalar(const std::string& key) const {
    const YAML::Node n = require(key);
    if (!n.IsScalar()) fail(n, path(key), "expected a scalar");
    try {
      return n.as<T>();
    } catch (const YAML::BadConversion&) {
      fail(n, path(key), "type mismatch");
    }
  }

  template <class T>
  T scalar_or(const std::string& key, T fallback) const {
    return has(key) ? scalar<T>(key) : fallback;
  }

  template <class T, std::size_t N>
  std::array<T, N> triple(const std::string& key) const {
    const YAML::Node n = require(key);
    if (!n.IsSequence() || n.size() != N) fail(n, path(key), "expected a list of " + std::to_string(N) + " values");
    std::array<T, N> out{};
    for (std::size_t i = 0; i < N; ++i) {
      try {
        out[i] = n[i].as<T>();
      } catch (const YAML::BadConversion&) {
        fail(n[i], path(key), "type mismatch in list entry " + std::to_string(i));
      }
    }
    return out;
  }

 private:
  YAML::Node node_;
  std::string path_;
};

void require_positive(const Section& s, const std::string& key, double v) {
  if (!(v > 0.0)) fail(s.node(key), s.path(key), "must be positive");
}

void require_unit_interval(const Section& s, const std::string& key, double v) {
  if (!(v > 0.0 && v < 1.0)) fail(s.node(key), s.path(key), "must lie in (0,1)");
}

FaceCondition parse_face(const Section& parent, const std::string& key) {
  const Section s(parent.node(key), parent.path(key), {"flow", "pressure", "mech", "traction"});
  FaceCondition fc;
  const std::string flow = s.scalar_or<std::string>("flow", "no_flux");
  if (flow == "no_flux") {
    fc.flow = FlowBc::NoFlux;
    if (s.has("pressure")) fail(s.node("pressure"), s.path("pressure"), "only valid with flow: pressure");
  } else if (flow == "pressure") {
    fc.flow = FlowBc::Pressure;
    fc.pressure = s.scalar<double>("pressure");
  } else {
    fail(s.node("flow"), s.path("flow"), "expected no_flux or pressure");
  }
  const std::string mech = s.scalar_or<std::string>("mech", "normal_zero");
  if (mech == "normal_zero") {
    fc.mech = MechBc::NormalZero;
    if (s.has("traction")) fail(s.node("traction"), s.path("traction"), "only valid with mech: traction");
  } else if (mech == "traction") {
    fc.mech = MechBc::Traction;
    if (s.has("traction")) fc.traction = s.triple<double, 3>("traction");
  } else {
    fail(s.node("mech"), s.path("mech"), "expected normal_zero or traction");
  }
  return fc;
}

}  // namespace

bool CellTable::has(const std::string& column) const {
  return std::find(columns.begin(), columns.end(), column) != columns.end();
}

double CellTable::get(std::size_t cell, const std::string& column) const {
  const auto it = std::find(columns.begin(), columns.end(), column);
  if (it == columns.end()) throw Error("column " + column + " not present");
  return rows.at(cell)[static_cast<std::size_t>(it - columns.begin())];
}

CellTable read_cell_table(const fs::path& path, std::size_t expected_cells) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open material table " + path.string());
  auto split = [](const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item.erase(0, item.find_first_not_of(" \t\r"));
      item.erase(item.find_last_not_of(" \t\r") + 1);
      out.push_back(item);
    }
    return out;
  };
  std::string line;
  if (!std::getline(in, line)) throw ConfigError(path.string() + ": empty material table");
  std::vector<std::string> header = split(line);
  if (header.empty() || header.front() != "cell")
    throw ConfigError(path.string() + " line 1: first column must be 'cell'");
  CellTable table;
  for (std::size_t i = 1; i < header.size(); ++i) {
    if (std::find(kTableColumns.begin(), kTableColumns.end(), header[i]) == kTableColumns.end())
      throw ConfigError(path.string() + " line 1: unknown column '" + header[i] + "'");
    if (table.has(header[i])) throw ConfigError(path.string() + " line 1: duplicate column '" + header[i] + "'");
    table.columns.push_back(header[i]);
  }
  std::vector<std::vector<double>> rows;
  std::vector<long> ids;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::vector<std::string> fields = split(line);
    if (fields.size() != header.size())
      throw ConfigError(fmt::format("{} line {}: expected {} fields, got {}", path.string(), line_no, header.size(),
                                    fields.size()));
    std::vector<double> values;
    long id = 0;
    try {
      std::size_t used = 0;
      id = std::stol(fields[0], &used);
      if (used != fields[0].size()) throw std::invalid_argument("cell");
      for (std::size_t i = 1; i < fields.size(); ++i) {
        values.push_back(std::stod(fields[i], &used));
        if (used != fields[i].size()) throw std::invalid_argument(fields[i]);
      }
    } catch (const std::exception&) {
      throw ConfigError(fmt::format("{} line {}: malformed number", path.string(), line_no));
    }
    ids.push_back(id);
    rows.push_back(std::move(values));
  }
  if (rows.size() != expected_cells)
    throw ConfigError(fmt::format("{}: expected {} rows (one per fine cell), got {}", path.string(), expected_cells,
                                  rows.size()));
  table.rows.assign(expected_cells, {});
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (ids[r] < 0 || static_cast<std::size_t>(ids[r]) >= expected_cells || !table.rows[ids[r]].empty())
      throw ConfigError(fmt::format("{}: invalid or repeated cell index {}", path.string(), ids[r]));
    table.rows[static_cast<std::size_t>(ids[r])] = std::move(rows[r]);
  }
  return table;
}

void write_cell_table(const fs::path& path, const std::vector<std::string>& columns,
                      const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "cell";
  for (const auto& c : columns) out << ',' << c;
  out << '\n';
  for (std::size_t r = 0; r < rows.size(); ++r) {
    out << r;
    for (double v : rows[r]) out << ',' << fmt::format("{:.17g}", v);
    out << '\n';
  }
  if (!out) throw IoError("failed writing " + path.string());
}

RunConfig parse_config_text(const std::string& text, const fs::path& base_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(fmt::format("malformed YAML (line {}): {}", e.mark.line + 1, e.msg));
  }
  const Section top(root, "",
                    {"grid", "materials", "eta", "boundary", "gravity", "source", "initial", "time", "coupling",
                     "solver", "output", "scenario"});
  RunConfig cfg;

  const Section grid(top.require("grid"), "grid", {"cells", "lengths", "origin", "ratio"});
  cfg.cells = grid.triple<int, 3>("cells");
  cfg.lengths = grid.triple<double, 3>("lengths");
  if (grid.has("origin")) cfg.origin = grid.triple<double, 3>("origin");
  if (grid.has("ratio")) cfg.ratio = grid.triple<int, 3>("ratio");
  for (int a = 0; a < 3; ++a) {
    if (cfg.cells[a] < 1) fail(grid.node("cells"), "grid.cells", "counts must be >= 1");
    if (!(cfg.lengths[a] > 0.0)) fail(grid.node("lengths"), "grid.lengths", "lengths must be positive");
    if (cfg.ratio[a] < 1 || cfg.cells[a] % cfg.ratio[a] != 0)
      fail(grid.node("ratio"), "grid.ratio", "each ratio must be >= 1 and divide the cell count");
  }
  const std::size_t num_cells = static_cast<std::size_t>(cfg.cells[0]) * cfg.cells[1] * cfg.cells[2];

  const Section mat(top.require("materials"), "materials",
                    {"K_b", "K_s", "G", "phi0", "c", "mu", "permeability", "rho0", "rho_r", "csv"});
  std::set<std::string> from_csv;
  if (mat.has("csv")) {
    fs::path csv = mat.scalar<std::string>("csv");
    if (csv.is_relative()) csv = base_dir / csv;
    if (!fs::exists(csv)) fail(mat.node("csv"), "materials.csv", "file not found: " + csv.string());
    CellTable table;
    try {
      table = read_cell_table(csv, num_cells);
    } catch (const ConfigError& e) {
      fail(mat.node("csv"), "materials.csv", e.what());
    }
    cfg.material_csv = csv.string();
    cfg.csv_columns = table.columns;
    from_csv.insert(table.columns.begin(), table.columns.end());
  }
  auto coefficient = [&](const std::string& key, double& target, bool required, auto&& check) {
    if (mat.has(key)) {
      target = mat.scalar<double>(key);
      check(key, target);
    } else if (required && !from_csv.count(key)) {
      fail(mat.self(), mat.path(key), "missing required key (give a constant or a csv column)");
    }
  };
  auto positive = [&](const std::string& key, double v) { require_positive(mat, key, v); };
  auto none = [](const std::string&, double) {};
  coefficient("K_b", cfg.material.K_b, true, positive);
  coefficient("K_s", cfg.material.K_s, true, positive);
  coefficient("G", cfg.material.G, true, positive);
  coefficient("phi0", cfg.material.phi0, true,
              [&](const std::string& key, double v) { require_unit_interval(mat, key, v); });
  coefficient("c", cfg.material.c, true, [&](const std::string& key, double v) {
    if (v < 0.0) fail(mat.node(key), mat.path(key), "must be nonnegative");
  });
  coefficient("mu", cfg.material.mu, true, positive);
  cfg.material.rho0 = 1000.0;
  cfg.material.rho_r = 2650.0;
  coefficient("rho0", cfg.material.rho0, false, none);
  coefficient("rho_r", cfg.material.rho_r, false, none);
  if (mat.has("permeability")) {
    cfg.material.permeability = mat.triple<double, 3>("permeability");
    for (double k : cfg.material.permeability) require_positive(mat, "permeability", k);
  } else if (!(from_csv.count("kx") && from_csv.count("ky") && from_csv.count("kz"))) {
    fail(mat.self(), "materials.permeability", "missing required key (give a constant or csv columns kx, ky, kz)");
  }
  if (!from_csv.count("K_b") && !from_csv.count("K_s") && cfg.material.K_b > cfg.material.K_s)
    fail(mat.node("K_b"), "materials.K_b", "K_b must not exceed K_s");

  if (top.has("eta")) {
    const Section eta(top.node("eta"), "eta", {"rule", "factor", "value", "shear"});
    const std::string rule = eta.scalar_or<std::string>("rule", "fixed_stress");
    if (rule == "fixed_stress") cfg.eta_rule = EtaRule::fixed_stress();
    else if (rule == "reuss") cfg.eta_rule = EtaRule::reuss();
    else if (rule == "voigt") cfg.eta_rule = EtaRule::voigt();
    else if (rule == "scaled") {
      const double f = eta.scalar<double>("factor");
      if (!(f > 0.0)) fail(eta.node("factor"), "eta.factor", "must be positive");
      if (f > 2.0)
        fail(eta.node("factor"), "eta.factor", "eta = factor * K_b violates the decoupling bound eta_p <= 2 K_b_p");
      cfg.eta_rule = EtaRule::scaled(f);
    } else if (rule == "custom") {
      if (from_csv.count("eta")) {
        if (eta.has("value"))
          fail(eta.node("value"), "eta.value", "eta is already given per cell by the csv table");
        cfg.eta_rule = EtaRule::custom(0.0);
      } else {
        const double v = eta.scalar<double>("value");
        if (!(v > 0.0)) fail(eta.node("value"), "eta.value", "must be positive");
        if (!from_csv.count("K_b") && v > 2.0 * cfg.material.K_b)
          fail(eta.node("value"), "eta.value",
               fmt::format("eta = {:.17g} violates the decoupling bound eta_p <= 2 K_b_p = {:.17g}", v,
                           2.0 * cfg.material.K_b));
        cfg.eta_rule = EtaRule::custom(v);
      }
    } else {
      fail(eta.node("rule"), "eta.rule", "expected fixed_stress, reuss, voigt, scaled or custom");
    }
    if (rule != "scaled" && eta.has("factor")) fail(eta.node("factor"), "eta.factor", "only valid with rule: scaled");
    if (rule != "custom" && eta.has("value")) fail(eta.node("value"), "eta.value", "only valid with rule: custom");
    const std::string shear = eta.scalar_or<std::string>("shear", "harmonic");
    if (shear == "harmonic") cfg.shear_rule = ShearRule::Harmonic;
    else if (shear == "arithmetic") cfg.shear_rule = ShearRule::Arithmetic;
    else fail(eta.node("shear"), "eta.shear", "expected harmonic or arithmetic");
  }
  if (from_csv.count("eta") && cfg.eta_rule.kind != EtaRule::Kind::Custom)
    fail(mat.node("csv"), "materials.csv", "an eta column requires eta.rule: custom");

  for (auto& fc : cfg.boundary.faces) fc.mech = MechBc::NormalZero;
  if (top.has("boundary")) {
    const Section bnd(top.node("boundary"), "boundary", {kFaceKeys.begin(), kFaceKeys.end()});
    for (int f = 0; f < 6; ++f)
      if (bnd.has(kFaceKeys[f])) cfg.boundary.faces[f] = parse_face(bnd, kFaceKeys[f]);
  }

  if (top.has("gravity")) cfg.gravity = top.triple<double, 3>("gravity");
  cfg.source = top.scalar_or<double>("source", 0.0);

  if (top.has("initial")) {
    const Section init(top.node("initial"), "initial", {"pressure", "stress"});
    cfg.p_initial = init.scalar_or<double>("pressure", 0.0);
    if (init.has("stress")) {
      const auto s = init.triple<double, 6>("stress");
      cfg.sigma0 = {s[0], s[1], s[2], s[3], s[4], s[5]};
    }
  }

  if (top.has("time")) {
    const Section time(top.node("time"), "time", {"dt", "end"});
    cfg.dt = time.scalar_or<double>("dt", cfg.dt);
    if (!(cfg.dt > 0.0)) fail(time.node("dt"), "time.dt", "must be positive");
    cfg.end_time = time.scalar_or<double>("end", 0.0);
    if (cfg.end_time < 0.0) fail(time.node("end"), "time.end", "must be nonnegative");
  }

  if (top.has("coupling")) {
    const Section c(top.node("coupling"), "coupling", {"tol", "max_iters"});
    cfg.tol_c = c.scalar_or<double>("tol", cfg.tol_c);
    if (c.has("tol")) require_unit_interval(c, "tol", cfg.tol_c);
    cfg.max_iters = c.scalar_or<int>("max_iters", cfg.max_iters);
    if (cfg.max_iters < 2) fail(c.node("max_iters"), "coupling.max_iters", "must be >= 2");
  }

  if (top.has("solver")) {
    const Section s(top.node("solver"), "solver", {"tol", "max_iter"});
    cfg.solver_tol = s.scalar_or<double>("tol", cfg.solver_tol);
    if (s.has("tol")) require_unit_interval(s, "tol", cfg.solver_tol);
    cfg.solver_max_iter = s.scalar_or<int>("max_iter", 0);
    if (cfg.solver_max_iter < 0) fail(s.node("max_iter"), "solver.max_iter", "must be >= 0");
  }

  if (top.has("output")) {
    const Section o(top.node("output"), "output", {"dir", "snapshots"});
    cfg.output_dir = o.scalar_or<std::string>("dir", cfg.output_dir);
    cfg.snapshots = o.scalar_or<bool>("snapshots", cfg.snapshots);
  }

  cfg.scenario = top.scalar_or<std::string>("scenario", "user");
  static const std::set<std::string> scenarios = {"user", "single_cell", "uniaxial", "eta_sweep", "contraction"};
  if (!scenarios.count(cfg.scenario))
    fail(top.node("scenario"), "scenario", "expected user, single_cell, uniaxial, eta_sweep or contraction");
  return cfg;
}

RunConfig parse_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str(), path.parent_path().empty() ? fs::path(".") : path.parent_path());
}

namespace {

template <class T, std::size_t N>
void emit_list(YAML::Emitter& out, const std::array<T, N>& values) {
  out << YAML::Flow << YAML::BeginSeq;
  for (const T& v : values) out << v;
  out << YAML::EndSeq;
}

}  // namespace

std::string config_to_yaml(const RunConfig& cfg) {
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  const std::set<std::string> csv(cfg.csv_columns.begin(), cfg.csv_columns.end());
  out << YAML::BeginMap;

  out << YAML::Key << "grid" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "cells" << YAML::Value;
  emit_list(out, cfg.cells);
  out << YAML::Key << "lengths" << YAML::Value;
  emit_list(out, cfg.lengths);
  out << YAML::Key << "origin" << YAML::Value;
  emit_list(out, cfg.origin);
  out << YAML::Key << "ratio" << YAML::Value;
  emit_list(out, cfg.ratio);
  out << YAML::EndMap;

  out << YAML::Key << "materials" << YAML::Value << YAML::BeginMap;
  const std::vector<std::pair<const char*, double>> constants = {
      {"K_b", cfg.material.K_b}, {"K_s", cfg.material.K_s},   {"G", cfg.material.G},
      {"phi0", cfg.material.phi0}, {"c", cfg.material.c},     {"mu", cfg.material.mu},
      {"rho0", cfg.material.rho0}, {"rho_r", cfg.material.rho_r}};
  for (const auto& [key, value] : constants)
    if (!csv.count(key) || value != 0.0) out << YAML::Key << key << YAML::Value << value;
  if (cfg.material.permeability != Vec3{0.0, 0.0, 0.0}) {
    out << YAML::Key << "permeability" << YAML::Value;
    emit_list(out, cfg.material.permeability);
  }
  if (!cfg.material_csv.empty()) out << YAML::Key << "csv" << YAML::Value << cfg.material_csv;
  out << YAML::EndMap;

  out << YAML::Key << "eta" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "rule" << YAML::Value << to_string(cfg.eta_rule.kind);
  if (cfg.eta_rule.kind == EtaRule::Kind::Scaled) out << YAML::Key << "factor" << YAML::Value << cfg.eta_rule.value;
  if (cfg.eta_rule.kind == EtaRule::Kind::Custom && !csv.count("eta"))
    out << YAML::Key << "value" << YAML::Value << cfg.eta_rule.value;
  out << YAML::Key << "shear" << YAML::Value << (cfg.shear_rule == ShearRule::Harmonic ? "harmonic" : "arithmetic");
  out << YAML::EndMap;

  out << YAML::Key << "boundary" << YAML::Value << YAML::BeginMap;
  for (int f = 0; f < 6; ++f) {
    const FaceCondition& fc = cfg.boundary.faces[f];
    out << YAML::Key << kFaceKeys[f] << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "flow" << YAML::Value << (fc.flow == FlowBc::Pressure ? "pressure" : "no_flux");
    if (fc.flow == FlowBc::Pressure) out << YAML::Key << "pressure" << YAML::Value << fc.pressure;
    out << YAML::Key << "mech" << YAML::Value << (fc.mech == MechBc::Traction ? "traction" : "normal_zero");
    if (fc.mech == MechBc::Traction) {
      out << YAML::Key << "traction" << YAML::Value;
      emit_list(out, fc.traction);
    }
    out << YAML::EndMap;
  }
  out << YAML::EndMap;

  out << YAML::Key << "gravity" << YAML::Value;
  emit_list(out, cfg.gravity);
  out << YAML::Key << "source" << YAML::Value << cfg.source;

  out << YAML::Key << "initial" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "pressure" << YAML::Value << cfg.p_initial;
  out << YAML::Key << "stress" << YAML::Value;
  emit_list(out, std::array<double, 6>{cfg.sigma0.xx, cfg.sigma0.yy, cfg.sigma0.zz, cfg.sigma0.xy, cfg.sigma0.yz,
                                       cfg.sigma0.xz});
  out << YAML::EndMap;

  out << YAML::Key << "time" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "dt" << YAML::Value << cfg.dt;
  out << YAML::Key << "end" << YAML::Value << cfg.end_time;
  out << YAML::EndMap;

  out << YAML::Key << "coupling" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "tol" << YAML::Value << cfg.tol_c;
  out << YAML::Key << "max_iters" << YAML::Value << cfg.max_iters;
  out << YAML::EndMap;

  out << YAML::Key << "solver" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "tol" << YAML::Value << cfg.solver_tol;
  out << YAML::Key << "max_iter" << YAML::Value << cfg.solver_max_iter;
  out << YAML::EndMap;

  out << YAML::Key << "output" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "dir" << YAML::Value << cfg.output_dir;
  out << YAML::Key << "snapshots" << YAML::Value << cfg.snapshots;
  out << YAML::EndMap;

  out << YAML::Key << "scenario" << YAML::Value << cfg.scenario;
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

void write_config(const RunConfig& cfg, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << config_to_yaml(cfg);
  if (!out) throw IoError("failed writing " + path.string());
}

void apply_environment(RunConfig& cfg) {
  if (const char* dir = std::getenv("BIOTSPLIT_OUTPUT_DIR"); dir && *dir) cfg.output_dir = dir;
}

ProblemSpec to_problem_spec(const RunConfig& cfg) {
  ProblemSpec spec;
  spec.fine_grid = HexGrid(cfg.cells, cfg.lengths, cfg.origin, cfg.boundary);
  spec.ratio = cfg.ratio;
  const std::size_t n = spec.fine_grid.num_cells();
  spec.materials.assign(n, cfg.material);
  spec.eta_rule = cfg.eta_rule;
  spec.shear_rule = cfg.shear_rule;
  spec.gravity = cfg.gravity;
  spec.sigma0 = cfg.sigma0;
  spec.q.assign(n, cfg.source);
  spec.p_initial.assign(n, cfg.p_initial);
  if (!cfg.material_csv.empty()) {
    const CellTable table = read_cell_table(cfg.material_csv, n);
    const std::map<std::string, double PoroInput::*> scalar_columns = {
        {"K_b", &PoroInput::K_b},   {"K_s", &PoroInput::K_s}, {"G", &PoroInput::G},
        {"phi0", &PoroInput::phi0}, {"c", &PoroInput::c},     {"mu", &PoroInput::mu},
        {"rho0", &PoroInput::rho0}, {"rho_r", &PoroInput::rho_r}, {"eta", &PoroInput::eta}};
    for (std::size_t cell = 0; cell < n; ++cell) {
      PoroInput& m = spec.materials[cell];
      for (const auto& [name, member] : scalar_columns)
        if (table.has(name)) m.*member = table.get(cell, name);
      const std::array<const char*, 3> perm = {"kx", "ky", "kz"};
      for (int a = 0; a < 3; ++a)
        if (table.has(perm[a])) m.permeability[a] = table.get(cell, perm[a]);
      if (table.has("q")) spec.q[cell] = table.get(cell, "q");
      if (table.has("p0")) spec.p_initial[cell] = table.get(cell, "p0");
    }
    spec.eta_from_materials = table.has("eta");
  }
  return spec;
}

CouplingOptions coupling_options(const RunConfig& cfg) {
  CouplingOptions options;
  options.tol = cfg.tol_c;
  options.max_iters = cfg.max_iters;
  options.flow_solver = {cfg.solver_tol, cfg.solver_max_iter};
  options.mech_solver = {cfg.solver_tol, cfg.solver_max_iter};
  return options;
}

}  // namespace biot
