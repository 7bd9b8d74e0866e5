#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>

#include "biot/config.hpp"
#include "biot/error.hpp"
#include "biot/scenarios.hpp"

using namespace biot;
namespace fs = std::filesystem;

namespace {

const char* kMinimal = R"(
grid:
  cells: [2, 2, 2]
  lengths: [10, 10, 10]
materials:
  K_b: 1.0e9
  K_s: 1.0e10
  G: 6.0e8
  phi0: 0.2
  c: 4.4e-10
  mu: 1.0e-3
  permeability: [1.0e-13, 1.0e-13, 1.0e-13]
)";

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("biot_test_config_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string error_of(const std::string& text, const fs::path& base = ".") {
  try {
    parse_config_text(text, base);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Config, MinimalConfigGetsDefaults) {
  const RunConfig cfg = parse_config_text(kMinimal);
  EXPECT_EQ(cfg.cells, (Index3{2, 2, 2}));
  EXPECT_EQ(cfg.ratio, (Index3{1, 1, 1}));
  EXPECT_EQ(cfg.eta_rule.kind, EtaRule::Kind::FixedStress);
  EXPECT_EQ(cfg.shear_rule, ShearRule::Harmonic);
  EXPECT_DOUBLE_EQ(cfg.tol_c, 1e-8);
  EXPECT_EQ(cfg.max_iters, 200);
  EXPECT_DOUBLE_EQ(cfg.material.rho0, 1000.0);
  EXPECT_DOUBLE_EQ(cfg.material.rho_r, 2650.0);
  for (const auto& face : cfg.boundary.faces) {
    EXPECT_EQ(face.flow, FlowBc::NoFlux);
    EXPECT_EQ(face.mech, MechBc::NormalZero);
  }
  EXPECT_EQ(cfg.scenario, "user");
}

TEST(Config, CustomEtaAboveBoundIsRejected) {
  const std::string msg = error_of(std::string(kMinimal) + "eta:\n  rule: custom\n  value: 3.0e9\n");
  EXPECT_NE(msg.find("eta.value"), std::string::npos) << msg;
  EXPECT_NE(msg.find("decoupling bound"), std::string::npos) << msg;
}

TEST(Config, ScaledFactorAboveTwoIsRejected) {
  const std::string msg = error_of(std::string(kMinimal) + "eta:\n  rule: scaled\n  factor: 2.5\n");
  EXPECT_NE(msg.find("decoupling bound"), std::string::npos) << msg;
}

TEST(Config, UnknownKeyNamesKeyAndLine) {
  const std::string msg = error_of(std::string(kMinimal) + "coupling:\n  tolerance: 1e-6\n");
  EXPECT_NE(msg.find("coupling.tolerance"), std::string::npos) << msg;
  EXPECT_NE(msg.find("line 14"), std::string::npos) << msg;
}

TEST(Config, TypeMismatchIsRejected) {
  const std::string msg = error_of(std::string(kMinimal) + "coupling:\n  max_iters: many\n");
  EXPECT_NE(msg.find("coupling.max_iters"), std::string::npos) << msg;
  EXPECT_NE(msg.find("type mismatch"), std::string::npos) << msg;
}

TEST(Config, ToleranceOutsideUnitIntervalIsRejected) {
  EXPECT_THROW(parse_config_text(std::string(kMinimal) + "coupling:\n  tol: 1.5\n"), ConfigError);
  EXPECT_THROW(parse_config_text(std::string(kMinimal) + "coupling:\n  tol: 0\n"), ConfigError);
  EXPECT_THROW(parse_config_text(std::string(kMinimal) + "coupling:\n  max_iters: 1\n"), ConfigError);
}

TEST(Config, MissingRequiredKey) {
  const std::string text = "grid:\n  cells: [1, 1, 1]\n  lengths: [1, 1, 1]\nmaterials:\n  K_b: 1.0\n";
  EXPECT_NE(error_of(text).find("materials.K_s"), std::string::npos);
}

TEST(Config, RatioMustDivideCells) {
  std::string yaml(kMinimal);
  yaml.replace(yaml.find("  lengths"), 0, "  ratio: [2, 2, 3]\n");
  EXPECT_NE(error_of(yaml).find("grid.ratio"), std::string::npos);
}

TEST(Config, CsvRowCountNamesExpectedCount) {
  const fs::path dir = scratch("rows");
  write_cell_table(dir / "m.csv", {"K_b"}, {{1e9}, {2e9}, {3e9}});
  std::string yaml(kMinimal);
  yaml.replace(yaml.find("  K_b: 1.0e9\n"), 13, "  csv: m.csv\n");
  const std::string msg = error_of(yaml, dir);
  EXPECT_NE(msg.find("expected 8 rows"), std::string::npos) << msg;
  EXPECT_NE(msg.find("got 3"), std::string::npos) << msg;
}

TEST(Config, CsvMissingFileIsRejected) {
  std::string yaml(kMinimal);
  yaml.replace(yaml.find("  K_b: 1.0e9\n"), 13, "  csv: absent.csv\n");
  EXPECT_NE(error_of(yaml, scratch("absent")).find("file not found"), std::string::npos);
}

TEST(Config, EtaColumnRequiresCustomRule) {
  const fs::path dir = scratch("eta_col");
  std::vector<std::vector<double>> rows(8, std::vector<double>{1e9});
  write_cell_table(dir / "m.csv", {"eta"}, rows);
  std::string yaml(kMinimal);
  yaml += "  csv: m.csv\n";
  EXPECT_NE(error_of(yaml, dir).find("eta.rule: custom"), std::string::npos);
  const RunConfig cfg = parse_config_text(yaml + "eta:\n  rule: custom\n", dir);
  EXPECT_EQ(cfg.eta_rule.kind, EtaRule::Kind::Custom);
  EXPECT_TRUE(to_problem_spec(cfg).eta_from_materials);
}

TEST(Config, CellTableRoundTrip) {
  const fs::path dir = scratch("table");
  const std::vector<std::vector<double>> rows = {{1.0 / 3.0, 1e-15}, {2.5e9, 0.1 + 0.2}};
  write_cell_table(dir / "t.csv", {"K_b", "kx"}, rows);
  const CellTable t = read_cell_table(dir / "t.csv", 2);
  EXPECT_EQ(t.columns, (std::vector<std::string>{"K_b", "kx"}));
  EXPECT_EQ(t.rows, rows);
  EXPECT_THROW(read_cell_table(dir / "t.csv", 3), ConfigError);
}

TEST(Config, CellTableRejectsUnknownColumn) {
  const fs::path dir = scratch("badcol");
  std::ofstream(dir / "t.csv") << "cell,K_b,porosity\n0,1,2\n";
  EXPECT_THROW(read_cell_table(dir / "t.csv", 1), ConfigError);
}

TEST(Config, RoundTripConstantMaterials) {
  RunConfig cfg = parse_config_text(std::string(kMinimal) + R"(
eta:
  rule: scaled
  factor: 1.7
  shear: arithmetic
boundary:
  x_min: {flow: pressure, pressure: 9.0e6}
  z_max: {mech: traction, traction: [0, 0, -2.0e7]}
gravity: [0, 0, -9.81]
source: 1.0e-7
initial:
  pressure: 1.0e7
  stress: [-2.0e7, -2.0e7, -2.0e7, 0, 0, 0]
time: {dt: 3600, end: 7200}
coupling: {tol: 1.0e-9, max_iters: 50}
solver: {tol: 1.0e-12, max_iter: 500}
output: {dir: out, snapshots: false}
)");
  cfg.material.K_s = 0.1 + 0.2 + 1e10;
  const RunConfig back = parse_config_text(config_to_yaml(cfg));
  EXPECT_EQ(back, cfg);
}

TEST(Config, RoundTripRigidGrains) {
  RunConfig cfg = parse_config_text(kMinimal);
  cfg.material.K_s = std::numeric_limits<double>::infinity();
  const RunConfig back = parse_config_text(config_to_yaml(cfg));
  EXPECT_EQ(back, cfg);
  EXPECT_TRUE(std::isinf(back.material.K_s));
}

TEST(Config, RoundTripWithCsvTable) {
  const fs::path dir = scratch("roundtrip_csv");
  const RunConfig cfg = heterogeneous_config(dir, 1.5);
  write_config(cfg, dir / "run.yaml");
  const RunConfig back = parse_config(dir / "run.yaml");
  EXPECT_EQ(back, cfg);
}

TEST(Config, EnvironmentOverridesOutputDir) {
  RunConfig cfg = parse_config_text(kMinimal);
  ::setenv("BIOTSPLIT_OUTPUT_DIR", "/tmp/biot_env_dir", 1);
  apply_environment(cfg);
  ::unsetenv("BIOTSPLIT_OUTPUT_DIR");
  EXPECT_EQ(cfg.output_dir, "/tmp/biot_env_dir");
  RunConfig untouched = parse_config_text(kMinimal);
  apply_environment(untouched);
  EXPECT_EQ(untouched.output_dir, "output");
}

TEST(Config, ProblemSpecAppliesCsvOverrides) {
  const fs::path dir = scratch("csv_overrides");
  const RunConfig cfg = heterogeneous_config(dir, 1.0);
  const CellTable t = read_cell_table(cfg.material_csv, 512);
  const ProblemSpec spec = to_problem_spec(cfg);
  ASSERT_EQ(spec.materials.size(), 512u);
  for (std::size_t i = 0; i < 512; ++i) {
    EXPECT_EQ(spec.materials[i].K_b, t.get(i, "K_b"));
    EXPECT_EQ(spec.materials[i].permeability[2], t.get(i, "kz"));
    EXPECT_EQ(spec.materials[i].phi0, cfg.material.phi0);
  }
}
