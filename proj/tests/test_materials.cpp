#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "biot/error.hpp"
#include "biot/materials.hpp"
#include "support.hpp"

using namespace biot;
using biot::testing::rock;

namespace {

PoroInput hand_cell() {
  PoroInput m;
  m.K_b = 1.0;
  m.K_s = 2.0;
  m.G = 1.0;
  m.phi0 = 0.2;
  m.c = 0.5;
  m.mu = 1.0;
  m.permeability = {1.0, 2.0, 3.0};
  m.eta = 2.0;
  return m;
}

NestedGridPair pair_1d(int children) { return nest(build_box_grid(children, 1, 1, {1.0 * children, 1.0, 1.0}), {children, 1, 1}); }

FineMaterialField field_from(std::vector<PoroInput> raw) { return derive_fine_coefficients(raw); }

}  // namespace

TEST(DeriveCell, HandEvaluation) {
  const PoroCell c = derive_cell(hand_cell());
  EXPECT_DOUBLE_EQ(c.alpha, 0.5);
  EXPECT_DOUBLE_EQ(c.M, 4.0);
  EXPECT_DOUBLE_EQ(c.varphi, 0.375);
  EXPECT_DOUBLE_EQ(c.lambda, 1.0 - 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(c.kappa[2], 3.0);
}

TEST(DeriveCell, EqualModuliDecouple) {
  PoroInput m = hand_cell();
  m.K_s = m.K_b;
  m.c = 5.0;
  const PoroCell c = derive_cell(m);
  EXPECT_EQ(c.alpha, 0.0);
  // 1/M = phi0 c + (0 - phi0)(1 - 0)/K_b = 1 - 0.2
  EXPECT_DOUBLE_EQ(c.M, 1.0 / 0.8);
  EXPECT_DOUBLE_EQ(c.varphi, 0.8);
}

TEST(DeriveCell, RejectsNonPositiveModulus) {
  PoroInput m = hand_cell();
  m.K_s = m.K_b;  // 1/M = 0.1 - 0.2 < 0
  EXPECT_THROW(derive_cell(m), InvalidMaterialError);
}

TEST(DeriveCell, RigidGrainsGiveUnitAlpha) {
  PoroInput m = rock();
  m.K_s = std::numeric_limits<double>::infinity();
  const PoroCell c = derive_cell(m);
  EXPECT_EQ(c.alpha, 1.0);
  EXPECT_DOUBLE_EQ(c.M, 1.0 / (m.phi0 * m.c));
}

TEST(DeriveCell, RejectsInvalid) {
  auto bad = [](auto mutate) {
    PoroInput m = rock();
    mutate(m);
    return m;
  };
  EXPECT_THROW(derive_cell(bad([](PoroInput& m) { m.K_b = -1.0; })), InvalidMaterialError);
  EXPECT_THROW(derive_cell(bad([](PoroInput& m) { m.K_s = 0.5 * m.K_b; })), InvalidMaterialError);
  EXPECT_THROW(derive_cell(bad([](PoroInput& m) { m.phi0 = 1.0; })), InvalidMaterialError);
  EXPECT_THROW(derive_cell(bad([](PoroInput& m) { m.c = -1e-10; })), InvalidMaterialError);
  EXPECT_THROW(derive_cell(bad([](PoroInput& m) { m.eta = 0.0; })), InvalidMaterialError);
  EXPECT_THROW(derive_cell(bad([](PoroInput& m) { m.permeability[1] = 0.0; })), InvalidMaterialError);
  EXPECT_THROW(derive_cell(bad([](PoroInput& m) { m.mu = 0.0; })), InvalidMaterialError);
}

TEST(DeriveCellProperty, Invariants) {
  std::mt19937_64 rng(11);
  for (const PoroInput& m : biot::testing::random_rocks(500, rng)) {
    const PoroCell c = derive_cell(m);
    EXPECT_GE(c.alpha, 0.0);
    EXPECT_LE(c.alpha, 1.0);
    EXPECT_GT(c.M, 0.0);
    EXPECT_GT(c.varphi, c.alpha * c.alpha / c.eta);
  }
}

TEST(EffectiveEta, Homogeneous) {
  const NestedGridPair pair = nest(build_box_grid(4, 4, 4, {1.0, 1.0, 1.0}), {2, 2, 2});
  PoroInput m = rock();
  m.eta = 5.0;
  const auto eta = effective_eta(pair, field_from(std::vector<PoroInput>(64, m)));
  for (double e : eta) EXPECT_DOUBLE_EQ(e, 5.0);
}

TEST(EffectiveEta, TwoChildren) {
  std::vector<PoroInput> raw(2, rock());
  raw[0].eta = 2.0;
  raw[1].eta = 6.0;
  EXPECT_DOUBLE_EQ(effective_eta(pair_1d(2), field_from(raw))[0], 3.0);
}

TEST(EffectiveEta, FourChildren) {
  std::vector<PoroInput> raw(4, rock());
  raw[0].eta = raw[1].eta = raw[2].eta = 1.0;
  raw[3].eta = 3.0;
  EXPECT_NEAR(effective_eta(pair_1d(4), field_from(raw))[0], 1.2, 1e-15);
}

TEST(Upscale, ReussEndpoint) {
  std::vector<PoroInput> raw = {rock(1.0, 10.0), rock(3.0, 10.0)};
  assign_eta(raw, EtaRule::reuss());
  EXPECT_DOUBLE_EQ(raw[0].eta, 2.0);
  EXPECT_DOUBLE_EQ(raw[1].eta, 6.0);
  const NestedGridPair pair = pair_1d(2);
  const CoarseMaterialField coarse = upscale_coarse_props(pair, field_from(raw), EtaRule::reuss());
  EXPECT_DOUBLE_EQ(coarse[0].eta, 3.0);
  EXPECT_NEAR(coarse[0].K_b, 1.5, 1.5e-14);
  EXPECT_NEAR(coarse[0].eta, 2.0 * coarse[0].K_b, 3e-14);
  EXPECT_FALSE(coarse.eta_units_inverse_pa);
}

TEST(Upscale, VoigtEndpoint) {
  std::vector<PoroInput> raw = {rock(1.0, 10.0), rock(3.0, 10.0)};
  assign_eta(raw, EtaRule::voigt());
  EXPECT_DOUBLE_EQ(raw[0].eta, 1.0);
  EXPECT_DOUBLE_EQ(raw[1].eta, 1.0 / 3.0);
  const CoarseMaterialField coarse = upscale_coarse_props(pair_1d(2), field_from(raw), EtaRule::voigt());
  EXPECT_NEAR(1.0 / coarse[0].eta, 2.0, 2e-14);
  EXPECT_NEAR(coarse[0].K_b, 2.0, 2e-14);
  EXPECT_TRUE(coarse.eta_units_inverse_pa);
}

TEST(Upscale, HomogeneousEitherRule) {
  for (const EtaRule& rule : {EtaRule::reuss(), EtaRule::voigt(), EtaRule::fixed_stress()}) {
    std::vector<PoroInput> raw(8, rock(7.0, 70.0));
    assign_eta(raw, rule);
    const CoarseMaterialField coarse =
        upscale_coarse_props(nest(build_box_grid(2, 2, 2, {1.0, 1.0, 1.0}), {2, 2, 2}), field_from(raw), rule);
    EXPECT_NEAR(coarse[0].K_b, 7.0, 7e-14);
  }
}

TEST(Upscale, RejectsDecouplingBoundViolation) {
  std::vector<PoroInput> raw(2, rock(1.0, 10.0));
  for (auto& m : raw) m.eta = 3.0;
  EXPECT_THROW(upscale_coarse_props(pair_1d(2), field_from(raw), EtaRule::custom(3.0)), DecouplingBoundError);
}

TEST(Upscale, ArithmeticShearOverride) {
  std::vector<PoroInput> raw = {rock(1.0, 10.0), rock(3.0, 10.0)};
  raw[0].G = 1.0;
  raw[1].G = 3.0;
  assign_eta(raw, EtaRule::reuss());
  const FineMaterialField fine = field_from(raw);
  EXPECT_NEAR(upscale_coarse_props(pair_1d(2), fine, EtaRule::reuss())[0].G, 1.5, 1e-15);
  EXPECT_NEAR(upscale_coarse_props(pair_1d(2), fine, EtaRule::reuss(), ShearRule::Arithmetic)[0].G, 2.0, 1e-15);
}

TEST(UpscaleProperty, BoundsAndSandwich) {
  std::mt19937_64 rng(23);
  const NestedGridPair pair = nest(build_box_grid(4, 4, 4, {1.0, 1.0, 1.0}), {2, 2, 2});
  for (int trial = 0; trial < 40; ++trial) {
    for (const EtaRule& rule : {EtaRule::reuss(), EtaRule::fixed_stress(), EtaRule::scaled(1.5), EtaRule::voigt()}) {
      std::vector<PoroInput> raw = biot::testing::random_rocks(64, rng);
      assign_eta(raw, rule);
      const FineMaterialField fine = field_from(raw);
      const CoarseMaterialField coarse = upscale_coarse_props(pair, fine, rule);
      const auto eta_p = effective_eta(pair, fine);
      for (std::size_t p = 0; p < coarse.size(); ++p) {
        double lo = INFINITY, hi = 0.0;
        for (std::size_t f : pair.children[p]) {
          lo = std::min(lo, fine[f].eta);
          hi = std::max(hi, fine[f].eta);
        }
        EXPECT_LE(lo, eta_p[p] * (1 + 1e-15));
        EXPECT_LE(eta_p[p], hi * (1 + 1e-15));
        const CoarseCell& c = coarse[p];
        EXPECT_LT(c.K_b_harmonic, c.K_b_arithmetic);
        EXPECT_LE(c.K_b_harmonic, c.K_b * (1 + 1e-14));
        EXPECT_LE(c.K_b, c.K_b_arithmetic * (1 + 1e-14));
        EXPECT_LE(c.eta, 2.0 * c.K_b * (1 + 1e-14));
        if (rule.kind == EtaRule::Kind::Reuss) {
          EXPECT_NEAR(c.eta / (2.0 * c.K_b), 1.0, 1e-14);
        }
      }
    }
  }
}

TEST(Contraction, HandValues) {
  PoroInput m = hand_cell();
  m.K_s = m.K_b;
  m.c = 50.0;
  EXPECT_EQ(contraction_constant(field_from({m, m})), 0.0);

  // alpha = 1, eta = 2, M = 2.
  PoroInput a = hand_cell();
  a.K_b = 1.0;
  a.K_s = std::numeric_limits<double>::infinity();
  a.c = 2.5;  // phi0 c = 0.5
  a.eta = 2.0;
  EXPECT_DOUBLE_EQ(derive_cell(a).M, 2.0);
  EXPECT_DOUBLE_EQ(contraction_constant(field_from({a})), 0.5);

  // (alpha, eta, M) = (0.5, 2, 4) and (1, 4, 4).
  PoroInput b = a;
  b.c = 1.25;
  b.eta = 4.0;
  b.K_b = 2.0;
  const FineMaterialField two = field_from({hand_cell(), b});
  EXPECT_DOUBLE_EQ(two[1].M, 4.0);
  EXPECT_DOUBLE_EQ(contraction_constant(two), 0.5);
}

TEST(ContractionProperty, MonotoneInEta) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<PoroInput> raw = biot::testing::random_rocks(10, rng, 1.0);
    const double before = contraction_constant(field_from(raw));
    raw[trial % 10].eta *= 1.0 + u(rng);
    const double after = contraction_constant(field_from(raw));
    EXPECT_LE(after, before);
    EXPECT_LT(after, 1.0);
  }
}
