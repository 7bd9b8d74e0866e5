#pragma once

#include <span>
#include <string>
#include <vector>

#include "biot/grid.hpp"

namespace biot {

/// Raw per-cell rock and fluid data as ingested from config or CSV.
struct PoroInput {
  double K_b = 0.0;   // drained bulk modulus (Pa)
  double K_s = 0.0;   // grain bulk modulus (Pa), may be +inf
  double G = 0.0;     // shear modulus (Pa)
  double phi0 = 0.0;  // reference porosity
  double c = 0.0;     // fluid compressibility (1/Pa)
  double mu = 0.0;    // viscosity (Pa s)
  Vec3 permeability{0.0, 0.0, 0.0};  // diagonal of K (m^2)
  double rho0 = 0.0;  // reference fluid density (kg/m^3)
  double rho_r = 0.0; // rock density (kg/m^3)
  double eta = 0.0;   // decoupling parameter

  bool operator==(const PoroInput&) const = default;
};

/// One fine cell: raw inputs plus the closed-form derived coefficients.
struct PoroCell : PoroInput {
  double alpha = 0.0;   // 1 - K_b/K_s
  double M = 0.0;       // Biot modulus
  double varphi = 0.0;  // 1/M + alpha^2/eta
  double lambda = 0.0;  // K_b - 2G/3
  Vec3 kappa{0.0, 0.0, 0.0};  // K/mu

  //! Linear density law rho0 (1 + c (p - p0)).
  double density(double p, double p0) const { return rho0 * (1.0 + c * (p - p0)); }
  //! Body force density with density and porosity frozen at reference.
  Vec3 body_force(const Vec3& gravity) const;
};

struct FineMaterialField {
  std::vector<PoroCell> cells;
  std::size_t size() const { return cells.size(); }
  const PoroCell& operator[](std::size_t i) const { return cells[i]; }
};

PoroCell derive_cell(const PoroInput& raw);
FineMaterialField derive_fine_coefficients(std::span<const PoroInput> raw);

struct EtaRule {
  enum class Kind { FixedStress, Reuss, Voigt, Scaled, Custom };
  Kind kind = Kind::FixedStress;
  double value = 0.0;  // multiple of K_b for Scaled, absolute eta for Custom

  static EtaRule fixed_stress() { return {Kind::FixedStress, 1.0}; }
  static EtaRule reuss() { return {Kind::Reuss, 2.0}; }
  static EtaRule voigt() { return {Kind::Voigt, 0.0}; }
  static EtaRule scaled(double factor) { return {Kind::Scaled, factor}; }
  static EtaRule custom(double eta) { return {Kind::Custom, eta}; }

  //! Pointwise eta for a cell with drained modulus K_b.
  double eta_for(double K_b) const;
  bool operator==(const EtaRule&) const = default;
};

std::string to_string(EtaRule::Kind kind);

//! Fill the eta column of every raw cell from the rule.
void assign_eta(std::span<PoroInput> raw, const EtaRule& rule);

enum class ShearRule { Harmonic, Arithmetic };

struct CoarseCell {
  double eta = 0.0;
  double K_b = 0.0;
  double G = 0.0;
  double alpha = 0.0;
  double lambda = 0.0;
  double K_b_harmonic = 0.0;   // Reuss bound of the children
  double K_b_arithmetic = 0.0; // Voigt bound of the children
};

struct CoarseMaterialField {
  std::vector<CoarseCell> cells;
  EtaRule rule;
  //! eta carries 1/Pa under the Voigt identification.
  bool eta_units_inverse_pa = false;
  std::size_t size() const { return cells.size(); }
  const CoarseCell& operator[](std::size_t i) const { return cells[i]; }
};

/// Volume-weighted harmonic mean of child eta for each coarse cell.
std::vector<double> effective_eta(const NestedGridPair& pair, const FineMaterialField& fine);

/// Coarse coefficients for the mechanics grid.
///
/// Bulk modulus follows from eta_p: K_b_p = eta_p / f when eta = f K_b,
/// K_b_p = 1/eta_p under Voigt, and the harmonic mean of child K_b under a
/// custom eta. Shear is averaged per `shear`, alpha arithmetically. Throws
/// DecouplingBoundError if any coarse cell has eta_p > 2 K_b_p.
CoarseMaterialField upscale_coarse_props(const NestedGridPair& pair, const FineMaterialField& fine,
                                         const EtaRule& rule, ShearRule shear = ShearRule::Harmonic);

/// max over fine cells of alpha^2 / (eta/M + alpha^2).
double contraction_constant(const FineMaterialField& fine);

//! Volume-weighted means over the children of one coarse cell.
double harmonic_mean(const NestedGridPair& pair, std::size_t coarse_cell, std::span<const double> values);
double arithmetic_mean(const NestedGridPair& pair, std::size_t coarse_cell, std::span<const double> values);

}  // namespace biot
