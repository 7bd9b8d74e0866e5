#include "biot/materials.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "biot/error.hpp"

namespace biot {

namespace {

std::string where(std::size_t cell) {
  return cell == static_cast<std::size_t>(-1) ? std::string("material") : "cell " + std::to_string(cell);
}

void require_positive(double v, const char* name, std::size_t cell) {
  if (!(v > 0.0) || std::isnan(v)) {
    std::ostringstream os;
    os << where(cell) << ": " << name << " must be positive (got " << v << ")";
    throw InvalidMaterialError(os.str());
  }
}

PoroCell derive_checked(const PoroInput& r, std::size_t i) {
  require_positive(r.K_b, "K_b", i);
  require_positive(r.K_s, "K_s", i);
  require_positive(r.G, "G", i);
  require_positive(r.mu, "mu", i);
  require_positive(r.eta, "eta", i);
  for (double k : r.permeability) require_positive(k, "permeability", i);
  if (r.K_b > r.K_s) {
    std::ostringstream os;
    os << where(i) << ": K_b (" << r.K_b << ") exceeds K_s (" << r.K_s << ")";
    throw InvalidMaterialError(os.str());
  }
  if (!(r.phi0 > 0.0 && r.phi0 < 1.0)) throw InvalidMaterialError(where(i) + ": phi0 must lie in (0,1)");
  if (!(r.c >= 0.0)) throw InvalidMaterialError(where(i) + ": c must be nonnegative");
  PoroCell cell;
  static_cast<PoroInput&>(cell) = r;
  cell.alpha = 1.0 - r.K_b / r.K_s;
  cell.M = 1.0 / (r.phi0 * r.c + (cell.alpha - r.phi0) * (1.0 - cell.alpha) / r.K_b);
  if (!(cell.M > 0.0) || !std::isfinite(cell.M)) {
    std::ostringstream os;
    os << where(i) << ": Biot modulus must be positive and finite (got " << cell.M << ")";
    throw InvalidMaterialError(os.str());
  }
  cell.varphi = 1.0 / cell.M + cell.alpha * cell.alpha / r.eta;
  cell.lambda = r.K_b - 2.0 * r.G / 3.0;
  for (int a = 0; a < 3; ++a) cell.kappa[a] = r.permeability[a] / r.mu;
  return cell;
}

}  // namespace

Vec3 PoroCell::body_force(const Vec3& gravity) const {
  const double density_mix = rho0 * phi0 + rho_r * (1.0 - phi0);
  return {density_mix * gravity[0], density_mix * gravity[1], density_mix * gravity[2]};
}

PoroCell derive_cell(const PoroInput& raw) { return derive_checked(raw, static_cast<std::size_t>(-1)); }

FineMaterialField derive_fine_coefficients(std::span<const PoroInput> raw) {
  FineMaterialField field;
  field.cells.reserve(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) field.cells.push_back(derive_checked(raw[i], i));
  return field;
}

double EtaRule::eta_for(double K_b) const {
  switch (kind) {
    case Kind::FixedStress: return K_b;
    case Kind::Reuss: return 2.0 * K_b;
    case Kind::Voigt: return 1.0 / K_b;
    case Kind::Scaled: return value * K_b;
    case Kind::Custom: return value;
  }
  return K_b;
}

std::string to_string(EtaRule::Kind kind) {
  switch (kind) {
    case EtaRule::Kind::FixedStress: return "fixed_stress";
    case EtaRule::Kind::Reuss: return "reuss";
    case EtaRule::Kind::Voigt: return "voigt";
    case EtaRule::Kind::Scaled: return "scaled";
    case EtaRule::Kind::Custom: return "custom";
  }
  return "fixed_stress";
}

void assign_eta(std::span<PoroInput> raw, const EtaRule& rule) {
  for (auto& cell : raw) cell.eta = rule.eta_for(cell.K_b);
}

double harmonic_mean(const NestedGridPair& pair, std::size_t coarse_cell, std::span<const double> values) {
  const double weight = pair.fine.cell_volume() / pair.coarse.cell_volume();
  double inverse = 0.0;
  for (std::size_t f : pair.children[coarse_cell]) inverse += weight / values[f];
  return 1.0 / inverse;
}

double arithmetic_mean(const NestedGridPair& pair, std::size_t coarse_cell, std::span<const double> values) {
  const double weight = pair.fine.cell_volume() / pair.coarse.cell_volume();
  double sum = 0.0;
  for (std::size_t f : pair.children[coarse_cell]) sum += weight * values[f];
  return sum;
}

namespace {

std::vector<double> column(const FineMaterialField& fine, double PoroInput::*member) {
  std::vector<double> values(fine.size());
  for (std::size_t i = 0; i < fine.size(); ++i) values[i] = fine.cells[i].*member;
  return values;
}

}  // namespace

std::vector<double> effective_eta(const NestedGridPair& pair, const FineMaterialField& fine) {
  const std::vector<double> eta = column(fine, &PoroInput::eta);
  std::vector<double> eta_p(pair.coarse.num_cells());
  for (std::size_t p = 0; p < eta_p.size(); ++p) eta_p[p] = harmonic_mean(pair, p, eta);
  return eta_p;
}

CoarseMaterialField upscale_coarse_props(const NestedGridPair& pair, const FineMaterialField& fine,
                                         const EtaRule& rule, ShearRule shear) {
  if (fine.size() != pair.fine.num_cells())
    throw InvalidMaterialError("material field has " + std::to_string(fine.size()) + " cells, grid has " +
                               std::to_string(pair.fine.num_cells()));
  const std::vector<double> eta_p = effective_eta(pair, fine);
  const std::vector<double> K_b = column(fine, &PoroInput::K_b);
  const std::vector<double> G = column(fine, &PoroInput::G);
  std::vector<double> alpha(fine.size());
  for (std::size_t i = 0; i < fine.size(); ++i) alpha[i] = fine.cells[i].alpha;

  CoarseMaterialField coarse;
  coarse.rule = rule;
  coarse.eta_units_inverse_pa = rule.kind == EtaRule::Kind::Voigt;
  coarse.cells.resize(pair.coarse.num_cells());
  for (std::size_t p = 0; p < coarse.cells.size(); ++p) {
    CoarseCell& cell = coarse.cells[p];
    cell.eta = eta_p[p];
    cell.K_b_harmonic = harmonic_mean(pair, p, K_b);
    cell.K_b_arithmetic = arithmetic_mean(pair, p, K_b);
    switch (rule.kind) {
      case EtaRule::Kind::FixedStress:
      case EtaRule::Kind::Reuss:
      case EtaRule::Kind::Scaled: cell.K_b = eta_p[p] / rule.eta_for(1.0); break;
      case EtaRule::Kind::Voigt: cell.K_b = 1.0 / eta_p[p]; break;
      case EtaRule::Kind::Custom: cell.K_b = cell.K_b_harmonic; break;
    }
    cell.G = shear == ShearRule::Harmonic ? harmonic_mean(pair, p, G) : arithmetic_mean(pair, p, G);
    cell.alpha = arithmetic_mean(pair, p, alpha);
    cell.lambda = cell.K_b - 2.0 * cell.G / 3.0;

    // Reuss sits exactly on the bound, so allow rounding there.
    if (cell.eta > 2.0 * cell.K_b * (1.0 + 1e-14)) {
      std::ostringstream os;
      os.precision(17);
      os << "coarse cell " << p << " violates the decoupling bound eta_p <= 2 K_b_p: eta_p = " << cell.eta
         << ", 2 K_b_p = " << 2.0 * cell.K_b;
      throw DecouplingBoundError(p, os.str());
    }
  }
  return coarse;
}

double contraction_constant(const FineMaterialField& fine) {
  double gamma = 0.0;
  for (const PoroCell& cell : fine.cells) {
    const double a2 = cell.alpha * cell.alpha;
    gamma = std::max(gamma, a2 / (cell.eta / cell.M + a2));
  }
  return gamma;
}

}  // namespace biot
