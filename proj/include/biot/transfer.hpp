#pragma once

#include <span>
#include <vector>

#include "biot/flow.hpp"
#include "biot/grid.hpp"
#include "biot/materials.hpp"
#include "biot/mech.hpp"

namespace biot {

/// Fine-to-coarse pressure map
///   R dp |_{E^p} = (eta_p / alpha_p) sum_{children} (alpha_f / eta_f) dp_f V_f / V_p.
/// When alpha_p and every child alpha_f vanish, R is the volume average.
std::vector<double> restrict_pressure(const NestedGridPair& pair, const FineMaterialField& fine,
                                      const CoarseMaterialField& coarse, std::span<const double> dp_fine);

/// Coarse-to-fine volumetric strain map P de |_{E^f} = (eta_p / eta_f) de_p,
/// where de_p is the cell average over the parent.
std::vector<double> prolong_strain(const NestedGridPair& pair, const FineMaterialField& fine,
                                   const CoarseMaterialField& coarse, std::span<const double> d_eps_coarse);

struct ConditionReport {
  double c1_gap = 0.0;    // sum_f alpha_f (P de, dp)_f - sum_p alpha_p (de, R dp)_p
  double c1_scale = 0.0;  // sum of the absolute values of both sums' terms
  double c2_gap = 0.0;    // sum_p eta_p ||de||^2 - sum_f eta_f ||P de||^2
  double c2_scale = 0.0;
  bool c3_ok = true;      // eta_p <= 2 K_b_p on every coarse cell
};

/// Evaluates the three contraction conditions for one pair of increments.
/// `d_eps_sq_coarse`, when non-empty, holds the integral of (de)^2 over each
/// coarse cell; otherwise de is treated as cellwise constant.
ConditionReport verify_conditions(const NestedGridPair& pair, const FineMaterialField& fine,
                                  const CoarseMaterialField& coarse, std::span<const double> dp_fine,
                                  std::span<const double> d_eps_coarse,
                                  std::span<const double> d_eps_sq_coarse = {});

struct CouplingState {
  std::vector<double> sigma_bar_fine;
  std::vector<double> sigma_bar_coarse;
  std::vector<double> p_restricted;
  std::vector<double> eps_prolonged;
  std::vector<double> increment_history;
};

/// sigma_bar_coarse = eta_p eps_H - alpha_p R p and
/// sigma_bar_fine = eta_f P eps_H - alpha_f p, using the current states.
void update_sigma_bar(const NestedGridPair& pair, const FineMaterialField& fine, const CoarseMaterialField& coarse,
                      const FlowState& flow, const MechState& mech, CouplingState& state);

//! sum_f ||sigma_new - sigma_old||^2_{E^f} / eta_f
double weighted_increment_norm(const NestedGridPair& pair, const FineMaterialField& fine,
                               std::span<const double> sigma_old, std::span<const double> sigma_new);

}  // namespace biot
