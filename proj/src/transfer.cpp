#include "biot/transfer.hpp"

#include <cmath>

#include "biot/error.hpp"

namespace biot {

std::vector<double> restrict_pressure(const NestedGridPair& pair, const FineMaterialField& fine,
                                      const CoarseMaterialField& coarse, std::span<const double> dp_fine) {
  const double weight = pair.fine.cell_volume() / pair.coarse.cell_volume();
  std::vector<double> out(pair.coarse.num_cells());
  for (std::size_t p = 0; p < out.size(); ++p) {
    const CoarseCell& cp = coarse[p];
    double sum = 0.0;
    if (cp.alpha == 0.0) {
      for (std::size_t f : pair.children[p]) {
        if (fine[f].alpha != 0.0)
          throw InconsistentCouplingError("coarse cell " + std::to_string(p) +
                                          " has alpha_p = 0 but a child with nonzero alpha");
        sum += dp_fine[f] * weight;
      }
      out[p] = sum;
      continue;
    }
    for (std::size_t f : pair.children[p]) sum += fine[f].alpha / fine[f].eta * dp_fine[f] * weight;
    out[p] = cp.eta / cp.alpha * sum;
  }
  return out;
}

std::vector<double> prolong_strain(const NestedGridPair& pair, const FineMaterialField& fine,
                                   const CoarseMaterialField& coarse, std::span<const double> d_eps_coarse) {
  std::vector<double> out(pair.fine.num_cells());
  for (std::size_t f = 0; f < out.size(); ++f) {
    const std::size_t p = pair.parent[f];
    out[f] = coarse[p].eta / fine[f].eta * d_eps_coarse[p];
  }
  return out;
}

ConditionReport verify_conditions(const NestedGridPair& pair, const FineMaterialField& fine,
                                  const CoarseMaterialField& coarse, std::span<const double> dp_fine,
                                  std::span<const double> d_eps_coarse, std::span<const double> d_eps_sq_coarse) {
  const std::vector<double> Rp = restrict_pressure(pair, fine, coarse, dp_fine);
  const std::vector<double> Pe = prolong_strain(pair, fine, coarse, d_eps_coarse);
  const double vf = pair.fine.cell_volume();
  const double vp = pair.coarse.cell_volume();

  ConditionReport report;
  for (std::size_t f = 0; f < Pe.size(); ++f) {
    const double t1 = fine[f].alpha * Pe[f] * dp_fine[f] * vf;
    const double t2 = fine[f].eta * Pe[f] * Pe[f] * vf;
    report.c1_gap += t1;
    report.c1_scale += std::abs(t1);
    report.c2_gap -= t2;
    report.c2_scale += t2;
  }
  for (std::size_t p = 0; p < Rp.size(); ++p) {
    const double t1 = coarse[p].alpha * d_eps_coarse[p] * vp * Rp[p];
    const double sq = d_eps_sq_coarse.empty() ? d_eps_coarse[p] * d_eps_coarse[p] * vp : d_eps_sq_coarse[p];
    const double t2 = coarse[p].eta * sq;
    report.c1_gap -= t1;
    report.c1_scale += std::abs(t1);
    report.c2_gap += t2;
    report.c2_scale += t2;
    if (coarse[p].eta > 2.0 * coarse[p].K_b * (1.0 + 1e-14)) report.c3_ok = false;
  }
  return report;
}

void update_sigma_bar(const NestedGridPair& pair, const FineMaterialField& fine, const CoarseMaterialField& coarse,
                      const FlowState& flow, const MechState& mech, CouplingState& state) {
  state.p_restricted = restrict_pressure(pair, fine, coarse, flow.p);
  state.eps_prolonged = prolong_strain(pair, fine, coarse, mech.eps_v);
  state.sigma_bar_coarse.resize(pair.coarse.num_cells());
  for (std::size_t p = 0; p < state.sigma_bar_coarse.size(); ++p)
    state.sigma_bar_coarse[p] = coarse[p].eta * mech.eps_v[p] - coarse[p].alpha * state.p_restricted[p];
  state.sigma_bar_fine.resize(pair.fine.num_cells());
  for (std::size_t f = 0; f < state.sigma_bar_fine.size(); ++f)
    state.sigma_bar_fine[f] = fine[f].eta * state.eps_prolonged[f] - fine[f].alpha * flow.p[f];
}

double weighted_increment_norm(const NestedGridPair& pair, const FineMaterialField& fine,
                               std::span<const double> sigma_old, std::span<const double> sigma_new) {
  const double vf = pair.fine.cell_volume();
  double sum = 0.0;
  for (std::size_t f = 0; f < sigma_new.size(); ++f) {
    const double d = sigma_new[f] - sigma_old[f];
    sum += d * d * vf / fine[f].eta;
  }
  return sum;
}

}  // namespace biot
