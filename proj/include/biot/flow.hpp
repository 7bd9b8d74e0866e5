#pragma once

#include <span>
#include <vector>

#include "biot/grid.hpp"
#include "biot/linalg.hpp"
#include "biot/materials.hpp"

namespace biot {

/// Fine-grid flow unknowns: cell pressures and face normal fluxes.
struct FlowState {
  std::vector<double> p;            // Pa, per fine cell
  std::vector<double> z;            // m/s, per fine face, oriented along +axis
  std::vector<double> p_prev_time;  // Pa, last accepted time level

  static FlowState uniform(const HexGrid& grid, std::span<const double> p0);
};

struct FlowLoads {
  std::vector<double> q;  // volumetric source density (1/s) per fine cell
  Vec3 gravity{0.0, 0.0, 0.0};
};

/// Face transmissibilities obtained by eliminating the lumped lowest-order
/// face fluxes. Each flux is T * (p_upstream - p_downstream + gravity_head).
struct FlowStencil {
  struct InteriorFace {
    std::size_t face;
    std::size_t left;   // cell on the -axis side
    std::size_t right;  // cell on the +axis side
    double trans;       // harmonic combination of the half-cell transmissibilities (m^3/(Pa s))
    double gravity_head;  // Pa, added to p_left - p_right
  };
  struct DirichletFace {
    std::size_t face;
    std::size_t cell;
    double sign;  // +1 if the outward normal is +axis
    double trans;
    double pressure;
    double gravity_head;  // Pa, added to p_cell - g for the outward flux
  };
  std::vector<InteriorFace> interior;
  std::vector<DirichletFace> dirichlet;
};

FlowStencil build_flow_stencil(const HexGrid& grid, const FineMaterialField& fine, const Vec3& gravity);

struct FlowSystem {
  SparseSymMatrix matrix;
  std::vector<double> rhs;
};

//! Cell-centred SPD operator phi V + dt * (two-point divergence).
SparseSymMatrix flow_matrix(const FlowStencil& stencil, const HexGrid& grid, const FineMaterialField& fine,
                            double dt);
std::vector<double> flow_rhs(const FlowStencil& stencil, const HexGrid& grid, const FineMaterialField& fine,
                             std::span<const double> p_prev_time, std::span<const double> sigma_bar_change,
                             double dt, const FlowLoads& loads);

/// Backward-Euler mass balance with the decoupling constraint folded in,
/// reduced to pressures. `sigma_bar_change` is sigma_bar^{m-1,n+1} - sigma_bar^n.
FlowSystem assemble_flow_system(const NestedGridPair& pair, const FineMaterialField& fine, const FlowState& state,
                                std::span<const double> sigma_bar_change, double dt, const FlowLoads& loads);

/// Solves for the new pressure starting from state.p, then recovers face
/// fluxes. Returns the pressure change made by this solve.
std::vector<double> solve_flow_step(const FlowSystem& system, const FlowStencil& stencil, const HexGrid& grid,
                                    FlowState& state, const CgOptions& options = {});

/// rhs - A p evaluated face by face, so that a balanced state gives an
/// exactly zero residual.
std::vector<double> flow_residual(const FlowStencil& stencil, const HexGrid& grid, const FineMaterialField& fine,
                                  std::span<const double> p_prev_time, std::span<const double> p,
                                  std::span<const double> sigma_bar_change, double dt, const FlowLoads& loads);

//! Solves A dp = residual, adds dp to state.p and refreshes the fluxes. Returns dp.
std::vector<double> apply_flow_correction(const SparseSymMatrix& matrix, std::span<const double> residual,
                                          const FlowStencil& stencil, const HexGrid& grid, FlowState& state,
                                          const CgOptions& options = {});

std::vector<double> recover_fluxes(const FlowStencil& stencil, const HexGrid& grid, std::span<const double> p);

/// Per-cell phi dp V + dt (outward flux) - dt q V + (alpha/eta) dsigma V.
std::vector<double> mass_balance_residual(const NestedGridPair& pair, const FineMaterialField& fine,
                                          const FlowState& state_old, const FlowState& state_new,
                                          std::span<const double> sigma_bar_change, double dt,
                                          const FlowLoads& loads);

}  // namespace biot
