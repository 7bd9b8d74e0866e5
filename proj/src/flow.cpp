#include "biot/flow.hpp"

#include <cmath>

#include "biot/error.hpp"

namespace biot {

FlowState FlowState::uniform(const HexGrid& grid, std::span<const double> p0) {
  FlowState state;
  state.p.assign(p0.begin(), p0.end());
  state.p_prev_time = state.p;
  state.z.assign(grid.num_faces(), 0.0);
  return state;
}

FlowStencil build_flow_stencil(const HexGrid& grid, const FineMaterialField& fine, const Vec3& gravity) {
  if (fine.size() != grid.num_cells()) throw InvalidMaterialError("flow material size does not match grid");
  FlowStencil stencil;
  for (int axis = 0; axis < 3; ++axis) {
    const double area = grid.face_area(axis);
    const double half = 0.5 * grid.h(axis);
    const double g = gravity[axis];
    auto half_trans = [&](std::size_t cell) {
      const double k = fine[cell].kappa[axis];
      if (!(k > 0.0) || !std::isfinite(k))
        throw InvalidMaterialError("cell " + std::to_string(cell) + ": hydraulic conductivity must be positive");
      return k * area / half;
    };
    for (int k = 0; k < grid.n(2) + (axis == 2); ++k)
      for (int j = 0; j < grid.n(1) + (axis == 1); ++j)
        for (int i = 0; i < grid.n(0) + (axis == 0); ++i) {
          const Index3 plane{i, j, k};
          const std::size_t face = grid.face_index(axis, plane);
          const int pos = plane[axis];
          Index3 lo = plane;
          lo[axis] = pos - 1;
          if (pos > 0 && pos < grid.n(axis)) {
            const std::size_t left = grid.cell_index(lo[0], lo[1], lo[2]);
            const std::size_t right = grid.cell_index(i, j, k);
            const double tl = half_trans(left);
            const double tr = half_trans(right);
            stencil.interior.push_back({face, left, right, tl * tr / (tl + tr),
                                        (fine[left].rho0 + fine[right].rho0) * g * half});
            continue;
          }
          const bool max_side = pos == grid.n(axis);
          const FaceCondition& bc = grid.boundary()[box_face(axis, max_side)];
          if (bc.flow != FlowBc::Pressure) continue;
          const std::size_t cell = max_side ? grid.cell_index(lo[0], lo[1], lo[2]) : grid.cell_index(i, j, k);
          const double sign = max_side ? 1.0 : -1.0;
          stencil.dirichlet.push_back(
              {face, cell, sign, half_trans(cell), bc.pressure, sign * fine[cell].rho0 * g * half});
        }
  }
  return stencil;
}

SparseSymMatrix flow_matrix(const FlowStencil& stencil, const HexGrid& grid, const FineMaterialField& fine,
                            double dt) {
  if (!(dt > 0.0)) throw StepError("time step must be positive");
  const double volume = grid.cell_volume();
  std::vector<Triplet> entries;
  entries.reserve(grid.num_cells() + 4 * stencil.interior.size() + stencil.dirichlet.size());
  for (std::size_t c = 0; c < grid.num_cells(); ++c) entries.push_back({c, c, fine[c].varphi * volume});
  for (const auto& f : stencil.interior) {
    const double w = dt * f.trans;
    entries.push_back({f.left, f.left, w});
    entries.push_back({f.right, f.right, w});
    entries.push_back({f.left, f.right, -w});
    entries.push_back({f.right, f.left, -w});
  }
  for (const auto& f : stencil.dirichlet) entries.push_back({f.cell, f.cell, dt * f.trans});
  return SparseSymMatrix(grid.num_cells(), std::move(entries));
}

std::vector<double> flow_rhs(const FlowStencil& stencil, const HexGrid& grid, const FineMaterialField& fine,
                             std::span<const double> p_prev_time, std::span<const double> sigma_bar_change,
                             double dt, const FlowLoads& loads) {
  if (!(dt > 0.0)) throw StepError("time step must be positive");
  const double volume = grid.cell_volume();
  std::vector<double> rhs(grid.num_cells());
  for (std::size_t c = 0; c < rhs.size(); ++c) {
    const PoroCell& m = fine[c];
    const double q = loads.q.empty() ? 0.0 : loads.q[c];
    rhs[c] = m.varphi * volume * p_prev_time[c] + dt * q * volume -
             m.alpha / m.eta * sigma_bar_change[c] * volume;
  }
  for (const auto& f : stencil.interior) {
    rhs[f.left] -= dt * f.trans * f.gravity_head;
    rhs[f.right] += dt * f.trans * f.gravity_head;
  }
  for (const auto& f : stencil.dirichlet) rhs[f.cell] += dt * f.trans * (f.pressure - f.gravity_head);
  return rhs;
}

FlowSystem assemble_flow_system(const NestedGridPair& pair, const FineMaterialField& fine, const FlowState& state,
                                std::span<const double> sigma_bar_change, double dt, const FlowLoads& loads) {
  const FlowStencil stencil = build_flow_stencil(pair.fine, fine, loads.gravity);
  return {flow_matrix(stencil, pair.fine, fine, dt),
          flow_rhs(stencil, pair.fine, fine, state.p_prev_time, sigma_bar_change, dt, loads)};
}

std::vector<double> recover_fluxes(const FlowStencil& stencil, const HexGrid& grid, std::span<const double> p) {
  std::vector<double> z(grid.num_faces(), 0.0);
  for (const auto& f : stencil.interior) {
    z[f.face] = f.trans * (p[f.left] - p[f.right] + f.gravity_head) / grid.face_area(grid.face_axis(f.face));
  }
  for (const auto& f : stencil.dirichlet) {
    z[f.face] = f.sign * f.trans * (p[f.cell] - f.pressure + f.gravity_head) / grid.face_area(grid.face_axis(f.face));
  }
  return z;
}

std::vector<double> flow_residual(const FlowStencil& stencil, const HexGrid& grid, const FineMaterialField& fine,
                                  std::span<const double> p_prev_time, std::span<const double> p,
                                  std::span<const double> sigma_bar_change, double dt, const FlowLoads& loads) {
  const double volume = grid.cell_volume();
  std::vector<double> r(grid.num_cells());
  for (std::size_t c = 0; c < r.size(); ++c) {
    const PoroCell& m = fine[c];
    const double q = loads.q.empty() ? 0.0 : loads.q[c];
    r[c] = m.varphi * volume * (p_prev_time[c] - p[c]) + dt * q * volume -
           m.alpha / m.eta * sigma_bar_change[c] * volume;
  }
  for (const auto& f : stencil.interior) {
    const double flux = dt * f.trans * (p[f.left] - p[f.right] + f.gravity_head);
    r[f.left] -= flux;
    r[f.right] += flux;
  }
  for (const auto& f : stencil.dirichlet) r[f.cell] -= dt * f.trans * (p[f.cell] - f.pressure + f.gravity_head);
  return r;
}

std::vector<double> apply_flow_correction(const SparseSymMatrix& matrix, std::span<const double> residual,
                                          const FlowStencil& stencil, const HexGrid& grid, FlowState& state,
                                          const CgOptions& options) {
  CgResult correction = cg_solve(matrix, residual, options);
  for (std::size_t i = 0; i < state.p.size(); ++i) {
    state.p[i] += correction.x[i];
    if (!std::isfinite(state.p[i])) throw StepError("non-finite pressure in cell " + std::to_string(i));
  }
  state.z = recover_fluxes(stencil, grid, state.p);
  return std::move(correction.x);
}

std::vector<double> solve_flow_step(const FlowSystem& system, const FlowStencil& stencil, const HexGrid& grid,
                                    FlowState& state, const CgOptions& options) {
  std::vector<double> residual = system.matrix.multiply(state.p);
  for (std::size_t i = 0; i < residual.size(); ++i) residual[i] = system.rhs[i] - residual[i];
  return apply_flow_correction(system.matrix, residual, stencil, grid, state, options);
}

std::vector<double> mass_balance_residual(const NestedGridPair& pair, const FineMaterialField& fine,
                                          const FlowState& state_old, const FlowState& state_new,
                                          std::span<const double> sigma_bar_change, double dt,
                                          const FlowLoads& loads) {
  const HexGrid& grid = pair.fine;
  const double volume = grid.cell_volume();
  std::vector<double> residual(grid.num_cells());
  for (std::size_t c = 0; c < residual.size(); ++c) {
    const PoroCell& m = fine[c];
    const double q = loads.q.empty() ? 0.0 : loads.q[c];
    double outflow = 0.0;
    const Index3 ijk = grid.cell_ijk(c);
    for (int axis = 0; axis < 3; ++axis) {
      Index3 hi = ijk;
      hi[axis] += 1;
      const double area = grid.face_area(axis);
      outflow += (state_new.z[grid.face_index(axis, hi)] - state_new.z[grid.face_index(axis, ijk)]) * area;
    }
    residual[c] = m.varphi * (state_new.p[c] - state_old.p[c]) * volume + dt * outflow - dt * q * volume +
                  m.alpha / m.eta * sigma_bar_change[c] * volume;
  }
  return residual;
}

}  // namespace biot
