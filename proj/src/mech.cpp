#include "biot/mech.hpp"

#include <cmath>
#include <sstream>

#include "biot/error.hpp"

namespace biot {

double SymTensor::operator()(int i, int j) const {
  if (i == j) return i == 0 ? xx : (i == 1 ? yy : zz);
  switch (i + j) {
    case 1: return xy;
    case 3: return yz;
    default: return xz;
  }
}

MechState MechState::zero(const HexGrid& coarse) {
  MechState state;
  state.u.assign(coarse.num_nodes(), Vec3{0.0, 0.0, 0.0});
  state.eps_v.assign(coarse.num_cells(), 0.0);
  state.eps_v_sq.assign(coarse.num_cells(), 0.0);
  return state;
}

namespace {

using Mat3 = std::array<std::array<double, 3>, 3>;

Mat3 strain_of(const Vec3& grad, int component) {
  Mat3 eps{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      eps[i][j] = 0.5 * ((i == component ? grad[j] : 0.0) + (j == component ? grad[i] : 0.0));
  return eps;
}

double contract(const Mat3& a, const Mat3& b) {
  double sum = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) sum += a[i][j] * b[i][j];
  return sum;
}

//! Integral of the 1D hat (1 - t) or t over [t0, t1] of the unit interval.
double hat_integral(int corner, double t0, double t1) {
  const double linear = 0.5 * (t1 * t1 - t0 * t0);
  return corner == 0 ? (t1 - t0) - linear : linear;
}

void check_rigid_modes(const HexGrid& coarse, const MechDofMap& dofs) {
  const Vec3 len = coarse.lengths();
  const double scale = std::max({len[0], len[1], len[2]});
  Vec3 center{};
  for (int a = 0; a < 3; ++a) center[a] = coarse.origin()[a] + 0.5 * len[a];
  std::vector<std::array<double, 6>> rows;
  for (std::size_t v = 0; v < coarse.num_nodes(); ++v) {
    const Vec3 x = coarse.node_position(v);
    const Vec3 r{(x[0] - center[0]) / scale, (x[1] - center[1]) / scale, (x[2] - center[2]) / scale};
    for (int c = 0; c < 3; ++c) {
      if (dofs.dof(v, c) >= 0) continue;
      std::array<double, 6> row{};
      row[c] = 1.0;
      // Rotation about axis k: omega_k e_k x r, component c.
      const Vec3 rot_x{0.0, -r[2], r[1]};
      const Vec3 rot_y{r[2], 0.0, -r[0]};
      const Vec3 rot_z{-r[1], r[0], 0.0};
      row[3] = rot_x[c];
      row[4] = rot_y[c];
      row[5] = rot_z[c];
      rows.push_back(row);
    }
  }
  Eigen::MatrixXd C(static_cast<Eigen::Index>(rows.size()), 6);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (int k = 0; k < 6; ++k) C(static_cast<Eigen::Index>(i), k) = rows[i][static_cast<std::size_t>(k)];
  Eigen::Index rank = 0;
  if (!rows.empty()) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(C);
    qr.setThreshold(1e-10);
    rank = qr.rank();
  }
  if (rank < 6)
    throw SingularSystemError("mechanics system is singular: displacement constraints leave " +
                              std::to_string(6 - rank) + " rigid-body mode(s) free");
}

}  // namespace

BrickElement make_brick_element(const Vec3& h) {
  BrickElement el;
  el.deviatoric.setZero();
  el.volumetric.setZero();
  el.symmetric.setZero();
  const double g = 1.0 / std::sqrt(3.0);
  el.gauss_weight = 0.125 * h[0] * h[1] * h[2];
  for (int gp = 0; gp < 8; ++gp) {
    const Vec3 xi{(gp & 1) ? g : -g, (gp & 2) ? g : -g, (gp & 4) ? g : -g};
    for (int a = 0; a < 8; ++a) {
      Vec3 s{};
      for (int i = 0; i < 3; ++i) s[i] = ((a >> i) & 1) ? 1.0 : -1.0;
      for (int i = 0; i < 3; ++i) {
        double prod = s[i] / h[i];
        for (int j = 0; j < 3; ++j)
          if (j != i) prod *= 0.5 * (1.0 + s[j] * xi[j]);
        el.gauss_grad[gp][a][i] = prod;
      }
    }
    std::array<Mat3, 24> eps{};
    std::array<Mat3, 24> dev{};
    std::array<double, 24> div{};
    for (int d = 0; d < 24; ++d) {
      const Vec3& grad = el.gauss_grad[gp][d / 3];
      eps[d] = strain_of(grad, d % 3);
      div[d] = grad[d % 3];
      dev[d] = eps[d];
      for (int i = 0; i < 3; ++i) dev[d][i][i] -= div[d] / 3.0;
    }
    for (int d = 0; d < 24; ++d)
      for (int e = 0; e < 24; ++e) {
        el.deviatoric(d, e) += el.gauss_weight * contract(dev[d], dev[e]);
        el.symmetric(d, e) += el.gauss_weight * contract(eps[d], eps[e]);
        el.volumetric(d, e) += el.gauss_weight * div[d] * div[e];
      }
    for (int a = 0; a < 8; ++a)
      for (int i = 0; i < 3; ++i) el.grad_integral[a][i] += el.gauss_weight * el.gauss_grad[gp][a][i];
  }
  return el;
}

MechDofMap::MechDofMap(const HexGrid& coarse) : map_(3 * coarse.num_nodes(), -1) {
  const BoundaryTags& bc = coarse.boundary();
  for (std::size_t v = 0; v < coarse.num_nodes(); ++v) {
    const Index3 ijk = coarse.node_ijk(v);
    for (int c = 0; c < 3; ++c) {
      const bool fixed = (ijk[c] == 0 && bc[box_face(c, false)].mech == MechBc::NormalZero) ||
                         (ijk[c] == coarse.n(c) && bc[box_face(c, true)].mech == MechBc::NormalZero);
      if (!fixed) map_[3 * v + c] = static_cast<std::ptrdiff_t>(num_free_++);
    }
  }
  check_rigid_modes(coarse, *this);
}

MechAssembler::MechAssembler(const NestedGridPair& pair, const CoarseMaterialField& coarse, MechLoads loads)
    : grid_(&pair.coarse),
      loads_(std::move(loads)),
      element_(make_brick_element(pair.coarse.spacing())),
      dofs_(pair.coarse) {
  const HexGrid& grid = pair.coarse;
  if (coarse.size() != grid.num_cells())
    throw InvalidMaterialError("coarse material size does not match the mechanics grid");
  if (!loads_.body_force.empty() && loads_.body_force.size() != pair.fine.num_cells())
    throw Error("body force must be given per fine cell");
  if (!loads_.in_situ.empty() && loads_.in_situ.size() != grid.num_cells())
    throw Error("in-situ stress must be given per coarse cell");
  if (!loads_.p0_restricted.empty() && loads_.p0_restricted.size() != grid.num_cells())
    throw Error("reference pressure must be given per coarse cell");

  alpha_.resize(coarse.size());
  for (std::size_t p = 0; p < coarse.size(); ++p) alpha_[p] = coarse[p].alpha;

  std::vector<Triplet> entries;
  entries.reserve(grid.num_cells() * 24 * 24);
  fixed_rhs_.assign(dofs_.num_free(), 0.0);
  auto add_rhs = [&](std::size_t node, int c, double value) {
    const std::ptrdiff_t d = dofs_.dof(node, c);
    if (d >= 0) fixed_rhs_[static_cast<std::size_t>(d)] += value;
  };

  for (std::size_t cell = 0; cell < grid.num_cells(); ++cell) {
    const auto nodes = grid.cell_nodes(cell);
    const BrickElement::Mat24 Ke = element_.stiffness(coarse[cell].K_b, coarse[cell].G);
    for (int d = 0; d < 24; ++d) {
      const std::ptrdiff_t row = dofs_.dof(nodes[d / 3], d % 3);
      if (row < 0) continue;
      for (int e = 0; e < 24; ++e) {
        const std::ptrdiff_t col = dofs_.dof(nodes[e / 3], e % 3);
        if (col < 0) continue;
        entries.push_back({static_cast<std::size_t>(row), static_cast<std::size_t>(col), Ke(d, e)});
      }
    }

    if (!loads_.in_situ.empty()) {
      const InSituStress& ins = loads_.in_situ[cell];
      for (int a = 0; a < 8; ++a)
        for (int c = 0; c < 3; ++c) {
          double value = 0.0;
          for (int j = 0; j < 3; ++j)
            value -= (ins.s0(c, j) + (c == j ? ins.sigma_v0 : 0.0)) * element_.grad_integral[a][j];
          add_rhs(nodes[a], c, value);
        }
    }
  }

  if (!loads_.body_force.empty()) {
    const Vec3 hf = pair.fine.spacing();
    for (std::size_t f = 0; f < pair.fine.num_cells(); ++f) {
      const std::size_t parent = pair.parent[f];
      const Index3 fijk = pair.fine.cell_ijk(f);
      const Index3 pijk = grid.cell_ijk(parent);
      const auto nodes = grid.cell_nodes(parent);
      for (int a = 0; a < 8; ++a) {
        double integral = hf[0] * hf[1] * hf[2];
        for (int i = 0; i < 3; ++i) {
          const int offset = fijk[i] - pijk[i] * pair.ratio[i];
          const double t0 = static_cast<double>(offset) / pair.ratio[i];
          const double t1 = static_cast<double>(offset + 1) / pair.ratio[i];
          integral *= hat_integral((a >> i) & 1, t0, t1) * pair.ratio[i];
        }
        for (int c = 0; c < 3; ++c) add_rhs(nodes[a], c, loads_.body_force[f][c] * integral);
      }
    }
  }

  const BoundaryTags& bc = grid.boundary();
  for (int axis = 0; axis < 3; ++axis)
    for (int side = 0; side < 2; ++side) {
      const FaceCondition& fc = bc[box_face(axis, side == 1)];
      if (fc.mech != MechBc::Traction) continue;
      const int u = (axis + 1) % 3;
      const int w = (axis + 2) % 3;
      const double quarter = 0.25 * grid.face_area(axis);
      for (int b = 0; b < grid.n(w); ++b)
        for (int a = 0; a < grid.n(u); ++a)
          for (int corner = 0; corner < 4; ++corner) {
            Index3 ijk{};
            ijk[axis] = side == 1 ? grid.n(axis) : 0;
            ijk[u] = a + (corner & 1);
            ijk[w] = b + ((corner >> 1) & 1);
            const std::size_t node = grid.node_index(ijk[0], ijk[1], ijk[2]);
            for (int c = 0; c < 3; ++c) add_rhs(node, c, fc.traction[c] * quarter);
          }
    }

  matrix_ = SparseSymMatrix(dofs_.num_free(), std::move(entries));
}

std::vector<double> MechAssembler::rhs(std::span<const double> p_restricted) const {
  std::vector<double> b = fixed_rhs_;
  for (std::size_t cell = 0; cell < grid_->num_cells(); ++cell) {
    const double p0 = loads_.p0_restricted.empty() ? 0.0 : loads_.p0_restricted[cell];
    const double load = alpha_[cell] * (p_restricted[cell] - p0);
    if (load == 0.0) continue;
    const auto nodes = grid_->cell_nodes(cell);
    for (int a = 0; a < 8; ++a)
      for (int c = 0; c < 3; ++c) {
        const std::ptrdiff_t d = dofs_.dof(nodes[a], c);
        if (d >= 0) b[static_cast<std::size_t>(d)] += load * element_.grad_integral[a][c];
      }
  }
  return b;
}

std::vector<Vec3> MechAssembler::expand(std::span<const double> free) const {
  std::vector<Vec3> u(grid_->num_nodes(), Vec3{0.0, 0.0, 0.0});
  for (std::size_t v = 0; v < u.size(); ++v)
    for (int c = 0; c < 3; ++c) {
      const std::ptrdiff_t d = dofs_.dof(v, c);
      if (d >= 0) u[v][c] = free[static_cast<std::size_t>(d)];
    }
  return u;
}

std::vector<double> MechAssembler::compress(std::span<const Vec3> u) const {
  std::vector<double> free(dofs_.num_free(), 0.0);
  for (std::size_t v = 0; v < u.size(); ++v)
    for (int c = 0; c < 3; ++c) {
      const std::ptrdiff_t d = dofs_.dof(v, c);
      if (d >= 0) free[static_cast<std::size_t>(d)] = u[v][c];
    }
  return free;
}

MechSystem assemble_mech_system(const NestedGridPair& pair, const CoarseMaterialField& coarse,
                                std::span<const double> p_restricted, const MechLoads& loads) {
  MechAssembler assembler(pair, coarse, loads);
  return {assembler.matrix(), assembler.rhs(p_restricted)};
}

MechIncrement solve_mech_step(const MechAssembler& assembler, std::span<const double> p_restricted,
                                    const HexGrid& coarse, MechState& state, const CgOptions& options) {
  const std::vector<double> b = assembler.rhs(p_restricted);
  std::vector<double> x = assembler.compress(state.u);
  std::vector<double> r = assembler.matrix().multiply(x);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
  const CgResult correction = cg_solve(assembler.matrix(), r, options);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] += correction.x[i];
    if (!std::isfinite(x[i])) throw StepError("non-finite displacement");
  }
  state.u = assembler.expand(x);
  state.eps_v = cell_volumetric_strain(state.u, coarse);
  state.eps_v_sq = cell_volumetric_strain_sq(state.u, coarse);
  const std::vector<Vec3> du = assembler.expand(correction.x);
  return {cell_volumetric_strain(du, coarse), cell_volumetric_strain_sq(du, coarse)};
}

namespace {

template <class Fn>
void for_each_gauss_divergence(std::span<const Vec3> u, const HexGrid& coarse, const BrickElement& el,
                               std::size_t cell, Fn&& fn) {
  const auto nodes = coarse.cell_nodes(cell);
  for (int gp = 0; gp < 8; ++gp) {
    double div = 0.0;
    for (int a = 0; a < 8; ++a)
      for (int c = 0; c < 3; ++c) div += u[nodes[a]][c] * el.gauss_grad[gp][a][c];
    fn(div);
  }
}

}  // namespace

std::vector<double> cell_volumetric_strain(std::span<const Vec3> u, const HexGrid& coarse) {
  const BrickElement el = make_brick_element(coarse.spacing());
  std::vector<double> eps(coarse.num_cells(), 0.0);
  for (std::size_t cell = 0; cell < eps.size(); ++cell) {
    double sum = 0.0;
    for_each_gauss_divergence(u, coarse, el, cell, [&](double div) { sum += div; });
    eps[cell] = sum / 8.0;
  }
  return eps;
}

std::vector<double> cell_volumetric_strain_sq(std::span<const Vec3> u, const HexGrid& coarse) {
  const BrickElement el = make_brick_element(coarse.spacing());
  std::vector<double> sq(coarse.num_cells(), 0.0);
  for (std::size_t cell = 0; cell < sq.size(); ++cell) {
    double sum = 0.0;
    for_each_gauss_divergence(u, coarse, el, cell, [&](double div) { sum += div * div; });
    sq[cell] = sum * el.gauss_weight;
  }
  return sq;
}

std::vector<double> mean_stress(const CoarseMaterialField& coarse, const MechLoads& loads,
                                std::span<const double> eps_v, std::span<const double> p_restricted) {
  std::vector<double> sigma_v(coarse.size());
  for (std::size_t c = 0; c < sigma_v.size(); ++c) {
    const double s0 = loads.in_situ.empty() ? 0.0 : loads.in_situ[c].sigma_v0;
    const double p0 = loads.p0_restricted.empty() ? 0.0 : loads.p0_restricted[c];
    sigma_v[c] = s0 + coarse[c].K_b * eps_v[c] - coarse[c].alpha * (p_restricted[c] - p0);
  }
  return sigma_v;
}

std::vector<Vec3> solve_with_prescribed_boundary(const HexGrid& coarse, const CoarseMaterialField& props,
                                                 const std::function<Vec3(const Vec3&)>& boundary_u,
                                                 const CgOptions& options) {
  const BrickElement el = make_brick_element(coarse.spacing());
  const std::size_t num_nodes = coarse.num_nodes();
  std::vector<Vec3> u(num_nodes, Vec3{0.0, 0.0, 0.0});
  std::vector<std::ptrdiff_t> free(3 * num_nodes, -1);
  std::size_t num_free = 0;
  for (std::size_t v = 0; v < num_nodes; ++v) {
    const Index3 ijk = coarse.node_ijk(v);
    bool boundary = false;
    for (int a = 0; a < 3; ++a) boundary = boundary || ijk[a] == 0 || ijk[a] == coarse.n(a);
    if (boundary) {
      u[v] = boundary_u(coarse.node_position(v));
    } else {
      for (int c = 0; c < 3; ++c) free[3 * v + c] = static_cast<std::ptrdiff_t>(num_free++);
    }
  }
  if (num_free == 0) return u;

  std::vector<Triplet> entries;
  std::vector<double> rhs(num_free, 0.0);
  for (std::size_t cell = 0; cell < coarse.num_cells(); ++cell) {
    const auto nodes = coarse.cell_nodes(cell);
    const BrickElement::Mat24 Ke = el.stiffness(props[cell].K_b, props[cell].G);
    for (int d = 0; d < 24; ++d) {
      const std::ptrdiff_t row = free[3 * nodes[d / 3] + d % 3];
      if (row < 0) continue;
      for (int e = 0; e < 24; ++e) {
        const std::ptrdiff_t col = free[3 * nodes[e / 3] + e % 3];
        if (col >= 0)
          entries.push_back({static_cast<std::size_t>(row), static_cast<std::size_t>(col), Ke(d, e)});
        else
          rhs[static_cast<std::size_t>(row)] -= Ke(d, e) * u[nodes[e / 3]][e % 3];
      }
    }
  }
  const SparseSymMatrix K(num_free, std::move(entries));
  const CgResult sol = cg_solve(K, rhs, options);
  for (std::size_t v = 0; v < num_nodes; ++v)
    for (int c = 0; c < 3; ++c)
      if (free[3 * v + c] >= 0) u[v][c] = sol.x[static_cast<std::size_t>(free[3 * v + c])];
  return u;
}

}  // namespace biot
