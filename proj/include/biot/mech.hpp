#pragma once

#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "biot/grid.hpp"
#include "biot/linalg.hpp"
#include "biot/materials.hpp"

namespace biot {

struct SymTensor {
  double xx = 0.0, yy = 0.0, zz = 0.0, xy = 0.0, yz = 0.0, xz = 0.0;

  double trace() const { return xx + yy + zz; }
  SymTensor deviator() const {
    const double m = trace() / 3.0;
    return {xx - m, yy - m, zz - m, xy, yz, xz};
  }
  double operator()(int i, int j) const;
  bool operator==(const SymTensor&) const = default;
};

//! In-situ stress split into mean part and traceless deviator.
struct InSituStress {
  double sigma_v0 = 0.0;
  SymTensor s0;

  static InSituStress from_tensor(const SymTensor& sigma0) { return {sigma0.trace() / 3.0, sigma0.deviator()}; }
};

struct MechLoads {
  std::vector<Vec3> body_force;        // N/m^3 per fine cell; empty means none
  std::vector<InSituStress> in_situ;   // per coarse cell; empty means zero
  std::vector<double> p0_restricted;   // reference pressure per coarse cell; empty means zero
};

struct MechState {
  std::vector<Vec3> u;           // nodal displacement on the coarse grid (m)
  std::vector<double> eps_v;     // cell average of div u
  std::vector<double> eps_v_sq;  // integral of (div u)^2 over each cell

  static MechState zero(const HexGrid& coarse);
};

/// Element integrals for one axis-aligned trilinear brick, 2x2x2 Gauss.
/// Local dof index is 3 * corner + component, corners ordered x | y<<1 | z<<2.
struct BrickElement {
  using Mat24 = Eigen::Matrix<double, 24, 24>;
  Mat24 deviatoric;   // (e(N_a), e(N_b))
  Mat24 volumetric;   // (div N_a, div N_b)
  Mat24 symmetric;    // (eps(N_a), eps(N_b))
  std::array<Vec3, 8> grad_integral{};  // integral of grad N_a
  //! Shape-function gradients at the 8 Gauss points (point, corner).
  std::array<std::array<Vec3, 8>, 8> gauss_grad{};
  double gauss_weight = 0.0;  // includes the Jacobian

  Mat24 stiffness(double K_b, double G) const { return 2.0 * G * deviatoric + K_b * volumetric; }
  Mat24 stiffness_lame(double lambda, double G) const { return lambda * volumetric + 2.0 * G * symmetric; }
};

BrickElement make_brick_element(const Vec3& h);

/// Free-dof numbering with u.n = 0 enforced componentwise on NormalZero faces.
class MechDofMap {
 public:
  explicit MechDofMap(const HexGrid& coarse);

  std::size_t num_free() const { return num_free_; }
  //! Free index of (node, component), or -1 when constrained.
  std::ptrdiff_t dof(std::size_t node, int component) const { return map_[3 * node + component]; }

 private:
  std::vector<std::ptrdiff_t> map_;
  std::size_t num_free_ = 0;
};

struct MechSystem {
  SparseSymMatrix matrix;
  std::vector<double> rhs;
};

/// Stiffness and load assembly for the coarse grid. The stiffness and the
/// pressure-independent loads are built once; only the pressure term changes
/// between coupling iterations.
class MechAssembler {
 public:
  //! Keeps a reference to pair.coarse, which must outlive the assembler.
  MechAssembler(const NestedGridPair& pair, const CoarseMaterialField& coarse, MechLoads loads);

  const MechDofMap& dofs() const { return dofs_; }
  const BrickElement& element() const { return element_; }
  const SparseSymMatrix& matrix() const { return matrix_; }
  std::vector<double> rhs(std::span<const double> p_restricted) const;
  const MechLoads& loads() const { return loads_; }

  std::vector<Vec3> expand(std::span<const double> free) const;
  std::vector<double> compress(std::span<const Vec3> u) const;

 private:
  const HexGrid* grid_;
  std::vector<double> alpha_;
  MechLoads loads_;
  BrickElement element_;
  MechDofMap dofs_;
  SparseSymMatrix matrix_;
  std::vector<double> fixed_rhs_;
};

/// Assembles 2G (e(u), e(q)) + K_b (div u, div q) against the loads
/// (f, q) + (t, q) - (s0, e(q)) - (sigma_v0, div q) + alpha (p - p0)(1, div q).
MechSystem assemble_mech_system(const NestedGridPair& pair, const CoarseMaterialField& coarse,
                                std::span<const double> p_restricted, const MechLoads& loads);

//! Volumetric strain of the displacement correction made by one solve.
struct MechIncrement {
  std::vector<double> d_eps;     // cell averages
  std::vector<double> d_eps_sq;  // cell integrals of the squared divergence
};

/// Solves the constrained system starting from state.u and refreshes the
/// cell strains.
MechIncrement solve_mech_step(const MechAssembler& assembler, std::span<const double> p_restricted,
                                    const HexGrid& coarse, MechState& state, const CgOptions& options = {});

std::vector<double> cell_volumetric_strain(std::span<const Vec3> u, const HexGrid& coarse);
std::vector<double> cell_volumetric_strain_sq(std::span<const Vec3> u, const HexGrid& coarse);

//! sigma_v = sigma_v0 + K_b eps_v - alpha (p - p0) per coarse cell.
std::vector<double> mean_stress(const CoarseMaterialField& coarse, const MechLoads& loads,
                                std::span<const double> eps_v, std::span<const double> p_restricted);

/// Solves with every boundary node displacement prescribed by `boundary_u`.
/// Used for patch tests.
std::vector<Vec3> solve_with_prescribed_boundary(const HexGrid& coarse, const CoarseMaterialField& props,
                                                 const std::function<Vec3(const Vec3&)>& boundary_u,
                                                 const CgOptions& options = {});

}  // namespace biot
