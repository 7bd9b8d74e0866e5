#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace biot {

using Vec3 = std::array<double, 3>;
using Index3 = std::array<int, 3>;

enum class BoxFace : int { XMin = 0, XMax, YMin, YMax, ZMin, ZMax };

inline constexpr int axis_of(BoxFace f) { return static_cast<int>(f) / 2; }
inline constexpr bool is_max_side(BoxFace f) { return static_cast<int>(f) % 2 == 1; }
inline constexpr BoxFace box_face(int axis, bool max_side) {
  return static_cast<BoxFace>(2 * axis + (max_side ? 1 : 0));
}

enum class FlowBc { NoFlux, Pressure };
enum class MechBc { Traction, NormalZero };

//! Flow and mechanics conditions on one side of the box.
struct FaceCondition {
  FlowBc flow = FlowBc::NoFlux;
  double pressure = 0.0;  // g on pressure faces (Pa)
  MechBc mech = MechBc::Traction;
  Vec3 traction{0.0, 0.0, 0.0};  // t on traction faces (Pa)

  bool operator==(const FaceCondition&) const = default;
};

struct BoundaryTags {
  std::array<FaceCondition, 6> faces{};

  FaceCondition& operator[](BoxFace f) { return faces[static_cast<int>(f)]; }
  const FaceCondition& operator[](BoxFace f) const { return faces[static_cast<int>(f)]; }
  bool operator==(const BoundaryTags&) const = default;
};

/// Uniform brick grid on an axis-aligned box.
///
/// Cells, nodes and faces are numbered lexicographically with x fastest.
/// Faces are grouped by normal axis: all x-normal faces first, then y, then z;
/// within a group the index along the normal runs over n_axis + 1 planes.
class HexGrid {
 public:
  HexGrid(Index3 cells, Vec3 lengths, Vec3 origin = {0.0, 0.0, 0.0}, BoundaryTags tags = {});

  const Index3& cells() const { return n_; }
  int n(int axis) const { return n_[axis]; }
  const Vec3& spacing() const { return h_; }
  double h(int axis) const { return h_[axis]; }
  const Vec3& origin() const { return origin_; }
  Vec3 lengths() const { return {n_[0] * h_[0], n_[1] * h_[1], n_[2] * h_[2]}; }
  const BoundaryTags& boundary() const { return tags_; }

  std::size_t num_cells() const {
    return static_cast<std::size_t>(n_[0]) * n_[1] * n_[2];
  }
  std::size_t num_nodes() const {
    return static_cast<std::size_t>(n_[0] + 1) * (n_[1] + 1) * (n_[2] + 1);
  }
  std::size_t num_faces() const {
    return num_faces(0) + num_faces(1) + num_faces(2);
  }
  std::size_t num_faces(int axis) const;

  double cell_volume() const { return h_[0] * h_[1] * h_[2]; }
  double cell_diameter() const;
  double face_area(int axis) const;

  std::size_t cell_index(int i, int j, int k) const {
    return static_cast<std::size_t>(i) + static_cast<std::size_t>(n_[0]) * (j + static_cast<std::size_t>(n_[1]) * k);
  }
  Index3 cell_ijk(std::size_t c) const;
  std::size_t node_index(int i, int j, int k) const {
    return static_cast<std::size_t>(i) +
           static_cast<std::size_t>(n_[0] + 1) * (j + static_cast<std::size_t>(n_[1] + 1) * k);
  }
  Index3 node_ijk(std::size_t v) const;
  Vec3 node_position(std::size_t v) const;
  Vec3 cell_center(std::size_t c) const;

  /// Face with normal `axis` at plane index ijk[axis] in [0, n_axis].
  std::size_t face_index(int axis, Index3 ijk) const;
  int face_axis(std::size_t face) const {
    return face < num_faces(0) ? 0 : (face < num_faces(0) + num_faces(1) ? 1 : 2);
  }

  /// The 8 corner nodes of a cell, ordered with local bit pattern (x | y<<1 | z<<2).
  std::array<std::size_t, 8> cell_nodes(std::size_t c) const;

 private:
  Index3 n_;
  Vec3 h_;
  Vec3 origin_;
  BoundaryTags tags_;
};

HexGrid build_box_grid(int nx, int ny, int nz, Vec3 lengths, BoundaryTags tags = {},
                       Vec3 origin = {0.0, 0.0, 0.0});

/// Fine flow grid, coarse mechanics grid and the containment map between them.
struct NestedGridPair {
  HexGrid fine;
  HexGrid coarse;
  Index3 ratio;
  std::vector<std::vector<std::size_t>> children;  // coarse cell -> fine cells
  std::vector<std::size_t> parent;                 // fine cell -> coarse cell

  //! max diam(E^p) / max diam(E^f)
  double refinement_ratio() const { return coarse.cell_diameter() / fine.cell_diameter(); }
};

NestedGridPair nest(const HexGrid& fine, Index3 ratio);

}  // namespace biot
