#include "biot/grid.hpp"

#include <cmath>
#include <string>

#include "biot/error.hpp"

namespace biot {

HexGrid::HexGrid(Index3 cells, Vec3 lengths, Vec3 origin, BoundaryTags tags)
    : n_(cells), h_{}, origin_(origin), tags_(tags) {
  for (int a = 0; a < 3; ++a) {
    if (cells[a] < 1)
      throw InvalidMeshError("cell count along axis " + std::to_string(a) + " must be >= 1, got " +
                             std::to_string(cells[a]));
    if (!(lengths[a] > 0.0) || !std::isfinite(lengths[a]))
      throw InvalidMeshError("box length along axis " + std::to_string(a) + " must be positive");
    h_[a] = lengths[a] / cells[a];
  }
}

std::size_t HexGrid::num_faces(int axis) const {
  std::size_t count = 1;
  for (int a = 0; a < 3; ++a) count *= static_cast<std::size_t>(a == axis ? n_[a] + 1 : n_[a]);
  return count;
}

double HexGrid::cell_diameter() const {
  return std::sqrt(h_[0] * h_[0] + h_[1] * h_[1] + h_[2] * h_[2]);
}

double HexGrid::face_area(int axis) const {
  return h_[(axis + 1) % 3] * h_[(axis + 2) % 3];
}

Index3 HexGrid::cell_ijk(std::size_t c) const {
  const auto nx = static_cast<std::size_t>(n_[0]);
  const auto ny = static_cast<std::size_t>(n_[1]);
  return {static_cast<int>(c % nx), static_cast<int>((c / nx) % ny), static_cast<int>(c / (nx * ny))};
}

Index3 HexGrid::node_ijk(std::size_t v) const {
  const auto nx = static_cast<std::size_t>(n_[0] + 1);
  const auto ny = static_cast<std::size_t>(n_[1] + 1);
  return {static_cast<int>(v % nx), static_cast<int>((v / nx) % ny), static_cast<int>(v / (nx * ny))};
}

Vec3 HexGrid::node_position(std::size_t v) const {
  const Index3 ijk = node_ijk(v);
  return {origin_[0] + ijk[0] * h_[0], origin_[1] + ijk[1] * h_[1], origin_[2] + ijk[2] * h_[2]};
}

Vec3 HexGrid::cell_center(std::size_t c) const {
  const Index3 ijk = cell_ijk(c);
  return {origin_[0] + (ijk[0] + 0.5) * h_[0], origin_[1] + (ijk[1] + 0.5) * h_[1],
          origin_[2] + (ijk[2] + 0.5) * h_[2]};
}

std::size_t HexGrid::face_index(int axis, Index3 ijk) const {
  std::size_t offset = 0;
  for (int a = 0; a < axis; ++a) offset += num_faces(a);
  Index3 dims = n_;
  dims[axis] += 1;
  return offset + static_cast<std::size_t>(ijk[0]) +
         static_cast<std::size_t>(dims[0]) * (ijk[1] + static_cast<std::size_t>(dims[1]) * ijk[2]);
}

std::array<std::size_t, 8> HexGrid::cell_nodes(std::size_t c) const {
  const Index3 ijk = cell_ijk(c);
  std::array<std::size_t, 8> nodes{};
  for (int local = 0; local < 8; ++local)
    nodes[local] = node_index(ijk[0] + (local & 1), ijk[1] + ((local >> 1) & 1), ijk[2] + ((local >> 2) & 1));
  return nodes;
}

HexGrid build_box_grid(int nx, int ny, int nz, Vec3 lengths, BoundaryTags tags, Vec3 origin) {
  return HexGrid({nx, ny, nz}, lengths, origin, tags);
}

NestedGridPair nest(const HexGrid& fine, Index3 ratio) {
  Index3 coarse_cells{};
  for (int a = 0; a < 3; ++a) {
    if (ratio[a] < 1) throw NestingError("refinement ratio components must be >= 1");
    if (fine.n(a) % ratio[a] != 0)
      throw NestingError("fine cell count " + std::to_string(fine.n(a)) + " along axis " + std::to_string(a) +
                         " is not divisible by ratio " + std::to_string(ratio[a]));
    coarse_cells[a] = fine.n(a) / ratio[a];
  }
  HexGrid coarse(coarse_cells, fine.lengths(), fine.origin(), fine.boundary());

  std::vector<std::vector<std::size_t>> children(coarse.num_cells());
  std::vector<std::size_t> parent(fine.num_cells());
  const std::size_t per_parent = static_cast<std::size_t>(ratio[0]) * ratio[1] * ratio[2];
  for (auto& list : children) list.reserve(per_parent);
  // Iterating fine cells in lexicographic order keeps each children list ordered.
  for (std::size_t f = 0; f < fine.num_cells(); ++f) {
    const Index3 ijk = fine.cell_ijk(f);
    const std::size_t p = coarse.cell_index(ijk[0] / ratio[0], ijk[1] / ratio[1], ijk[2] / ratio[2]);
    children[p].push_back(f);
    parent[f] = p;
  }
  return NestedGridPair{fine, std::move(coarse), ratio, std::move(children), std::move(parent)};
}

}  // namespace biot
