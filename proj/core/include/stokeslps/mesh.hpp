// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <memory>
#include <optional>
#include <vector>

namespace stokeslps {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

class Mesh;
using MeshPtr = std::shared_ptr<const Mesh>;

/// Conforming triangulation of the unit square with uniform-refinement
/// genealogy. Cells are counterclockwise vertex-index triples. Meshes are
/// immutable; refine_uniform() returns a new mesh that keeps a handle to its
/// parent so nested point location and ancestor lookups stay cheap.
class Mesh {
 public:
  struct Location {
    int cell;
    std::array<double, 3> bary;
  };
  /// A cell of some ancestor mesh, used to narrow point location.
  struct CellHint {
    int level;
    int cell;
  };

  /// Structured n x n grid of squares, each split along the diagonal from
  /// its lower-left to its upper-right corner (2*n^2 triangles).
  static MeshPtr unit_square(int n);

  /// Red refinement: every triangle splits into four congruent children via
  /// edge midpoints. Children are nested in their parent's closure.
  static MeshPtr refine_uniform(const MeshPtr& mesh);

  int n_vertices() const { return static_cast<int>(vertices_.size()); }
  int n_cells() const { return static_cast<int>(cells_.size()); }
  const Vec2& vertex(int v) const { return vertices_[v]; }
  const std::array<int, 3>& cell(int c) const { return cells_[c]; }
  /// True exactly for vertices with a coordinate on the unit-square boundary.
  bool boundary_vertex(int v) const { return boundary_vertex_[v] != 0; }

  int level() const { return level_; }
  const MeshPtr& parent() const { return parent_; }
  /// Index of the parent cell this cell was split from (-1 on root meshes).
  int parent_cell(int c) const { return parent_cell_.empty() ? -1 : parent_cell_[c]; }
  /// Walks the genealogy down to `target_level` (<= level()).
  int ancestor_cell(int c, int target_level) const;

  double mesh_size() const { return mesh_size_; }  // max cell diameter
  double cell_diameter(int c) const;
  double cell_area(int c) const;  // signed; positive for ccw cells
  Vec2 barycenter(int c) const;
  Vec2 to_physical(int c, const std::array<double, 3>& bary) const;
  std::array<double, 3> to_barycentric(int c, const Vec2& x) const;

  /// Finds the cell containing x (ties broken by lowest cell index). With a
  /// hint naming a cell of an ancestor mesh, the scan is restricted to that
  /// cell's descendants. Throws OutOfDomainError if x is outside the mesh.
  Location locate(const Vec2& x, std::optional<CellHint> hint = {}) const;

 private:
  Mesh() = default;

  std::vector<Vec2> vertices_;
  std::vector<std::array<int, 3>> cells_;
  std::vector<char> boundary_vertex_;
  std::vector<int> parent_cell_;
  MeshPtr parent_;
  int level_ = 0;
  double mesh_size_ = 0.0;

  void finalize();
};

/// True if `coarse` is `fine` itself or an ancestor of it.
bool is_ancestor_of(const MeshPtr& coarse, const MeshPtr& fine);

}  // namespace stokeslps
