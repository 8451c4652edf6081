// SPDX-License-Identifier: Apache-2.0
#include "stokeslps/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

#include "stokeslps/errors.hpp"

namespace stokeslps {

namespace {

bool on_unit_square_boundary(const Vec2& p) {
  // Exact comparisons are safe: boundary coordinates are produced as 0.0,
  // i/n with i==n, or midpoints of two equal boundary coordinates, all of
  // which are exactly 0.0 or 1.0 in floating point.
  return p.x == 0.0 || p.x == 1.0 || p.y == 0.0 || p.y == 1.0;
}

}  // namespace

void Mesh::finalize() {
  boundary_vertex_.resize(vertices_.size());
  for (std::size_t v = 0; v < vertices_.size(); ++v)
    boundary_vertex_[v] = on_unit_square_boundary(vertices_[v]) ? 1 : 0;
  mesh_size_ = 0.0;
  for (int c = 0; c < n_cells(); ++c)
    mesh_size_ = std::max(mesh_size_, cell_diameter(c));
}

MeshPtr Mesh::unit_square(int n) {
  if (n < 1) throw InvalidArgumentError("unit_square: n must be >= 1");
  auto mesh = std::shared_ptr<Mesh>(new Mesh());
  mesh->vertices_.reserve(static_cast<std::size_t>(n + 1) * (n + 1));
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i)
      mesh->vertices_.push_back(
          {static_cast<double>(i) / n, static_cast<double>(j) / n});
  const auto vid = [n](int i, int j) { return j * (n + 1) + i; };
  mesh->cells_.reserve(static_cast<std::size_t>(2) * n * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int v00 = vid(i, j), v10 = vid(i + 1, j);
      const int v01 = vid(i, j + 1), v11 = vid(i + 1, j + 1);
      mesh->cells_.push_back({v00, v10, v11});
      mesh->cells_.push_back({v00, v11, v01});
    }
  }
  mesh->finalize();
  return mesh;
}

MeshPtr Mesh::refine_uniform(const MeshPtr& parent) {
  if (!parent) throw InvalidArgumentError("refine_uniform: null mesh");
  auto mesh = std::shared_ptr<Mesh>(new Mesh());
  mesh->parent_ = parent;
  mesh->level_ = parent->level_ + 1;
  mesh->vertices_ = parent->vertices_;

  // Edge midpoints are deduplicated by the sorted vertex-index pair.
  std::map<std::pair<int, int>, int> midpoint;
  const auto midpoint_of = [&](int a, int b) {
    const auto key = std::minmax(a, b);
    auto it = midpoint.find(key);
    if (it != midpoint.end()) return it->second;
    const Vec2& pa = mesh->vertices_[a];
    const Vec2& pb = mesh->vertices_[b];
    const int idx = static_cast<int>(mesh->vertices_.size());
    mesh->vertices_.push_back({0.5 * (pa.x + pb.x), 0.5 * (pa.y + pb.y)});
    midpoint.emplace(key, idx);
    return idx;
  };

  mesh->cells_.reserve(static_cast<std::size_t>(4) * parent->n_cells());
  mesh->parent_cell_.reserve(static_cast<std::size_t>(4) * parent->n_cells());
  for (int c = 0; c < parent->n_cells(); ++c) {
    const auto [v0, v1, v2] = parent->cells_[c];
    const int m01 = midpoint_of(v0, v1);
    const int m12 = midpoint_of(v1, v2);
    const int m02 = midpoint_of(v0, v2);
    mesh->cells_.push_back({v0, m01, m02});
    mesh->cells_.push_back({m01, v1, m12});
    mesh->cells_.push_back({m02, m12, v2});
    mesh->cells_.push_back({m01, m12, m02});
    for (int k = 0; k < 4; ++k) mesh->parent_cell_.push_back(c);
  }
  mesh->finalize();
  return mesh;
}

int Mesh::ancestor_cell(int c, int target_level) const {
  if (target_level > level_ || target_level < 0)
    throw InvalidArgumentError("ancestor_cell: level out of range");
  const Mesh* m = this;
  while (m->level_ > target_level) {
    c = m->parent_cell_[c];
    m = m->parent_.get();
  }
  return c;
}

double Mesh::cell_diameter(int c) const {
  const auto& [a, b, d] = cells_[c];
  const auto dist = [this](int u, int v) {
    return std::hypot(vertices_[u].x - vertices_[v].x,
                      vertices_[u].y - vertices_[v].y);
  };
  return std::max({dist(a, b), dist(b, d), dist(a, d)});
}

double Mesh::cell_area(int c) const {
  const auto& [a, b, d] = cells_[c];
  const Vec2 &p0 = vertices_[a], &p1 = vertices_[b], &p2 = vertices_[d];
  return 0.5 * ((p1.x - p0.x) * (p2.y - p0.y) - (p2.x - p0.x) * (p1.y - p0.y));
}

Vec2 Mesh::barycenter(int c) const {
  const auto& [a, b, d] = cells_[c];
  return {(vertices_[a].x + vertices_[b].x + vertices_[d].x) / 3.0,
          (vertices_[a].y + vertices_[b].y + vertices_[d].y) / 3.0};
}

Vec2 Mesh::to_physical(int c, const std::array<double, 3>& bary) const {
  const auto& [a, b, d] = cells_[c];
  return {bary[0] * vertices_[a].x + bary[1] * vertices_[b].x +
              bary[2] * vertices_[d].x,
          bary[0] * vertices_[a].y + bary[1] * vertices_[b].y +
              bary[2] * vertices_[d].y};
}

std::array<double, 3> Mesh::to_barycentric(int c, const Vec2& x) const {
  const auto& [a, b, d] = cells_[c];
  const Vec2 &p0 = vertices_[a], &p1 = vertices_[b], &p2 = vertices_[d];
  const double det =
      (p1.x - p0.x) * (p2.y - p0.y) - (p2.x - p0.x) * (p1.y - p0.y);
  const double l1 =
      ((x.x - p0.x) * (p2.y - p0.y) - (p2.x - p0.x) * (x.y - p0.y)) / det;
  const double l2 =
      ((p1.x - p0.x) * (x.y - p0.y) - (x.x - p0.x) * (p1.y - p0.y)) / det;
  return {1.0 - l1 - l2, l1, l2};
}

Mesh::Location Mesh::locate(const Vec2& x, std::optional<CellHint> hint) const {
  constexpr double kTol = 1e-12;
  if (hint && (hint->level < 0 || hint->level > level_))
    throw InvalidArgumentError("locate: hint level out of range");
  for (int c = 0; c < n_cells(); ++c) {
    if (hint && ancestor_cell(c, hint->level) != hint->cell) continue;
    const auto bary = to_barycentric(c, x);
    if (bary[0] >= -kTol && bary[1] >= -kTol && bary[2] >= -kTol)
      return {c, bary};
  }
  throw OutOfDomainError("locate: point outside the mesh");
}

bool is_ancestor_of(const MeshPtr& coarse, const MeshPtr& fine) {
  for (const Mesh* m = fine.get(); m != nullptr; m = m->parent().get())
    if (m == coarse.get()) return true;
  return false;
}

}  // namespace stokeslps
