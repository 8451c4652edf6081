// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "stokeslps/mesh.hpp"
#include "stokeslps/quadrature.hpp"

namespace stokeslps {

/// Scalar reference elements on triangles.
enum class ElementKind {
  P1,        ///< 3 vertex shape functions
  P2Bubble,  ///< P2 enriched with phi*P1, phi = l0*l1*l2 (9 shape functions)
};

const char* to_string(ElementKind kind);
int local_dof_count(ElementKind kind);

/// Cellwise projection space D_h(K) defining the fluctuation operator
/// kappa = id - pi_K, with pi_K the local L2 projection onto D_h(K).
struct ProjectionKind {
  enum class Family { Zero, PDisc };
  Family family = Family::Zero;
  int degree = 0;  ///< polynomial degree, meaningful for PDisc

  static ProjectionKind zero() { return {Family::Zero, 0}; }
  static ProjectionKind pdisc(int degree) { return {Family::PDisc, degree}; }
  bool is_zero() const { return family == Family::Zero; }
  friend bool operator==(const ProjectionKind&, const ProjectionKind&) = default;
};

std::string to_string(const ProjectionKind& proj);

enum class DofKind { Vertex, Edge, Bubble };

/// Scalar-space DOF layout on a mesh. Numbering is deterministic: vertex
/// DOFs first (vertex order), then one DOF per edge (edges sorted by their
/// (min,max) vertex-index pair), then three bubble DOFs per cell (cell
/// order). Vertex/edge DOFs are shared across cells; bubbles are cell-local.
class DofMap {
 public:
  DofMap(MeshPtr mesh, ElementKind kind);

  const MeshPtr& mesh() const { return mesh_; }
  ElementKind element() const { return element_; }
  int n_dofs() const { return n_dofs_; }
  int n_local_dofs() const { return n_local_; }
  int n_edges() const { return n_edges_; }

  /// Global DOFs of a cell in local order: vertices 0..2, then the edges
  /// opposite vertices 0..2, then the three bubbles.
  const int* cell_dofs(int cell) const { return &cell_dofs_[static_cast<std::size_t>(cell) * n_local_]; }
  int cell_dof(int cell, int local) const { return cell_dofs(cell)[local]; }

  DofKind dof_kind(int dof) const { return dof_kind_[dof]; }
  /// Nodal point: vertex, edge midpoint, or owning-cell barycenter.
  const Vec2& dof_point(int dof) const { return dof_point_[dof]; }
  /// True for vertex/edge DOFs whose nodal point lies on the boundary of the
  /// unit square; bubble DOFs are never boundary.
  bool is_boundary_dof(int dof) const { return boundary_flag_[dof] != 0; }
  const std::vector<int>& boundary_dofs() const { return boundary_dofs_; }

 private:
  MeshPtr mesh_;
  ElementKind element_;
  int n_dofs_ = 0;
  int n_local_ = 0;
  int n_edges_ = 0;
  std::vector<int> cell_dofs_;
  std::vector<DofKind> dof_kind_;
  std::vector<Vec2> dof_point_;
  std::vector<char> boundary_flag_;
  std::vector<int> boundary_dofs_;
};

using DofMapPtr = std::shared_ptr<const DofMap>;

DofMapPtr build_space(const MeshPtr& mesh, ElementKind kind);

/// Local shape functions at one barycentric point: values and the partial
/// derivatives with respect to the three barycentric coordinates. Physical
/// gradients follow by contracting with barycentric_gradients() of the cell.
struct BasisValues {
  int count = 0;
  std::array<double, 9> values{};
  std::array<std::array<double, 3>, 9> dlambda{};
};

BasisValues eval_basis(ElementKind kind, const std::array<double, 3>& bary);

/// Physical gradients of the three barycentric coordinate functions.
std::array<Vec2, 3> barycentric_gradients(const Mesh& mesh, int cell);

/// Coefficient vector over a scalar DOF map, with 1 (scalar field) or 2
/// (velocity field) components stored component-major: coefficient of
/// component c at scalar DOF i sits at index c*n_dofs + i.
struct FeFunction {
  DofMapPtr space;
  int components = 1;
  Eigen::VectorXd coeffs;

  int n_scalar_dofs() const { return space ? space->n_dofs() : 0; }
  double coeff(int component, int dof) const {
    return coeffs[static_cast<Eigen::Index>(component) * n_scalar_dofs() + dof];
  }
};

/// Nodal interpolation: vertex/edge DOFs take the field value at their nodal
/// point; a cell's three bubble coefficients are equal and chosen so the
/// interpolant matches the field at the cell barycenter. `f(x, c)` returns
/// component c of the field at x.
FeFunction interpolate_nodal(const DofMapPtr& space, int components,
                             const std::function<double(const Vec2&, int)>& f);

/// Values of all components at a barycentric point of a given cell.
Eigen::VectorXd evaluate_in_cell(const FeFunction& u, int cell,
                                 const std::array<double, 3>& bary);

/// Physical gradient (components x 2) at a barycentric point of a cell.
Eigen::MatrixXd gradient_in_cell(const FeFunction& u, int cell,
                                 const std::array<double, 3>& bary);

/// Point evaluation anywhere in the domain (locates the cell first; on-edge
/// ties resolve to the lowest cell index, so the value is well defined by
/// continuity).
Eigen::VectorXd evaluate_at(const FeFunction& u, const Vec2& x,
                            std::optional<Mesh::CellHint> hint = {});

/// The fluctuation operator kappa = id - pi_K on one cell, discretized on
/// the points of `rule`: returns the matrix F with (F g)(i) ~ (kappa g)(xi_i)
/// for pointwise samples g of any scalar field. pi_K is the L2(K) projection
/// onto D_h(K) computed with `rule`'s weights; for ProjectionKind::zero the
/// result is the identity.
Eigen::MatrixXd fluctuation_operator(const Mesh& mesh, int cell,
                                     const ProjectionKind& proj,
                                     const QuadratureRule& rule);

/// Samples of kappa(grad q) at the rule's points of one cell (rows = points,
/// columns = x/y derivative), for a scalar FE function q.
Eigen::MatrixXd fluctuation_apply(const FeFunction& q,
                                  const ProjectionKind& proj, int cell,
                                  const QuadratureRule& rule);

/// Local inf-sup diagnostic between the cell-interior (bubble-spanned)
/// velocity functions and D_h(K): smallest singular value of the coupling
/// matrix whitened by both L2(K) Gram matrices. Returns nullopt for
/// ProjectionKind::zero (the condition is vacuous for D_h = {0}, which is a
/// distinct outcome from a failing check). Throws InvalidArgumentError for
/// elements without cell-interior functions (P1).
std::optional<double> local_infsup_check(const Mesh& mesh, int cell,
                                         ElementKind vel,
                                         const ProjectionKind& proj);

}  // namespace stokeslps
