// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <memory>
#include <vector>

#include <Eigen/SparseCore>

#include "stokeslps/mesh.hpp"
#include "stokeslps/spaces.hpp"

namespace stokeslps {

/// Sparse storage used throughout: compressed rows, sorted column indices.
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Interpretation of the stabilization coefficient: alpha_K = alpha0 * h_K^2
/// (the inf-sup theory's scaling) or alpha_K = alpha0 on every cell.
enum class AlphaScaling { HSquared, Constant };

const char* to_string(AlphaScaling scaling);

/// Assembled blocks of the stabilized Stokes system on one mesh.
///
/// Reduced blocks eliminate the homogeneous-Dirichlet velocity DOFs
/// symmetrically; velocity vectors stack the free x-component DOFs first,
/// then the free y-component DOFs. Pressure carries no essential conditions,
/// so its index set is the full scalar space (the zero-mean condition is a
/// solver-level constraint via `c`). The full scalar blocks retain all rows
/// and columns and back form evaluation on arbitrary fields.
struct BlockSystem {
  MeshPtr mesh;
  DofMapPtr space;  ///< shared scalar space (equal-order pair)
  ElementKind element = ElementKind::P1;
  ProjectionKind projection;
  double alpha0 = 0.0;
  AlphaScaling scaling = AlphaScaling::HSquared;

  SparseMatrix A;     ///< n_u x n_u vector-Laplacian stiffness (reduced)
  SparseMatrix B;     ///< n_p x n_u divergence coupling (reduced columns)
  SparseMatrix S;     ///< n_p x n_p stabilization
  SparseMatrix M;     ///< n_u x n_u velocity mass (reduced)
  Eigen::VectorXd c;  ///< c_i = integral of pressure basis function i

  SparseMatrix stiffness_full;  ///< scalar grad-grad, no BC
  SparseMatrix mass_full;       ///< scalar L2 mass, no BC
  SparseMatrix bx_full;         ///< (i,j) -> integral of psi_i * d(phi_j)/dx
  SparseMatrix by_full;         ///< (i,j) -> integral of psi_i * d(phi_j)/dy

  std::vector<int> free_dofs;   ///< interior scalar DOFs, ascending
  std::vector<int> free_index;  ///< scalar DOF -> free slot, or -1

  int n_scalar_dofs() const { return space ? space->n_dofs() : 0; }
  int n_free_scalar_dofs() const { return static_cast<int>(free_dofs.size()); }
  int n_velocity_dofs() const { return static_cast<int>(A.rows()); }
  int n_pressure_dofs() const { return static_cast<int>(S.rows()); }
};

/// Assembles all blocks with the degree-8 rule. Equal-order pairing is
/// required (vel == pres); alpha0 must be positive.
BlockSystem assemble_blocks(const MeshPtr& mesh, ElementKind vel,
                            ElementKind pres, const ProjectionKind& proj,
                            double alpha0,
                            AlphaScaling scaling = AlphaScaling::HSquared);

/// Bilinear forms evaluated by exact contraction with the full blocks:
/// a (velocity grad-grad), b (divergence against pressure), r (velocity
/// mass), s (stabilization).
enum class Form { A, B, R, S };

/// x^T (block) y. Form::A and Form::R take two velocity fields, Form::S two
/// pressures, and Form::B evaluates b(x, y) with velocity x and pressure y.
double form_eval(const BlockSystem& sys, Form form, const FeFunction& x,
                 const FeFunction& y);

/// Mesh-dependent norm ( |v|_1^2 + ||q||_0^2 + S(q,q) )^{1/2}.
double triple_norm(const BlockSystem& sys, const FeFunction& v,
                   const FeFunction& q);

/// Velocity load vector rhs_i = lambda * integral of u_coarse . v_i, with
/// u_coarse living on an ancestor mesh (or this mesh) and evaluated at this
/// mesh's quadrature points through the refinement genealogy. Full length
/// (2 x scalar DOFs); boundary rows are zero.
Eigen::VectorXd assemble_source_rhs(const BlockSystem& sys,
                                    const FeFunction& coarse_u, double lambda);

/// Velocity load vector rhs_i = integral of f . v_i for an analytic field
/// (f(x, c) = component c). Full length; boundary rows are zero.
Eigen::VectorXd assemble_load(const BlockSystem& sys,
                              const std::function<double(const Vec2&, int)>& f);

/// Restriction of a full velocity coefficient vector (2 x scalar DOFs) to
/// the free stacking used by the reduced blocks, and its zero-padded inverse.
Eigen::VectorXd restrict_to_free(const BlockSystem& sys,
                                 const Eigen::VectorXd& full);
Eigen::VectorXd extend_from_free(const BlockSystem& sys,
                                 const Eigen::VectorXd& reduced);

/// Wraps coefficient vectors as fields on the system's scalar space.
FeFunction make_velocity(const BlockSystem& sys,
                         const Eigen::VectorXd& reduced);
FeFunction make_pressure(const BlockSystem& sys, const Eigen::VectorXd& p);

/// Coefficients of the constant-1 pressure field (unit vertex/edge DOFs,
/// zero bubbles). Satisfies c . p = 1.
Eigen::VectorXd constant_pressure_coefficients(const BlockSystem& sys);

}  // namespace stokeslps
