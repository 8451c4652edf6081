// SPDX-License-Identifier: Apache-2.0
#include "stokeslps/spaces.hpp"

#include <algorithm>
#include <map>
#include <string>
#include <utility>

#include <Eigen/Cholesky>
#include <Eigen/SVD>

#include "stokeslps/errors.hpp"

namespace stokeslps {

namespace {

bool on_unit_square_boundary(const Vec2& p) {
  // Boundary coordinates are exact: side coordinates of the structured grid
  // are 0 or 1 exactly, and midpoints of same-side vertices inherit that.
  return p.x == 0.0 || p.x == 1.0 || p.y == 0.0 || p.y == 1.0;
}

constexpr std::array<double, 3> kBarycenter = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};

}  // namespace

const char* to_string(ElementKind kind) {
  return kind == ElementKind::P1 ? "p1" : "p2bubble";
}

int local_dof_count(ElementKind kind) {
  return kind == ElementKind::P1 ? 3 : 9;
}

std::string to_string(const ProjectionKind& proj) {
  if (proj.is_zero()) return "zero";
  return "pdisc" + std::to_string(proj.degree);
}

DofMap::DofMap(MeshPtr mesh, ElementKind kind)
    : mesh_(std::move(mesh)), element_(kind) {
  if (!mesh_) throw InvalidArgumentError("DofMap: null mesh");
  const Mesh& m = *mesh_;
  const int nv = m.n_vertices();
  const int nc = m.n_cells();
  n_local_ = local_dof_count(kind);
  cell_dofs_.resize(static_cast<std::size_t>(nc) * n_local_);

  if (kind == ElementKind::P1) {
    n_dofs_ = nv;
    for (int c = 0; c < nc; ++c)
      for (int i = 0; i < 3; ++i) cell_dofs_[3 * c + i] = m.cell(c)[i];
    dof_kind_.assign(nv, DofKind::Vertex);
    dof_point_.resize(nv);
    boundary_flag_.assign(nv, 0);
    for (int v = 0; v < nv; ++v) {
      dof_point_[v] = m.vertex(v);
      boundary_flag_[v] = m.boundary_vertex(v) ? 1 : 0;
    }
  } else {
    // Edge numbering: ordered map over (min,max) vertex pairs gives a
    // deterministic lexicographic order shared by all cells.
    std::map<std::pair<int, int>, int> edge_index;
    for (int c = 0; c < nc; ++c) {
      const auto& cell = m.cell(c);
      for (int i = 0; i < 3; ++i) {
        const auto pair = std::minmax(cell[(i + 1) % 3], cell[(i + 2) % 3]);
        edge_index.emplace(pair, 0);
      }
    }
    n_edges_ = 0;
    for (auto& kv : edge_index) kv.second = n_edges_++;
    n_dofs_ = nv + n_edges_ + 3 * nc;

    dof_kind_.assign(n_dofs_, DofKind::Vertex);
    dof_point_.resize(n_dofs_);
    boundary_flag_.assign(n_dofs_, 0);
    for (int v = 0; v < nv; ++v) {
      dof_point_[v] = m.vertex(v);
      boundary_flag_[v] = m.boundary_vertex(v) ? 1 : 0;
    }
    for (const auto& [pair, e] : edge_index) {
      const Vec2 a = m.vertex(pair.first);
      const Vec2 b = m.vertex(pair.second);
      const Vec2 mid{0.5 * (a.x + b.x), 0.5 * (a.y + b.y)};
      dof_kind_[nv + e] = DofKind::Edge;
      dof_point_[nv + e] = mid;
      boundary_flag_[nv + e] = on_unit_square_boundary(mid) ? 1 : 0;
    }
    for (int c = 0; c < nc; ++c) {
      const auto& cell = m.cell(c);
      int* dofs = &cell_dofs_[static_cast<std::size_t>(c) * 9];
      for (int i = 0; i < 3; ++i) dofs[i] = cell[i];
      for (int i = 0; i < 3; ++i) {
        const auto pair = std::minmax(cell[(i + 1) % 3], cell[(i + 2) % 3]);
        dofs[3 + i] = nv + edge_index.at(pair);
      }
      for (int i = 0; i < 3; ++i) {
        const int dof = nv + n_edges_ + 3 * c + i;
        dofs[6 + i] = dof;
        dof_kind_[dof] = DofKind::Bubble;
        dof_point_[dof] = m.barycenter(c);
      }
    }
  }

  for (int d = 0; d < n_dofs_; ++d)
    if (boundary_flag_[d]) boundary_dofs_.push_back(d);
}

DofMapPtr build_space(const MeshPtr& mesh, ElementKind kind) {
  return std::make_shared<const DofMap>(mesh, kind);
}

BasisValues eval_basis(ElementKind kind, const std::array<double, 3>& bary) {
  const double l0 = bary[0], l1 = bary[1], l2 = bary[2];
  BasisValues out;
  if (kind == ElementKind::P1) {
    out.count = 3;
    out.values = {l0, l1, l2};
    for (int i = 0; i < 3; ++i) out.dlambda[i][i] = 1.0;
    return out;
  }
  out.count = 9;
  const std::array<double, 3> l = {l0, l1, l2};
  // Vertex functions l_i (2 l_i - 1).
  for (int i = 0; i < 3; ++i) {
    out.values[i] = l[i] * (2.0 * l[i] - 1.0);
    out.dlambda[i][i] = 4.0 * l[i] - 1.0;
  }
  // Edge functions 4 l_a l_b on the edge opposite vertex i.
  for (int i = 0; i < 3; ++i) {
    const int a = (i + 1) % 3, b = (i + 2) % 3;
    out.values[3 + i] = 4.0 * l[a] * l[b];
    out.dlambda[3 + i][a] = 4.0 * l[b];
    out.dlambda[3 + i][b] = 4.0 * l[a];
  }
  // Bubble functions phi * l_i with phi = l0 l1 l2.
  const double phi = l0 * l1 * l2;
  const std::array<double, 3> dphi = {l1 * l2, l0 * l2, l0 * l1};
  for (int i = 0; i < 3; ++i) {
    out.values[6 + i] = phi * l[i];
    for (int k = 0; k < 3; ++k) out.dlambda[6 + i][k] = dphi[k] * l[i];
    out.dlambda[6 + i][i] += phi;
  }
  return out;
}

std::array<Vec2, 3> barycentric_gradients(const Mesh& mesh, int cell) {
  const auto& c = mesh.cell(cell);
  const double inv2a = 1.0 / (2.0 * mesh.cell_area(cell));
  std::array<Vec2, 3> g;
  for (int i = 0; i < 3; ++i) {
    const Vec2& pa = mesh.vertex(c[(i + 1) % 3]);
    const Vec2& pb = mesh.vertex(c[(i + 2) % 3]);
    g[i] = {(pa.y - pb.y) * inv2a, (pb.x - pa.x) * inv2a};
  }
  return g;
}

FeFunction interpolate_nodal(const DofMapPtr& space, int components,
                             const std::function<double(const Vec2&, int)>& f) {
  if (!space) throw InvalidArgumentError("interpolate_nodal: null space");
  if (components != 1 && components != 2)
    throw InvalidArgumentError("interpolate_nodal: components must be 1 or 2");
  if (!f) throw InvalidArgumentError("interpolate_nodal: null field");
  const int n = space->n_dofs();
  FeFunction u{space, components, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(components) * n)};
  for (int comp = 0; comp < components; ++comp)
    for (int d = 0; d < n; ++d)
      if (space->dof_kind(d) != DofKind::Bubble)
        u.coeffs[static_cast<Eigen::Index>(comp) * n + d] = f(space->dof_point(d), comp);
  if (space->element() == ElementKind::P2Bubble) {
    const Mesh& m = *space->mesh();
    const BasisValues center = eval_basis(ElementKind::P2Bubble, kBarycenter);
    for (int c = 0; c < m.n_cells(); ++c) {
      const int* dofs = space->cell_dofs(c);
      const Vec2 xb = m.barycenter(c);
      for (int comp = 0; comp < components; ++comp) {
        double p2_value = 0.0;
        for (int i = 0; i < 6; ++i)
          p2_value += u.coeff(comp, dofs[i]) * center.values[i];
        // The three equal bubble coefficients add value/27 at the barycenter.
        const double bubble = 27.0 * (f(xb, comp) - p2_value);
        for (int i = 6; i < 9; ++i)
          u.coeffs[static_cast<Eigen::Index>(comp) * n + dofs[i]] = bubble;
      }
    }
  }
  return u;
}

namespace {

void check_function(const FeFunction& u) {
  if (!u.space) throw InvalidArgumentError("FeFunction: null space");
  if (u.components != 1 && u.components != 2)
    throw InvalidArgumentError("FeFunction: components must be 1 or 2");
  if (u.coeffs.size() != static_cast<Eigen::Index>(u.components) * u.space->n_dofs())
    throw InvalidArgumentError("FeFunction: coefficient length mismatch");
}

}  // namespace

Eigen::VectorXd evaluate_in_cell(const FeFunction& u, int cell,
                                 const std::array<double, 3>& bary) {
  check_function(u);
  const BasisValues bv = eval_basis(u.space->element(), bary);
  const int* dofs = u.space->cell_dofs(cell);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(u.components);
  for (int comp = 0; comp < u.components; ++comp)
    for (int i = 0; i < bv.count; ++i)
      out[comp] += u.coeff(comp, dofs[i]) * bv.values[i];
  return out;
}

Eigen::MatrixXd gradient_in_cell(const FeFunction& u, int cell,
                                 const std::array<double, 3>& bary) {
  check_function(u);
  const BasisValues bv = eval_basis(u.space->element(), bary);
  const auto g = barycentric_gradients(*u.space->mesh(), cell);
  const int* dofs = u.space->cell_dofs(cell);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(u.components, 2);
  for (int i = 0; i < bv.count; ++i) {
    double gx = 0.0, gy = 0.0;
    for (int k = 0; k < 3; ++k) {
      gx += bv.dlambda[i][k] * g[k].x;
      gy += bv.dlambda[i][k] * g[k].y;
    }
    for (int comp = 0; comp < u.components; ++comp) {
      const double a = u.coeff(comp, dofs[i]);
      out(comp, 0) += a * gx;
      out(comp, 1) += a * gy;
    }
  }
  return out;
}

Eigen::VectorXd evaluate_at(const FeFunction& u, const Vec2& x,
                            std::optional<Mesh::CellHint> hint) {
  check_function(u);
  const Mesh::Location loc = u.space->mesh()->locate(x, hint);
  return evaluate_in_cell(u, loc.cell, loc.bary);
}

namespace {

// Rows: values of the D_h(K) basis at the rule's points. The basis is
// {1} (degree 0) or {1, (x-xb)/h, (y-yb)/h} (degree 1); the scaling keeps
// the Gram matrix well conditioned on small cells.
Eigen::MatrixXd projection_basis(const Mesh& mesh, int cell,
                                 const ProjectionKind& proj,
                                 const QuadratureRule& rule) {
  if (proj.degree < 0)
    throw InvalidArgumentError("projection space: negative degree");
  if (proj.degree > 1)
    throw UnsupportedDegreeError("projection space: degree > 1 not stored");
  const int m = proj.degree == 0 ? 1 : 3;
  const Eigen::Index nq = static_cast<Eigen::Index>(rule.points.size());
  const Vec2 xb = mesh.barycenter(cell);
  const double h = mesh.cell_diameter(cell);
  Eigen::MatrixXd d(nq, m);
  for (Eigen::Index k = 0; k < nq; ++k) {
    const Vec2 x = mesh.to_physical(cell, rule.points[k].bary);
    d(k, 0) = 1.0;
    if (m == 3) {
      d(k, 1) = (x.x - xb.x) / h;
      d(k, 2) = (x.y - xb.y) / h;
    }
  }
  return d;
}

Eigen::VectorXd physical_weights(const Mesh& mesh, int cell,
                                 const QuadratureRule& rule) {
  const double two_a = 2.0 * mesh.cell_area(cell);
  Eigen::VectorXd w(static_cast<Eigen::Index>(rule.points.size()));
  for (Eigen::Index k = 0; k < w.size(); ++k)
    w[k] = rule.points[k].weight * two_a;
  return w;
}

}  // namespace

Eigen::MatrixXd fluctuation_operator(const Mesh& mesh, int cell,
                                     const ProjectionKind& proj,
                                     const QuadratureRule& rule) {
  const Eigen::Index nq = static_cast<Eigen::Index>(rule.points.size());
  if (proj.is_zero()) return Eigen::MatrixXd::Identity(nq, nq);
  const Eigen::MatrixXd d = projection_basis(mesh, cell, proj, rule);
  const Eigen::VectorXd w = physical_weights(mesh, cell, rule);
  const Eigen::MatrixXd gram = d.transpose() * w.asDiagonal() * d;
  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  if (llt.info() != Eigen::Success)
    throw InternalError("fluctuation_operator: singular local Gram matrix");
  return Eigen::MatrixXd::Identity(nq, nq) -
         d * llt.solve(d.transpose() * w.asDiagonal());
}

Eigen::MatrixXd fluctuation_apply(const FeFunction& q,
                                  const ProjectionKind& proj, int cell,
                                  const QuadratureRule& rule) {
  check_function(q);
  if (q.components != 1)
    throw InvalidArgumentError("fluctuation_apply: pressure must be scalar");
  const Eigen::Index nq = static_cast<Eigen::Index>(rule.points.size());
  Eigen::MatrixXd grads(nq, 2);
  for (Eigen::Index k = 0; k < nq; ++k)
    grads.row(k) = gradient_in_cell(q, cell, rule.points[k].bary).row(0);
  if (proj.is_zero()) return grads;
  return fluctuation_operator(*q.space->mesh(), cell, proj, rule) * grads;
}

std::optional<double> local_infsup_check(const Mesh& mesh, int cell,
                                         ElementKind vel,
                                         const ProjectionKind& proj) {
  if (proj.is_zero()) return std::nullopt;  // vacuous for D_h = {0}
  if (vel != ElementKind::P2Bubble)
    throw InvalidArgumentError(
        "local_infsup_check: element has no cell-interior functions");
  const QuadratureRule& rule = rule_for_degree(kAssemblyQuadratureDegree);
  const Eigen::Index nq = static_cast<Eigen::Index>(rule.points.size());
  Eigen::MatrixXd bubbles(nq, 3);
  for (Eigen::Index k = 0; k < nq; ++k) {
    const BasisValues bv = eval_basis(vel, rule.points[k].bary);
    for (int i = 0; i < 3; ++i) bubbles(k, i) = bv.values[6 + i];
  }
  const Eigen::MatrixXd d = projection_basis(mesh, cell, proj, rule);
  const Eigen::VectorXd w = physical_weights(mesh, cell, rule);
  const Eigen::MatrixXd coupling = bubbles.transpose() * w.asDiagonal() * d;
  const Eigen::MatrixXd gram_b = bubbles.transpose() * w.asDiagonal() * bubbles;
  const Eigen::MatrixXd gram_d = d.transpose() * w.asDiagonal() * d;
  Eigen::LLT<Eigen::MatrixXd> llt_b(gram_b);
  Eigen::LLT<Eigen::MatrixXd> llt_d(gram_d);
  if (llt_b.info() != Eigen::Success || llt_d.info() != Eigen::Success)
    throw InternalError("local_infsup_check: singular local Gram matrix");
  // Whitened coupling Lb^{-1} C Ld^{-T}; its smallest singular value is the
  // local inf-sup constant between the two L2-normalized spaces.
  Eigen::MatrixXd m1 = llt_b.matrixL().solve(coupling);
  Eigen::MatrixXd whitened =
      llt_d.matrixL().solve(m1.transpose()).transpose();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(whitened);
  const auto& sv = svd.singularValues();
  return sv[sv.size() - 1];
}

}  // namespace stokeslps
