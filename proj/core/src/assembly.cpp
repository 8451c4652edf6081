// SPDX-License-Identifier: Apache-2.0
#include "stokeslps/assembly.hpp"

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "stokeslps/errors.hpp"
#include "stokeslps/quadrature.hpp"

namespace stokeslps {

namespace {

using Triplet = Eigen::Triplet<double>;

SparseMatrix from_triplets(int rows, int cols,
                           const std::vector<Triplet>& triplets) {
  SparseMatrix m(rows, cols);
  m.setFromTriplets(triplets.begin(), triplets.end());
  m.makeCompressed();
  return m;
}

// Rows and columns restricted to free scalar DOFs.
SparseMatrix slice_free(const SparseMatrix& full,
                        const std::vector<int>& free_index, int n_free) {
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(full.nonZeros()));
  for (int r = 0; r < full.outerSize(); ++r) {
    if (free_index[r] < 0) continue;
    for (SparseMatrix::InnerIterator it(full, r); it; ++it) {
      const int fc = free_index[it.col()];
      if (fc >= 0) t.emplace_back(free_index[r], fc, it.value());
    }
  }
  return from_triplets(n_free, n_free, t);
}

// Two identical diagonal blocks (one per velocity component).
SparseMatrix block_diag2(const SparseMatrix& k) {
  const int n = static_cast<int>(k.rows());
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(2 * k.nonZeros()));
  for (int r = 0; r < k.outerSize(); ++r)
    for (SparseMatrix::InnerIterator it(k, r); it; ++it) {
      t.emplace_back(r, static_cast<int>(it.col()), it.value());
      t.emplace_back(n + r, n + static_cast<int>(it.col()), it.value());
    }
  return from_triplets(2 * n, 2 * n, t);
}

}  // namespace

const char* to_string(AlphaScaling scaling) {
  return scaling == AlphaScaling::HSquared ? "h2" : "constant";
}

BlockSystem assemble_blocks(const MeshPtr& mesh, ElementKind vel,
                            ElementKind pres, const ProjectionKind& proj,
                            double alpha0, AlphaScaling scaling) {
  if (!mesh) throw InvalidArgumentError("assemble_blocks: null mesh");
  if (vel != pres)
    throw InvalidArgumentError(
        "assemble_blocks: equal-order pairing required (velocity and "
        "pressure elements must match)");
  if (!(alpha0 > 0.0))
    throw InvalidArgumentError("assemble_blocks: alpha0 must be positive");

  BlockSystem sys;
  sys.mesh = mesh;
  sys.space = build_space(mesh, vel);
  sys.element = vel;
  sys.projection = proj;
  sys.alpha0 = alpha0;
  sys.scaling = scaling;

  const Mesh& m = *mesh;
  const DofMap& space = *sys.space;
  const int n = space.n_dofs();
  const int nc = m.n_cells();
  const int nld = space.n_local_dofs();
  const QuadratureRule& rule = rule_for_degree(kAssemblyQuadratureDegree);
  const int nq = static_cast<int>(rule.points.size());

  // Reference basis values are cell-independent; evaluate once.
  std::vector<BasisValues> basis(rule.points.size());
  Eigen::MatrixXd val(nq, nld);
  for (int k = 0; k < nq; ++k) {
    basis[k] = eval_basis(vel, rule.points[k].bary);
    for (int i = 0; i < nld; ++i) val(k, i) = basis[k].values[i];
  }

  std::vector<Triplet> tk, tm, tbx, tby, ts;
  const std::size_t per_cell = static_cast<std::size_t>(nld) * nld;
  tk.reserve(per_cell * nc);
  tm.reserve(per_cell * nc);
  tbx.reserve(per_cell * nc);
  tby.reserve(per_cell * nc);
  ts.reserve(per_cell * nc);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(n);

  Eigen::MatrixXd gx(nq, nld), gy(nq, nld);
  for (int cell = 0; cell < nc; ++cell) {
    const auto grads = barycentric_gradients(m, cell);
    const double two_a = 2.0 * m.cell_area(cell);
    const double h_k = m.cell_diameter(cell);
    const double alpha_k =
        scaling == AlphaScaling::HSquared ? alpha0 * h_k * h_k : alpha0;

    Eigen::VectorXd w(nq);
    for (int k = 0; k < nq; ++k) {
      w[k] = rule.points[k].weight * two_a;
      for (int i = 0; i < nld; ++i) {
        double dx = 0.0, dy = 0.0;
        for (int kk = 0; kk < 3; ++kk) {
          dx += basis[k].dlambda[i][kk] * grads[kk].x;
          dy += basis[k].dlambda[i][kk] * grads[kk].y;
        }
        gx(k, i) = dx;
        gy(k, i) = dy;
      }
    }

    const Eigen::MatrixXd k_loc = gx.transpose() * w.asDiagonal() * gx +
                                  gy.transpose() * w.asDiagonal() * gy;
    const Eigen::MatrixXd m_loc = val.transpose() * w.asDiagonal() * val;
    const Eigen::MatrixXd bx_loc = val.transpose() * w.asDiagonal() * gx;
    const Eigen::MatrixXd by_loc = val.transpose() * w.asDiagonal() * gy;
    Eigen::MatrixXd s_loc;
    if (proj.is_zero()) {
      s_loc = alpha_k * k_loc;
    } else {
      const Eigen::MatrixXd f = fluctuation_operator(m, cell, proj, rule);
      const Eigen::MatrixXd fgx = f * gx;
      const Eigen::MatrixXd fgy = f * gy;
      s_loc = alpha_k * (fgx.transpose() * w.asDiagonal() * fgx +
                         fgy.transpose() * w.asDiagonal() * fgy);
    }
    const Eigen::VectorXd c_loc = val.transpose() * w;

    const int* dofs = space.cell_dofs(cell);
    for (int i = 0; i < nld; ++i) {
      c[dofs[i]] += c_loc[i];
      for (int j = 0; j < nld; ++j) {
        tk.emplace_back(dofs[i], dofs[j], k_loc(i, j));
        tm.emplace_back(dofs[i], dofs[j], m_loc(i, j));
        tbx.emplace_back(dofs[i], dofs[j], bx_loc(i, j));
        tby.emplace_back(dofs[i], dofs[j], by_loc(i, j));
        ts.emplace_back(dofs[i], dofs[j], s_loc(i, j));
      }
    }
  }

  sys.stiffness_full = from_triplets(n, n, tk);
  sys.mass_full = from_triplets(n, n, tm);
  sys.bx_full = from_triplets(n, n, tbx);
  sys.by_full = from_triplets(n, n, tby);
  sys.S = from_triplets(n, n, ts);
  sys.c = std::move(c);
  tk.clear();
  tm.clear();
  tbx.clear();
  tby.clear();
  ts.clear();
  tk.shrink_to_fit();
  tm.shrink_to_fit();
  tbx.shrink_to_fit();
  tby.shrink_to_fit();
  ts.shrink_to_fit();

  sys.free_index.assign(n, -1);
  for (int d = 0; d < n; ++d)
    if (!space.is_boundary_dof(d)) {
      sys.free_index[d] = static_cast<int>(sys.free_dofs.size());
      sys.free_dofs.push_back(d);
    }
  const int nf = static_cast<int>(sys.free_dofs.size());

  sys.A = block_diag2(slice_free(sys.stiffness_full, sys.free_index, nf));
  sys.M = block_diag2(slice_free(sys.mass_full, sys.free_index, nf));

  std::vector<Triplet> tb;
  tb.reserve(static_cast<std::size_t>(sys.bx_full.nonZeros() +
                                      sys.by_full.nonZeros()));
  for (int r = 0; r < n; ++r) {
    for (SparseMatrix::InnerIterator it(sys.bx_full, r); it; ++it) {
      const int fc = sys.free_index[it.col()];
      if (fc >= 0) tb.emplace_back(r, fc, it.value());
    }
    for (SparseMatrix::InnerIterator it(sys.by_full, r); it; ++it) {
      const int fc = sys.free_index[it.col()];
      if (fc >= 0) tb.emplace_back(r, nf + fc, it.value());
    }
  }
  sys.B = from_triplets(n, 2 * nf, tb);
  return sys;
}

namespace {

void require_velocity(const BlockSystem& sys, const FeFunction& u,
                      const char* where) {
  if (!u.space || u.components != 2 ||
      u.coeffs.size() != 2 * static_cast<Eigen::Index>(sys.n_scalar_dofs()))
    throw InvalidArgumentError(std::string(where) +
                               ": expected a velocity field on the system's "
                               "scalar space");
}

void require_pressure(const BlockSystem& sys, const FeFunction& p,
                      const char* where) {
  if (!p.space || p.components != 1 ||
      p.coeffs.size() != static_cast<Eigen::Index>(sys.n_scalar_dofs()))
    throw InvalidArgumentError(std::string(where) +
                               ": expected a pressure field on the system's "
                               "scalar space");
}

}  // namespace

double form_eval(const BlockSystem& sys, Form form, const FeFunction& x,
                 const FeFunction& y) {
  const int n = sys.n_scalar_dofs();
  switch (form) {
    case Form::A:
    case Form::R: {
      require_velocity(sys, x, "form_eval");
      require_velocity(sys, y, "form_eval");
      const SparseMatrix& block =
          form == Form::A ? sys.stiffness_full : sys.mass_full;
      return x.coeffs.head(n).dot(block * y.coeffs.head(n)) +
             x.coeffs.tail(n).dot(block * y.coeffs.tail(n));
    }
    case Form::B: {
      require_velocity(sys, x, "form_eval");
      require_pressure(sys, y, "form_eval");
      return y.coeffs.dot(sys.bx_full * x.coeffs.head(n) +
                          sys.by_full * x.coeffs.tail(n));
    }
    case Form::S: {
      require_pressure(sys, x, "form_eval");
      require_pressure(sys, y, "form_eval");
      return x.coeffs.dot(sys.S * y.coeffs);
    }
  }
  throw InvalidArgumentError("form_eval: unknown form");
}

double triple_norm(const BlockSystem& sys, const FeFunction& v,
                   const FeFunction& q) {
  require_velocity(sys, v, "triple_norm");
  require_pressure(sys, q, "triple_norm");
  const double a = form_eval(sys, Form::A, v, v);
  const double mq = q.coeffs.dot(sys.mass_full * q.coeffs);
  const double sq = q.coeffs.dot(sys.S * q.coeffs);
  return std::sqrt(a + mq + sq);
}

namespace {

Eigen::VectorXd assemble_velocity_functional(
    const BlockSystem& sys,
    const std::function<void(int cell, const std::array<double, 3>& bary,
                             const Vec2& x, double* out)>& field) {
  const Mesh& m = *sys.mesh;
  const DofMap& space = *sys.space;
  const int n = space.n_dofs();
  const int nld = space.n_local_dofs();
  const QuadratureRule& rule = rule_for_degree(kAssemblyQuadratureDegree);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(2 * n);
  std::vector<BasisValues> basis(rule.points.size());
  for (std::size_t k = 0; k < rule.points.size(); ++k)
    basis[k] = eval_basis(sys.element, rule.points[k].bary);
  for (int cell = 0; cell < m.n_cells(); ++cell) {
    const double two_a = 2.0 * m.cell_area(cell);
    const int* dofs = space.cell_dofs(cell);
    for (std::size_t k = 0; k < rule.points.size(); ++k) {
      const double w = rule.points[k].weight * two_a;
      const Vec2 x = m.to_physical(cell, rule.points[k].bary);
      double f[2];
      field(cell, rule.points[k].bary, x, f);
      for (int i = 0; i < nld; ++i) {
        const int d = dofs[i];
        if (space.is_boundary_dof(d)) continue;  // essential BC rows stay zero
        rhs[d] += w * f[0] * basis[k].values[i];
        rhs[n + d] += w * f[1] * basis[k].values[i];
      }
    }
  }
  return rhs;
}

}  // namespace

Eigen::VectorXd assemble_source_rhs(const BlockSystem& sys,
                                    const FeFunction& coarse_u,
                                    double lambda) {
  if (!coarse_u.space || coarse_u.components != 2)
    throw InvalidArgumentError(
        "assemble_source_rhs: coarse field must be a velocity");
  const MeshPtr& coarse_mesh = coarse_u.space->mesh();
  if (!is_ancestor_of(coarse_mesh, sys.mesh))
    throw InvalidArgumentError(
        "assemble_source_rhs: coarse mesh is not an ancestor of the "
        "system's mesh");
  const Mesh& fine = *sys.mesh;
  const int coarse_level = coarse_mesh->level();
  return assemble_velocity_functional(
      sys, [&](int cell, const std::array<double, 3>&, const Vec2& x,
               double* out) {
        const int cc = fine.ancestor_cell(cell, coarse_level);
        const auto bary = coarse_mesh->to_barycentric(cc, x);
        const Eigen::VectorXd u = evaluate_in_cell(coarse_u, cc, bary);
        out[0] = lambda * u[0];
        out[1] = lambda * u[1];
      });
}

Eigen::VectorXd assemble_load(
    const BlockSystem& sys, const std::function<double(const Vec2&, int)>& f) {
  if (!f) throw InvalidArgumentError("assemble_load: null field");
  return assemble_velocity_functional(
      sys, [&](int, const std::array<double, 3>&, const Vec2& x, double* out) {
        out[0] = f(x, 0);
        out[1] = f(x, 1);
      });
}

Eigen::VectorXd restrict_to_free(const BlockSystem& sys,
                                 const Eigen::VectorXd& full) {
  const int n = sys.n_scalar_dofs();
  const int nf = sys.n_free_scalar_dofs();
  if (full.size() != 2 * static_cast<Eigen::Index>(n))
    throw InvalidArgumentError("restrict_to_free: length mismatch");
  Eigen::VectorXd out(2 * nf);
  for (int i = 0; i < nf; ++i) {
    out[i] = full[sys.free_dofs[i]];
    out[nf + i] = full[n + sys.free_dofs[i]];
  }
  return out;
}

Eigen::VectorXd extend_from_free(const BlockSystem& sys,
                                 const Eigen::VectorXd& reduced) {
  const int n = sys.n_scalar_dofs();
  const int nf = sys.n_free_scalar_dofs();
  if (reduced.size() != 2 * static_cast<Eigen::Index>(nf))
    throw InvalidArgumentError("extend_from_free: length mismatch");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(2 * n);
  for (int i = 0; i < nf; ++i) {
    out[sys.free_dofs[i]] = reduced[i];
    out[n + sys.free_dofs[i]] = reduced[nf + i];
  }
  return out;
}

FeFunction make_velocity(const BlockSystem& sys,
                         const Eigen::VectorXd& reduced) {
  return FeFunction{sys.space, 2, extend_from_free(sys, reduced)};
}

FeFunction make_pressure(const BlockSystem& sys, const Eigen::VectorXd& p) {
  if (p.size() != static_cast<Eigen::Index>(sys.n_scalar_dofs()))
    throw InvalidArgumentError("make_pressure: length mismatch");
  return FeFunction{sys.space, 1, p};
}

Eigen::VectorXd constant_pressure_coefficients(const BlockSystem& sys) {
  const DofMap& space = *sys.space;
  Eigen::VectorXd one = Eigen::VectorXd::Zero(space.n_dofs());
  for (int d = 0; d < space.n_dofs(); ++d)
    if (space.dof_kind(d) != DofKind::Bubble) one[d] = 1.0;
  return one;
}

}  // namespace stokeslps
