// SPDX-License-Identifier: Apache-2.0
#include "stokeslps/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "stokeslps/errors.hpp"

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

std::string format_residual(double r) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3e", r);
  return buf;
}

}  // namespace

SparseMatrix augmented_stiffness(const BlockSystem& sys) {
  const int nu = sys.n_velocity_dofs();
  const int np = sys.n_pressure_dofs();
  const int n = nu + np + 1;
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(sys.A.nonZeros()) +
            2 * static_cast<std::size_t>(sys.B.nonZeros()) +
            static_cast<std::size_t>(sys.S.nonZeros()) + 2 * np);
  for (int r = 0; r < sys.A.outerSize(); ++r)
    for (SparseMatrix::InnerIterator it(sys.A, r); it; ++it)
      t.emplace_back(r, static_cast<int>(it.col()), it.value());
  for (int r = 0; r < sys.B.outerSize(); ++r)
    for (SparseMatrix::InnerIterator it(sys.B, r); it; ++it) {
      t.emplace_back(nu + r, static_cast<int>(it.col()), it.value());
      t.emplace_back(static_cast<int>(it.col()), nu + r, -it.value());
    }
  for (int r = 0; r < sys.S.outerSize(); ++r)
    for (SparseMatrix::InnerIterator it(sys.S, r); it; ++it)
      t.emplace_back(nu + r, nu + static_cast<int>(it.col()), it.value());
  for (int i = 0; i < np; ++i) {
    if (sys.c[i] == 0.0) continue;
    t.emplace_back(nu + i, nu + np, sys.c[i]);
    t.emplace_back(nu + np, nu + i, sys.c[i]);
  }
  return from_triplets(n, n, t);
}

SparseMatrix augmented_mass(const BlockSystem& sys) {
  const int nu = sys.n_velocity_dofs();
  const int n = nu + sys.n_pressure_dofs() + 1;
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(sys.M.nonZeros()));
  for (int r = 0; r < sys.M.outerSize(); ++r)
    for (SparseMatrix::InnerIterator it(sys.M, r); it; ++it)
      t.emplace_back(r, static_cast<int>(it.col()), it.value());
  return from_triplets(n, n, t);
}

Eigen::VectorXd pack_augmented(const BlockSystem& sys, const FeFunction& u,
                               const FeFunction& p) {
  const int nu = sys.n_velocity_dofs();
  const int np = sys.n_pressure_dofs();
  if (p.coeffs.size() != np)
    throw InvalidArgumentError("pack_augmented: pressure length mismatch");
  Eigen::VectorXd x(nu + np + 1);
  x.head(nu) = restrict_to_free(sys, u.coeffs);
  x.segment(nu, np) = p.coeffs;
  x[nu + np] = 0.0;
  return x;
}

std::vector<EigenPair> solve_smallest(const BlockSystem& sys,
                                      const EigensolverOptions& options) {
  const int nu = sys.n_velocity_dofs();
  const int np = sys.n_pressure_dofs();
  const int n = nu + np + 1;
  if (options.count < 1)
    throw InvalidArgumentError("solve_smallest: count must be >= 1");
  if (options.count > nu)
    throw InvalidArgumentError(
        "solve_smallest: count exceeds the number of finite eigenvalues");
  if (!(options.tol > 0.0))
    throw InvalidArgumentError("solve_smallest: tol must be positive");
  if (options.max_sweeps < 1)
    throw InvalidArgumentError("solve_smallest: max_sweeps must be >= 1");

  const int subspace = std::min(
      nu, options.subspace > 0 ? std::max(options.subspace, options.count)
                               : std::max(2 * options.count + 2,
                                          options.count + 6));

  const SparseMatrix k_aug = augmented_stiffness(sys);
  const SparseMatrix m_aug = augmented_mass(sys);
  const Factorization lu = factorize(k_aug);

  // Deterministic start block: raw generator words mapped to [-1, 1), so
  // runs are identical across platforms (no distribution involved).
  std::mt19937 rng(options.seed);
  const auto next_entry = [&rng]() {
    return 2.0 * (static_cast<double>(rng()) * (1.0 / 4294967296.0)) - 1.0;
  };

  Eigen::MatrixXd v(n, subspace);
  for (int j = 0; j < subspace; ++j)
    for (int i = 0; i < n; ++i) v(i, j) = next_entry();

  const Eigen::VectorXd one = constant_pressure_coefficients(sys);
  double best_residual = std::numeric_limits<double>::infinity();

  for (int sweep = 0; sweep < options.max_sweeps; ++sweep) {
    // Top the block back up if whitening dropped directions last sweep.
    if (v.cols() < subspace) {
      Eigen::MatrixXd grown(n, subspace);
      grown.leftCols(v.cols()) = v;
      for (Eigen::Index j = v.cols(); j < subspace; ++j)
        for (int i = 0; i < n; ++i) grown(i, j) = next_entry();
      v = std::move(grown);
    }

    // Whiten in the MM-semi-inner product, cutting near-null directions
    // (the pressure/multiplier block contributes nothing to the Gram).
    Eigen::MatrixXd mv = m_aug * v;
    Eigen::MatrixXd gram = v.transpose() * mv;
    gram = 0.5 * (gram + gram.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> gram_es(gram);
    const Eigen::VectorXd& d = gram_es.eigenvalues();
    const double d_max = d[d.size() - 1];
    if (!(d_max > 0.0))
      throw InternalError("solve_smallest: start block lost all mass rank");
    const double d_cut = d_max * 1e-12;
    int kept = 0;
    for (Eigen::Index j = 0; j < d.size(); ++j)
      if (d[j] > d_cut) ++kept;
    Eigen::MatrixXd t(v.cols(), kept);
    for (Eigen::Index j = d.size() - kept, col = 0; j < d.size(); ++j, ++col)
      t.col(col) = gram_es.eigenvectors().col(j) / std::sqrt(d[j]);
    v = (v * t).eval();
    mv = (mv * t).eval();

    // One shift-invert application and the Rayleigh-Ritz projection.
    Eigen::MatrixXd w(n, v.cols());
    for (Eigen::Index j = 0; j < v.cols(); ++j) w.col(j) = lu.solve(mv.col(j));
    Eigen::MatrixXd h = mv.transpose() * w;
    h = 0.5 * (h + h.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ritz_es(h);
    const Eigen::VectorXd& theta = ritz_es.eigenvalues();  // ascending

    // theta ~ 1/lambda; theta near zero belongs to the infinite eigenvalues.
    const double theta_max = theta[theta.size() - 1];
    std::vector<int> finite;  // indices ordered by descending theta
    if (theta_max > 0.0) {
      const double theta_cut = theta_max * 1e-8;
      for (Eigen::Index j = theta.size() - 1; j >= 0; --j)
        if (theta[j] > theta_cut) finite.push_back(static_cast<int>(j));
    }

    bool converged = static_cast<int>(finite.size()) >= options.count;
    double sweep_residual = 0.0;
    std::vector<double> residuals;
    if (converged) {
      residuals.resize(options.count);
      for (int j = 0; j < options.count; ++j) {
        const Eigen::VectorXd x = v * ritz_es.eigenvectors().col(finite[j]);
        const double lambda = 1.0 / theta[finite[j]];
        const Eigen::VectorXd mx = m_aug * x;
        const double mx_norm = mx.norm();
        residuals[j] = mx_norm > 0.0
                           ? (k_aug * x - lambda * mx).norm() / mx_norm
                           : std::numeric_limits<double>::infinity();
        sweep_residual = std::max(sweep_residual, residuals[j]);
        if (residuals[j] > options.tol) converged = false;
      }
      best_residual = std::min(best_residual, sweep_residual);
    }

    if (converged) {
      std::vector<EigenPair> out;
      out.reserve(options.count);
      for (int j = 0; j < options.count; ++j) {
        Eigen::VectorXd x = v * ritz_es.eigenvectors().col(finite[j]);
        Eigen::VectorXd u_red = x.head(nu);
        Eigen::VectorXd p = x.segment(nu, np);
        // r(u,u) = 1 exactly.
        const double r_uu = u_red.dot(sys.M * u_red);
        const double scale = 1.0 / std::sqrt(r_uu);
        u_red *= scale;
        p *= scale;
        // Zero pressure mean: subtract the constant (c . one = 1).
        p -= sys.c.dot(p) * one;
        // Sign: the largest-magnitude velocity coefficient is positive.
        int arg_max = 0;
        for (int i = 1; i < nu; ++i)
          if (std::abs(u_red[i]) > std::abs(u_red[arg_max])) arg_max = i;
        if (u_red[arg_max] < 0.0) {
          u_red = -u_red;
          p = -p;
        }
        EigenPair pair;
        pair.lambda = 1.0 / theta[finite[j]];
        pair.u = make_velocity(sys, u_red);
        pair.p = make_pressure(sys, p);
        pair.residual = residuals[j];
        pair.index = j;
        out.push_back(std::move(pair));
      }
      return out;
    }

    // Next subspace: the images ordered by dominance of the inverted
    // operator (descending theta).
    Eigen::MatrixXd z(v.cols(), v.cols());
    for (Eigen::Index j = 0; j < v.cols(); ++j)
      z.col(j) = ritz_es.eigenvectors().col(v.cols() - 1 - j);
    v = (w * z).eval();
  }

  throw ConvergenceError("solve_smallest: no convergence within " +
                         std::to_string(options.max_sweeps) +
                         " sweeps (best residual " +
                         format_residual(best_residual) + ")");
}

std::vector<EigenPair> solve_smallest(const BlockSystem& sys, int count,
                                      double tol, int max_sweeps) {
  EigensolverOptions options;
  options.count = count;
  options.tol = tol;
  options.max_sweeps = max_sweeps;
  return solve_smallest(sys, options);
}

double eig_residual(const BlockSystem& sys, const EigenPair& pair) {
  const Eigen::VectorXd x = pack_augmented(sys, pair.u, pair.p);
  if (x.norm() == 0.0)
    throw InvalidArgumentError("eig_residual: zero eigenvector");
  const SparseMatrix k_aug = augmented_stiffness(sys);
  const SparseMatrix m_aug = augmented_mass(sys);
  const Eigen::VectorXd mx = m_aug * x;
  const double mx_norm = mx.norm();
  if (mx_norm == 0.0)
    throw InvalidArgumentError("eig_residual: zero velocity component");
  return (k_aug * x - pair.lambda * mx).norm() / mx_norm;
}

double rayleigh_quotient(const BlockSystem& sys, const FeFunction& u) {
  const double r_uu = form_eval(sys, Form::R, u, u);
  if (!(r_uu > 0.0))
    throw InvalidArgumentError("rayleigh_quotient: zero velocity field");
  return form_eval(sys, Form::A, u, u) / r_uu;
}

double infsup_global(const BlockSystem& sys) {
  const int nu = sys.n_velocity_dofs();
  const int np = sys.n_pressure_dofs();
  const int n2 = nu + np;

  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n2, n2);
  for (int r = 0; r < sys.A.outerSize(); ++r)
    for (SparseMatrix::InnerIterator it(sys.A, r); it; ++it)
      h(r, it.col()) = it.value();
  for (int r = 0; r < sys.B.outerSize(); ++r)
    for (SparseMatrix::InnerIterator it(sys.B, r); it; ++it) {
      h(nu + r, it.col()) = it.value();
      h(it.col(), nu + r) = -it.value();
    }
  for (int r = 0; r < sys.S.outerSize(); ++r)
    for (SparseMatrix::InnerIterator it(sys.S, r); it; ++it)
      h(nu + r, nu + it.col()) = it.value();

  // Triple-norm Gram matrix blockdiag(A, M_p + S).
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(n2, n2);
  t.topLeftCorner(nu, nu) = h.topLeftCorner(nu, nu);
  for (int r = 0; r < sys.mass_full.outerSize(); ++r)
    for (SparseMatrix::InnerIterator it(sys.mass_full, r); it; ++it)
      t(nu + r, nu + it.col()) += it.value();
  t.bottomRightCorner(np, np) += h.bottomRightCorner(np, np);

  // Orthonormal basis of the zero-mean constraint's null space.
  Eigen::VectorXd chat = Eigen::VectorXd::Zero(n2);
  chat.tail(np) = sys.c;
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(chat);
  const Eigen::MatrixXd q = qr.householderQ();
  const Eigen::MatrixXd z = q.rightCols(n2 - 1);

  const Eigen::MatrixXd hz = z.transpose() * h * z;
  const Eigen::MatrixXd tz = z.transpose() * t * z;
  Eigen::LLT<Eigen::MatrixXd> llt(tz);
  if (llt.info() != Eigen::Success)
    throw InternalError("infsup_global: triple-norm Gram not positive");
  Eigen::MatrixXd op = llt.matrixL().solve(hz);
  op = llt.matrixL().solve(op.transpose()).transpose().eval();
  Eigen::BDCSVD<Eigen::MatrixXd> svd(op);
  const auto& sv = svd.singularValues();
  return sv[sv.size() - 1];
}

}  // namespace stokeslps
