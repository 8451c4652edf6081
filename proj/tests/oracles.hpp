// SPDX-License-Identifier: Apache-2.0
//
// Independent reference implementations used to cross-check the library:
// closed-form integrals, a hand-rolled dense linear solver, a dense QZ
// pencil eigensolver, and an analytic manufactured Stokes solution. Nothing
// here calls back into the library's numerical kernels.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "stokeslps/mesh.hpp"

namespace oracles {

inline double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= static_cast<double>(i);
  return f;
}

/// Exact integral of x^a y^b over the reference triangle
/// {x,y >= 0, x+y <= 1}: a! b! / (a+b+2)!.
inline double monomial_integral(int a, int b) {
  return factorial(a) * factorial(b) / factorial(a + b + 2);
}

/// Plain Gaussian elimination with partial pivoting on raw vectors;
/// deliberately shares no code with the library's sparse solver.
inline std::vector<double> dense_solve(std::vector<std::vector<double>> a,
                                       std::vector<double> b) {
  const std::size_t n = a.size();
  if (b.size() != n) throw std::runtime_error("oracle: shape mismatch");
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t pivot = k;
    for (std::size_t i = k + 1; i < n; ++i) {
      if (std::abs(a[i][k]) > std::abs(a[pivot][k])) pivot = i;
    }
    if (a[pivot][k] == 0.0) throw std::runtime_error("oracle: singular");
    std::swap(a[k], a[pivot]);
    std::swap(b[k], b[pivot]);
    for (std::size_t i = k + 1; i < n; ++i) {
      const double m = a[i][k] / a[k][k];
      if (m == 0.0) continue;
      for (std::size_t j = k; j < n; ++j) a[i][j] -= m * a[k][j];
      b[i] -= m * b[k];
    }
  }
  std::vector<double> x(n, 0.0);
  for (std::size_t ii = n; ii-- > 0;) {
    double s = b[ii];
    for (std::size_t j = ii + 1; j < n; ++j) s -= a[ii][j] * x[j];
    x[ii] = s / a[ii][ii];
  }
  return x;
}

/// All finite real eigenvalues of the pencil K x = lambda M x via dense QZ,
/// ascending. M may be singular; eigenvalues with |lambda| beyond the cutoff
/// (or beta ~ 0) count as infinite and are dropped. Throws if a finite
/// eigenvalue has a non-negligible imaginary part.
inline std::vector<double> pencil_eigenvalues(const Eigen::MatrixXd& k,
                                              const Eigen::MatrixXd& m,
                                              double finite_cutoff = 1e8) {
  Eigen::GeneralizedEigenSolver<Eigen::MatrixXd> solver;
  solver.compute(k, m, false);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("oracle: QZ failed");
  }
  std::vector<double> values;
  for (Eigen::Index i = 0; i < solver.alphas().size(); ++i) {
    const std::complex<double> alpha = solver.alphas()[i];
    const double beta = solver.betas()[i];
    if (std::abs(beta) * finite_cutoff <= std::abs(alpha)) continue;  // inf
    if (alpha == 0.0 && beta == 0.0) continue;  // indeterminate
    const std::complex<double> lambda = alpha / beta;
    if (std::abs(lambda.imag()) > 1e-6 * (1.0 + std::abs(lambda.real()))) {
      throw std::runtime_error("oracle: complex finite eigenvalue");
    }
    values.push_back(lambda.real());
  }
  std::sort(values.begin(), values.end());
  return values;
}

/// Divergence-free manufactured Stokes solution on the unit square from the
/// stream function psi(x,y) = X(x) X(y), X(t) = t^2 (1-t)^2:
///   u = (psi_y, -psi_x),  p = x - 1/2,  f = -Laplacian(u) + grad(p).
/// u vanishes on the whole boundary (X and X' vanish at 0 and 1).
struct Manufactured {
  static double X(double t) { return t * t * (1.0 - t) * (1.0 - t); }
  static double Xp(double t) { return 2.0 * t * (1.0 - t) * (1.0 - 2.0 * t); }
  static double Xpp(double t) { return 2.0 * (1.0 - 6.0 * t + 6.0 * t * t); }
  static double Xppp(double t) { return 24.0 * t - 12.0; }

  static double velocity(const stokeslps::Vec2& p, int comp) {
    return comp == 0 ? X(p.x) * Xp(p.y) : -Xp(p.x) * X(p.y);
  }
  static double pressure(const stokeslps::Vec2& p) { return p.x - 0.5; }

  /// d(velocity comp)/d(x_deriv); rows of the Jacobian.
  static double velocity_gradient(const stokeslps::Vec2& p, int comp,
                                  int deriv) {
    if (comp == 0) {
      return deriv == 0 ? Xp(p.x) * Xp(p.y) : X(p.x) * Xpp(p.y);
    }
    return deriv == 0 ? -Xpp(p.x) * X(p.y) : -Xp(p.x) * Xp(p.y);
  }

  static double forcing(const stokeslps::Vec2& p, int comp) {
    if (comp == 0) {
      return -(Xpp(p.x) * Xp(p.y) + X(p.x) * Xppp(p.y)) + 1.0;
    }
    return Xppp(p.x) * X(p.y) + Xp(p.x) * Xpp(p.y);
  }
};

}  // namespace oracles
