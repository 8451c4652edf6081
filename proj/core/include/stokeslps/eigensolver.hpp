// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "stokeslps/assembly.hpp"
#include "stokeslps/linsolve.hpp"

namespace stokeslps {

/// One eigenpair of the discrete problem, normalized to r(u,u) = 1, zero
/// pressure mean, and the largest-magnitude velocity coefficient positive.
struct EigenPair {
  double lambda = 0.0;
  FeFunction u;            ///< velocity, zero on the boundary
  FeFunction p;            ///< pressure
  double residual = 0.0;   ///< relative augmented-pencil residual
  int index = 0;           ///< 0-based position in the ascending spectrum
};

struct EigensolverOptions {
  int count = 1;
  double tol = 1e-10;
  int max_sweeps = 200;
  int subspace = 0;             ///< 0 = automatic (count plus guard vectors)
  unsigned seed = 0x5eed5eedu;  ///< deterministic start-block seed
};

/// Bordered pencil K x = lambda MM x with x = (u, p, mu):
/// K = [[A, -B^T, 0], [B, S, c], [0, c^T, 0]], MM = blockdiag(M, 0, 0).
/// The multiplier mu pins the pressure constant that K and MM share as a
/// joint null vector; true eigenvectors have mu = 0.
SparseMatrix augmented_stiffness(const BlockSystem& sys);
SparseMatrix augmented_mass(const BlockSystem& sys);

/// Stacks a velocity/pressure pair into pencil layout with mu = 0.
Eigen::VectorXd pack_augmented(const BlockSystem& sys, const FeFunction& u,
                               const FeFunction& p);

/// Smallest finite eigenpairs, ascending, via shift-invert (at zero)
/// subspace iteration with Rayleigh-Ritz in the MM-semi-inner product.
/// Infinite eigenvalues from the singular mass block map to zero of the
/// inverted operator and are filtered out. Throws ConvergenceError (with
/// the best residual reached) when max_sweeps is exhausted.
std::vector<EigenPair> solve_smallest(const BlockSystem& sys,
                                      const EigensolverOptions& options = {});
std::vector<EigenPair> solve_smallest(const BlockSystem& sys, int count,
                                      double tol, int max_sweeps = 200);

/// || K x - lambda MM x ||_2 / || MM x ||_2 on the augmented system.
double eig_residual(const BlockSystem& sys, const EigenPair& pair);

/// a(u,u) / r(u,u).
double rayleigh_quotient(const BlockSystem& sys, const FeFunction& u);

/// Global inf-sup diagnostic: the smallest singular value of the block
/// operator [[A, -B^T], [B, S]] whitened on both sides by the triple-norm
/// matrix blockdiag(A, M_p + S), restricted to zero-mean pressures. Dense
/// computation intended for diagnostic mesh sizes.
double infsup_global(const BlockSystem& sys);

}  // namespace stokeslps
