// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <memory>

#include <Eigen/SparseCore>

namespace stokeslps {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Reusable pivoted sparse LU factorization of a square matrix, suitable for
/// the indefinite bordered saddle-point systems assembled by this library.
/// Construction throws SingularMatrixError when the matrix is exactly
/// singular or a pivot falls below 1e-14 times the largest matrix entry.
class Factorization {
 public:
  explicit Factorization(const SparseMatrix& a);

  int dimension() const;
  /// Fill statistic: nonzeros of the computed L and U factors.
  std::int64_t factor_nonzeros() const;

  /// Solves A x = b. Repeated solves are independent; concurrent solves on
  /// one factorization are safe (serialized internally).
  Eigen::VectorXd solve(const Eigen::VectorXd& b) const;

 private:
  struct Impl;
  std::shared_ptr<Impl> impl_;
};

Factorization factorize(const SparseMatrix& a);

}  // namespace stokeslps
