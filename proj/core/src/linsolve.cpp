// SPDX-License-Identifier: Apache-2.0
#include "stokeslps/linsolve.hpp"

#include <array>
#include <cmath>
#include <mutex>
#include <string>

#include <umfpack.h>

#include "stokeslps/errors.hpp"

namespace stokeslps {

struct Factorization::Impl {
  Eigen::SparseMatrix<double> a;  // compressed-column copy for UMFPACK
  void* numeric = nullptr;
  std::array<double, UMFPACK_CONTROL> control{};
  std::int64_t factor_nnz = 0;
  mutable std::mutex solve_mutex;

  ~Impl() {
    if (numeric) umfpack_di_free_numeric(&numeric);
  }
};

Factorization::Factorization(const SparseMatrix& a_row)
    : impl_(std::make_shared<Impl>()) {
  if (a_row.rows() != a_row.cols())
    throw InvalidArgumentError("factorize: matrix must be square");
  if (a_row.rows() == 0)
    throw InvalidArgumentError("factorize: empty matrix");

  Impl& impl = *impl_;
  impl.a = a_row;  // row-major -> column-major conversion copy
  impl.a.makeCompressed();
  if (impl.a.nonZeros() == 0)
    throw SingularMatrixError("factorize: matrix has no stored entries");
  const int n = static_cast<int>(impl.a.rows());
  const int* ap = impl.a.outerIndexPtr();
  const int* ai = impl.a.innerIndexPtr();
  const double* ax = impl.a.valuePtr();

  umfpack_di_defaults(impl.control.data());
  std::array<double, UMFPACK_INFO> info{};

  void* symbolic = nullptr;
  int status = umfpack_di_symbolic(n, n, ap, ai, ax, &symbolic,
                                   impl.control.data(), info.data());
  if (status != UMFPACK_OK) {
    if (symbolic) umfpack_di_free_symbolic(&symbolic);
    throw InternalError("factorize: symbolic analysis failed (status " +
                        std::to_string(status) + ")");
  }
  status = umfpack_di_numeric(ap, ai, ax, symbolic, &impl.numeric,
                              impl.control.data(), info.data());
  umfpack_di_free_symbolic(&symbolic);
  if (status == UMFPACK_WARNING_singular_matrix)
    throw SingularMatrixError("factorize: matrix is singular");
  if (status != UMFPACK_OK)
    throw InternalError("factorize: numeric factorization failed (status " +
                        std::to_string(status) + ")");

  double a_max = 0.0;
  for (Eigen::Index k = 0; k < impl.a.nonZeros(); ++k)
    a_max = std::max(a_max, std::abs(ax[k]));
  const double u_min = info[UMFPACK_UMIN];
  if (!(std::abs(u_min) > 1e-14 * a_max))
    throw SingularMatrixError(
        "factorize: matrix is numerically singular (smallest pivot " +
        std::to_string(u_min) + ")");
  impl.factor_nnz = static_cast<std::int64_t>(info[UMFPACK_LNZ]) +
                    static_cast<std::int64_t>(info[UMFPACK_UNZ]);
}

int Factorization::dimension() const {
  return static_cast<int>(impl_->a.rows());
}

std::int64_t Factorization::factor_nonzeros() const {
  return impl_->factor_nnz;
}

Eigen::VectorXd Factorization::solve(const Eigen::VectorXd& b) const {
  const Impl& impl = *impl_;
  if (b.size() != impl.a.rows())
    throw InvalidArgumentError("solve: dimension mismatch");
  Eigen::VectorXd x(b.size());
  std::array<double, UMFPACK_INFO> info{};
  std::lock_guard<std::mutex> lock(impl.solve_mutex);
  const int status = umfpack_di_solve(
      UMFPACK_A, impl.a.outerIndexPtr(), impl.a.innerIndexPtr(),
      impl.a.valuePtr(), x.data(), b.data(), impl.numeric,
      impl.control.data(), info.data());
  if (status != UMFPACK_OK)
    throw InternalError("solve: backsubstitution failed (status " +
                        std::to_string(status) + ")");
  if (!x.allFinite())
    throw SingularMatrixError("solve: solution is not finite");
  return x;
}

Factorization factorize(const SparseMatrix& a) { return Factorization(a); }

}  // namespace stokeslps
