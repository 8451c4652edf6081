// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <random>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "doctest.h"
#include "oracles.hpp"
#include "stokeslps/errors.hpp"
#include "stokeslps/linsolve.hpp"

using namespace stokeslps;

namespace {

SparseMatrix to_sparse(const Eigen::MatrixXd& dense) {
  SparseMatrix out(dense.rows(), dense.cols());
  std::vector<Eigen::Triplet<double>> trips;
  for (Eigen::Index i = 0; i < dense.rows(); ++i) {
    for (Eigen::Index j = 0; j < dense.cols(); ++j) {
      if (dense(i, j) != 0.0) trips.emplace_back(i, j, dense(i, j));
    }
  }
  out.setFromTriplets(trips.begin(), trips.end());
  out.makeCompressed();
  return out;
}

std::vector<std::vector<double>> to_rows(const Eigen::MatrixXd& dense) {
  std::vector<std::vector<double>> rows(
      static_cast<std::size_t>(dense.rows()),
      std::vector<double>(static_cast<std::size_t>(dense.cols()), 0.0));
  for (Eigen::Index i = 0; i < dense.rows(); ++i) {
    for (Eigen::Index j = 0; j < dense.cols(); ++j) {
      rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
          dense(i, j);
    }
  }
  return rows;
}

}  // namespace

TEST_CASE("linsolve: identity and trivial cases") {
  Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(5, 5);
  Factorization lu(to_sparse(eye));
  CHECK(lu.dimension() == 5);
  Eigen::VectorXd b(5);
  b << 1, -2, 3, 0.5, 7;
  CHECK((lu.solve(b) - b).cwiseAbs().maxCoeff() == 0.0);
  CHECK(lu.solve(Eigen::VectorXd::Zero(5)).cwiseAbs().maxCoeff() == 0.0);
  CHECK(lu.factor_nonzeros() >= 5);

  SparseMatrix zero1(1, 1);
  zero1.makeCompressed();
  CHECK_THROWS_AS((void)Factorization(zero1), SingularMatrixError);

  SparseMatrix empty(0, 0);
  CHECK_THROWS_AS((void)Factorization(empty), InvalidArgumentError);

  CHECK_THROWS_AS((void)lu.solve(Eigen::VectorXd::Zero(4)),
                  InvalidArgumentError);
}

TEST_CASE("linsolve: singular matrices are detected") {
  // Rank-deficient 3x3 (two identical rows).
  Eigen::MatrixXd a(3, 3);
  a << 1, 2, 3, 1, 2, 3, 0, 1, 1;
  CHECK_THROWS_AS((void)Factorization(to_sparse(a)), SingularMatrixError);
}

TEST_CASE("linsolve: bordered SPD system matches the dense oracle") {
  std::mt19937 rng(2024u);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  const int n = 50;
  Eigen::MatrixXd r = Eigen::MatrixXd::NullaryExpr(
      n, n, [&](Eigen::Index, Eigen::Index) { return dist(rng); });
  Eigen::MatrixXd spd =
      r.transpose() * r + static_cast<double>(n) * Eigen::MatrixXd::Identity(n, n);

  // Saddle bordering with a constraint vector (indefinite overall).
  Eigen::MatrixXd bordered = Eigen::MatrixXd::Zero(n + 1, n + 1);
  bordered.topLeftCorner(n, n) = spd;
  for (int i = 0; i < n; ++i) {
    bordered(n, i) = 1.0 / n;
    bordered(i, n) = 1.0 / n;
  }

  Eigen::VectorXd rhs = Eigen::VectorXd::NullaryExpr(
      n + 1, [&](Eigen::Index) { return dist(rng); });
  Factorization lu(to_sparse(bordered));
  const Eigen::VectorXd x = lu.solve(rhs);

  std::vector<double> rhs_v(static_cast<std::size_t>(n + 1));
  for (int i = 0; i <= n; ++i) rhs_v[static_cast<std::size_t>(i)] = rhs[i];
  const std::vector<double> oracle =
      oracles::dense_solve(to_rows(bordered), rhs_v);
  double diff = 0.0, scale = 0.0;
  for (int i = 0; i <= n; ++i) {
    diff = std::max(diff, std::abs(x[i] - oracle[static_cast<std::size_t>(i)]));
    scale = std::max(scale, std::abs(oracle[static_cast<std::size_t>(i)]));
  }
  CHECK(diff <= 1e-10 * (1.0 + scale));
  CHECK((bordered * x - rhs).norm() <= 1e-10 * rhs.norm());
}

TEST_CASE("linsolve: round trip recovers a known solution") {
  std::mt19937 rng(99u);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  const int n = 30;
  Eigen::MatrixXd a = Eigen::MatrixXd::NullaryExpr(
      n, n, [&](Eigen::Index, Eigen::Index) { return 0.1 * dist(rng); });
  a.diagonal().array() += 3.0;  // well conditioned
  Eigen::VectorXd x_true = Eigen::VectorXd::NullaryExpr(
      n, [&](Eigen::Index) { return dist(rng); });
  Factorization lu(to_sparse(a));
  const Eigen::VectorXd x = lu.solve(a * x_true);
  CHECK((x - x_true).norm() <= 1e-10 * x_true.norm());

  // Second solve against the same factorization, different rhs.
  Eigen::VectorXd x2_true = Eigen::VectorXd::NullaryExpr(
      n, [&](Eigen::Index) { return dist(rng); });
  const Eigen::VectorXd x2 = lu.solve(a * x2_true);
  CHECK((x2 - x2_true).norm() <= 1e-10 * x2_true.norm());
}

TEST_CASE("linsolve: 100 random well-conditioned sparse systems") {
  std::mt19937 rng(7u);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::uniform_int_distribution<int> pick(0, 19);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 20;
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
      a(i, i) = 2.0 + dist(rng);  // diagonally dominant -> condition << 1e8
      for (int k = 0; k < 3; ++k) {
        const int j = pick(rng);
        if (j != i) a(i, j) += 0.2 * dist(rng);
      }
    }
    Eigen::VectorXd x_true = Eigen::VectorXd::NullaryExpr(
        n, [&](Eigen::Index) { return dist(rng); });
    Factorization lu = factorize(to_sparse(a));
    const Eigen::VectorXd x = lu.solve(a * x_true);
    CHECK((x - x_true).norm() <= 1e-9 * (1.0 + x_true.norm()));
  }
}

TEST_CASE("linsolve: concurrent solves against one factorization") {
  std::mt19937 rng(5u);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  const int n = 40;
  Eigen::MatrixXd a = Eigen::MatrixXd::NullaryExpr(
      n, n, [&](Eigen::Index, Eigen::Index) { return 0.05 * dist(rng); });
  a.diagonal().array() += 2.0;
  const SparseMatrix sp = to_sparse(a);
  Factorization lu(sp);

  std::vector<Eigen::VectorXd> rhs;
  std::vector<Eigen::VectorXd> expected;
  for (int k = 0; k < 8; ++k) {
    rhs.push_back(Eigen::VectorXd::NullaryExpr(
        n, [&](Eigen::Index) { return dist(rng); }));
    expected.push_back(lu.solve(rhs.back()));
  }
  std::vector<Eigen::VectorXd> results(8);
  std::vector<std::thread> workers;
  for (int t = 0; t < 4; ++t) {
    workers.emplace_back([&, t]() {
      for (int k = t; k < 8; k += 4) results[static_cast<std::size_t>(k)] = lu.solve(rhs[static_cast<std::size_t>(k)]);
    });
  }
  for (std::thread& w : workers) w.join();
  for (int k = 0; k < 8; ++k) {
    CHECK((results[static_cast<std::size_t>(k)] -
           expected[static_cast<std::size_t>(k)])
              .cwiseAbs()
              .maxCoeff() == 0.0);
  }
}
