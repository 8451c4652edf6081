// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include "stokeslps/assembly.hpp"
#include "stokeslps/eigensolver.hpp"
#include "stokeslps/linsolve.hpp"

namespace {

using namespace stokeslps;

void bm_assemble_p1(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  MeshPtr mesh = Mesh::unit_square(n);
  for (auto _ : state) {
    BlockSystem sys = assemble_blocks(mesh, ElementKind::P1, ElementKind::P1,
                                      ProjectionKind::zero(), 0.1);
    benchmark::DoNotOptimize(sys.A);
  }
}
BENCHMARK(bm_assemble_p1)->Arg(16)->Arg(32);

void bm_assemble_p2bubble(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  MeshPtr mesh = Mesh::unit_square(n);
  for (auto _ : state) {
    BlockSystem sys =
        assemble_blocks(mesh, ElementKind::P2Bubble, ElementKind::P2Bubble,
                        ProjectionKind::pdisc(1), 0.1);
    benchmark::DoNotOptimize(sys.A);
  }
}
BENCHMARK(bm_assemble_p2bubble)->Arg(8)->Arg(16);

void bm_factorize_augmented(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  MeshPtr mesh = Mesh::unit_square(n);
  BlockSystem sys = assemble_blocks(mesh, ElementKind::P1, ElementKind::P1,
                                    ProjectionKind::zero(), 0.1);
  const SparseMatrix k_aug = augmented_stiffness(sys);
  for (auto _ : state) {
    Factorization lu(k_aug);
    benchmark::DoNotOptimize(lu.factor_nonzeros());
  }
}
BENCHMARK(bm_factorize_augmented)->Arg(16)->Arg(32);

void bm_solve_augmented(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  MeshPtr mesh = Mesh::unit_square(n);
  BlockSystem sys = assemble_blocks(mesh, ElementKind::P1, ElementKind::P1,
                                    ProjectionKind::zero(), 0.1);
  const SparseMatrix k_aug = augmented_stiffness(sys);
  Factorization lu(k_aug);
  Eigen::VectorXd rhs = Eigen::VectorXd::Ones(k_aug.rows());
  for (auto _ : state) {
    Eigen::VectorXd x = lu.solve(rhs);
    benchmark::DoNotOptimize(x);
  }
}
BENCHMARK(bm_solve_augmented)->Arg(32);

void bm_eigensolve_p1(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  MeshPtr mesh = Mesh::unit_square(n);
  BlockSystem sys = assemble_blocks(mesh, ElementKind::P1, ElementKind::P1,
                                    ProjectionKind::zero(), 0.1);
  for (auto _ : state) {
    std::vector<EigenPair> pairs = solve_smallest(sys, 1, 1e-8);
    benchmark::DoNotOptimize(pairs.front().lambda);
  }
}
BENCHMARK(bm_eigensolve_p1)->Arg(8)->Arg(16);

}  // namespace

BENCHMARK_MAIN();
