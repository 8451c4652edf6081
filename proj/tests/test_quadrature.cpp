// SPDX-License-Identifier: Apache-2.0
#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "stokeslps/errors.hpp"
#include "stokeslps/mesh.hpp"
#include "stokeslps/quadrature.hpp"

using namespace stokeslps;

namespace {

// Integrates x^a y^b over the reference triangle with the given rule (the
// second barycentric coordinate is x, the third is y).
double integrate_monomial(const QuadratureRule& rule, int a, int b) {
  double sum = 0.0;
  for (const QuadraturePoint& qp : rule.points) {
    sum += qp.weight * std::pow(qp.bary[1], a) * std::pow(qp.bary[2], b);
  }
  return sum;
}

}  // namespace

TEST_CASE("quadrature: closed-form spot checks") {
  const QuadratureRule& rule = rule_for_degree(8);
  CHECK(integrate_monomial(rule, 0, 0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(integrate_monomial(rule, 1, 0) ==
        doctest::Approx(1.0 / 6.0).epsilon(1e-14));
  CHECK(integrate_monomial(rule, 1, 1) ==
        doctest::Approx(1.0 / 24.0).epsilon(1e-14));
  CHECK(integrate_monomial(rule, 2, 3) ==
        doctest::Approx(1.0 / 420.0).epsilon(1e-14));
}

TEST_CASE("quadrature: exactness sweep against the factorial formula") {
  for (int degree = 0; degree <= 8; ++degree) {
    const QuadratureRule& rule = rule_for_degree(degree);
    CHECK(rule.exactness_degree >= degree);
    for (int a = 0; a + 0 <= degree; ++a) {
      for (int b = 0; a + b <= degree; ++b) {
        const double computed = integrate_monomial(rule, a, b);
        const double exact = oracles::monomial_integral(a, b);
        CHECK(std::abs(computed - exact) <= 1e-14);
      }
    }
  }
}

TEST_CASE("quadrature: weights positive, points inside, weights sum to 1/2") {
  for (int degree : {0, 1, 2, 3, 5, 8}) {
    const QuadratureRule& rule = rule_for_degree(degree);
    double total = 0.0;
    for (const QuadraturePoint& qp : rule.points) {
      CHECK(qp.weight > 0.0);
      for (double coord : qp.bary) {
        CHECK(coord >= -1e-15);
        CHECK(coord <= 1.0 + 1e-15);
      }
      CHECK(qp.bary[0] + qp.bary[1] + qp.bary[2] ==
            doctest::Approx(1.0).epsilon(1e-15));
      total += qp.weight;
    }
    CHECK(total == doctest::Approx(0.5).epsilon(1e-15));
  }
}

TEST_CASE("quadrature: affine constant integration recovers cell areas") {
  MeshPtr mesh = Mesh::unit_square(3);
  const QuadratureRule& rule = rule_for_degree(kAssemblyQuadratureDegree);
  for (int c = 0; c < mesh->n_cells(); ++c) {
    double area = 0.0;
    for (const QuadraturePoint& qp : rule.points) {
      area += qp.weight * 2.0 * mesh->cell_area(c);
    }
    CHECK(area == doctest::Approx(mesh->cell_area(c)).epsilon(1e-14));
  }
}

TEST_CASE("quadrature: unsupported degrees are rejected") {
  CHECK_THROWS_AS((void)rule_for_degree(9), UnsupportedDegreeError);
  CHECK_THROWS_AS((void)rule_for_degree(100), UnsupportedDegreeError);
  CHECK_THROWS_AS((void)rule_for_degree(-1), InvalidArgumentError);
}
