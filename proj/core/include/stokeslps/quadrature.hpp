// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <vector>

namespace stokeslps {

struct QuadraturePoint {
  std::array<double, 3> bary;
  double weight;
};

/// Symmetric quadrature rule on the reference triangle
/// {(x,y) : x,y >= 0, x+y <= 1}. Weights are positive and sum to the
/// reference measure 1/2; points lie in the closed triangle.
struct QuadratureRule {
  int exactness_degree;
  std::vector<QuadraturePoint> points;
};

/// Smallest stored rule that integrates every bivariate monomial of total
/// degree <= `degree` exactly. Supported range 0..8; larger degrees throw
/// UnsupportedDegreeError, negative ones InvalidArgumentError.
const QuadratureRule& rule_for_degree(int degree);

/// Default exactness for all assembly: bubble-enriched stiffness/mass
/// integrands reach total degree 8.
inline constexpr int kAssemblyQuadratureDegree = 8;

}  // namespace stokeslps
