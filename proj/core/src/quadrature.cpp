// SPDX-License-Identifier: Apache-2.0
#include "stokeslps/quadrature.hpp"

#include "stokeslps/errors.hpp"

namespace stokeslps {

namespace {

void push_orbit3(QuadratureRule& r, double a, double b, double w) {
  // S3 orbit of the barycentric class (a, a, b).
  r.points.push_back({{a, a, b}, w});
  r.points.push_back({{a, b, a}, w});
  r.points.push_back({{b, a, a}, w});
}

void push_orbit6(QuadratureRule& r, double a, double b, double c, double w) {
  r.points.push_back({{a, b, c}, w});
  r.points.push_back({{a, c, b}, w});
  r.points.push_back({{b, a, c}, w});
  r.points.push_back({{b, c, a}, w});
  r.points.push_back({{c, a, b}, w});
  r.points.push_back({{c, b, a}, w});
}

QuadratureRule make_centroid() {
  QuadratureRule r{1, {}};
  r.points.push_back({{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}, 0.5});
  return r;
}

QuadratureRule make_midedge() {
  QuadratureRule r{2, {}};
  push_orbit3(r, 0.5, 0.0, 1.0 / 6.0);
  return r;
}

// 7-point rule; interior coordinates (6 -+ sqrt(15))/21 with weights
// (155 -+ sqrt(15))/2400, centroid weight 9/80. Literals evaluated from the
// closed forms in 60-digit arithmetic.
QuadratureRule make_degree5() {
  QuadratureRule r{5, {}};
  r.points.push_back({{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}, 0.1125});
  push_orbit3(r, 0.1012865073234563388, 0.7974269853530873224,
              0.06296959027241357630);
  push_orbit3(r, 0.4701420641051150898, 0.05971587178976982046,
              0.06619707639425309037);
  return r;
}

// 16-point rule (one centroid, three 3-orbits, one 6-orbit). Coefficients
// re-derived by Gauss-Newton refinement of the published structure at 60
// digits; moment residual of the frozen values is below 1e-17.
QuadratureRule make_degree8() {
  QuadratureRule r{8, {}};
  r.points.push_back(
      {{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}, 0.07215780383889358413});
  push_orbit3(r, 0.4592925882927231560, 0.08141482341455368794,
              0.04754581713364231240);
  push_orbit3(r, 0.1705693077517602066, 0.6588613844964795868,
              0.05160868526735912514);
  push_orbit3(r, 0.05054722831703097546, 0.8989055433659380491,
              0.01622924881159904016);
  push_orbit6(r, 0.2631128296346381134, 0.008394777409957605337,
              0.7284923929554042812, 0.01361515708721749713);
  return r;
}

}  // namespace

const QuadratureRule& rule_for_degree(int degree) {
  static const QuadratureRule centroid = make_centroid();
  static const QuadratureRule midedge = make_midedge();
  static const QuadratureRule degree5 = make_degree5();
  static const QuadratureRule degree8 = make_degree8();
  if (degree < 0)
    throw InvalidArgumentError("rule_for_degree: negative degree");
  if (degree <= 1) return centroid;
  if (degree == 2) return midedge;
  if (degree <= 5) return degree5;
  if (degree <= 8) return degree8;
  throw UnsupportedDegreeError(
      "rule_for_degree: no stored rule beyond degree 8");
}

}  // namespace stokeslps
