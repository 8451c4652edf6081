// SPDX-License-Identifier: Apache-2.0
#include "stokeslps/postprocess.hpp"

#include <cmath>

#include "stokeslps/errors.hpp"

namespace stokeslps {

std::string to_string(const PostprocessMode& mode) {
  if (std::holds_alternative<TwoSpace>(mode)) return "two-space";
  return "two-grid(" + std::to_string(std::get<TwoGrid>(mode).extra_levels) +
         ")";
}

int twogrid_auto_levels(double h, int max_levels) {
  if (!(h > 0.0))
    throw InvalidArgumentError("twogrid_auto_levels: h must be positive");
  int levels = 1;
  while (std::ldexp(h, -levels) > h * h) ++levels;
  if (levels > max_levels)
    throw InvalidArgumentError(
        "twogrid_auto_levels: required depth " + std::to_string(levels) +
        " exceeds the configured maximum " + std::to_string(max_levels));
  return levels;
}

std::pair<FeFunction, FeFunction> solve_source_enriched(
    const BlockSystem& enriched_sys, const EigenPair& pair,
    double* source_residual) {
  const int nu = enriched_sys.n_velocity_dofs();
  const int np = enriched_sys.n_pressure_dofs();
  const int n = nu + np + 1;

  const Eigen::VectorXd rhs_full =
      assemble_source_rhs(enriched_sys, pair.u, pair.lambda);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  rhs.head(nu) = restrict_to_free(enriched_sys, rhs_full);

  const SparseMatrix k_aug = augmented_stiffness(enriched_sys);
  const Factorization lu = factorize(k_aug);
  const Eigen::VectorXd x = lu.solve(rhs);

  const double rhs_norm = rhs.norm();
  const double residual =
      rhs_norm > 0.0 ? (k_aug * x - rhs).norm() / rhs_norm : 0.0;
  if (source_residual) *source_residual = residual;

  Eigen::VectorXd p = x.segment(nu, np);
  // The bordered row already enforces a zero mean; remove roundoff.
  p -= enriched_sys.c.dot(p) * constant_pressure_coefficients(enriched_sys);
  return {make_velocity(enriched_sys, x.head(nu)),
          make_pressure(enriched_sys, p)};
}

PostprocessedPair postprocess_eigenpair(const BlockSystem& coarse_sys,
                                        const EigenPair& pair,
                                        const PostprocessMode& mode) {
  std::shared_ptr<const BlockSystem> enriched;
  if (const TwoGrid* tg = std::get_if<TwoGrid>(&mode)) {
    if (tg->extra_levels < 1)
      throw InvalidArgumentError(
          "postprocess_eigenpair: two-grid needs extra_levels >= 1");
    MeshPtr mesh = coarse_sys.mesh;
    for (int l = 0; l < tg->extra_levels; ++l) mesh = Mesh::refine_uniform(mesh);
    enriched = std::make_shared<const BlockSystem>(assemble_blocks(
        mesh, coarse_sys.element, coarse_sys.element, coarse_sys.projection,
        coarse_sys.alpha0, coarse_sys.scaling));
  } else {
    if (coarse_sys.element != ElementKind::P1 ||
        !coarse_sys.projection.is_zero())
      throw InvalidArgumentError(
          "postprocess_eigenpair: two-space enrichment starts from the "
          "P1/zero pair");
    enriched = std::make_shared<const BlockSystem>(assemble_blocks(
        coarse_sys.mesh, ElementKind::P2Bubble, ElementKind::P2Bubble,
        ProjectionKind::pdisc(1), coarse_sys.alpha0, coarse_sys.scaling));
  }

  PostprocessedPair out;
  out.mode = mode;
  auto [u_tilde, p_tilde] =
      solve_source_enriched(*enriched, pair, &out.source_residual);
  out.lambda_tilde = rayleigh_quotient(*enriched, u_tilde);
  out.u_tilde = std::move(u_tilde);
  out.p_tilde = std::move(p_tilde);
  out.enriched_system = std::move(enriched);
  return out;
}

ExpansionCheck expansion_check(const BlockSystem& sys, const EigenPair& pair,
                               const FeFunction& w, const FeFunction& psi) {
  const double r_ww = form_eval(sys, Form::R, w, w);
  if (!(r_ww > 0.0))
    throw InvalidArgumentError("expansion_check: w must be nonzero");
  if (!psi.space || psi.components != 1 ||
      psi.coeffs.size() != pair.p.coeffs.size())
    throw InvalidArgumentError(
        "expansion_check: psi must be a pressure on the pair's space");

  ExpansionCheck out;
  out.lambda_hat = form_eval(sys, Form::A, w, w) / r_ww;
  out.lhs = out.lambda_hat - pair.lambda;

  const FeFunction e{w.space, 2, w.coeffs - pair.u.coeffs};
  const FeFunction dp{psi.space, 1, pair.p.coeffs - psi.coeffs};
  const double r_psi =
      form_eval(sys, Form::B, w, psi) + form_eval(sys, Form::S, psi, psi);
  const double numerator =
      form_eval(sys, Form::A, e, e) - pair.lambda * form_eval(sys, Form::R, e, e) +
      2.0 * form_eval(sys, Form::B, e, dp) - form_eval(sys, Form::S, dp, dp) -
      form_eval(sys, Form::S, psi, psi) + 2.0 * r_psi;
  out.rhs = numerator / r_ww;
  out.defect = out.lhs - out.rhs;
  return out;
}

}  // namespace stokeslps
